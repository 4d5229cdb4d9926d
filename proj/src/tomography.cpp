#include "dephasim/tomography.hpp"

#include <algorithm>
#include <cmath>

#include <boost/random/poisson_distribution.hpp>

#include "dephasim/errors.hpp"

namespace dephasim::tomography {

std::string_view projector_name(Projector k) {
    switch (k) {
        case Projector::H: return "H";
        case Projector::V: return "V";
        case Projector::Plus: return "+";
        case Projector::L: return "L";
    }
    return "?";
}

Matrix2c projector_matrix(Projector k) {
    Eigen::Vector2cd v;
    switch (k) {
        case Projector::H: v = basis::h(); break;
        case Projector::V: v = basis::v(); break;
        case Projector::Plus: v = basis::plus(); break;
        case Projector::L: v = basis::left(); break;
    }
    return v * v.adjoint();
}

TomographyCounts expected_counts(const DensityMatrix& state, double baseline) {
    if (!(baseline > 0.0) || !std::isfinite(baseline)) throw ParameterError("tomography: baseline must be > 0");
    TomographyCounts out;
    out.baseline = baseline;
    for (Projector k : kProjectors) {
        const double prob = (projector_matrix(k) * state.matrix()).trace().real();
        out.counts[static_cast<std::size_t>(k)] = baseline * std::clamp(prob, 0.0, 1.0);
    }
    return out;
}

TomographyCounts simulate_tomography_counts(const DensityMatrix& state, double baseline, Engine& rng) {
    TomographyCounts out = expected_counts(state, baseline);
    for (double& c : out.counts) {
        if (c <= 0.0) {
            c = 0.0;
            continue;
        }
        boost::random::poisson_distribution<std::int64_t, double> poisson(c);
        c = static_cast<double>(poisson(rng));
    }
    return out;
}

DensityMatrix project_to_physical(const Matrix2c& rho_raw) {
    const auto check = check_physical(rho_raw, 1e-9, 0.0);
    if (!check.hermitian || !check.unit_trace) {
        throw ParameterError("project_to_physical: input must be Hermitian with unit trace");
    }
    if (check.positive) return DensityMatrix::from_matrix(rho_raw);
    Eigen::SelfAdjointEigenSolver<Matrix2c> eig(rho_raw);
    Eigen::Vector2d vals = eig.eigenvalues().cwiseMax(0.0);
    vals /= vals.sum();
    const Matrix2c fixed = eig.eigenvectors() * vals.cast<Complex>().asDiagonal() * eig.eigenvectors().adjoint();
    Matrix2c herm = 0.5 * (fixed + fixed.adjoint());
    herm /= herm.trace().real();
    return DensityMatrix::from_matrix(herm);
}

namespace {

struct Stokes {
    double x, y, z, total;
};

Stokes stokes_from(const TomographyCounts& c) {
    for (double v : c.counts) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw ParameterError("tomography: counts must be finite and >= 0");
    }
    const double total = c[Projector::H] + c[Projector::V];
    if (!(total > 0.0)) throw EstimationError("tomography: zero H+V counts");
    return {2.0 * c[Projector::Plus] / total - 1.0, 2.0 * c[Projector::L] / total - 1.0,
            (c[Projector::H] - c[Projector::V]) / total, total};
}

}  // namespace

Matrix2c linear_inversion_raw(const TomographyCounts& counts) {
    const Stokes s = stokes_from(counts);
    return 0.5 * (pauli::identity() + s.x * pauli::x() + s.y * pauli::y() + s.z * pauli::z());
}

DensityMatrix reconstruct_linear_inversion(const TomographyCounts& counts) {
    return project_to_physical(linear_inversion_raw(counts));
}

std::array<double, 3> stokes_stderr(const TomographyCounts& counts) {
    const Stokes s = stokes_from(counts);
    const double t = s.total;
    const double h = counts[Projector::H];
    const double v = counts[Projector::V];
    // s = 2n/T - 1 with independent Poisson n and T: Var = 4n/T^2 + 4n^2/T^3.
    auto transverse = [t](double n) { return std::sqrt(4.0 * n / (t * t) + 4.0 * n * n / (t * t * t)); };
    // s_z = (H - V)/T: d/dH = 2V/T^2, d/dV = -2H/T^2.
    const double sz = std::sqrt(4.0 * (v * v * h + h * h * v)) / (t * t);
    return {transverse(counts[Projector::Plus]), transverse(counts[Projector::L]), sz};
}

}  // namespace dephasim::tomography
