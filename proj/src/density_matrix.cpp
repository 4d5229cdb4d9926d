#include "dephasim/density_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dephasim/errors.hpp"

namespace dephasim {

namespace pauli {
Matrix2c identity() { return Matrix2c::Identity(); }
Matrix2c x() {
    Matrix2c m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}
Matrix2c y() {
    Matrix2c m;
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}
Matrix2c z() {
    Matrix2c m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}
}  // namespace pauli

namespace basis {
Eigen::Vector2cd h() { return {1.0, 0.0}; }
Eigen::Vector2cd v() { return {0.0, 1.0}; }
Eigen::Vector2cd plus() { return Eigen::Vector2cd(1.0, 1.0) / std::sqrt(2.0); }
Eigen::Vector2cd left() { return Eigen::Vector2cd(Complex(1.0, 0.0), Complex(0.0, 1.0)) / std::sqrt(2.0); }
}  // namespace basis

PhysicalityCheck check_physical(const Matrix2c& m, double trace_tol, double eig_tol) {
    PhysicalityCheck c;
    if (!m.allFinite()) return c;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    c.hermitian = (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
    c.unit_trace = std::abs(m.trace() - Complex(1.0, 0.0)) <= trace_tol;
    if (c.hermitian) {
        // Eigenvalues of a 2x2 Hermitian matrix in closed form.
        const double a = m(0, 0).real();
        const double d = m(1, 1).real();
        const double off = std::abs(m(0, 1));
        const double half_gap = std::hypot(0.5 * (a - d), off);
        c.min_eigenvalue = 0.5 * (a + d) - half_gap;
        c.positive = c.min_eigenvalue >= -eig_tol;
    }
    return c;
}

DensityMatrix::DensityMatrix() : m_(0.5 * Matrix2c::Identity()) {}

DensityMatrix DensityMatrix::from_matrix(const Matrix2c& m) {
    const auto c = check_physical(m);
    if (!c.hermitian) throw ParameterError("density matrix: not Hermitian");
    if (!c.unit_trace) throw ParameterError("density matrix: trace differs from 1");
    if (!c.positive) {
        throw ParameterError("density matrix: negative eigenvalue " + std::to_string(c.min_eigenvalue));
    }
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::from_bloch(const Eigen::Vector3d& r) {
    if (!r.allFinite() || r.norm() > 1.0 + kPositivityTolerance) {
        throw ParameterError("density matrix: Bloch vector outside the unit ball");
    }
    const Matrix2c m = 0.5 * (pauli::identity() + r.x() * pauli::x() + r.y() * pauli::y() + r.z() * pauli::z());
    return DensityMatrix(m);
}

DensityMatrix DensityMatrix::pure(const Eigen::Vector2cd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0.0)) throw ParameterError("density matrix: zero state vector");
    const Eigen::Vector2cd u = psi / norm;
    return DensityMatrix(u * u.adjoint());
}

Eigen::Vector3d DensityMatrix::bloch() const {
    // Tr(rho sigma_i) for Hermitian rho.
    return {2.0 * m_(0, 1).real(), -2.0 * m_(0, 1).imag(), (m_(0, 0) - m_(1, 1)).real()};
}

double DensityMatrix::purity() const { return (m_ * m_).trace().real(); }

}  // namespace dephasim
