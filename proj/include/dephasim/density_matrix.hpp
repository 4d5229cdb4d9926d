#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dephasim {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;

namespace pauli {
Matrix2c identity();
Matrix2c x();
Matrix2c y();
Matrix2c z();
}  // namespace pauli

inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

/// Result of checking a 2x2 matrix against the density-matrix axioms.
struct PhysicalityCheck {
    bool hermitian = false;
    bool unit_trace = false;
    bool positive = false;
    double min_eigenvalue = 0.0;

    [[nodiscard]] bool ok() const noexcept { return hermitian && unit_trace && positive; }
};

PhysicalityCheck check_physical(const Matrix2c& m, double trace_tol = kTraceTolerance,
                                double eig_tol = kPositivityTolerance);

/// Qubit state in the {H, V} (= {0, 1}) basis. Construction through the
/// checked factories guarantees Hermiticity, unit trace and positivity.
class DensityMatrix {
public:
    /// Maximally mixed state.
    DensityMatrix();

    /// Throws ParameterError when `m` is not a physical state.
    static DensityMatrix from_matrix(const Matrix2c& m);
    /// rho = (I + r . sigma) / 2; throws ParameterError when |r| > 1.
    static DensityMatrix from_bloch(const Eigen::Vector3d& r);
    static DensityMatrix pure(const Eigen::Vector2cd& psi);

    [[nodiscard]] const Matrix2c& matrix() const noexcept { return m_; }
    [[nodiscard]] Complex operator()(int row, int col) const { return m_(row, col); }
    /// <H|rho|V>.
    [[nodiscard]] Complex coherence() const { return m_(0, 1); }
    [[nodiscard]] Eigen::Vector3d bloch() const;
    [[nodiscard]] double purity() const;

private:
    explicit DensityMatrix(const Matrix2c& m) : m_(m) {}
    Matrix2c m_;
};

namespace basis {
Eigen::Vector2cd h();
Eigen::Vector2cd v();
Eigen::Vector2cd plus();
Eigen::Vector2cd left();
}  // namespace basis

}  // namespace dephasim
