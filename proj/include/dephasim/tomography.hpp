#pragma once

#include <array>
#include <cstddef>
#include <string_view>

#include "dephasim/density_matrix.hpp"
#include "dephasim/rng.hpp"

namespace dephasim::tomography {

/// Measurement order used throughout: H, V, +, L.
enum class Projector : std::size_t { H = 0, V = 1, Plus = 2, L = 3 };

inline constexpr std::array<Projector, 4> kProjectors{Projector::H, Projector::V, Projector::Plus, Projector::L};

std::string_view projector_name(Projector k);
Matrix2c projector_matrix(Projector k);

struct TomographyCounts {
    /// Indexed by Projector. Simulated counts are integral; exact expectation
    /// values are allowed for noiseless round trips.
    std::array<double, 4> counts{};
    double baseline = 0.0;

    [[nodiscard]] double operator[](Projector k) const { return counts[static_cast<std::size_t>(k)]; }
};

/// baseline * Tr(Pi_k rho) for every projector.
TomographyCounts expected_counts(const DensityMatrix& state, double baseline);

/// Independent Poisson draw per projector with mean baseline * Tr(Pi_k rho).
TomographyCounts simulate_tomography_counts(const DensityMatrix& state, double baseline, Engine& rng);

/// Clip negative eigenvalues and renormalize. Input must be Hermitian with unit trace.
DensityMatrix project_to_physical(const Matrix2c& rho_raw);

/// Stokes-parameter linear inversion followed by physicality repair.
DensityMatrix reconstruct_linear_inversion(const TomographyCounts& counts);

/// Unrepaired estimate (I + s . sigma) / 2.
Matrix2c linear_inversion_raw(const TomographyCounts& counts);

/// Delta-method Poisson standard errors of (s_x, s_y, s_z).
std::array<double, 3> stokes_stderr(const TomographyCounts& counts);

}  // namespace dephasim::tomography
