#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "dephasim/channel.hpp"
#include "dephasim/ensemble.hpp"
#include "dephasim/errors.hpp"
#include "oracles.hpp"

using namespace dephasim;
using namespace dephasim::channel;
using stochastic::ProcessKind;
using stochastic::ProcessSpec;
using stochastic::RtnInitial;
using stochastic::TimeGrid;

namespace {

std::vector<stochastic::PhasePath> phase_ensemble(const ProcessSpec& spec, const TimeGrid& grid, std::uint64_t seed,
                                                  std::size_t n) {
    std::vector<stochastic::PhasePath> out;
    for (std::size_t r = 0; r < n; ++r) {
        out.push_back(stochastic::accumulate_phase(stochastic::sample_path(spec, grid, {seed}, r), grid));
    }
    return out;
}

}  // namespace

TEST(DensityMatrix, FactoriesEnforceAxioms) {
    Matrix2c bad;
    bad << 0.5, 0.1, 0.2, 0.5;
    EXPECT_THROW(DensityMatrix::from_matrix(bad), ParameterError);
    bad << 0.6, 0.0, 0.0, 0.6;
    EXPECT_THROW(DensityMatrix::from_matrix(bad), ParameterError);
    bad << 1.2, 0.0, 0.0, -0.2;
    EXPECT_THROW(DensityMatrix::from_matrix(bad), ParameterError);
    EXPECT_THROW(DensityMatrix::from_bloch({0.0, 0.0, 1.01}), ParameterError);
    EXPECT_THROW(DensityMatrix::pure({0.0, 0.0}), ParameterError);
}

TEST(DensityMatrix, BlochAndPurity) {
    const DensityMatrix mixed;
    EXPECT_DOUBLE_EQ(mixed.purity(), 0.5);
    EXPECT_NEAR(mixed.bloch().norm(), 0.0, 1e-15);

    const auto plus = DensityMatrix::pure(basis::plus());
    EXPECT_NEAR((plus.bloch() - Eigen::Vector3d(1, 0, 0)).norm(), 0.0, 1e-15);
    EXPECT_NEAR(plus.purity(), 1.0, 1e-15);
    const auto left = DensityMatrix::pure(basis::left());
    EXPECT_NEAR((left.bloch() - Eigen::Vector3d(0, 1, 0)).norm(), 0.0, 1e-15);
    const auto h = DensityMatrix::pure(basis::h());
    EXPECT_NEAR((h.bloch() - Eigen::Vector3d(0, 0, 1)).norm(), 0.0, 1e-15);

    const Eigen::Vector3d r(0.3, -0.2, 0.5);
    EXPECT_NEAR((DensityMatrix::from_bloch(r).bloch() - r).norm(), 0.0, 1e-15);
}

TEST(EnsembleCoherence, Examples) {
    const std::vector<double> zeros(7, 0.0);
    EXPECT_EQ(ensemble_coherence(zeros), Complex(1.0, 0.0));

    const std::vector<double> pair{std::numbers::pi / 4, -std::numbers::pi / 4};
    const Complex c = ensemble_coherence(pair);
    EXPECT_NEAR(c.real(), 0.0, 1e-15);
    EXPECT_EQ(c.imag(), 0.0);

    EXPECT_THROW(ensemble_coherence(std::span<const double>{}), ParameterError);
    EXPECT_THROW(ensemble_coherence(std::span<const stochastic::PhasePath>{}, 0), ParameterError);
}

TEST(EnsembleCoherence, StaticBalancedNoiseGivesCosine) {
    const TimeGrid grid{0.001, 3000};
    const auto phases = phase_ensemble({ProcessKind::RTN, 0.0, RtnInitial::ForcedBalanced}, grid, 4, 100);
    for (std::size_t k = 0; k < grid.n_points(); k += 7) {
        const Complex c = ensemble_coherence(phases, k);
        ASSERT_NEAR(c.real(), std::cos(2.0 * grid.time(k)), 1e-12);
        ASSERT_EQ(c.imag(), 0.0);
    }
    EXPECT_THROW(ensemble_coherence(phases, grid.n_points()), ParameterError);
}

TEST(EnsembleCoherence, ModulusOneOnlyForPhasesEqualModPi) {
    const std::vector<double> same_mod_pi{0.3, 0.3 + std::numbers::pi, 0.3 - 2 * std::numbers::pi};
    EXPECT_NEAR(std::abs(ensemble_coherence(same_mod_pi)), 1.0, 1e-15);
    const std::vector<double> different{0.3, 0.31};
    EXPECT_LT(std::abs(ensemble_coherence(different)), 1.0);
}

TEST(WeightedCoherence, LengthMismatchRejected) {
    const std::vector<double> w{0.5, 0.5};
    const std::vector<double> p{0.0};
    EXPECT_THROW(weighted_coherence(w, p), ParameterError);
}

TEST(DephasingState, Examples) {
    const auto plus = dephasing_state({1.0, 0.0}, 1.0);
    EXPECT_NEAR((plus.matrix() - DensityMatrix::pure(basis::plus()).matrix()).norm(), 0.0, 1e-15);
    EXPECT_EQ(plus(0, 1), Complex(0.5, 0.0));

    const auto mixed = dephasing_state({0.3, -0.7}, 0.0);
    EXPECT_EQ(mixed.matrix(), DensityMatrix().matrix());

    const auto quarter = dephasing_state({std::cos(2.0 * std::numbers::pi / 4), 0.0}, 0.88);
    EXPECT_NEAR(std::abs(quarter.coherence()), 0.0, 1e-16);

    EXPECT_THROW(dephasing_state({1.0, 0.1}, 1.0), ParameterError);
    EXPECT_THROW(dephasing_state({0.5, 0.0}, 1.2), ParameterError);
    EXPECT_THROW(dephasing_state({0.5, 0.0}, -0.1), ParameterError);
}

TEST(DephasingState, AlwaysPhysical) {
    Engine rng(8);
    for (int i = 0; i < 2000; ++i) {
        const double mod = static_cast<double>(rng() >> 11) * 0x1p-53;
        const double arg = static_cast<double>(rng() >> 11) * 0x1p-53 * 2.0 * std::numbers::pi;
        const double p = static_cast<double>(rng() >> 11) * 0x1p-53;
        const auto rho = dephasing_state(std::polar(mod, arg), p);
        const auto check = check_physical(rho.matrix());
        ASSERT_TRUE(check.ok());
        ASSERT_EQ(rho(0, 0), Complex(0.5, 0.0));
        ASSERT_EQ(rho(1, 1), Complex(0.5, 0.0));
    }
}

TEST(AnalyticRtn, ExamplesAndErrors) {
    for (double t : {0.0, 0.3, 1.7, 5.0}) EXPECT_DOUBLE_EQ(analytic_rtn_coherence(0.0, t), std::cos(2.0 * t));
    for (double g : {0.1, 1.0, 2.0, 2.5, 40.0}) EXPECT_DOUBLE_EQ(analytic_rtn_coherence(g, 0.0), 1.0);
    EXPECT_THROW(analytic_rtn_coherence(-1.0, 1.0), ParameterError);
    EXPECT_THROW(analytic_rtn_coherence(1.0, -1.0), ParameterError);
}

TEST(AnalyticRtn, CriticalRateIsContinuous) {
    for (double t : {0.1, 1.0, 3.0, 10.0}) {
        const double critical = std::exp(-2.0 * t) * (1.0 + 2.0 * t);
        EXPECT_NEAR(analytic_rtn_coherence(2.0, t), critical, 1e-14);
        EXPECT_NEAR(analytic_rtn_coherence(2.0 - 1e-9, t), critical, 1e-8);
        EXPECT_NEAR(analytic_rtn_coherence(2.0 + 1e-9, t), critical, 1e-8);
    }
}

TEST(AnalyticRtn, LargeRateStaysFinite) {
    const double v = analytic_rtn_coherence(200.0, 50.0);
    EXPECT_TRUE(std::isfinite(v));
    EXPECT_GT(v, 0.0);
    // Motional narrowing: exp(-2t/gamma) to leading order.
    EXPECT_NEAR(std::log(v), -2.0 * 50.0 / 200.0, 1e-3);
}

TEST(AnalyticRtn, SolvesTheSecondOrderEquation) {
    // C'' + 2 gamma C' + 4 C = 0, C(0) = 1, C'(0) = 0.
    const double h = 1e-4;
    for (double g : {0.1, 1.0, 2.5}) {
        for (double t : {0.5, 1.3, 4.0}) {
            const double c0 = analytic_rtn_coherence(g, t);
            const double cp = analytic_rtn_coherence(g, t + h);
            const double cm = analytic_rtn_coherence(g, t - h);
            const double d1 = (cp - cm) / (2 * h);
            const double d2 = (cp - 2 * c0 + cm) / (h * h);
            EXPECT_NEAR(d2 + 2 * g * d1 + 4 * c0, 0.0, 1e-5) << "g=" << g << " t=" << t;
        }
        const double slope0 = (analytic_rtn_coherence(g, h) - 1.0) / h;
        EXPECT_NEAR(slope0, 0.0, 1e-3);
    }
}

TEST(AnalyticRtn, MatchesContinuousTimeOracle) {
    const std::vector<double> times{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const auto mc = oracle::exact_rtn_coherence(0.1, times, 200000, 101);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_NEAR(analytic_rtn_coherence(0.1, times[i]), mc[i].re, 4.0 * mc[i].re_stderr) << "t=" << times[i];
        EXPECT_NEAR(mc[i].im, 0.0, 4.0 * mc[i].im_stderr);
    }
}

TEST(AnalyticRtn, MatchesProductionSampler) {
    const double gamma = 1.0;
    EnsembleRequest req;
    req.process = {ProcessKind::RTN, gamma, RtnInitial::RandomEquiprobable};
    req.grid = {0.001, 4000};
    req.report_stride = 500;
    req.n_paths = 40000;
    req.seed = {17};
    const auto res = run_ensemble(req);
    for (std::size_t i = 1; i < res.times.size(); ++i) {
        const double expected = analytic_rtn_coherence(gamma, res.times[i]);
        const double sigma = std::sqrt((1.0 - expected * expected) / req.n_paths);
        EXPECT_NEAR(res.coherence[i].real(), expected, 4.0 * sigma) << "t=" << res.times[i];
    }
}

TEST(AnalyticOu, ExamplesAndErrors) {
    EXPECT_EQ(analytic_ou_coherence(0.1, 0.0), 1.0);
    EXPECT_THROW(analytic_ou_coherence(0.0, 1.0), ParameterError);
    EXPECT_THROW(analytic_ou_coherence(-1.0, 1.0), ParameterError);
    EXPECT_THROW(analytic_ou_coherence(1.0, -1.0), ParameterError);
}

TEST(AnalyticOu, StrictlyDecreasing) {
    for (double g : {0.1, 1.0, 10.0}) {
        double prev = analytic_ou_coherence(g, 0.0);
        for (int k = 1; k <= 2000; ++k) {
            const double v = analytic_ou_coherence(g, 0.005 * k);
            if (prev > 0.0) ASSERT_LT(v, prev) << "g=" << g << " k=" << k;
            prev = v;
        }
    }
}

TEST(AnalyticOu, VarianceMatchesCovarianceQuadrature) {
    for (double g : {0.01, 0.1, 1.0, 2.5, 10.0}) {
        for (double t : {0.01, 0.2, 1.0, 5.0, 20.0}) {
            const double q = oracle::ou_phase_variance_quadrature(g, t);
            EXPECT_NEAR(ou_phase_variance(g, t) / q, 1.0, 1e-8) << "g=" << g << " t=" << t;
        }
    }
}

TEST(AnalyticOu, SeriesBranchJoinsClosedForm) {
    // x = 2 gamma t crosses 0.5 here.
    const double g = 1.0;
    const double below = ou_phase_variance(g, 0.25 - 1e-12);
    const double above = ou_phase_variance(g, 0.25 + 1e-12);
    EXPECT_NEAR(below / above, 1.0, 1e-9);
}

TEST(AnalyticOu, MatchesExactTransitionOracle) {
    const std::vector<double> times{5, 10, 20};
    const auto mc = oracle::exact_ou_coherence(0.1, times, 200000, 202);
    for (std::size_t i = 0; i < times.size(); ++i) {
        EXPECT_NEAR(analytic_ou_coherence(0.1, times[i]), mc[i].re, 4.0 * mc[i].re_stderr + 1e-12)
            << "t=" << times[i];
    }
}

TEST(AnalyticOu, MatchesProductionSampler) {
    const double gamma = 1.0;
    EnsembleRequest req;
    req.process = {ProcessKind::OU, gamma, RtnInitial::RandomEquiprobable};
    req.grid = {0.001, 2000};
    req.report_stride = 250;
    req.n_paths = 40000;
    req.seed = {19};
    const auto res = run_ensemble(req);
    for (std::size_t i = 1; i < res.times.size(); ++i) {
        const double expected = analytic_ou_coherence(gamma, res.times[i]);
        const double sigma = std::sqrt((1.0 - expected * expected) / req.n_paths);
        EXPECT_NEAR(res.coherence[i].real(), expected, 4.0 * sigma + 2e-3) << "t=" << res.times[i];
    }
}

TEST(AnalyticDispatch, UsesProcessKind) {
    EXPECT_EQ(analytic_coherence({ProcessKind::RTN, 0.3, {}}, 1.2), analytic_rtn_coherence(0.3, 1.2));
    EXPECT_EQ(analytic_coherence({ProcessKind::OU, 0.3, {}}, 1.2), analytic_ou_coherence(0.3, 1.2));
    EXPECT_EQ(analytic_coherence({ProcessKind::OU, 0.0, {}}, 1.2), 1.0);
}

TEST(Ensemble, StreamingEngineMatchesMaterializedPaths) {
    const TimeGrid grid{0.001, 600};
    const ProcessSpec spec{ProcessKind::RTN, 3.0, RtnInitial::RandomEquiprobable};
    const std::size_t n = 600;
    const auto phases = phase_ensemble(spec, grid, 23, n);
    EnsembleRequest req;
    req.process = spec;
    req.grid = grid;
    req.report_stride = 50;
    req.n_paths = n;
    req.seed = {23};
    const auto res = run_ensemble(req);
    for (std::size_t i = 0; i < res.steps.size(); ++i) {
        ASSERT_EQ(res.coherence[i], ensemble_coherence(phases, res.steps[i]));
    }
    EXPECT_EQ(res.coherence[0], Complex(1.0, 0.0));
}

TEST(Ensemble, WorkerCountDoesNotChangeOutput) {
    EnsembleRequest req;
    req.process = {ProcessKind::OU, 0.7, {}};
    req.grid = {0.001, 500};
    req.report_stride = 25;
    req.n_paths = 1500;
    req.seed = {29};
    const auto serial = run_ensemble(req);
    for (unsigned w : {2u, 3u, 8u}) {
        req.workers = w;
        const auto parallel = run_ensemble(req);
        ASSERT_EQ(parallel.coherence, serial.coherence);
        ASSERT_EQ(parallel.stderr_values, serial.stderr_values);
    }
}

TEST(Ensemble, EpsilonOnlyRotatesTheLabFrame) {
    EnsembleRequest req;
    req.process = {ProcessKind::RTN, 0.5, {}};
    req.grid = {0.001, 400};
    req.report_stride = 40;
    req.n_paths = 300;
    req.seed = {31};
    const auto base = run_ensemble(req);
    req.hamiltonian.epsilon = 3.7;
    const auto shifted = run_ensemble(req);
    ASSERT_EQ(base.coherence, shifted.coherence);
    for (std::size_t i = 0; i < base.times.size(); ++i) {
        const Complex expected = std::polar(1.0, -2.0 * 3.7 * base.times[i]) * base.coherence[i];
        EXPECT_NEAR(std::abs(shifted.lab_coherence[i] - expected), 0.0, 1e-14);
        EXPECT_NEAR(std::abs(shifted.lab_coherence[i]), std::abs(base.coherence[i]), 1e-14);
    }
}

TEST(Ensemble, ToLabFrameRotatesOffDiagonal) {
    const auto rho = dephasing_state({0.6, 0.0}, 1.0);
    const auto lab = to_lab_frame(rho, {0.25}, 2.0);
    EXPECT_NEAR(std::abs(lab.coherence() - 0.3 * std::polar(1.0, -1.0)), 0.0, 1e-15);
    EXPECT_EQ(lab(0, 0), rho(0, 0));
}

TEST(Ensemble, ImaginaryPartVanishesOnlyInExpectationForDynamicNoise) {
    EnsembleRequest req;
    req.grid = {0.001, 2000};
    req.report_stride = 200;
    req.n_paths = 20000;
    req.seed = {37};
    for (const ProcessSpec& spec : {ProcessSpec{ProcessKind::RTN, 0.5, RtnInitial::ForcedBalanced},
                                    ProcessSpec{ProcessKind::RTN, 0.5, RtnInitial::RandomEquiprobable},
                                    ProcessSpec{ProcessKind::OU, 0.5, RtnInitial::RandomEquiprobable}}) {
        req.process = spec;
        const auto res = run_ensemble(req);
        for (std::size_t i = 1; i < res.times.size(); ++i) {
            EXPECT_NEAR(res.coherence[i].imag(), 0.0, 4.0 * res.stderr_values[i]);
        }
    }
}

TEST(Ensemble, ValidatesRequest) {
    EnsembleRequest req;
    req.n_paths = 0;
    EXPECT_THROW(run_ensemble(req), ParameterError);
    req.n_paths = 2;
    req.weights = {0.5, 0.6};
    EXPECT_THROW(run_ensemble(req), ParameterError);
    req.weights = {0.5};
    EXPECT_THROW(run_ensemble(req), ParameterError);
    req.weights = {};
    req.report_stride = 0;
    EXPECT_THROW(run_ensemble(req), ParameterError);
}

TEST(Ensemble, StderrFormula) {
    EXPECT_EQ(ensemble_stderr({1.0, 0.0}, 100), 0.0);
    EXPECT_DOUBLE_EQ(ensemble_stderr({0.0, 0.0}, 101), 0.1);
    EXPECT_EQ(ensemble_stderr({0.2, 0.0}, 1), 0.0);
}
