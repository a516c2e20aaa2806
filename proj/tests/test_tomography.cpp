// Copyright 2025 The gwstats Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>

#include <random>

#include "gwstats/fock_oracle.hpp"
#include "gwstats/tomography.hpp"
#include "test_util.hpp"

using namespace gwstats;

namespace {

GwSignalParams make(cplx a, double r, double theta, double nbar) {
    GwSignalParams p;
    p.alpha = a;
    p.r = r;
    p.theta = theta;
    p.nbar = nbar;
    return p;
}

// <:dh_phi dn:> from the truncated density matrix
double oracle_hn(const fock::TruncatedState& s, double phi) {
    const cplx e = std::polar(1.0, -phi);
    const cplx a = fock::normal_moment(s, 0, 1);
    const double n = fock::normal_moment(s, 1, 1).real();
    const double h = std::sqrt(2.0) * (e * a).real();
    const double hn = std::sqrt(2.0) * (e * fock::normal_moment(s, 1, 2)).real();
    return hn - h * n;
}

}  // namespace

TEST(QuadratureVariance, Examples) {
    for (double phi : {0.0, 0.4, 2.0}) {
        EXPECT_NEAR(quadrature_variance_normal(make({1.0, 0.5}, 0, 0, 0), phi), 0.0, 1e-15);
        EXPECT_NEAR(quadrature_variance_normal(make(0, 0, 0, 0.8), phi), 0.8, 1e-15);
    }
    EXPECT_NEAR(quadrature_variance_normal(make(0, 1.0, 0, 0), 0.0), 0.5 * (std::exp(-2.0) - 1.0), 1e-15);
}

TEST(QuadratureVariance, MatchesOracleAndVacuumBound) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 4; ++i) {
        const testutil::Draw d = testutil::random_draw(rng, 1.5, 0.8, 1.0);
        const fock::TruncatedState s = fock::build_gw_density(d.p, 150, 1e-12);
        for (double phi : {0.0, 0.9, 2.5}) {
            const double v = quadrature_variance_normal(d.p, phi);
            EXPECT_NEAR(v, fock::quadrature_variance(s, phi) - 0.5, 1e-9);
            EXPECT_GE(v, -0.5);
        }
    }
}

TEST(QuadratureNumber, VanishingCases) {
    for (double phi : {0.0, 1.0}) {
        EXPECT_EQ(quadrature_number_correlation(make(0, 0.7, 0.3, 1.2), phi), 0.0);
        EXPECT_EQ(quadrature_number_correlation(make({0.8, -0.4}, 0, 0, 0), phi), 0.0);
    }
}

TEST(QuadratureNumber, DisplacedThermal) {
    EXPECT_NEAR(quadrature_number_correlation(make(1.3, 0, 0, 0.6), 0.0), std::sqrt(2.0) * 1.3 * 0.6, 1e-15);
}

TEST(QuadratureNumber, MatchesOracle) {
    std::mt19937_64 rng(9);
    double worst_alt = 0.0;
    for (int i = 0; i < 4; ++i) {
        const testutil::Draw d = testutil::random_draw(rng, 1.5, 0.8, 1.0);
        const fock::TruncatedState s = fock::build_gw_density(d.p, 150, 1e-12);
        for (double phi : {0.0, 0.9, 2.5, 4.0}) {
            const double want = oracle_hn(s, phi);
            EXPECT_NEAR(quadrature_number_correlation(d.p, phi), want, 1e-8);
            worst_alt = std::max(worst_alt, std::abs(quadrature_number_correlation_uncorrected(d.p, phi) - want));
        }
    }
    EXPECT_GT(worst_alt, 1e-2);
}

TEST(DeltaG2, NoLocalOscillatorLeavesIntensityTerm) {
    const GwSignalParams p = make({0.7, 0.2}, 0.5, 1.1, 0.3);
    const double gt = 0.4;
    const TomographyTerms t = delta_g2_terms(p, {0.0, 0.3, 0.0, 0.0}, gt);
    EXPECT_EQ(t.dG1, 0.0);
    EXPECT_EQ(t.dG2, 0.0);
    EXPECT_EQ(t.dG4_noise, 0.0);
    EXPECT_EQ(t.total, t.dG0);
    // detector <:dn^2:> = <n>^2 (g2 - 1)
    const LadderMoments bar = detector_moments(p, gt);
    const double n = bar.C() + std::norm(bar.alpha());
    EXPECT_NEAR(t.dG0, normal_moment(bar, 2, 2).real() - n * n, 1e-12);
}

TEST(DeltaG2, ConstructionIdentityAndPeriodicity) {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 20; ++i) {
        const testutil::Draw d = testutil::random_draw(rng);
        LocalOscillator lo{1.7, 0.37 * i, 1e-3, 0.0};
        const TomographyTerms a = delta_g2_terms(d.p, lo, d.gamma_t);
        EXPECT_NEAR(a.total, a.dG0 + a.dG1 + a.dG2 + a.dG3 + a.dG4_noise, 1e-12);
        EXPECT_EQ(a.dG3, 0.0);
        lo.phi += kPi;
        const TomographyTerms b = delta_g2_terms(d.p, lo, d.gamma_t);
        EXPECT_NEAR(b.dG2, a.dG2, 1e-12 * std::max(1.0, std::abs(a.dG2)));
        EXPECT_NEAR(b.dG1, -a.dG1, 1e-12 * std::max(1.0, std::abs(a.dG1)));
    }
    EXPECT_THROW(delta_g2_terms({}, {}, 0.1, false), std::invalid_argument);
}

TEST(DeltaG2, SuperPoissonianAtLargeSqueezing) {
    const GwSignalParams p = make(1.0, 2.0, 0.0, 0.0);
    for (int i = 0; i < 32; ++i) {
        const LocalOscillator lo{1.0, 2.0 * kPi * i / 32, 0.0, 0.0};
        EXPECT_GE(delta_g2_terms(p, lo, 0.3).total, 0.0);
    }
}

TEST(DeltaG2, SecondOrderLargeSqueezingLimit) {
    const GwSignalParams p = make(1.0, 5.0, 0.0, 0.0);
    const LocalOscillator lo{2.0, kPi / 2, 0.0, 0.0};
    const double gt = 0.01;
    const double exact = delta_g2_terms(p, lo, gt).dG2;
    EXPECT_NEAR(exact / dG2_large_squeezing_limit(p, lo, gt), 1.0, 1e-3);
}

TEST(DeltaG2, FirstOrderTermSaturates) {
    // nbar = 0, theta = 0, real alpha: <:dh dn:> = -(alpha / sqrt2)(1 - e^{-2r}) cos(phi)
    const double a = 1.0, gt = 0.01, b = 2.0;
    const double s = std::sin(gt), c = std::cos(gt);
    for (double r : {1.0, 3.0, 5.0}) {
        const GwSignalParams p = make(a, r, 0.0, 0.0);
        const LocalOscillator lo{b, 0.3, 0.0, 0.0};
        const double want = s * s * s * c * b * (-(a / std::sqrt(2.0)) * (1.0 - std::exp(-2.0 * r)) * std::cos(0.3));
        EXPECT_NEAR(delta_g2_terms(p, lo, gt).dG1, want, 1e-9 * std::abs(want));
    }
    // so the exponentially growing first-order limit is not reached
    const GwSignalParams p = make(a, 5.0, 0.0, 0.0);
    const LocalOscillator lo{b, 0.0, 0.0, 0.0};
    EXPECT_GT(std::abs(dG1_large_squeezing_limit(p, lo, gt) / delta_g2_terms(p, lo, gt).dG1), 1e3);
}

TEST(ClassicalNoise, Examples) {
    EXPECT_EQ(classical_lo_noise({3.0, 0.0, 0.0, 0.0}, 0.2), 0.0);
    EXPECT_NEAR(classical_lo_noise({10.0, 0.0, 1e-4, 0.0}, 1e-6), 4.0, 1e-9);
    EXPECT_NEAR(classical_lo_noise({10.0, 0.0, 1e-4, 0.0}, kPi / 2), 0.0, 1e-30);
    EXPECT_THROW(classical_lo_noise({1.0, 0.0, -1.0, 0.0}, 0.2), std::invalid_argument);
}

TEST(Snr, MatchedAmplitude) {
    const GwSignalParams p = make(0.5, 0.8, 0.4, 0.1);
    const double gt = 0.3;
    const double phi = 1.0;
    const double sig = std::pow(std::sin(gt), 2) * std::abs(quadrature_variance_normal(p, phi));
    for (double eps : {0.01, 1e-3}) {
        const LocalOscillator lo{std::sqrt(sig), phi, eps, 0.0};
        EXPECT_NEAR(snr_quadrature(p, lo, gt).snr, 1.0 / (4.0 * eps), 1e-9 / eps);
    }
    const LocalOscillator lo{std::sqrt(sig), phi, 0.01, 0.0};
    EXPECT_NEAR(snr_quadrature(p, lo, gt).snr, 25.0, 1e-9);
    LocalOscillator twice = lo;
    twice.beta_mag *= 2.0;
    EXPECT_NEAR(snr_quadrature(p, twice, gt).snr, 25.0 / 4.0, 1e-9);
}

TEST(Snr, ZeroNoiseIsFlaggedInfinite) {
    const SnrResult r = snr_quadrature(make(0, 0.5, 0, 0), {1.0, 0.0, 0.0, 0.0}, 0.3);
    EXPECT_TRUE(r.infinite);
    EXPECT_TRUE(std::isinf(r.snr));
    EXPECT_THROW(snr_quadrature({}, {0.0, 0.0, 0.1, 0.0}, 0.3), std::invalid_argument);
}

TEST(BetaSeparation, RoundTrip) {
    const GwSignalParams p = make({0.9, -0.3}, 0.6, 0.8, 0.25);
    const double gt = 0.5;
    LocalOscillator lo{0.0, 0.6, 2e-3, 0.0};
    std::vector<std::pair<double, double>> sweep;
    for (double b = 0.5; b <= 3.01; b += 0.5) {
        lo.beta_mag = b;
        sweep.emplace_back(b, delta_g2_terms(p, lo, gt).total);
    }
    const BetaSeparation sep = separate_terms_by_beta(sweep);
    lo.beta_mag = 1.0;
    const TomographyTerms unit = delta_g2_terms(p, lo, gt);
    EXPECT_NEAR(sep.coefficients[0], unit.dG0, 1e-9);
    EXPECT_NEAR(sep.coefficients[1], unit.dG1, 1e-9);
    EXPECT_NEAR(sep.coefficients[2], unit.dG2, 1e-9);
    EXPECT_NEAR(sep.coefficients[3], 0.0, 1e-9);
    EXPECT_NEAR(sep.coefficients[4], unit.dG4_noise, 1e-9);
}

TEST(BetaSeparation, VacuumGivesZero) {
    std::vector<std::pair<double, double>> sweep;
    for (double b : {0.5, 1.0, 1.5, 2.0, 2.5}) sweep.emplace_back(b, delta_g2_terms({}, {b, 0.2, 0.0, 0.0}, 0.4).total);
    for (double c : separate_terms_by_beta(sweep).coefficients) EXPECT_NEAR(c, 0.0, 1e-15);
}

TEST(BetaSeparation, RejectsDegenerateDesign) {
    EXPECT_THROW(separate_terms_by_beta({{1, 0}, {2, 0}, {3, 0}, {4, 0}}), std::invalid_argument);
    EXPECT_THROW(separate_terms_by_beta({{1, 0}, {1, 0}, {2, 0}, {2, 0}, {3, 0}}), std::invalid_argument);
    EXPECT_THROW(separate_terms_by_beta({{0, 0}, {0, 0}, {0, 0}, {0, 0}, {0, 0}}), std::invalid_argument);
}

TEST(Reconstruct, NoiselessRoundTrip) {
    const GwSignalParams p = make(1.0, 0.5, 0.7, 0.2);
    const double gt = 0.4, beta = 1.0;
    const LocalOscillator lo{beta, 0.0, 0.0, 0.0};
    const ReconstructionResult r = reconstruct_gaussian(simulate_phase_sweep(p, lo, gt, 16), gt, beta,
                                                        delta_g2_terms(p, lo, gt).dG0);
    EXPECT_NEAR(r.alpha_mag, 1.0, 1e-6);
    EXPECT_NEAR(r.r, 0.5, 0.5e-6);
    EXPECT_NEAR(r.theta, 0.7, 0.7e-6);
    EXPECT_NEAR(r.nbar, 0.2, 0.2e-6);
    EXPECT_NEAR(r.alpha_phase, 0.0, 1e-6);
    EXPECT_LT(r.residual, 1e-10);
    EXPECT_EQ(r.phase_grid_size, 16);
}

TEST(Reconstruct, RandomStatesRoundTrip) {
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const GwSignalParams p = make(std::polar(0.3 + 1.5 * U(rng), 2 * kPi * U(rng)), 0.1 + 0.9 * U(rng),
                                      2 * kPi * U(rng), 0.05 + U(rng));
        const double gt = 0.2 + U(rng);
        const LocalOscillator lo{1.3, 0.0, 0.0, 0.0};
        const ReconstructionResult r = reconstruct_gaussian(simulate_phase_sweep(p, lo, gt, 12), gt, 1.3,
                                                            delta_g2_terms(p, lo, gt).dG0);
        EXPECT_NEAR(r.alpha_mag / std::abs(p.alpha), 1.0, 1e-6);
        EXPECT_NEAR(r.r / p.r, 1.0, 1e-6);
        EXPECT_NEAR(r.nbar / p.nbar, 1.0, 1e-6);
        EXPECT_NEAR(std::remainder(r.theta - p.theta, 2 * kPi), 0.0, 1e-6);
    }
}

TEST(Reconstruct, CoherentInputFlagsPhase) {
    const GwSignalParams p = make(1.2, 0.0, 0.0, 0.0);
    const LocalOscillator lo{1.0, 0.0, 0.0, 0.0};
    const ReconstructionResult r = reconstruct_gaussian(simulate_phase_sweep(p, lo, 0.5, 8), 0.5, 1.0, 0.0);
    EXPECT_FALSE(r.theta_identifiable);
    EXPECT_NEAR(r.r, 0.0, 1e-12);
    EXPECT_NEAR(r.nbar, 0.0, 1e-9);
}

TEST(Reconstruct, NoisyDegradesSmoothly) {
    const GwSignalParams p = make(1.0, 0.5, 0.7, 0.2);
    const double gt = 0.4;
    double prev = 0.0;
    for (double eps : {1e-8, 1e-6, 1e-4}) {
        std::mt19937_64 rng(1);
        const LocalOscillator lo{1.0, 0.0, eps, 0.0};
        const ReconstructionResult r = reconstruct_gaussian(simulate_phase_sweep(p, lo, gt, 64, &rng), gt, 1.0,
                                                            delta_g2_terms(p, lo, gt).dG0);
        const double err = std::max({std::abs(r.r - 0.5) / 0.5, std::abs(r.alpha_mag - 1.0), std::abs(r.nbar - 0.2) / 0.2});
        EXPECT_LT(err, 100.0 * std::sqrt(eps));
        EXPECT_GT(r.residual, prev);
        prev = r.residual;
    }
}

TEST(Reconstruct, RejectsBadInput) {
    const std::vector<PhaseSample> few(7);
    EXPECT_THROW(reconstruct_gaussian(few, 0.4, 1.0, 0.0), std::invalid_argument);
    const std::vector<PhaseSample> same(8, PhaseSample{0.3, 0.0, 0.0});
    EXPECT_THROW(reconstruct_gaussian(same, 0.4, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(reconstruct_gaussian(std::vector<PhaseSample>(8), 0.4, 0.0, 0.0), std::invalid_argument);
}
