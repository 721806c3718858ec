#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pdcvis/detection.hpp"
#include "pdcvis/optics.hpp"
#include "pdcvis/source.hpp"

using namespace pdcvis;

namespace {

OccupationVector occ4(int a, int b, int c, int d) { return OccupationVector{a, b, c, d}; }

double re(const FockState& s, const OccupationVector& o) { return s.amplitude_of(o).real(); }

}  // namespace

TEST(Gain, Validation) {
  EXPECT_THROW(Gain(-0.1), usage_error);
  EXPECT_THROW(Gain(3.5), config_error);
  EXPECT_NO_THROW(Gain(3.0));
}

TEST(TailRule, ClosedFormMatchesDirectSum) {
  for (double k : {0.1, 0.5, 0.8, 1.3}) {
    const double t2 = std::tanh(k) * std::tanh(k), c4 = std::pow(std::cosh(k), 4);
    for (int n_max : {0, 3, 10}) {
      double direct = 0.0;
      for (int n = n_max + 1; n < n_max + 4000; ++n) direct += (n + 1) * std::pow(t2, n) / c4;
      EXPECT_NEAR(tail_bound(k, n_max), direct, 1e-13) << k << " " << n_max;
    }
  }
  EXPECT_LT(tail_bound(0.5, required_n_max(0.5)), 1e-8);
  EXPECT_GE(tail_bound(0.5, required_n_max(0.5) - 1), 1e-8);
}

TEST(BuildPdc, VacuumAtZeroGain) {
  const FockState s = build_pdc_state(Gain(0.0), 3);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(re(s, occ4(0, 0, 0, 0)), 1.0);
}

TEST(BuildPdc, AmplitudesAndLoss) {
  const double k = 0.7, t = std::tanh(k), c2 = std::cosh(k) * std::cosh(k);
  const FockState s = build_pdc_state(Gain(k), 20);
  for (int n = 0; n <= 20; ++n)
    for (int m = 0; m <= n; ++m) {
      const double expected = (m % 2 ? -1.0 : 1.0) * std::pow(t, n) / c2;
      ASSERT_NEAR(re(s, occ4(n - m, m, m, n - m)), expected, 1e-15);
    }
  EXPECT_NEAR(s.truncation_loss(), 1.0 - s.norm_squared(), 1e-12);
  EXPECT_NEAR(norm(build_pdc_state(Gain(0.5), 24)), 1.0, 1e-9);
}

TEST(BuildPdc, TailRuleEnforced) {
  EXPECT_THROW(build_pdc_state(Gain(0.8), 5), config_error);
  EXPECT_NO_THROW(build_pdc_state(Gain(0.8), 5, TailPolicy::allow));
}

TEST(BuildPdc, BiphotonLimit) {
  // Low gain: vacuum plus a two-photon singlet, |1001> and |0110> with opposite
  // signs and relative amplitude tanh K = K + O(K^3).
  const double k = 0.1;
  const FockState s = build_pdc_state(Gain(k), required_n_max(k));
  const double vac = re(s, occ4(0, 0, 0, 0));
  const double hv = re(s, occ4(1, 0, 0, 1)), vh = re(s, occ4(0, 1, 1, 0));
  EXPECT_NEAR(hv, -vh, 1e-15);
  EXPECT_NEAR(hv / vac, k, k * k * k);
  // Weight outside n <= 1 is second order in K.
  EXPECT_LT(1.0 - vac * vac - hv * hv - vh * vh, 4 * k * k * k * k);
}

TEST(ProductForm, MatchesPdcState) {
  EXPECT_DOUBLE_EQ(re(build_product_form(Gain(0.0), 2), occ4(0, 0, 0, 0)), 1.0);

  const FockState p = build_product_form(Gain(0.5), 24);
  EXPECT_NEAR(re(p, occ4(1, 0, 0, 1)), 0.363430990691794, 1e-12);

  for (double k : {0.3, 0.8}) {
    const FockState a = build_pdc_state(Gain(k), 24, TailPolicy::allow);
    const FockState b = build_product_form(Gain(k), 24, TailPolicy::allow);
    EXPECT_LT(max_amplitude_difference(a, b), 1e-10);
    EXPECT_NEAR(a.truncation_loss(), b.truncation_loss(), 1e-12);
  }
}

TEST(SingletLayer, SmallLayers) {
  EXPECT_DOUBLE_EQ(re(singlet_layer(0).state, occ4(0, 0, 0, 0)), 1.0);

  const FockState one = singlet_layer(1).state;
  EXPECT_EQ(one.size(), 2u);
  EXPECT_NEAR(re(one, occ4(1, 0, 0, 1)), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(re(one, occ4(0, 1, 1, 0)), -1.0 / std::sqrt(2.0), 1e-15);

  const FockState two = singlet_layer(2).state;
  const double r = 1.0 / std::sqrt(3.0);
  EXPECT_NEAR(re(two, occ4(2, 0, 0, 2)), r, 1e-15);
  EXPECT_NEAR(re(two, occ4(1, 1, 1, 1)), -r, 1e-15);
  EXPECT_NEAR(re(two, occ4(0, 2, 2, 0)), r, 1e-15);
}

TEST(SingletLayer, Orthonormal) {
  for (int n = 0; n <= 6; ++n)
    for (int m = 0; m <= 6; ++m) {
      const FockState a = truncate(singlet_layer(n).state, 6), b = truncate(singlet_layer(m).state, 6);
      EXPECT_NEAR(std::abs(inner_product(a, b)), n == m ? 1.0 : 0.0, 1e-12);
    }
}

TEST(SingletLayer, InvariantUnderCommonSu2) {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  for (int trial = 0; trial < 10; ++trial) {
    const double th = u(rng) / 4.0;
    const amplitude e1 = std::polar(1.0, u(rng)), e2 = std::polar(1.0, u(rng));
    const Matrix2c su2{{e1 * std::cos(th), e2 * std::sin(th), -std::conj(e2) * std::sin(th), std::conj(e1) * std::cos(th)}};
    ASSERT_NEAR(std::abs(su2.determinant() - 1.0), 0.0, 1e-14);
    for (int n = 1; n <= 5; ++n) {
      const FockState layer = singlet_layer(n).state;
      FockState rotated = mode_pair_rotation(layer, mode("a", Polarization::H), mode("a", Polarization::V), su2);
      rotated = mode_pair_rotation(rotated, mode("b", Polarization::H), mode("b", Polarization::V), su2);
      EXPECT_NEAR(fidelity(layer, rotated), 1.0, 1e-9);
    }
  }
}

TEST(ConditionedState, Limits) {
  const FockState full = build_pdc_state(Gain(0.5), 14);
  const FockState tau1 = build_conditioned_state(Gain(0.5), ConditioningSpec::from_tau(1.0), 14);
  EXPECT_LT(max_amplitude_difference(full, tau1), 1e-15);

  const FockState tiny = build_conditioned_state(Gain(0.5), ConditioningSpec::from_tau(1e-9), 2);
  EXPECT_NEAR(fidelity(tiny, FockState::vacuum(baseline_modes(), 2)), 1.0, 1e-15);

  EXPECT_THROW(ConditioningSpec::from_tau(0.0), usage_error);
  EXPECT_THROW(ConditioningSpec::from_tau(1.2), usage_error);
  EXPECT_THROW(ConditioningSpec::from_ports(0), usage_error);
  EXPECT_DOUBLE_EQ(ConditioningSpec::from_ports(4).tau(), 0.25);
}

TEST(ConditionedState, LayerRatio) {
  const FockState s = build_conditioned_state(Gain(0.5), ConditioningSpec::from_tau(0.5), 10);
  // Layer amplitude = component amplitude * sqrt(n+1).
  const double l1 = re(s, occ4(1, 0, 0, 1)) * std::sqrt(2.0);
  const double l2 = re(s, occ4(2, 0, 0, 2)) * std::sqrt(3.0);
  EXPECT_NEAR(l2 / l1, 0.282987809168129, 1e-12);
  EXPECT_TRUE(s.is_normalized());
}

TEST(PmExpansion, VacuumAtZeroGain) {
  const FockState s = pm_basis_expansion(Gain(0.0), 0.3, 1.1, 4);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_DOUBLE_EQ(re(s, occ4(0, 0, 0, 0)), 1.0);
}

TEST(PmExpansion, MatchesRotationRoute) {
  const double k = 0.6, pa = 0.7, pb = 0.2;
  const FockState direct = pm_basis_expansion(Gain(k), pa, pb, 12, TailPolicy::allow);
  const FockState rotated = apply_analyzers(build_pdc_state(Gain(k), 12, TailPolicy::allow), pa, pb);
  ASSERT_EQ(direct.modes(), rotated.modes());
  EXPECT_LT(max_amplitude_difference(direct, rotated), 1e-10);
}

TEST(PmExpansion, DoubleVacuumComponents) {
  const double k = 0.6, pa = 1.9, pb = 0.4, delta = pa - pb;
  const FockState s = pm_basis_expansion(Gain(k), pa, pb, 12, TailPolicy::allow);
  const double c2 = std::cosh(k) * std::cosh(k);
  for (int j = 0; j <= 12; ++j)
    for (int l = 0; l <= 12; ++l) {
      const double expected = j == l ? std::pow(std::tanh(k) * std::abs(std::sin(delta / 2)), j) / c2 : 0.0;
      EXPECT_NEAR(std::abs(s.amplitude_of(occ4(0, j, 0, l))), expected, 1e-13);
    }
}

TEST(PmExpansion, RefusesBeyondExactRange) {
  EXPECT_THROW(pm_basis_expansion(Gain(0.5), 0, 0, 31), config_error);
  EXPECT_NO_THROW(pm_basis_expansion(Gain(0.5), 0, 0, 30));
}

TEST(PmExpansion, DependsOnlyOnPhaseDifference) {
  const double k = 0.5;
  const int n = required_n_max(k);
  for (double c : {0.4, 2.5}) {
    const FockState s1 = pm_basis_expansion(Gain(k), 1.0, 0.3, n);
    const FockState s2 = pm_basis_expansion(Gain(k), 1.0 + c, 0.3 + c, n);
    EXPECT_NEAR(onoff_joint_click_numeric(s1), onoff_joint_click_numeric(s2), 1e-10);
    const auto m1 = onoff_vacuum_marginals(s1), m2 = onoff_vacuum_marginals(s2);
    EXPECT_NEAR(m1.p0, m2.p0, 1e-10);
    EXPECT_NEAR(m1.p1, m2.p1, 1e-10);
    // Full outcome distribution is phase-shift invariant too.
    for (const auto& [o, a] : s1.terms()) EXPECT_NEAR(std::norm(a), std::norm(s2.amplitude_of(o)), 1e-12);
  }
}

TEST(SinglePairProbability, BothConventions) {
  // At K = 0.49: (n+1) tanh^2/cosh^4 ~ 0.26 for n = 1, tanh^2/cosh^4 ~ 0.13.
  EXPECT_NEAR(one_pair_probability(0.49), 0.26, 0.005);
  EXPECT_NEAR(one_pair_probability_single_channel(0.49), 0.13, 0.005);
  const FockState s = build_pdc_state(Gain(0.49), required_n_max(0.49));
  const double w = std::norm(s.amplitude_of(occ4(1, 0, 0, 1))) + std::norm(s.amplitude_of(occ4(0, 1, 1, 0)));
  EXPECT_NEAR(w, one_pair_probability(0.49), 1e-14);
}
