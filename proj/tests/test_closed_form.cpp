#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "pdcvis/closed_form.hpp"
#include "pdcvis/detection.hpp"

using namespace pdcvis;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST(V2Linear, Values) {
  EXPECT_EQ(v2_linear(0.0), 1.0);
  EXPECT_NEAR(v2_linear(30.0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(v2_linear(0.5), 0.700719517125610, 1e-12);
}

TEST(V2Onoff, Values) {
  EXPECT_EQ(v2_onoff(0.0), 1.0);
  EXPECT_NEAR(v2_onoff(0.5), 0.648054273663885, 1e-12);
  for (double k = 0.05; k < 3.0; k += 0.05) EXPECT_LE(v2_onoff(k), v2_linear(k));
}

TEST(V2Hybrid, Values) {
  for (double k : {0.2, 1.0, 2.0}) EXPECT_DOUBLE_EQ(v2_hybrid(k, 1.0), v2_linear(k));
  EXPECT_NEAR(v2_hybrid(1.0, 0.1), 0.988532515536797, 1e-12);
  const double tc = critical_tau().value;
  EXPECT_NEAR(v2_hybrid(20.0, tc), v_crit, 1e-12);
  EXPECT_THROW(v2_hybrid(1.0, 0.0), usage_error);
}

TEST(V2Multiport, Values) {
  for (double k = 0.0; k < 3.0; k += 0.1) EXPECT_NEAR(v2_multiport(k, 1), v2_onoff(k), 1e-12);
  EXPECT_NEAR(v2_multiport(1.0, 1000000), 1.0, 1e-11);
  EXPECT_NEAR(v2_multiport(1.0, 2), 0.746715105264114, 1e-12);
}

TEST(G2Closed, Values) {
  EXPECT_DOUBLE_EQ(g2_closed(0.7, 0.0), 1.0);
  EXPECT_NEAR(g2_closed(0.7, pi), 2.0 + 1.0 / std::pow(std::sinh(0.7), 2), 1e-12);
  EXPECT_NEAR(g2_closed(0.5, pi / 2), 3.34134718841558, 1e-12);
  EXPECT_THROW(g2_closed(0.0, 1.0), undefined_quantity);
}

TEST(G2Closed, ConsistentWithG2AndMeanNumber) {
  for (double k : {0.2, 0.9})
    for (double d : {0.0, 1.0, 2.5})
      EXPECT_NEAR(g2_closed(k, d), G2_closed(k, d) / std::pow(mean_photon_number(k), 2), 1e-10);
}

TEST(POnoffClosed, Values) {
  EXPECT_NEAR(p_onoff_closed(0.5, 0.0), std::pow(std::tanh(0.5), 4), 1e-15);
  EXPECT_EQ(p_onoff_closed(0.0, 1.3), 0.0);
  for (double k : {0.5, 1.0, 1.5}) {
    EXPECT_NEAR(p_onoff_closed(k, 0.0), std::pow(std::tanh(k), 4), 1e-14);
    EXPECT_NEAR(p_onoff_closed(k, pi), std::pow(std::tanh(k), 2), 1e-14);
    double prev = -1;
    for (int i = 0; i <= 50; ++i) {
      const double p = p_onoff_closed(k, pi * i / 50);
      EXPECT_GT(p, prev);
      prev = p;
    }
  }
}

TEST(POnoffClosed, MarginalDecomposition) {
  for (double k : {0.3, 1.1})
    for (double d : {0.0, 0.9, pi})
      EXPECT_NEAR(p_onoff_closed(k, d), 1.0 - p0_closed(k, d) - 2.0 * p1_closed(k, d), 1e-14);
}

TEST(PMultiportClosed, Values) {
  for (double k : {0.1, 0.7, 2.0})
    for (double d : {0.0, 0.8, 2.2, pi}) EXPECT_NEAR(p_multiport_closed(k, 1, d), p_onoff_closed(k, d), 1e-12);
  for (int m : {1, 2, 5}) EXPECT_NEAR(p_multiport_closed(0.5, m, 0.0), std::pow(std::tanh(0.5), 4) / (m * m), 1e-14);
  EXPECT_NEAR(p_multiport_closed(0.5, 2, 0.0), 0.0114011426888480, 1e-14);
}

TEST(PMultiportClosed, LargePortCountKeepsOnlySinglePairs) {
  // Single-pair term alone: M^2 |<1,0,1,0|tau tanh K layer>|^2 with tau = 1/M, i.e.
  // tanh^2 K sin^2(delta/2) at leading order in 1/M.
  const double k = 1.0, d = 1.7;
  const double single_pair = std::pow(std::tanh(k) * std::sin(d / 2), 2);
  EXPECT_NEAR(p_multiport_closed(k, 2000, d), single_pair, 1e-6);
}

TEST(MeanPhotonNumber, Values) {
  EXPECT_EQ(mean_photon_number(0.0), 0.0);
  EXPECT_NEAR(mean_photon_number(0.49), 0.26, 0.005);
}

TEST(Critical, Gains) {
  const auto lin = critical_gain(DetectorKind::linear);
  const auto onoff = critical_gain(DetectorKind::onoff);
  EXPECT_NEAR(lin.value, 0.491101019115959, 1e-12);
  EXPECT_NEAR(onoff.value, 0.440686793509772, 1e-12);
  EXPECT_LE(std::abs(lin.residual), 1e-10);
  EXPECT_LE(std::abs(onoff.residual), 1e-10);
  EXPECT_EQ(std::round(lin.value * 100) / 100, 0.49);
  EXPECT_EQ(std::round(onoff.value * 100) / 100, 0.44);
}

TEST(Critical, Tau) {
  const auto tc = critical_tau();
  EXPECT_NEAR(tc.value, 0.455089860562227, 1e-14);
  EXPECT_LE(std::abs(tc.residual), 1e-12);
  for (double k = 0.0; k <= 20.0; k += 0.25) EXPECT_GE(v2_hybrid(k, tc.value) - v_crit, -1e-12);
  EXPECT_GE(v2_hybrid(10.0, tc.value) - v_crit, -1e-12);
  EXPECT_LT(v2_hybrid(10.0, tc.value * 1.05), v_crit);
}

TEST(Ordering, MonotoneInParameters) {
  for (double k = 0.1; k < 3.0; k += 0.1) {
    for (int m = 1; m < 8; ++m) EXPECT_LT(v2_multiport(k, m), v2_multiport(k, m + 1));
    for (double tau = 0.1; tau < 0.95; tau += 0.1) EXPECT_GT(v2_hybrid(k, tau), v2_hybrid(k, tau + 0.1));
    EXPECT_GT(v2_multiport(k, 3), v2_multiport(k + 0.1, 3));
    EXPECT_GT(v2_hybrid(k, 0.3), v2_hybrid(k + 0.1, 0.3));
    for (double v : {v2_linear(k), v2_onoff(k), v2_hybrid(k, 0.4), v2_multiport(k, 2)}) {
      EXPECT_GT(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(ClosedVisibility, RatioOfExtremes) {
  for (double k : {0.3, 1.2}) {
    for (const auto& scheme : {DetectionScheme::linear(), DetectionScheme::onoff(), DetectionScheme::hybrid(0.3),
                               DetectionScheme::multiport(3)}) {
      const auto r = closed_visibility(scheme, k);
      EXPECT_NEAR(r.visibility, (r.value_max - r.value_min) / (r.value_max + r.value_min), 1e-12);
    }
  }
}

TEST(Bogoliubov, TableProperties) {
  const auto id = bogoliubov_transform_table(0.0);
  ASSERT_EQ(id.size(), 8u);
  for (const auto& e : id) {
    const std::size_t i = static_cast<std::size_t>(e.mode);
    for (std::size_t j = 0; j < 4; ++j) {
      const auto& same = e.dagger ? e.image.creation : e.image.annihilation;
      const auto& other = e.dagger ? e.image.annihilation : e.image.creation;
      EXPECT_EQ(same[j], (i == j ? 1.0 : 0.0));
      EXPECT_EQ(other[j], 0.0);
    }
  }
  // Each image preserves [x, x^dag] = c^2 - s^2 = 1.
  for (double k : {0.3, 1.7}) {
    for (const auto& e : bogoliubov_transform_table(k)) {
      if (e.dagger) continue;
      const auto comm = vacuum_two_point(e.image, e.image.adjoint()) - vacuum_two_point(e.image.adjoint(), e.image);
      EXPECT_NEAR(std::abs(comm - 1.0), 0.0, 1e-12);
    }
  }
}

TEST(Bogoliubov, HeisenbergG2MatchesClosedForm) {
  EXPECT_NEAR(heisenberg_G2(0.5, pi, 0.0), 0.419008605363286, 1e-12);
  for (double k : {0.0, 0.2, 0.8, 1.5})
    for (int i = 0; i < 16; ++i) {
      const double pa = 0.3 + 2 * pi * i / 16, pb = 0.3;
      EXPECT_NEAR(heisenberg_G2(k, pa, pb), G2_closed(k, pa - pb), 1e-12 * std::max(1.0, G2_closed(k, pi)));
    }
}
