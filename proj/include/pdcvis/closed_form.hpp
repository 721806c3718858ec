#pragma once

// Analytic results for the PDC interference experiment: correlation and
// click-probability curves, visibilities of the four detection setups,
// critical parameters, and the Heisenberg-picture route to G2.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <variant>
#include <vector>

#include "pdcvis/errors.hpp"
#include "pdcvis/scheme.hpp"

namespace pdcvis {

/// CHSH benchmark visibility 1/sqrt(2).
inline constexpr double v_crit = 1.0 / std::numbers::sqrt2;

namespace detail {
inline void check_gain(double k) {
  if (!(k >= 0.0)) throw usage_error("gain must be non-negative");
}
inline void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw usage_error("transmitivity must lie in (0, 1]");
}
inline void check_ports(int m) {
  if (m < 1) throw usage_error("port count must be at least 1");
}
inline double sin2_half(double delta) {
  const double s = std::sin(delta / 2.0);
  return s * s;
}
inline double tanh2(double k) {
  const double t = std::tanh(k);
  return t * t;
}
}  // namespace detail

inline double mean_photon_number(double k) {
  detail::check_gain(k);
  const double s = std::sinh(k);
  return s * s;
}

/// G2(a+, b+) = sinh^2 K (sinh^2 K + cosh^2 K sin^2(delta/2)).
inline double G2_closed(double k, double delta) {
  detail::check_gain(k);
  const double s2 = std::sinh(k) * std::sinh(k), c2 = std::cosh(k) * std::cosh(k);
  return s2 * (s2 + c2 * detail::sin2_half(delta));
}

/// g2 = 1 + sin^2(delta/2) + sin^2(delta/2) / sinh^2 K; undefined at K = 0.
inline double g2_closed(double k, double delta) {
  detail::check_gain(k);
  if (k == 0.0) throw undefined_quantity("g2 is undefined for the vacuum (K = 0)");
  const double s2 = std::sinh(k) * std::sinh(k), q = detail::sin2_half(delta);
  return 1.0 + q + q / s2;
}

inline double v2_linear(double k) {
  detail::check_gain(k);
  return 1.0 / (1.0 + 2.0 * detail::tanh2(k));
}

inline double v2_onoff(double k) {
  detail::check_gain(k);
  const double c = std::cosh(k);
  return 1.0 / (2.0 * c * c - 1.0);
}

inline double v2_hybrid(double k, double tau) {
  detail::check_gain(k);
  detail::check_tau(tau);
  return 1.0 / (1.0 + 2.0 * tau * tau * detail::tanh2(k));
}

inline double v2_multiport(double k, int ports) {
  detail::check_gain(k);
  detail::check_ports(ports);
  const double x = detail::tanh2(k) / (double(ports) * ports);
  return (1.0 - x) / (1.0 + x);
}

/// Joint click probability of two on-off detectors on a+ and b+.
inline double p_onoff_closed(double k, double delta) {
  detail::check_gain(k);
  const double c2 = std::cosh(k) * std::cosh(k);
  return 1.0 - 2.0 / c2 + 1.0 / (c2 * c2) / (1.0 - detail::tanh2(k) * detail::sin2_half(delta));
}

/// Probability that a+ and b+ are both empty.
inline double p0_closed(double k, double delta) {
  detail::check_gain(k);
  const double c2 = std::cosh(k) * std::cosh(k);
  return 1.0 / (c2 * c2) / (1.0 - detail::tanh2(k) * detail::sin2_half(delta));
}

/// Probability that a+ is occupied while b+ is empty.
inline double p1_closed(double k, double delta) {
  detail::check_gain(k);
  const double c2 = std::cosh(k) * std::cosh(k);
  return (c2 - 1.0 / (1.0 - detail::tanh2(k) * detail::sin2_half(delta))) / (c2 * c2);
}

/// M^2-scaled single-port coincidence probability behind M-port splitters,
/// conditioned on vacuum at the unmonitored ports.
inline double p_multiport_closed(double k, int ports, double delta) {
  detail::check_gain(k);
  detail::check_ports(ports);
  const double m2 = double(ports) * ports, x = detail::tanh2(k) / m2;
  return m2 * (1.0 - 2.0 * (1.0 - x) + (1.0 - x) * (1.0 - x) / (1.0 - x * detail::sin2_half(delta)));
}

/// Visibility of a scheme with its analytic extremes (delta = pi max, delta = 0 min).
inline VisibilityResult closed_visibility(const DetectionScheme& scheme, double k) {
  detail::check_gain(k);
  double vmax = 0, vmin = 0, v = 0;
  const auto& cond = scheme.conditioning();
  if (scheme.kind() == DetectorKind::linear) {
    const double tau = std::holds_alternative<TapConditioning>(cond) ? std::get<TapConditioning>(cond).tau : 1.0;
    // The conditioned state is a PDC state with tanh K' = tau tanh K.
    const double kp = std::atanh(tau * std::tanh(k));
    if (kp == 0.0) {
      vmax = vmin = 1.0;
      v = 1.0;
    } else {
      vmax = g2_closed(kp, std::numbers::pi);
      vmin = g2_closed(kp, 0.0);
      v = v2_hybrid(k, tau);
    }
  } else {
    const int m = std::holds_alternative<MultiportConditioning>(cond) ? std::get<MultiportConditioning>(cond).ports : 1;
    vmax = p_multiport_closed(k, m, std::numbers::pi);
    vmin = p_multiport_closed(k, m, 0.0);
    v = v2_multiport(k, m);
  }
  VisibilityResult r = make_visibility(vmax, vmin);
  r.scheme = scheme;
  r.gain = k;
  r.delta_at_max = std::numbers::pi;
  r.delta_at_min = 0.0;
  // The ratio form loses precision as K -> 0; the closed expression does not.
  r.visibility = v;
  r.degenerate = false;
  return r;
}

// ---------------------------------------------------------------------------
// Critical values

enum class CriticalName { K_crit_linear, K_crit_onoff, tau_crit, v_crit };

struct CriticalValue {
  CriticalName name;
  double value;
  double residual;
};

inline std::string to_string(CriticalName n) {
  switch (n) {
    case CriticalName::K_crit_linear: return "K_crit_linear";
    case CriticalName::K_crit_onoff: return "K_crit_onoff";
    case CriticalName::tau_crit: return "tau_crit";
    case CriticalName::v_crit: return "v_crit";
  }
  return "?";
}

/// Gain at which the visibility of `kind` falls to 1/sqrt(2); bisection on [0, 2].
inline CriticalValue critical_gain(DetectorKind kind) {
  auto v = [kind](double k) { return kind == DetectorKind::linear ? v2_linear(k) : v2_onoff(k); };
  double lo = 0.0, hi = 2.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (v(mid) > v_crit ? lo : hi) = mid;
  }
  const double k = 0.5 * (lo + hi);
  return {kind == DetectorKind::linear ? CriticalName::K_crit_linear : CriticalName::K_crit_onoff, k,
          v(k) - v_crit};
}

/// Largest tap transmitivity whose visibility stays above 1/sqrt(2) for every K:
/// sqrt(1/sqrt2 - 1/2). The residual is taken in the K -> infinity limit.
inline CriticalValue critical_tau() {
  const double tau = std::sqrt(v_crit - 0.5);
  return {CriticalName::tau_crit, tau, 1.0 / (1.0 + 2.0 * tau * tau) - v_crit};
}

inline CriticalValue critical_visibility() { return {CriticalName::v_crit, v_crit, 0.0}; }

// ---------------------------------------------------------------------------
// Heisenberg picture

/// Vacuum modes in the order aH, aV, bH, bV.
enum class VacuumMode { aH = 0, aV = 1, bH = 2, bV = 3 };

/// sum_k (annihilation[k] c_k + creation[k] c_k^dagger) over the four vacuum modes.
struct LadderCombination {
  std::array<std::complex<double>, 4> annihilation{};
  std::array<std::complex<double>, 4> creation{};

  LadderCombination adjoint() const {
    LadderCombination r;
    for (std::size_t i = 0; i < 4; ++i) {
      r.annihilation[i] = std::conj(creation[i]);
      r.creation[i] = std::conj(annihilation[i]);
    }
    return r;
  }

  friend LadderCombination operator+(const LadderCombination& x, const LadderCombination& y) {
    LadderCombination r;
    for (std::size_t i = 0; i < 4; ++i) {
      r.annihilation[i] = x.annihilation[i] + y.annihilation[i];
      r.creation[i] = x.creation[i] + y.creation[i];
    }
    return r;
  }

  friend LadderCombination operator*(std::complex<double> c, const LadderCombination& x) {
    LadderCombination r;
    for (std::size_t i = 0; i < 4; ++i) {
      r.annihilation[i] = c * x.annihilation[i];
      r.creation[i] = c * x.creation[i];
    }
    return r;
  }
};

struct BogoliubovEntry {
  VacuumMode mode;
  bool dagger;  // true: transform of the creation operator
  LadderCombination image;
};

/// S^dagger x S for the annihilation and creation operators of all four modes,
/// with S the product of the two two-mode squeezers.
inline std::vector<BogoliubovEntry> bogoliubov_transform_table(double k) {
  detail::check_gain(k);
  const double c = std::cosh(k), s = std::sinh(k);
  auto idx = [](VacuumMode m) { return static_cast<std::size_t>(m); };
  auto ann = [&](VacuumMode self, VacuumMode partner, double sign) {
    LadderCombination l;
    l.annihilation[idx(self)] = c;
    l.creation[idx(partner)] = sign * s;
    return l;
  };
  std::vector<BogoliubovEntry> table;
  const struct {
    VacuumMode self, partner;
    double sign;
  } rows[] = {{VacuumMode::aH, VacuumMode::bV, +1.0},
              {VacuumMode::aV, VacuumMode::bH, -1.0},
              {VacuumMode::bV, VacuumMode::aH, +1.0},
              {VacuumMode::bH, VacuumMode::aV, -1.0}};
  for (const auto& r : rows) {
    const LadderCombination a = ann(r.self, r.partner, r.sign);
    table.push_back({r.self, false, a});
    table.push_back({r.self, true, a.adjoint()});
  }
  return table;
}

/// <0| X Y |0> for linear combinations of vacuum ladder operators.
inline std::complex<double> vacuum_two_point(const LadderCombination& x, const LadderCombination& y) {
  std::complex<double> acc{};
  for (std::size_t i = 0; i < 4; ++i) acc += x.annihilation[i] * y.creation[i];
  return acc;
}

/// <0| W X Y Z |0> by Wick pairing; exact for linear ladder combinations.
inline std::complex<double> vacuum_four_point(const LadderCombination& w, const LadderCombination& x,
                                              const LadderCombination& y, const LadderCombination& z) {
  return vacuum_two_point(w, x) * vacuum_two_point(y, z) + vacuum_two_point(w, y) * vacuum_two_point(x, z) +
         vacuum_two_point(w, z) * vacuum_two_point(x, y);
}

/// G2(a+, b+) from the squeezing transforms: <0| A+^dag B+^dag B+ A+ |0>
/// with A+ = (S^dag aH S + e^{i phi_a} S^dag aV S)/sqrt 2 (likewise B+).
inline double heisenberg_G2(double k, double phi_a, double phi_b) {
  const auto table = bogoliubov_transform_table(k);
  auto image = [&](VacuumMode m) {
    for (const auto& e : table)
      if (e.mode == m && !e.dagger) return e.image;
    throw usage_error("missing transform");
  };
  const double r = 1.0 / std::numbers::sqrt2;
  const LadderCombination a_plus =
      r * image(VacuumMode::aH) + std::polar(r, phi_a) * image(VacuumMode::aV);
  const LadderCombination b_plus =
      r * image(VacuumMode::bH) + std::polar(r, phi_b) * image(VacuumMode::bV);
  return vacuum_four_point(a_plus.adjoint(), b_plus.adjoint(), b_plus, a_plus).real();
}

}  // namespace pdcvis
