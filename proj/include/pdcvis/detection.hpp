#pragma once

// Detector models evaluated on explicit Fock states: linear-efficiency
// correlations (G2, g2) and binary on-off click statistics, plus the
// multiport coincidence probability and curve-based visibilities.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "pdcvis/errors.hpp"
#include "pdcvis/fock.hpp"
#include "pdcvis/optics.hpp"
#include "pdcvis/scheme.hpp"
#include "pdcvis/source.hpp"

namespace pdcvis {

/// The two monitored modes; defaults to (a,+) and (b,+) of the unsplit beams.
struct DetectorPair {
  ModeLabel x = mode("a", Polarization::plus);
  ModeLabel y = mode("b", Polarization::plus);
};

struct CorrelationResult {
  double G2;
  /// Empty when either mean photon number vanishes.
  std::optional<double> g2;
};

inline CorrelationResult g2_numeric(const FockState& state_pm, const DetectorPair& det = {}) {
  const double G2 = normal_ordered_pair_correlation(state_pm, det.x, det.y);
  const double nx = number_expectation(state_pm, det.x), ny = number_expectation(state_pm, det.y);
  if (nx <= 0.0 || ny <= 0.0) return {G2, std::nullopt};
  return {G2, G2 / (nx * ny)};
}

struct VacuumMarginals {
  double p0;  // x and y both empty
  double p1;  // x occupied, y empty
  double p2;  // x empty, y occupied
};

inline VacuumMarginals onoff_vacuum_marginals(const FockState& state_pm, const DetectorPair& det = {}) {
  const std::size_t ix = state_pm.modes().index_of(det.x), iy = state_pm.modes().index_of(det.y);
  if (ix == iy) throw usage_error("detector modes must differ");
  VacuumMarginals m{0.0, 0.0, 0.0};
  for (const auto& [occ, a] : state_pm.terms()) {
    const double w = std::norm(a);
    const bool ex = occ[ix] == 0, ey = occ[iy] == 0;
    if (ex && ey)
      m.p0 += w;
    else if (!ex && ey)
      m.p1 += w;
    else if (ex && !ey)
      m.p2 += w;
  }
  return m;
}

struct ClickRoutes {
  double direct;               // sum over components with both modes occupied
  double inclusion_exclusion;  // total - P(x empty) - P(y empty) + P(both empty)
};

/// Both evaluations of the joint click probability. Probabilities refer to
/// the retained components, so "total" is the retained squared norm.
inline ClickRoutes onoff_joint_click_routes(const FockState& state_pm, const DetectorPair& det = {}) {
  const std::size_t ix = state_pm.modes().index_of(det.x), iy = state_pm.modes().index_of(det.y);
  if (ix == iy) throw usage_error("detector modes must differ");
  double direct = 0.0, total = 0.0, x_empty = 0.0, y_empty = 0.0, both_empty = 0.0;
  for (const auto& [occ, a] : state_pm.terms()) {
    const double w = std::norm(a);
    total += w;
    if (occ[ix] >= 1 && occ[iy] >= 1) direct += w;
    if (occ[ix] == 0) x_empty += w;
    if (occ[iy] == 0) y_empty += w;
    if (occ[ix] == 0 && occ[iy] == 0) both_empty += w;
  }
  return {direct, total - x_empty - y_empty + both_empty};
}

/// Probability that on-off detectors on both monitored modes click.
inline double onoff_joint_click_numeric(const FockState& state_pm, const DetectorPair& det = {}) {
  const ClickRoutes r = onoff_joint_click_routes(state_pm, det);
  if (std::abs(r.direct - r.inclusion_exclusion) > 1e-12)
    throw validation_error("joint click routes disagree");
  return r.direct;
}

// ---------------------------------------------------------------------------
// Visibility extraction

/// Visibility from sampled points; extremes taken over the samples.
inline VisibilityResult visibility_from_curve(const std::vector<InterferencePoint>& points) {
  if (points.empty()) throw usage_error("visibility_from_curve needs at least one point");
  auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                      [](const auto& p, const auto& q) { return p.value < q.value; });
  VisibilityResult r = make_visibility(hi->value, lo->value);
  r.delta_at_max = hi->delta;
  r.delta_at_min = lo->delta;
  return r;
}

namespace detail {

/// Golden-section search for an extremum of f inside [a, b]; sign = +1 max, -1 min.
inline double golden_section(const std::function<double(double)>& f, double a, double b, double sign,
                             double tol = 1e-10) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = sign * f(c), fd = sign * f(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = sign * f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = sign * f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Samples f on `samples` points over [0, 2 pi) and refines both extremes by
/// golden-section search around the best samples.
inline VisibilityResult visibility_from_function(const std::function<double(double)>& f, int samples = 64) {
  if (samples < 64) throw usage_error("at least 64 samples are needed to bracket the extremes");
  const double step = 2.0 * std::numbers::pi / samples;
  std::vector<InterferencePoint> pts;
  pts.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) pts.push_back({i * step, f(i * step)});
  const VisibilityResult coarse = visibility_from_curve(pts);
  if (coarse.degenerate) return coarse;

  auto refine = [&](double at, double value, double sign) -> std::pair<double, double> {
    const double d = detail::golden_section(f, at - step, at + step, sign);
    const double v = f(d);
    return sign * v > sign * value ? std::pair{canonical_phase(d), v} : std::pair{at, value};
  };
  const auto [dmax, vmax] = refine(coarse.delta_at_max, coarse.value_max, +1.0);
  const auto [dmin, vmin] = refine(coarse.delta_at_min, coarse.value_min, -1.0);
  VisibilityResult r = make_visibility(vmax, vmin);
  r.delta_at_max = dmax;
  r.delta_at_min = dmin;
  return r;
}

// ---------------------------------------------------------------------------
// Multiport coincidences

enum class MultiportRoute {
  conditioned,  // analytic conditioned state with tau = 1/M
  explicit_split,  // explicit M-port expansion, then vacuum projection
};

/// Coincidence probability at the monitored ports (a1+, b1+) after conditioning
/// on vacuum at ports 2..M, scaled by M^2.
inline double multiport_click_numeric(Gain gain, int ports, double delta, int n_max,
                                      MultiportRoute route = MultiportRoute::conditioned) {
  if (ports < 1) throw usage_error("port count must be at least 1");
  const double m2 = double(ports) * ports;
  if (route == MultiportRoute::conditioned || ports == 1) {
    const FockState cond = build_conditioned_state(gain, ConditioningSpec::from_ports(ports), n_max, TailPolicy::allow);
    return m2 * onoff_joint_click_numeric(apply_analyzers(cond, delta, 0.0));
  }
  FockState s = build_pdc_state(gain, n_max, TailPolicy::allow);
  s = apply_multiport(s, MultiportSpec(Side::a, ports));
  s = apply_multiport(s, MultiportSpec(Side::b, ports));
  const FockState cond = condition_on_unmonitored_vacuum(s).state;
  return m2 * onoff_joint_click_numeric(apply_analyzers(cond, delta, 0.0));
}

/// Unconditioned probabilities P(a_i+ and b_j+ click, every other port of
/// both sides empty) for all M^2 port pairs, from the explicit expansion.
inline std::vector<std::vector<double>> multiport_port_click_matrix(Gain gain, int ports, double delta, int n_max) {
  if (ports < 2) throw usage_error("port matrix needs at least 2 ports");
  FockState s = build_pdc_state(gain, n_max, TailPolicy::allow);
  s = apply_multiport(s, MultiportSpec(Side::a, ports));
  s = apply_multiport(s, MultiportSpec(Side::b, ports));
  s = apply_analyzers(s, delta, 0.0);

  std::vector<std::vector<double>> out(static_cast<std::size_t>(ports), std::vector<double>(static_cast<std::size_t>(ports)));
  const auto& modes = s.modes();
  for (const auto& [occ, a] : s.terms()) {
    // Which ports of each side carry photons.
    int a_port = 0, b_port = 0;
    bool a_multi = false, b_multi = false;
    for (std::size_t i = 0; i < modes.size(); ++i) {
      if (occ[i] == 0) continue;
      int& slot = modes[i].arm == "a" ? a_port : b_port;
      bool& multi = modes[i].arm == "a" ? a_multi : b_multi;
      if (slot != 0 && slot != modes[i].port) multi = true;
      slot = modes[i].port;
    }
    if (a_multi || b_multi || a_port == 0 || b_port == 0) continue;
    const ModeLabel ap{"a", a_port, Polarization::plus}, bp{"b", b_port, Polarization::plus};
    if (occ[modes.index_of(ap)] == 0 || occ[modes.index_of(bp)] == 0) continue;
    out[static_cast<std::size_t>(a_port - 1)][static_cast<std::size_t>(b_port - 1)] += std::norm(a);
  }
  return out;
}

}  // namespace pdcvis
