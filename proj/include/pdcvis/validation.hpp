#pragma once

// Numeric-vs-closed-form checks run by `pdcvis validate`.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdcvis/closed_form.hpp"
#include "pdcvis/detection.hpp"
#include "pdcvis/optics.hpp"
#include "pdcvis/source.hpp"
#include "pdcvis/sweep.hpp"

namespace pdcvis {

enum class ValidationLevel { fast, full };

inline ValidationLevel parse_level(const std::string& s) {
  if (s == "fast") return ValidationLevel::fast;
  if (s == "full") return ValidationLevel::full;
  throw usage_error("unknown level '" + s + "' (expected fast or full)");
}

struct CheckResult {
  std::string name;
  double tolerance;
  double observed;
  bool passed;
  std::string note;
};

struct ValidationReport {
  ValidationLevel level;
  std::vector<CheckResult> checks;

  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
  }
};

namespace detail {

inline CheckResult bounded(std::string name, double observed, double tol, std::string note = {}) {
  return {std::move(name), tol, observed, std::isfinite(observed) && observed <= tol, std::move(note)};
}

inline std::vector<double> grid16() {
  std::vector<double> out;
  for (int i = 0; i < 16; ++i) out.push_back(2.0 * std::numbers::pi * i / 16);
  return out;
}

}  // namespace detail

inline const std::vector<double>& oracle_gains() {
  static const std::vector<double> g{0.1, 0.3, 0.5, 0.8};
  return g;
}

/// max |numeric G2 - closed G2| over the oracle (K, delta) grid.
inline double g2_grid_error(const std::vector<double>& gains, const std::vector<double>& deltas) {
  double err = 0.0;
  for (double k : gains) {
    const FockState s = build_pdc_state(Gain(k), required_n_max_for_correlations(k));
    for (double d : deltas) err = std::max(err, std::abs(g2_numeric(apply_analyzers(s, d, 0.0)).G2 - G2_closed(k, d)));
  }
  return err;
}

struct ClickGridErrors {
  double click = 0.0;
  double p0 = 0.0;
  double p1 = 0.0;
  double routes = 0.0;
};

inline ClickGridErrors click_grid_errors(const std::vector<double>& gains, const std::vector<double>& deltas) {
  ClickGridErrors e;
  for (double k : gains) {
    const FockState s = build_pdc_state(Gain(k), required_n_max(k));
    for (double d : deltas) {
      const FockState pm = apply_analyzers(s, d, 0.0);
      const ClickRoutes r = onoff_joint_click_routes(pm);
      const VacuumMarginals m = onoff_vacuum_marginals(pm);
      e.click = std::max(e.click, std::abs(r.direct - p_onoff_closed(k, d)));
      e.routes = std::max(e.routes, std::abs(r.direct - r.inclusion_exclusion));
      e.p0 = std::max(e.p0, std::abs(m.p0 - p0_closed(k, d)));
      e.p1 = std::max({e.p1, std::abs(m.p1 - p1_closed(k, d)), std::abs(m.p2 - p1_closed(k, d))});
    }
  }
  return e;
}

/// 1 - fidelity between the explicitly tapped-and-projected state and the
/// analytic conditioned state.
inline double tap_infidelity(double k, double tau) {
  const int n = required_n_max(k);
  FockState s = build_pdc_state(Gain(k), n);
  s = apply_tap(s, TapSpec(Side::a, tau));
  s = apply_tap(s, TapSpec(Side::b, tau));
  const FockState explicit_path = condition_on_unmonitored_vacuum(s).state;
  return 1.0 - fidelity(explicit_path, build_conditioned_state(Gain(k), ConditioningSpec::from_tau(tau), n));
}

inline double multiport_infidelity(double k, int ports, int n_max) {
  FockState s = build_pdc_state(Gain(k), n_max, TailPolicy::allow);
  s = apply_multiport(s, MultiportSpec(Side::a, ports));
  s = apply_multiport(s, MultiportSpec(Side::b, ports));
  const FockState explicit_path = condition_on_unmonitored_vacuum(s).state;
  return 1.0 - fidelity(explicit_path,
                        build_conditioned_state(Gain(k), ConditioningSpec::from_ports(ports), n_max, TailPolicy::allow));
}

/// max |explicit-split p_M - closed p_M| over the 16-point grid.
inline double multiport_click_error(double k, int ports) {
  const int n = required_n_max(k);
  double err = 0.0;
  for (double d : detail::grid16())
    err = std::max(err, std::abs(multiport_click_numeric(Gain(k), ports, d, n, MultiportRoute::explicit_split) -
                                 p_multiport_closed(k, ports, d)));
  return err;
}

inline double heisenberg_error(const std::vector<double>& gains) {
  double err = 0.0;
  for (double k : gains)
    for (double d : detail::grid16()) err = std::max(err, std::abs(heisenberg_G2(k, 0.4 + d, 0.4) - G2_closed(k, d)));
  return err;
}

inline double pm_expansion_error(double k, double phi_a, double phi_b, int n_max) {
  const FockState direct = pm_basis_expansion(Gain(k), phi_a, phi_b, n_max, TailPolicy::allow);
  const FockState rotated = apply_analyzers(build_pdc_state(Gain(k), n_max, TailPolicy::allow), phi_a, phi_b);
  return max_amplitude_difference(direct, rotated);
}

inline double product_form_error(double k, int n_max) {
  return max_amplitude_difference(build_pdc_state(Gain(k), n_max, TailPolicy::allow),
                                  build_product_form(Gain(k), n_max, TailPolicy::allow));
}

/// max |curve-extracted visibility - closed visibility|.
inline double visibility_oracle_error(const DetectionScheme& scheme, const std::vector<double>& gains) {
  double err = 0.0;
  for (double k : gains) {
    const detail::NumericCurve curve(scheme, k, std::nullopt);
    const double v = visibility_from_function(std::cref(curve), 64).visibility;
    err = std::max(err, std::abs(v - closed_visibility(scheme, k).visibility));
  }
  return err;
}

inline ValidationReport cmd_validate(ValidationLevel level) {
  ValidationReport rep{level, {}};
  auto& out = rep.checks;
  const auto deltas = detail::grid16();
  const auto& gains = oracle_gains();

  out.push_back(detail::bounded("G2 numeric vs closed form", g2_grid_error(gains, deltas), 1e-6));
  const ClickGridErrors ce = click_grid_errors(gains, deltas);
  out.push_back(detail::bounded("on-off click probability vs closed form", ce.click, 1e-6));
  out.push_back(detail::bounded("click probability: direct vs inclusion-exclusion", ce.routes, 1e-12));
  out.push_back(detail::bounded("p0 vs closed form", ce.p0, 1e-6));
  out.push_back(detail::bounded("p1 (and p2) vs closed form", ce.p1, 1e-6));
  for (double tau : {0.25, 0.5})
    out.push_back(detail::bounded("tap conditioning infidelity, K=0.5 tau=" + format_number(tau), tap_infidelity(0.5, tau), 1e-8));
  out.push_back(detail::bounded("M=2 explicit multiport vs tau=1/2 infidelity, K=0.5", multiport_infidelity(0.5, 2, required_n_max(0.5)), 1e-8));
  out.push_back(detail::bounded("M=2 scaled click probability vs closed form, K=0.5", multiport_click_error(0.5, 2), 1e-6));
  out.push_back(detail::bounded("Heisenberg-picture G2 vs closed form", heisenberg_error(gains), 1e-12));
  out.push_back(detail::bounded("+/- combinatorial expansion vs rotation, K=0.6 n_max=12", pm_expansion_error(0.6, 0.7, 0.2, 12), 1e-10));
  for (double k : {0.3, 0.8})
    out.push_back(detail::bounded("product form vs PDC state, K=" + format_number(k) + " n_max=24", product_form_error(k, 24), 1e-10));
  for (const auto& c : cmd_critical().values)
    out.push_back(detail::bounded("residual of " + to_string(c.name), std::abs(c.residual), 1e-10));

  if (level == ValidationLevel::fast) return rep;

  std::vector<double> dense;
  for (int i = 0; i < 64; ++i) dense.push_back(2.0 * std::numbers::pi * i / 64);
  const std::vector<double> wide{0.05, 0.2, 0.4, 0.6, 0.7, 0.8};
  out.push_back(detail::bounded("G2 numeric vs closed form, 64-point grid", g2_grid_error(wide, dense), 1e-6));
  const ClickGridErrors cd = click_grid_errors(wide, dense);
  out.push_back(detail::bounded("click probability vs closed form, 64-point grid", cd.click, 1e-6));
  out.push_back(detail::bounded("p0/p1 vs closed form, 64-point grid", std::max(cd.p0, cd.p1), 1e-6));
  for (const auto& s : {DetectionScheme::linear(), DetectionScheme::onoff(), DetectionScheme::hybrid(0.3),
                        DetectionScheme::multiport(3)})
    out.push_back(detail::bounded("visibility from numeric curve vs closed form, " + s.tag(),
                                  visibility_oracle_error(s, {0.1, 0.3, 0.5, 0.8}), 1e-6));
  for (double k : {0.3, 0.8})
    out.push_back(detail::bounded("M=3 explicit multiport infidelity, K=" + format_number(k), multiport_infidelity(k, 3, 8), 1e-8));
  out.push_back(detail::bounded("Heisenberg-picture G2, K up to 2", heisenberg_error({1.0, 1.5, 2.0}), 1e-11));

  // Truncation convergence: G2 error at each n_max must sit under the analytic
  // second-moment tail and must not grow with n_max.
  const double k = 0.5, d = std::numbers::pi;
  double prev = std::numeric_limits<double>::infinity(), worst_ratio = 0.0;
  bool monotone = true;
  for (int n = 2; n <= required_n_max_for_correlations(k); n += 2) {
    const FockState s = apply_analyzers(build_pdc_state(Gain(k), n, TailPolicy::allow), d, 0.0);
    const double err = std::abs(g2_numeric(s).G2 - G2_closed(k, d));
    worst_ratio = std::max(worst_ratio, err / moment_tail_bound(k, n));
    monotone = monotone && err <= prev;
    prev = err;
  }
  out.push_back(detail::bounded("n_max convergence: G2 error / second-moment tail bound, K=0.5", worst_ratio, 1.0));
  out.push_back({"n_max convergence: G2 error non-increasing, K=0.5", 0.0, monotone ? 0.0 : 1.0, monotone, {}});
  return rep;
}

inline void write_validation(std::ostream& os, const ValidationReport& r, OutputFormat f) {
  const char* level = r.level == ValidationLevel::fast ? "fast" : "full";
  if (f == OutputFormat::csv) {
    os << "# tool: " << tool_version << "\n# level: " << level << "\ncheck,tolerance,observed,status\n";
    for (const auto& c : r.checks)
      os << '"' << c.name << "\"," << format_number(c.tolerance) << ',' << format_number(c.observed) << ','
         << (c.passed ? "PASS" : "FAIL") << '\n';
    os << "# result: " << (r.passed() ? "PASS" : "FAIL") << '\n';
    return;
  }
  nlohmann::ordered_json j = {{"tool", tool_version}, {"level", level}, {"passed", r.passed()},
                              {"checks", nlohmann::ordered_json::array()}};
  for (const auto& c : r.checks)
    j["checks"].push_back({{"check", c.name}, {"tolerance", c.tolerance}, {"observed", rounded(c.observed)}, {"passed", c.passed}});
  os << j.dump(2) << '\n';
}

}  // namespace pdcvis
