#pragma once

// Parameter sweeps behind the command-line tool: visibility-vs-K and
// interference-vs-delta datasets, the figure presets, the critical-value
// report, and CSV / JSON writers with fixed 12-digit formatting.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pdcvis/closed_form.hpp"
#include "pdcvis/detection.hpp"
#include "pdcvis/errors.hpp"
#include "pdcvis/scheme.hpp"
#include "pdcvis/source.hpp"

namespace pdcvis {

inline constexpr const char* tool_version = "pdcvis 1.0.0";

enum class OutputFormat { csv, json };
enum class Method { closed, numeric };
enum class SweepKind { visibility, interference };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw usage_error("unknown format '" + s + "' (expected csv or json)");
}

inline Method parse_method(const std::string& s) {
  if (s == "closed") return Method::closed;
  if (s == "numeric") return Method::numeric;
  throw usage_error("unknown method '" + s + "' (expected closed or numeric)");
}

/// Formats with 12 significant digits; never prints "-0".
inline std::string format_number(double v) {
  if (!std::isfinite(v)) throw validation_error("non-finite value in dataset");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v + 0.0);
  return buf;
}

struct SweepRequest {
  SweepKind kind = SweepKind::visibility;
  std::vector<DetectionScheme> schemes;
  double k_start = 0.0;
  double k_stop = 3.0;
  int k_steps = 301;
  int delta_steps = 360;
  std::optional<int> n_max;
  Method method = Method::closed;
  OutputFormat format = OutputFormat::csv;
  std::string preset;
  /// Constant 1/sqrt2 and 1/3 columns (fig2).
  bool reference_columns = false;
  int jobs = 1;

  void validate() const {
    if (schemes.empty()) throw usage_error("no detection scheme selected");
    if (k_steps < 2 && !(kind == SweepKind::interference && k_steps == 1 && k_start == k_stop))
      throw usage_error("k-steps must be at least 2");
    if (!std::isfinite(k_start) || !std::isfinite(k_stop) || k_start < 0.0 || k_stop < k_start)
      throw usage_error("K range must satisfy 0 <= k-start <= k-stop");
    if (k_stop > max_gain) throw config_error("K above " + format_number(max_gain) + " is outside the builder limits");
    if (delta_steps < 2) throw usage_error("delta-steps must be at least 2");
    if (n_max && *n_max < 0) throw usage_error("n-max must be non-negative");
    if (jobs < 1) throw usage_error("jobs must be at least 1");
  }
};

/// Inclusive of both endpoints.
inline std::vector<double> k_grid(double start, double stop, int steps) {
  if (steps == 1) return {start};
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = start + (stop - start) * i / (steps - 1);
  out.back() = stop;
  return out;
}

/// Exclusive of 2 pi.
inline std::vector<double> delta_grid(int steps) {
  std::vector<double> out(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) out[static_cast<std::size_t>(i)] = 2.0 * std::numbers::pi * i / steps;
  return out;
}

struct CurveDataset {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::string abscissa;
  std::vector<std::string> columns;
  std::vector<double> x;
  /// rows[i][j]: value of column j at x[i].
  std::vector<std::vector<double>> rows;

  std::size_t column_index(const std::string& name) const {
    auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw usage_error("no column '" + name + "'");
    return static_cast<std::size_t>(it - columns.begin());
  }
  std::vector<double> column(const std::string& name) const {
    const std::size_t j = column_index(name);
    std::vector<double> out;
    for (const auto& r : rows) out.push_back(r[j]);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Parallel evaluation into fixed slots

inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first;
  std::mutex m;
  auto run = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!first) first = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

// ---------------------------------------------------------------------------
// Point evaluation

namespace detail {

inline double scheme_tau(const DetectionScheme& s) {
  auto* t = std::get_if<TapConditioning>(&s.conditioning());
  return t ? t->tau : 1.0;
}

inline int scheme_ports(const DetectionScheme& s) {
  auto* m = std::get_if<MultiportConditioning>(&s.conditioning());
  return m ? m->ports : 1;
}

/// Quantity whose delta dependence defines the visibility: G2 for linear
/// detection (same contrast as g2), M^2-scaled click probability for on-off.
inline double closed_curve_value(const DetectionScheme& s, double k, double delta) {
  if (s.kind() == DetectorKind::linear) return G2_closed(std::atanh(scheme_tau(s) * std::tanh(k)), delta);
  return p_multiport_closed(k, scheme_ports(s), delta);
}

/// Numeric curve for one (scheme, K): the state is built once, analyzers
/// are applied per delta.
struct NumericCurve {
  FockState base;
  DetectionScheme scheme;
  double tail;

  NumericCurve(const DetectionScheme& s, double k, std::optional<int> n_max)
      : base(FockState::vacuum(baseline_modes(), 0)), scheme(s), tail(0.0) {
    const bool linear = s.kind() == DetectorKind::linear;
    const int n = n_max ? *n_max : (linear ? required_n_max_for_correlations(k) : required_n_max(k));
    const TailPolicy policy = n_max ? TailPolicy::allow : TailPolicy::enforce;
    tail = linear ? moment_tail_bound(k, n) : tail_bound(k, n);
    const double tau = linear ? scheme_tau(s) : 1.0 / scheme_ports(s);
    base = tau == 1.0 ? build_pdc_state(Gain(k), n, policy)
                      : build_conditioned_state(Gain(k), ConditioningSpec::from_tau(tau), n, policy);
  }

  double operator()(double delta) const {
    const FockState pm = apply_analyzers(base, delta, 0.0);
    if (scheme.kind() == DetectorKind::linear) return g2_numeric(pm).G2;
    const double m = scheme_ports(scheme);
    return m * m * onoff_joint_click_numeric(pm);
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Sweeps

namespace detail {

inline std::string method_name(Method m) { return m == Method::closed ? "closed" : "numeric"; }

inline std::vector<std::pair<std::string, std::string>> base_metadata(const SweepRequest& r, const char* command) {
  std::string schemes;
  for (const auto& s : r.schemes) schemes += (schemes.empty() ? "" : ";") + s.tag();
  return {{"tool", tool_version},
          {"command", command},
          {"preset", r.preset.empty() ? "none" : r.preset},
          {"schemes", schemes},
          {"method", method_name(r.method)},
          {"k_start", format_number(r.k_start)},
          {"k_stop", format_number(r.k_stop)},
          {"k_steps", std::to_string(r.k_steps)},
          {"delta_steps", std::to_string(r.delta_steps)},
          {"n_max", r.n_max ? std::to_string(*r.n_max) : "auto"}};
}

}  // namespace detail

/// V(K), one column per scheme. At K = 0 the numeric curve is identically
/// zero, so the K -> 0 limit V = 1 is reported there.
inline CurveDataset cmd_visibility(const SweepRequest& req) {
  req.validate();
  CurveDataset out;
  out.abscissa = "K";
  out.x = k_grid(req.k_start, req.k_stop, req.k_steps);
  for (const auto& s : req.schemes) out.columns.push_back(s.tag());
  const std::size_t ns = req.schemes.size(), nk = out.x.size();
  out.rows.assign(nk, std::vector<double>(ns));
  std::vector<double> tails(nk * ns, 0.0);

  parallel_for(nk * ns, req.jobs, [&](std::size_t idx) {
    const std::size_t i = idx / ns, j = idx % ns;
    const double k = out.x[i];
    const DetectionScheme& s = req.schemes[j];
    if (req.method == Method::closed) {
      out.rows[i][j] = closed_visibility(s, k).visibility;
    } else if (k == 0.0) {
      out.rows[i][j] = 1.0;
    } else {
      const detail::NumericCurve curve(s, k, req.n_max);
      tails[idx] = curve.tail;
      out.rows[i][j] = visibility_from_function(std::cref(curve), 64).visibility;
    }
  });

  if (req.reference_columns) {
    out.columns.push_back("ref_vcrit");
    out.columns.push_back("ref_thermal");
    for (auto& r : out.rows) {
      r.push_back(v_crit);
      r.push_back(1.0 / 3.0);
    }
  }
  out.metadata = detail::base_metadata(req, "visibility");
  out.metadata.emplace_back("quantity", "visibility");
  out.metadata.emplace_back("truncation_tail_bound", format_number(*std::max_element(tails.begin(), tails.end())));
  return out;
}

/// Interference curves over delta in [0, 2 pi): one column per (scheme, K).
/// Linear columns hold G2, on-off columns the (M^2-scaled) click probability.
inline CurveDataset cmd_interference(const SweepRequest& req) {
  req.validate();
  CurveDataset out;
  out.abscissa = "delta";
  out.x = delta_grid(req.delta_steps);
  const std::vector<double> gains = k_grid(req.k_start, req.k_stop, req.k_steps);
  std::vector<std::pair<DetectionScheme, double>> cols;
  for (const auto& s : req.schemes)
    for (double k : gains) {
      cols.emplace_back(s, k);
      out.columns.push_back(s.tag() + "_K=" + format_number(k));
    }
  const std::size_t nd = out.x.size(), nc = cols.size();
  out.rows.assign(nd, std::vector<double>(nc));
  std::vector<double> tails(nc, 0.0);

  parallel_for(nc, req.jobs, [&](std::size_t j) {
    const auto& [s, k] = cols[j];
    if (req.method == Method::closed) {
      for (std::size_t i = 0; i < nd; ++i) out.rows[i][j] = detail::closed_curve_value(s, k, out.x[i]);
      return;
    }
    const detail::NumericCurve curve(s, k, req.n_max);
    tails[j] = curve.tail;
    for (std::size_t i = 0; i < nd; ++i) out.rows[i][j] = curve(out.x[i]);
  });

  bool any_linear = false, any_onoff = false;
  for (const auto& s : req.schemes) (s.kind() == DetectorKind::linear ? any_linear : any_onoff) = true;
  out.metadata = detail::base_metadata(req, "interference");
  out.metadata.emplace_back("quantity", any_linear && any_onoff ? "G2 (linear); click probability (onoff)"
                                        : any_linear           ? "G2"
                                                               : "click probability");
  out.metadata.emplace_back("truncation_tail_bound", format_number(*std::max_element(tails.begin(), tails.end())));
  return out;
}

// ---------------------------------------------------------------------------
// Presets

inline bool is_preset(const std::string& name) {
  return name == "fig2" || name == "fig3" || name == "fig4" || name == "fig6";
}

/// Fills schemes and grids of `req` for a figure preset. Method, format,
/// jobs and n_max are left as given.
inline void apply_preset(SweepRequest& req, const std::string& name) {
  if (!is_preset(name)) throw usage_error("unknown preset '" + name + "'");
  req.preset = name;
  req.reference_columns = false;
  if (name == "fig3") {
    req.kind = SweepKind::interference;
    req.schemes = {DetectionScheme::onoff()};
    req.k_start = 0.5;
    req.k_stop = 1.5;
    req.k_steps = 3;
    req.delta_steps = 360;
    return;
  }
  req.kind = SweepKind::visibility;
  req.k_start = 0.0;
  req.k_stop = 3.0;
  req.k_steps = 301;
  if (name == "fig2") {
    req.schemes = {DetectionScheme::linear(), DetectionScheme::onoff()};
    req.reference_columns = true;
  } else if (name == "fig4") {
    req.schemes.clear();
    for (double tau : {1.0, critical_tau().value, 1.0 / 3.0, 0.1}) req.schemes.push_back(DetectionScheme::hybrid(tau));
  } else {
    req.schemes.clear();
    for (int m : {1, 2, 3, 5}) req.schemes.push_back(DetectionScheme::multiport(m));
  }
}

inline CurveDataset run_sweep(const SweepRequest& req) {
  return req.kind == SweepKind::visibility ? cmd_visibility(req) : cmd_interference(req);
}

// ---------------------------------------------------------------------------
// Writers

inline void write_csv(std::ostream& os, const CurveDataset& d) {
  for (const auto& [k, v] : d.metadata) os << "# " << k << ": " << v << '\n';
  os << d.abscissa;
  for (const auto& c : d.columns) os << ',' << c;
  os << '\n';
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    os << format_number(d.x[i]);
    for (double v : d.rows[i]) os << ',' << format_number(v);
    os << '\n';
  }
}

/// Numbers go through the same 12-digit text as the CSV writer.
inline double rounded(double v) { return std::strtod(format_number(v).c_str(), nullptr); }

inline nlohmann::ordered_json to_json(const CurveDataset& d) {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : d.metadata) meta[k] = v;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array({d.abscissa});
  for (const auto& c : d.columns) cols.push_back(c);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < d.x.size(); ++i) {
    nlohmann::ordered_json r = nlohmann::ordered_json::array({rounded(d.x[i])});
    for (double v : d.rows[i]) r.push_back(rounded(v));
    rows.push_back(std::move(r));
  }
  return {{"metadata", meta}, {"columns", cols}, {"rows", rows}};
}

inline void write_dataset(std::ostream& os, const CurveDataset& d, OutputFormat f) {
  if (f == OutputFormat::csv)
    write_csv(os, d);
  else
    os << to_json(d).dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Critical values

struct CriticalReport {
  std::vector<CriticalValue> values;
};

inline CriticalReport cmd_critical() {
  return {{critical_gain(DetectorKind::linear), critical_gain(DetectorKind::onoff), critical_tau(),
           critical_visibility()}};
}

inline void write_critical(std::ostream& os, const CriticalReport& r, OutputFormat f) {
  if (f == OutputFormat::csv) {
    os << "# tool: " << tool_version << '\n' << "name,value,residual\n";
    for (const auto& v : r.values) os << to_string(v.name) << ',' << format_number(v.value) << ',' << format_number(v.residual) << '\n';
    return;
  }
  nlohmann::ordered_json j = {{"tool", tool_version}, {"values", nlohmann::ordered_json::array()}};
  for (const auto& v : r.values)
    j["values"].push_back({{"name", to_string(v.name)}, {"value", rounded(v.value)}, {"residual", rounded(v.residual)}});
  os << j.dump(2) << '\n';
}

}  // namespace pdcvis
