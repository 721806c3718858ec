// pdcvis: visibility / interference datasets, critical values and the
// validation harness.
//
//   pdcvis visibility --preset fig2 --out fig2.csv
//   pdcvis interference --preset fig3 --format json
//   pdcvis visibility --scheme hybrid --tau 0.1,0.3 --k-steps 61 --method numeric --k-stop 0.8
//   pdcvis critical
//   pdcvis validate --level full
//
// Exit codes: 0 success, 1 validation failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pdcvis/sweep.hpp"
#include "pdcvis/validation.hpp"

using namespace pdcvis;

namespace {

struct Options {
  std::vector<std::string> schemes;
  double k_start = 0.0, k_stop = 3.0;
  int k_steps = 301;
  std::vector<double> taus;
  std::vector<int> ports;
  int delta_steps = 360;
  int n_max = -1;
  std::string preset, format = "csv", out, method = "closed", level = "fast";
  int jobs = 1;
};

std::vector<DetectionScheme> expand_schemes(const Options& o, SweepKind kind) {
  std::vector<std::string> names = o.schemes;
  if (names.empty()) {
    if (!o.taus.empty()) names.push_back("hybrid");
    if (!o.ports.empty()) names.push_back("multiport");
    if (names.empty()) names = kind == SweepKind::visibility ? std::vector<std::string>{"linear", "onoff"}
                                                             : std::vector<std::string>{"onoff"};
  }
  std::vector<DetectionScheme> out;
  for (const auto& n : names) {
    if (n == "linear") {
      out.push_back(DetectionScheme::linear());
    } else if (n == "onoff") {
      out.push_back(DetectionScheme::onoff());
    } else if (n == "hybrid") {
      if (o.taus.empty()) throw usage_error("scheme hybrid needs --tau");
      for (double t : o.taus) out.push_back(DetectionScheme::hybrid(t));
    } else if (n == "multiport") {
      if (o.ports.empty()) throw usage_error("scheme multiport needs --ports");
      for (int m : o.ports) out.push_back(DetectionScheme::multiport(m));
    } else {
      throw usage_error("unknown scheme '" + n + "'");
    }
  }
  return out;
}

void emit(const Options& o, const std::function<void(std::ostream&)>& write) {
  if (o.out.empty() || o.out == "-") {
    write(std::cout);
    return;
  }
  // Render first so a failure leaves no partial file behind.
  std::ostringstream buf;
  write(buf);
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + o.out + "' for writing");
  f << buf.str();
  if (!f) throw usage_error("failed writing '" + o.out + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interference visibility of multi-pair PDC light under several detection schemes"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value file with the same keys as the flags");

  Options o;
  app.add_option("--scheme", o.schemes, "linear, onoff, hybrid, multiport (repeatable or comma separated)")
      ->delimiter(',');
  auto* k_start = app.add_option("--k-start", o.k_start, "First gain of the K grid");
  auto* k_stop = app.add_option("--k-stop", o.k_stop, "Last gain of the K grid (inclusive)");
  auto* k_steps = app.add_option("--k-steps", o.k_steps, "Number of K grid points");
  app.add_option("--tau", o.taus, "Tap transmitivities for the hybrid scheme")->delimiter(',');
  app.add_option("--ports", o.ports, "Port counts for the multiport scheme")->delimiter(',');
  auto* delta_steps = app.add_option("--delta-steps", o.delta_steps, "Number of delta points over [0, 2 pi)");
  app.add_option("--n-max", o.n_max, "Pair cutoff override (default: chosen by the tail rule)")->check(CLI::NonNegativeNumber);
  app.add_option("--preset", o.preset, "Figure preset")->check(CLI::IsMember({"fig2", "fig3", "fig4", "fig6"}));
  app.add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", o.out, "Output path (default: standard output)");
  app.add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--method", o.method, "closed (formulas) or numeric (Fock-space simulation)")
      ->check(CLI::IsMember({"closed", "numeric"}));
  app.add_option("--level", o.level, "Validation level")->check(CLI::IsMember({"fast", "full"}));

  auto* vis = app.add_subcommand("visibility", "Visibility as a function of K")->fallthrough();
  app.add_subcommand("interference", "Interference curves over delta")->fallthrough();
  auto* crit = app.add_subcommand("critical", "Critical gains, transmitivity and visibility")->fallthrough();
  auto* val = app.add_subcommand("validate", "Numeric simulation vs closed forms")->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), 2);
  }

  try {
    const OutputFormat fmt = parse_format(o.format);
    if (*crit) {
      const CriticalReport r = cmd_critical();
      emit(o, [&](std::ostream& os) { write_critical(os, r, fmt); });
      return 0;
    }
    if (*val) {
      const ValidationReport r = cmd_validate(parse_level(o.level));
      emit(o, [&](std::ostream& os) { write_validation(os, r, fmt); });
      if (!r.passed()) std::cerr << "pdcvis: validation failed\n";
      return r.passed() ? 0 : 1;
    }

    const SweepKind kind = *vis ? SweepKind::visibility : SweepKind::interference;
    SweepRequest req;
    req.kind = kind;
    if (kind == SweepKind::interference) {
      req.k_start = 0.5;
      req.k_stop = 1.5;
      req.k_steps = 3;
    }
    if (!o.preset.empty()) {
      apply_preset(req, o.preset);
      if (req.kind != kind)
        throw usage_error("preset " + o.preset + " belongs to the " +
                          (req.kind == SweepKind::visibility ? "visibility" : "interference") + " subcommand");
    } else {
      req.schemes = expand_schemes(o, kind);
    }
    // Explicit flags override preset and subcommand defaults.
    if (*k_start) req.k_start = o.k_start;
    if (*k_stop) req.k_stop = o.k_stop;
    if (*k_steps) req.k_steps = o.k_steps;
    if (*delta_steps) req.delta_steps = o.delta_steps;
    if (o.n_max >= 0) req.n_max = o.n_max;
    req.method = parse_method(o.method);
    req.format = fmt;
    req.jobs = o.jobs;

    const CurveDataset d = run_sweep(req);
    emit(o, [&](std::ostream& os) { write_dataset(os, d, fmt); });
    return 0;
  } catch (const validation_error& e) {
    std::cerr << "pdcvis: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "pdcvis: " << e.what() << '\n';
    return 2;
  }
}
