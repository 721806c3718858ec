#pragma once

// Passive linear optics acting on FockState values: polarization
// analyzers, asymmetric beam-splitter taps and balanced multiports.
//
// Port convention: port 0 is an unsplit beam. A tap sends the
// transmitted light to port 1 and the reflected light to port 2; a
// multiport produces ports 1..M, port 1 being the monitored one.

#include <cmath>
#include <numbers>
#include <optional>
#include <set>
#include <vector>

#include "pdcvis/errors.hpp"
#include "pdcvis/fock.hpp"

namespace pdcvis {

enum class Side { a, b };

inline std::string arm_name(Side s) { return s == Side::a ? "a" : "b"; }

inline double canonical_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0.0;
  return r;
}

struct AnalyzerSetting {
  AnalyzerSetting(Side s, double phi) : side(s), phase(canonical_phase(phi)) {}
  Side side;
  double phase;  // radians in [0, 2 pi)
};

/// (new_+, new_-)^T = u (H, V)^T with u = [[1, e^{i phi}], [1, -e^{i phi}]] / sqrt 2.
inline Matrix2c analyzer_matrix(double phi) {
  const amplitude e = std::polar(1.0, phi);
  const double r = 1.0 / std::sqrt(2.0);
  return {{r, r * e, r, -r * e}};
}

namespace detail {

inline std::set<int> ports_with(const ModeSet& modes, const std::string& arm, Polarization p1, Polarization p2) {
  std::set<int> ports;
  for (const auto& m : modes)
    if (m.arm == arm && m.pol == p1 && modes.contains(ModeLabel{arm, m.port, p2})) ports.insert(m.port);
  return ports;
}

inline FockState rotate_and_relabel(const FockState& s, const std::string& arm, const std::set<int>& ports,
                                    const Matrix2c& u, Polarization from1, Polarization from2, Polarization to1,
                                    Polarization to2) {
  FockState out = s;
  for (int port : ports) out = mode_pair_rotation(out, ModeLabel{arm, port, from1}, ModeLabel{arm, port, from2}, u);
  return relabel(out, [&](const ModeLabel& m) {
    if (m.arm != arm || !ports.contains(m.port)) return m;
    if (m.pol == from1) return ModeLabel{arm, m.port, to1};
    if (m.pol == from2) return ModeLabel{arm, m.port, to2};
    return m;
  });
}

}  // namespace detail

/// Polarization analyzer on every (H, V) pair of the given side; the
/// modes are renamed to (+, -).
inline FockState apply_analyzer(const FockState& s, const AnalyzerSetting& setting) {
  const std::string arm = arm_name(setting.side);
  const auto ports = detail::ports_with(s.modes(), arm, Polarization::H, Polarization::V);
  if (ports.empty()) throw usage_error("apply_analyzer: no (H, V) mode pair on arm " + arm);
  return detail::rotate_and_relabel(s, arm, ports, analyzer_matrix(setting.phase), Polarization::H,
                                    Polarization::V, Polarization::plus, Polarization::minus);
}

/// Inverse of apply_analyzer: (+, -) pairs back to (H, V).
inline FockState undo_analyzer(const FockState& s, const AnalyzerSetting& setting) {
  const std::string arm = arm_name(setting.side);
  const auto ports = detail::ports_with(s.modes(), arm, Polarization::plus, Polarization::minus);
  if (ports.empty()) throw usage_error("undo_analyzer: no (+, -) mode pair on arm " + arm);
  return detail::rotate_and_relabel(s, arm, ports, analyzer_matrix(setting.phase).adjoint(), Polarization::plus,
                                    Polarization::minus, Polarization::H, Polarization::V);
}

/// Analyzers on both arms.
inline FockState apply_analyzers(const FockState& s, double phi_a, double phi_b) {
  return apply_analyzer(apply_analyzer(s, AnalyzerSetting(Side::a, phi_a)), AnalyzerSetting(Side::b, phi_b));
}

struct TapSpec {
  TapSpec(Side s, double t) : side(s), tau(t) {
    if (!(t > 0.0 && t < 1.0)) throw usage_error("tap transmitivity must lie in (0, 1)");
  }
  Side side;
  double tau;
};

/// a_p = sqrt(tau) a_{1,p} + sqrt(1 - tau) a_{2,p} for p = H, V of the side.
inline FockState apply_tap(const FockState& s, const TapSpec& spec) {
  const std::string arm = arm_name(spec.side);
  FockState out = s;
  for (Polarization p : {Polarization::H, Polarization::V}) {
    const std::vector<SplitOutput> outputs{{ModeLabel{arm, 1, p}, std::sqrt(spec.tau)},
                                           {ModeLabel{arm, 2, p}, std::sqrt(1.0 - spec.tau)}};
    out = split_mode(out, ModeLabel{arm, 0, p}, outputs);
  }
  return out;
}

struct MultiportSpec {
  MultiportSpec(Side s, int m, std::vector<double> phases = {}) : side(s), ports(m), port_phases(std::move(phases)) {
    if (m < 2) throw usage_error("a multiport needs at least 2 ports");
    if (!port_phases.empty() && port_phases.size() != static_cast<std::size_t>(m - 1))
      throw usage_error("multiport phases must be given for ports 2..M");
  }
  Side side;
  int ports;
  /// Optional phases of ports 2..M; the monitored port 1 has phase 0.
  std::vector<double> port_phases;
};

/// a_p -> (1/sqrt M) sum_i e^{i theta_i} a_{i,p}, theta_1 = 0.
inline FockState apply_multiport(const FockState& s, const MultiportSpec& spec) {
  const std::string arm = arm_name(spec.side);
  const double r = 1.0 / std::sqrt(static_cast<double>(spec.ports));
  FockState out = s;
  for (Polarization p : {Polarization::H, Polarization::V}) {
    std::vector<SplitOutput> outputs;
    for (int i = 1; i <= spec.ports; ++i) {
      const double theta = (i == 1 || spec.port_phases.empty()) ? 0.0 : spec.port_phases[static_cast<std::size_t>(i - 2)];
      outputs.push_back({ModeLabel{arm, i, p}, std::polar(r, theta)});
    }
    out = split_mode(out, ModeLabel{arm, 0, p}, outputs);
  }
  return out;
}

inline double effective_tau(int ports) {
  if (ports < 1) throw usage_error("port count must be at least 1");
  return 1.0 / ports;
}

/// All modes on ports >= 2 (tap reflections and unmonitored multiport outputs).
inline std::vector<ModeLabel> unmonitored_modes(const FockState& s) {
  std::vector<ModeLabel> out;
  for (const auto& m : s.modes())
    if (m.port >= 2) out.push_back(m);
  return out;
}

/// Conditions on vacuum at every unmonitored port and renames port-1 modes
/// back to port 0, so the result is directly comparable with builders.
inline Projection condition_on_unmonitored_vacuum(const FockState& s) {
  const auto modes = unmonitored_modes(s);
  if (modes.empty()) throw usage_error("state has no unmonitored ports");
  Projection p = project_vacuum(s, modes);
  p.state = relabel(p.state, [](const ModeLabel& m) {
    return m.port == 1 ? ModeLabel{m.arm, 0, m.pol} : m;
  });
  return p;
}

}  // namespace pdcvis
