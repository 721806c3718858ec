#pragma once

#include <cstdio>
#include <string>
#include <variant>

#include "pdcvis/errors.hpp"

namespace pdcvis {

enum class DetectorKind { linear, onoff };

struct NoConditioning {
  friend bool operator==(const NoConditioning&, const NoConditioning&) = default;
};
struct TapConditioning {
  double tau;
  friend bool operator==(const TapConditioning&, const TapConditioning&) = default;
};
struct MultiportConditioning {
  int ports;
  friend bool operator==(const MultiportConditioning&, const MultiportConditioning&) = default;
};

using Conditioning = std::variant<NoConditioning, TapConditioning, MultiportConditioning>;

/// Detector model plus optional filtering. Only four combinations are
/// physical setups: linear, onoff, linear + tap (hybrid), onoff + multiport.
class DetectionScheme {
 public:
  DetectionScheme(DetectorKind kind, Conditioning cond = NoConditioning{}) : kind_(kind), cond_(cond) {
    if (kind == DetectorKind::linear && std::holds_alternative<MultiportConditioning>(cond))
      throw usage_error("linear detection is not combined with a multiport");
    if (kind == DetectorKind::onoff && std::holds_alternative<TapConditioning>(cond))
      throw usage_error("on-off detection is not combined with a tap");
    if (auto* t = std::get_if<TapConditioning>(&cond); t && !(t->tau > 0.0 && t->tau <= 1.0))
      throw usage_error("tap transmitivity must lie in (0, 1]");
    if (auto* m = std::get_if<MultiportConditioning>(&cond); m && m->ports < 1)
      throw usage_error("port count must be at least 1");
  }

  static DetectionScheme linear() { return {DetectorKind::linear}; }
  static DetectionScheme onoff() { return {DetectorKind::onoff}; }
  static DetectionScheme hybrid(double tau) { return {DetectorKind::linear, TapConditioning{tau}}; }
  static DetectionScheme multiport(int ports) { return {DetectorKind::onoff, MultiportConditioning{ports}}; }

  DetectorKind kind() const { return kind_; }
  const Conditioning& conditioning() const { return cond_; }

  /// Short column tag, e.g. "linear", "onoff", "hybrid_tau=0.1", "multiport_M=3".
  std::string tag() const {
    if (auto* t = std::get_if<TapConditioning>(&cond_)) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "hybrid_tau=%.6g", t->tau);
      return buf;
    }
    if (auto* m = std::get_if<MultiportConditioning>(&cond_)) return "multiport_M=" + std::to_string(m->ports);
    return kind_ == DetectorKind::linear ? "linear" : "onoff";
  }

  friend bool operator==(const DetectionScheme&, const DetectionScheme&) = default;

 private:
  DetectorKind kind_;
  Conditioning cond_;
};

struct InterferencePoint {
  double delta;
  double value;
};

struct VisibilityResult {
  DetectionScheme scheme = DetectionScheme::linear();
  double gain = 0.0;
  double visibility = 0.0;
  double value_max = 0.0;
  double value_min = 0.0;
  double delta_at_max = 0.0;
  double delta_at_min = 0.0;
  /// Set when max == min; visibility is then reported as 0.
  bool degenerate = false;
};

inline VisibilityResult make_visibility(double vmax, double vmin) {
  VisibilityResult r;
  r.value_max = vmax;
  r.value_min = vmin;
  if (vmax + vmin == 0.0 || vmax == vmin) {
    r.degenerate = true;
    r.visibility = 0.0;
  } else {
    r.visibility = (vmax - vmin) / (vmax + vmin);
  }
  return r;
}

}  // namespace pdcvis
