#pragma once

// Sparse multimode bosonic Fock states and the ladder-operator algebra
// used by every other part of the library.
//
// A FockState is an immutable value: a ModeSet, a sparse map from
// occupation vectors to complex amplitudes, a pair-number cutoff n_max
// (components carry at most 2*n_max photons) and the squared norm that
// has been discarded by truncation so far.

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdcvis/errors.hpp"

namespace pdcvis {

using amplitude = std::complex<double>;

/// Tolerance for unitarity and normalization checks.
inline constexpr double eps_num = 1e-9;
/// Amplitudes with magnitude below this are dropped after every operation.
inline constexpr double prune_threshold = 1e-14;
/// Hard cap on the number of stored basis components.
inline constexpr std::size_t basis_budget = 10'000'000;

enum class Polarization : std::uint8_t { none, H, V, plus, minus };

/// One bosonic mode: spatial arm, optional port index (0 = the unsplit
/// beam) and polarization.
struct ModeLabel {
  std::string arm;
  int port = 0;
  Polarization pol = Polarization::none;

  friend auto operator<=>(const ModeLabel&, const ModeLabel&) = default;
  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

inline std::string to_string(const ModeLabel& m) {
  std::string s = m.arm;
  if (m.port != 0) s += std::to_string(m.port);
  switch (m.pol) {
    case Polarization::none: break;
    case Polarization::H: s += 'H'; break;
    case Polarization::V: s += 'V'; break;
    case Polarization::plus: s += '+'; break;
    case Polarization::minus: s += '-'; break;
  }
  return s;
}

inline ModeLabel mode(std::string arm, Polarization pol, int port = 0) {
  return ModeLabel{std::move(arm), port, pol};
}

/// Ordered list of unique mode labels.
class ModeSet {
 public:
  ModeSet() = default;
  ModeSet(std::initializer_list<ModeLabel> labels) : ModeSet(std::vector<ModeLabel>(labels)) {}
  explicit ModeSet(std::vector<ModeLabel> labels) : labels_(std::move(labels)) {
    for (std::size_t i = 0; i < labels_.size(); ++i)
      for (std::size_t j = i + 1; j < labels_.size(); ++j)
        if (labels_[i] == labels_[j])
          throw usage_error("duplicate mode label " + to_string(labels_[i]));
  }

  std::size_t size() const { return labels_.size(); }
  const ModeLabel& operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<ModeLabel>& labels() const { return labels_; }
  auto begin() const { return labels_.begin(); }
  auto end() const { return labels_.end(); }

  bool contains(const ModeLabel& m) const {
    return std::find(labels_.begin(), labels_.end(), m) != labels_.end();
  }

  std::size_t index_of(const ModeLabel& m) const {
    auto it = std::find(labels_.begin(), labels_.end(), m);
    if (it == labels_.end()) throw usage_error("unknown mode " + to_string(m));
    return static_cast<std::size_t>(it - labels_.begin());
  }

  friend bool operator==(const ModeSet&, const ModeSet&) = default;

 private:
  std::vector<ModeLabel> labels_;
};

/// (a,H), (a,V), (b,H), (b,V): the four modes of the PDC source.
inline ModeSet baseline_modes() {
  return ModeSet{mode("a", Polarization::H), mode("a", Polarization::V),
                 mode("b", Polarization::H), mode("b", Polarization::V)};
}

/// Photon counts per mode; lexicographic order is the canonical basis order.
class OccupationVector {
 public:
  using count_type = std::uint16_t;

  OccupationVector() = default;
  explicit OccupationVector(std::size_t modes) : counts_(modes, 0) {}
  OccupationVector(std::initializer_list<int> counts) {
    counts_.reserve(counts.size());
    for (int c : counts) {
      if (c < 0) throw usage_error("negative occupation");
      counts_.push_back(static_cast<count_type>(c));
    }
  }

  std::size_t size() const { return counts_.size(); }
  int operator[](std::size_t i) const { return counts_[i]; }
  void set(std::size_t i, int n) { counts_[i] = static_cast<count_type>(n); }

  int total() const {
    int t = 0;
    for (auto c : counts_) t += c;
    return t;
  }

  const std::vector<count_type>& counts() const { return counts_; }

  friend auto operator<=>(const OccupationVector&, const OccupationVector&) = default;
  friend bool operator==(const OccupationVector&, const OccupationVector&) = default;

 private:
  std::vector<count_type> counts_;
};

namespace detail {

inline double factorial(int n) {
  static const std::array<double, 171> table = [] {
    std::array<double, 171> t{};
    t[0] = 1.0;
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * static_cast<double>(i);
    return t;
  }();
  if (n < 0 || n > 170) throw config_error("factorial argument out of range: " + std::to_string(n));
  return table[static_cast<std::size_t>(n)];
}

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  k = std::min(k, n - k);
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r < 9e15 ? std::round(r) : r;
}

inline amplitude ipow(amplitude z, int k) {
  amplitude r{1.0};
  for (; k > 0; --k) r *= z;
  return r;
}

inline bool finite(const amplitude& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace detail

class FockState {
 public:
  using container = std::map<OccupationVector, amplitude>;

  /// The zero vector over `modes`.
  FockState(ModeSet modes, int n_max) : modes_(std::move(modes)), n_max_(n_max) {
    if (n_max < 0) throw usage_error("n_max must be non-negative");
  }

  /// Builds a state from raw terms; prunes tiny amplitudes, drops
  /// components above the cutoff (adding their weight to the loss).
  static FockState from_terms(ModeSet modes, int n_max, container terms, double truncation_loss = 0.0) {
    FockState s(std::move(modes), n_max);
    s.loss_ = truncation_loss;
    for (auto it = terms.begin(); it != terms.end();) {
      if (it->first.size() != s.modes_.size()) throw usage_error("occupation vector size does not match mode set");
      if (!detail::finite(it->second)) throw validation_error("non-finite amplitude");
      if (it->first.total() > 2 * n_max) {
        s.loss_ += std::norm(it->second);
        it = terms.erase(it);
      } else if (std::abs(it->second) < prune_threshold) {
        it = terms.erase(it);
      } else {
        ++it;
      }
    }
    if (terms.size() > basis_budget) throw config_error("basis budget exceeded");
    s.terms_ = std::move(terms);
    return s;
  }

  static FockState vacuum(ModeSet modes, int n_max) {
    OccupationVector zero(modes.size());
    return from_terms(std::move(modes), n_max, container{{zero, amplitude{1.0}}});
  }

  static FockState basis(ModeSet modes, OccupationVector occ, int n_max, amplitude coeff = 1.0) {
    return from_terms(std::move(modes), n_max, container{{std::move(occ), coeff}});
  }

  const ModeSet& modes() const { return modes_; }
  int n_max() const { return n_max_; }
  double truncation_loss() const { return loss_; }
  const container& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  amplitude amplitude_of(const OccupationVector& occ) const {
    auto it = terms_.find(occ);
    return it == terms_.end() ? amplitude{} : it->second;
  }

  double norm_squared() const {
    double s = 0.0;
    for (const auto& [occ, a] : terms_) s += std::norm(a);
    return s;
  }

  /// True when norm^2 + truncation loss is 1 within eps_num, i.e. the state
  /// is a (possibly truncated) normalized physical state.
  bool is_normalized(double tol = eps_num) const { return std::abs(norm_squared() + loss_ - 1.0) <= tol; }

  friend FockState operator*(amplitude c, const FockState& s) {
    container t;
    for (const auto& [occ, a] : s.terms_) t.emplace(occ, c * a);
    return from_terms(s.modes_, s.n_max_, std::move(t), std::norm(c) * s.loss_);
  }

  friend FockState operator+(const FockState& x, const FockState& y) {
    if (!(x.modes_ == y.modes_)) throw usage_error("cannot add states over different mode sets");
    container t = x.terms_;
    for (const auto& [occ, a] : y.terms_) t[occ] += a;
    return from_terms(x.modes_, std::max(x.n_max_, y.n_max_), std::move(t), x.loss_ + y.loss_);
  }

 private:
  ModeSet modes_;
  int n_max_ = 0;
  double loss_ = 0.0;
  container terms_;
};

// ---------------------------------------------------------------------------
// Ladder operators

inline FockState create(const FockState& s, const ModeLabel& m) {
  const std::size_t i = s.modes().index_of(m);
  FockState::container out;
  double dropped = 0.0;
  for (const auto& [occ, a] : s.terms()) {
    OccupationVector next = occ;
    next.set(i, occ[i] + 1);
    const amplitude c = a * std::sqrt(static_cast<double>(occ[i] + 1));
    if (next.total() > 2 * s.n_max())
      dropped += std::norm(c);
    else
      out.emplace(std::move(next), c);
  }
  return FockState::from_terms(s.modes(), s.n_max(), std::move(out), s.truncation_loss() + dropped);
}

inline FockState annihilate(const FockState& s, const ModeLabel& m) {
  const std::size_t i = s.modes().index_of(m);
  FockState::container out;
  for (const auto& [occ, a] : s.terms()) {
    if (occ[i] == 0) continue;
    OccupationVector next = occ;
    next.set(i, occ[i] - 1);
    out.emplace(std::move(next), a * std::sqrt(static_cast<double>(occ[i])));
  }
  return FockState::from_terms(s.modes(), s.n_max(), std::move(out), s.truncation_loss());
}

// ---------------------------------------------------------------------------
// Inner products and norms

inline amplitude inner_product(const FockState& x, const FockState& y) {
  if (!(x.modes() == y.modes())) throw usage_error("inner product over mismatched mode sets");
  amplitude acc{};
  const auto& small = x.size() <= y.size() ? x.terms() : y.terms();
  const auto& large = x.size() <= y.size() ? y.terms() : x.terms();
  for (const auto& [occ, a] : small) {
    auto it = large.find(occ);
    if (it == large.end()) continue;
    acc += (&small == &x.terms()) ? std::conj(a) * it->second : std::conj(it->second) * a;
  }
  return acc;
}

inline double norm(const FockState& s) { return std::sqrt(s.norm_squared()); }

/// |<x|y>|^2 / (<x|x><y|y>); zero if either state is the zero vector.
inline double fidelity(const FockState& x, const FockState& y) {
  const double nx = x.norm_squared(), ny = y.norm_squared();
  if (nx == 0.0 || ny == 0.0) return 0.0;
  return std::norm(inner_product(x, y)) / (nx * ny);
}

/// Largest per-component amplitude difference.
inline double max_amplitude_difference(const FockState& x, const FockState& y) {
  if (!(x.modes() == y.modes())) throw usage_error("comparison over mismatched mode sets");
  double d = 0.0;
  for (const auto& [occ, a] : x.terms()) d = std::max(d, std::abs(a - y.amplitude_of(occ)));
  for (const auto& [occ, b] : y.terms())
    if (!x.terms().contains(occ)) d = std::max(d, std::abs(b));
  return d;
}

inline double number_expectation(const FockState& s, const ModeLabel& m) {
  const std::size_t i = s.modes().index_of(m);
  double acc = 0.0;
  for (const auto& [occ, a] : s.terms()) acc += occ[i] * std::norm(a);
  return acc;
}

/// <x^+ y^+ y x>, evaluated as || y x |psi> ||^2.
inline double normal_ordered_pair_correlation(const FockState& s, const ModeLabel& x, const ModeLabel& y) {
  if (x == y) throw usage_error("normal_ordered_pair_correlation needs two distinct modes");
  if (!s.is_normalized()) throw validation_error("normal_ordered_pair_correlation needs a normalized state");
  return annihilate(annihilate(s, x), y).norm_squared();
}

// ---------------------------------------------------------------------------
// Structural operations

/// Concatenates mode sets; pair cutoffs add.
inline FockState tensor(const FockState& x, const FockState& y) {
  std::vector<ModeLabel> labels = x.modes().labels();
  for (const auto& m : y.modes()) {
    if (x.modes().contains(m)) throw usage_error("tensor product of overlapping mode sets: " + to_string(m));
    labels.push_back(m);
  }
  FockState::container out;
  for (const auto& [ox, ax] : x.terms())
    for (const auto& [oy, ay] : y.terms()) {
      OccupationVector occ(labels.size());
      for (std::size_t i = 0; i < ox.size(); ++i) occ.set(i, ox[i]);
      for (std::size_t i = 0; i < oy.size(); ++i) occ.set(ox.size() + i, oy[i]);
      out.emplace(std::move(occ), ax * ay);
    }
  const double nx = x.norm_squared(), ny = y.norm_squared();
  const double loss = (nx + x.truncation_loss()) * (ny + y.truncation_loss()) - nx * ny;
  return FockState::from_terms(ModeSet(std::move(labels)), x.n_max() + y.n_max(), std::move(out), loss);
}

/// Permutes modes into the order of `target` (same label set).
inline FockState reorder(const FockState& s, const ModeSet& target) {
  if (target.size() != s.modes().size()) throw usage_error("reorder target has a different mode count");
  std::vector<std::size_t> from(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) from[i] = s.modes().index_of(target[i]);
  FockState::container out;
  for (const auto& [occ, a] : s.terms()) {
    OccupationVector next(target.size());
    for (std::size_t i = 0; i < target.size(); ++i) next.set(i, occ[from[i]]);
    out.emplace(std::move(next), a);
  }
  return FockState::from_terms(target, s.n_max(), std::move(out), s.truncation_loss());
}

/// Renames every mode through `fn`; amplitudes untouched.
inline FockState relabel(const FockState& s, const std::function<ModeLabel(const ModeLabel&)>& fn) {
  std::vector<ModeLabel> labels;
  labels.reserve(s.modes().size());
  for (const auto& m : s.modes()) labels.push_back(fn(m));
  return FockState::from_terms(ModeSet(std::move(labels)), s.n_max(), s.terms(), s.truncation_loss());
}

/// Re-applies a (smaller) pair cutoff.
inline FockState truncate(const FockState& s, int n_max) {
  return FockState::from_terms(s.modes(), n_max, s.terms(), s.truncation_loss());
}

struct Projection {
  FockState state;
  double herald_probability;
};

/// Projects the given modes onto vacuum and removes them from the mode set.
/// The kept part is rescaled so that norm^2 + truncation loss stays 1.
inline Projection project_vacuum(const FockState& s, std::span<const ModeLabel> projected) {
  if (projected.empty()) throw usage_error("project_vacuum needs at least one mode");
  std::vector<bool> drop(s.modes().size(), false);
  for (const auto& m : projected) drop[s.modes().index_of(m)] = true;

  std::vector<ModeLabel> kept_labels;
  for (std::size_t i = 0; i < s.modes().size(); ++i)
    if (!drop[i]) kept_labels.push_back(s.modes()[i]);

  FockState::container out;
  double kept = 0.0;
  for (const auto& [occ, a] : s.terms()) {
    bool vacuum = true;
    for (std::size_t i = 0; i < occ.size() && vacuum; ++i)
      if (drop[i] && occ[i] != 0) vacuum = false;
    if (!vacuum) continue;
    OccupationVector next(kept_labels.size());
    for (std::size_t i = 0, j = 0; i < occ.size(); ++i)
      if (!drop[i]) next.set(j++, occ[i]);
    kept += std::norm(a);
    out.emplace(std::move(next), a);
  }
  if (kept == 0.0) return {FockState(ModeSet(std::move(kept_labels)), s.n_max()), 0.0};

  const double denom = kept + s.truncation_loss();
  const double scale = 1.0 / std::sqrt(denom);
  for (auto& [occ, a] : out) a *= scale;
  return {FockState::from_terms(ModeSet(std::move(kept_labels)), s.n_max(), std::move(out),
                                s.truncation_loss() / denom),
          kept};
}

inline Projection project_vacuum(const FockState& s, std::initializer_list<ModeLabel> projected) {
  return project_vacuum(s, std::span<const ModeLabel>(projected.begin(), projected.size()));
}

// ---------------------------------------------------------------------------
// Passive linear transformations

/// Row-major 2x2 complex matrix.
struct Matrix2c {
  std::array<amplitude, 4> m{};

  amplitude operator()(int r, int c) const { return m[static_cast<std::size_t>(2 * r + c)]; }

  static Matrix2c identity() { return {{1.0, 0.0, 0.0, 1.0}}; }

  Matrix2c adjoint() const { return {{std::conj(m[0]), std::conj(m[2]), std::conj(m[1]), std::conj(m[3])}}; }

  friend Matrix2c operator*(const Matrix2c& x, const Matrix2c& y) {
    return {{x(0, 0) * y(0, 0) + x(0, 1) * y(1, 0), x(0, 0) * y(0, 1) + x(0, 1) * y(1, 1),
             x(1, 0) * y(0, 0) + x(1, 1) * y(1, 0), x(1, 0) * y(0, 1) + x(1, 1) * y(1, 1)}};
  }

  amplitude determinant() const { return m[0] * m[3] - m[1] * m[2]; }

  bool is_unitary(double tol = eps_num) const {
    const Matrix2c p = adjoint() * *this;
    return std::abs(p(0, 0) - 1.0) <= tol && std::abs(p(1, 1) - 1.0) <= tol && std::abs(p(0, 1)) <= tol &&
           std::abs(p(1, 0)) <= tol;
  }
};

/// Re-expresses the state in the basis whose annihilation operators are
/// (new_1, new_2)^T = u (old_1, old_2)^T. Labels are kept; each two-mode
/// component is expanded exactly with binomial sums.
inline FockState mode_pair_rotation(const FockState& s, const ModeLabel& m1, const ModeLabel& m2, const Matrix2c& u) {
  if (m1 == m2) throw usage_error("mode_pair_rotation needs two distinct modes");
  if (!u.is_unitary()) throw validation_error("mode_pair_rotation matrix is not unitary");
  const std::size_t i1 = s.modes().index_of(m1), i2 = s.modes().index_of(m2);

  // old_k^dagger = sum_j u(j,k) new_j^dagger
  const amplitude c11 = u(0, 0), c12 = u(1, 0);  // old_1^dagger -> new_1, new_2
  const amplitude c21 = u(0, 1), c22 = u(1, 1);  // old_2^dagger -> new_1, new_2

  FockState::container out;
  for (const auto& [occ, a] : s.terms()) {
    const int n1 = occ[i1], n2 = occ[i2], n = n1 + n2;
    if (n == 0) {
      out[occ] += a;
      continue;
    }
    std::vector<amplitude> first(static_cast<std::size_t>(n1 + 1)), second(static_cast<std::size_t>(n2 + 1));
    for (int k = 0; k <= n1; ++k)
      first[static_cast<std::size_t>(k)] = detail::binomial(n1, k) * detail::ipow(c11, k) * detail::ipow(c12, n1 - k);
    for (int k = 0; k <= n2; ++k)
      second[static_cast<std::size_t>(k)] = detail::binomial(n2, k) * detail::ipow(c21, k) * detail::ipow(c22, n2 - k);

    std::vector<amplitude> by_p(static_cast<std::size_t>(n + 1));
    for (int k1 = 0; k1 <= n1; ++k1)
      for (int k2 = 0; k2 <= n2; ++k2)
        by_p[static_cast<std::size_t>(k1 + k2)] += first[static_cast<std::size_t>(k1)] * second[static_cast<std::size_t>(k2)];

    const double denom = detail::factorial(n1) * detail::factorial(n2);
    OccupationVector next = occ;
    for (int p = 0; p <= n; ++p) {
      const amplitude c = by_p[static_cast<std::size_t>(p)];
      if (c == amplitude{}) continue;
      next.set(i1, p);
      next.set(i2, n - p);
      out[next] += a * c * std::sqrt(detail::factorial(p) * detail::factorial(n - p) / denom);
    }
  }
  return FockState::from_terms(s.modes(), s.n_max(), std::move(out), s.truncation_loss());
}

/// One output of a mode split: the new mode and the coefficient v in
/// old = sum_i v_i new_i (annihilation operators).
struct SplitOutput {
  ModeLabel label;
  amplitude coefficient;
};

namespace detail {

inline std::size_t count_compositions(int n, std::size_t parts) {
  // C(n + parts - 1, parts - 1), saturating
  double c = binomial(n + static_cast<int>(parts) - 1, static_cast<int>(parts) - 1);
  return c > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(c);
}

template <class Fn>
void for_each_composition(int n, std::size_t parts, std::vector<int>& buf, std::size_t at, Fn&& fn) {
  if (at + 1 == parts) {
    buf[at] = n;
    fn(buf);
    return;
  }
  for (int k = n; k >= 0; --k) {
    buf[at] = k;
    for_each_composition(n - k, parts, buf, at + 1, fn);
  }
}

}  // namespace detail

/// Replaces one mode by several output modes (isometric split). The new
/// modes take the old mode's position, in the given order.
inline FockState split_mode(const FockState& s, const ModeLabel& m, std::span<const SplitOutput> outputs) {
  if (outputs.empty()) throw usage_error("split_mode needs at least one output");
  double weight = 0.0;
  for (const auto& o : outputs) weight += std::norm(o.coefficient);
  if (std::abs(weight - 1.0) > eps_num) throw validation_error("split_mode coefficients are not normalized");

  const std::size_t at = s.modes().index_of(m);
  std::vector<ModeLabel> labels;
  for (std::size_t i = 0; i < s.modes().size(); ++i) {
    if (i == at)
      for (const auto& o : outputs) labels.push_back(o.label);
    else
      labels.push_back(s.modes()[i]);
  }
  ModeSet new_modes(std::move(labels));
  const std::size_t parts = outputs.size();

  std::size_t estimate = 0;
  for (const auto& [occ, a] : s.terms()) {
    estimate += detail::count_compositions(occ[at], parts);
    if (estimate > basis_budget) throw config_error("mode split exceeds the basis budget");
  }

  // old^dagger = sum_i conj(v_i) new_i^dagger
  std::vector<amplitude> w(parts);
  for (std::size_t i = 0; i < parts; ++i) w[i] = std::conj(outputs[i].coefficient);

  FockState::container out;
  std::vector<int> ks(parts);
  for (const auto& [occ, a] : s.terms()) {
    const int n = occ[at];
    OccupationVector next(new_modes.size());
    for (std::size_t i = 0, j = 0; i < occ.size(); ++i) {
      if (i == at)
        j += parts;
      else
        next.set(j++, occ[i]);
    }
    const double nfact = detail::factorial(n);
    detail::for_each_composition(n, parts, ks, 0, [&](const std::vector<int>& k) {
      amplitude c = a;
      double fact = nfact;
      for (std::size_t i = 0; i < parts; ++i) {
        if (k[i] == 0) continue;
        c *= detail::ipow(w[i], k[i]);
        fact /= detail::factorial(k[i]);
      }
      c *= std::sqrt(fact);
      for (std::size_t i = 0; i < parts; ++i) next.set(at + i, k[i]);
      out[next] += c;
    });
  }
  return FockState::from_terms(std::move(new_modes), s.n_max(), std::move(out), s.truncation_loss());
}

}  // namespace pdcvis
