#pragma once

// State builders for the type-II PDC source: the bright squeezed vacuum,
// its two-factor product form, individual singlet layers, the state
// conditioned on vacuum at beam-splitter taps, and the direct expansion
// of the source in the analyzer (+/-) basis.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pdcvis/errors.hpp"
#include "pdcvis/fock.hpp"

namespace pdcvis {

/// Largest gain the builders accept.
inline constexpr double max_gain = 3.0;
/// Truncation tail that the builders accept without an override.
inline constexpr double default_tail_bound = 1e-8;
/// Largest n_max for which the (+/-) expansion is evaluated with exact 64-bit binomial sums.
inline constexpr int max_exact_pm_n = 30;

/// Amplification gain K (coupling times interaction time).
class Gain {
 public:
  explicit Gain(double k) : k_(k) {
    if (!(k >= 0.0) || !std::isfinite(k)) throw usage_error("gain must be a finite non-negative number");
    if (k > max_gain) throw config_error("gain " + std::to_string(k) + " exceeds the builder limit");
  }
  double value() const { return k_; }

 private:
  double k_;
};

enum class TailPolicy { enforce, allow };

/// Squared norm of layers n > n_max of a geometric-ladder source with
/// ratio x = (tanh of the effective gain)^2:  sum_{n>N} (n+1) x^n (1-x)^2.
inline double ladder_tail(double x, int n_max) {
  const double n = n_max;
  return (n + 2.0) * std::pow(x, n + 1.0) - (n + 1.0) * std::pow(x, n + 2.0);
}

inline double tail_bound(double k, int n_max) {
  const double t = std::tanh(k);
  return ladder_tail(t * t, n_max);
}

/// Bound on the weight of layers n > n_max in second moments:
/// sum_{n>N} (n+1) n^2 x^n (1-x)^2. Any pair correlation per layer is at most n^2.
inline double moment_tail_bound(double k, int n_max) {
  const double t = std::tanh(k), x = t * t;
  if (x == 0.0) return 0.0;
  double acc = 0.0;
  for (int n = n_max + 1;; ++n) {
    const double term = (n + 1.0) * double(n) * double(n) * std::pow(x, n) * (1 - x) * (1 - x);
    acc += term;
    if (term < 1e-20 * std::max(acc, 1e-300) || n > n_max + 100000) break;
  }
  return acc;
}

/// Smallest n_max with tail_bound(k, n_max) < bound.
inline int required_n_max(double k, double bound = default_tail_bound) {
  int n = 0;
  while (tail_bound(k, n) >= bound) ++n;
  return n;
}

/// Smallest n_max meeting both the norm tail rule and the second-moment rule.
inline int required_n_max_for_correlations(double k, double bound = default_tail_bound) {
  int n = required_n_max(k, bound);
  while (moment_tail_bound(k, n) >= bound) ++n;
  return n;
}

/// Probability of exactly one pair in the full source, (n+1) tanh^2 K / cosh^4 K at n = 1.
inline double one_pair_probability(double k) {
  const double t = std::tanh(k), c2 = std::cosh(k) * std::cosh(k);
  return 2.0 * t * t / (c2 * c2);
}

/// tanh^2 K / cosh^4 K: one pair in one polarization channel with the other
/// channel empty. This is half of one_pair_probability.
inline double one_pair_probability_single_channel(double k) {
  const double t = std::tanh(k), c2 = std::cosh(k) * std::cosh(k);
  return t * t / (c2 * c2);
}

namespace detail {

inline void check_tail(double x, int n_max, TailPolicy policy, const char* what) {
  if (n_max < 0) throw usage_error("n_max must be non-negative");
  if (policy == TailPolicy::enforce && ladder_tail(x, n_max) >= default_tail_bound)
    throw config_error(std::string(what) + ": truncation tail " + std::to_string(ladder_tail(x, n_max)) +
                       " at n_max=" + std::to_string(n_max) + " exceeds the accepted bound");
}

/// Singlet-layer ladder with coefficient r^n / norm per component |n-m, m, m, n-m>.
inline FockState singlet_ladder(double r, double prefactor, int n_max, double loss) {
  FockState::container terms;
  double rn = 1.0;
  for (int n = 0; n <= n_max; ++n, rn *= r) {
    for (int m = 0; m <= n; ++m) {
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      terms.emplace(OccupationVector{n - m, m, m, n - m}, amplitude{sign * prefactor * rn});
    }
  }
  return FockState::from_terms(baseline_modes(), n_max, std::move(terms), loss);
}

}  // namespace detail

/// Bright squeezed vacuum: amplitude (-1)^m tanh^n K / cosh^2 K on
/// |n-m>_aH |m>_aV |m>_bH |n-m>_bV, layers n <= n_max.
inline FockState build_pdc_state(Gain gain, int n_max, TailPolicy policy = TailPolicy::enforce) {
  const double k = gain.value(), t = std::tanh(k), c = std::cosh(k);
  detail::check_tail(t * t, n_max, policy, "build_pdc_state");
  return detail::singlet_ladder(t, 1.0 / (c * c), n_max, tail_bound(k, n_max));
}

/// Same state built as the product of two two-mode squeezed vacua,
/// (aH, bV) and (aV, bH), then reordered and cut at n_max pairs.
inline FockState build_product_form(Gain gain, int n_max, TailPolicy policy = TailPolicy::enforce) {
  const double k = gain.value(), t = std::tanh(k), c = std::cosh(k);
  detail::check_tail(t * t, n_max, policy, "build_product_form");

  auto two_mode = [&](ModeLabel x, ModeLabel y, double ratio) {
    FockState::container terms;
    double rn = 1.0;
    for (int n = 0; n <= n_max; ++n, rn *= ratio) terms.emplace(OccupationVector{n, n}, amplitude{rn / c});
    return FockState::from_terms(ModeSet{std::move(x), std::move(y)}, n_max, std::move(terms),
                                 std::pow(t * t, n_max + 1.0));
  };
  const FockState first = two_mode(mode("a", Polarization::H), mode("b", Polarization::V), t);
  const FockState second = two_mode(mode("a", Polarization::V), mode("b", Polarization::H), -t);
  return truncate(reorder(tensor(first, second), baseline_modes()), n_max);
}

struct SingletLayer {
  int n;
  FockState state;
};

/// Normalized n-pair singlet layer.
inline SingletLayer singlet_layer(int n) {
  if (n < 0 || n > 1000) throw usage_error("singlet layer index out of range");
  FockState::container terms;
  const double inv = 1.0 / std::sqrt(n + 1.0);
  for (int m = 0; m <= n; ++m)
    terms.emplace(OccupationVector{n - m, m, m, n - m}, amplitude{(m % 2 == 0 ? 1.0 : -1.0) * inv});
  return {n, FockState::from_terms(baseline_modes(), n, std::move(terms))};
}

/// Filtering strength of a tap or multiport: transmitivity tau in (0, 1].
class ConditioningSpec {
 public:
  static ConditioningSpec from_tau(double tau) {
    if (!(tau > 0.0 && tau <= 1.0)) throw usage_error("transmitivity must lie in (0, 1]");
    return ConditioningSpec(tau, 0);
  }
  static ConditioningSpec from_ports(int ports) {
    if (ports < 1) throw usage_error("port count must be at least 1");
    return ConditioningSpec(1.0 / ports, ports);
  }
  double tau() const { return tau_; }
  /// Port count when built from a multiport, else 0.
  int ports() const { return ports_; }

 private:
  ConditioningSpec(double tau, int ports) : tau_(tau), ports_(ports) {}
  double tau_;
  int ports_;
};

/// Source conditioned on vacuum at both taps: layer coefficients
/// (1 - tau^2 tanh^2 K) sqrt(n+1) (tau tanh K)^n.
inline FockState build_conditioned_state(Gain gain, ConditioningSpec spec, int n_max,
                                         TailPolicy policy = TailPolicy::enforce) {
  const double r = spec.tau() * std::tanh(gain.value()), x = r * r;
  detail::check_tail(x, n_max, policy, "build_conditioned_state");
  return detail::singlet_ladder(r, 1.0 - x, n_max, ladder_tail(x, n_max));
}

/// Modes (a,+), (a,-), (b,+), (b,-).
inline ModeSet pm_modes() {
  return ModeSet{mode("a", Polarization::plus), mode("a", Polarization::minus), mode("b", Polarization::plus),
                 mode("b", Polarization::minus)};
}

/// Source written directly in the analyzer basis with the closed
/// quadruple-binomial expansion. Integer parts are summed exactly.
inline FockState pm_basis_expansion(Gain gain, double phi_a, double phi_b, int n_max,
                                    TailPolicy policy = TailPolicy::enforce) {
  const double k = gain.value(), t = std::tanh(k), c = std::cosh(k);
  detail::check_tail(t * t, n_max, policy, "pm_basis_expansion");
  if (n_max > max_exact_pm_n)
    throw config_error("pm_basis_expansion: exact binomial sums are limited to n_max <= " +
                       std::to_string(max_exact_pm_n));

  // Pascal triangle in exact integers.
  std::vector<std::vector<std::int64_t>> binom(static_cast<std::size_t>(n_max + 1));
  for (int n = 0; n <= n_max; ++n) {
    auto& row = binom[static_cast<std::size_t>(n)];
    row.assign(static_cast<std::size_t>(n + 1), 1);
    for (int j = 1; j < n; ++j)
      row[static_cast<std::size_t>(j)] =
          binom[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j - 1)] +
          binom[static_cast<std::size_t>(n - 1)][static_cast<std::size_t>(j)];
  }
  auto C = [&](int n, int j) { return binom[static_cast<std::size_t>(n)][static_cast<std::size_t>(j)]; };

  FockState::container terms;
  double tn = 1.0;
  for (int n = 0; n <= n_max; ++n, tn *= t) {
    const std::size_t side = static_cast<std::size_t>(n + 1);
    std::vector<amplitude> acc(side * side);
    for (int m = 0; m <= n; ++m) {
      // sums[J12][J34] = sum over j1+j2 = J12, j3+j4 = J34 of
      // C(n-m,j1) C(n-m,j4) C(m,j2) C(m,j3) (-1)^(j2+j4)
      std::vector<std::int64_t> sums(side * side, 0);
      for (int j1 = 0; j1 <= n - m; ++j1)
        for (int j2 = 0; j2 <= m; ++j2)
          for (int j3 = 0; j3 <= m; ++j3)
            for (int j4 = 0; j4 <= n - m; ++j4) {
              std::int64_t term = 0;
              if (__builtin_mul_overflow(C(n - m, j1), C(n - m, j4), &term) ||
                  __builtin_mul_overflow(term, C(m, j2), &term) || __builtin_mul_overflow(term, C(m, j3), &term))
                throw config_error("pm_basis_expansion: binomial product overflow");
              if ((j2 + j4) % 2 != 0) term = -term;
              auto& slot = sums[static_cast<std::size_t>(j1 + j2) * side + static_cast<std::size_t>(j3 + j4)];
              if (__builtin_add_overflow(slot, term, &slot))
                throw config_error("pm_basis_expansion: binomial sum overflow");
            }
      const amplitude phase = std::polar(1.0, m * phi_a + (n - m) * phi_b) *
                              ((m % 2 == 0 ? 1.0 : -1.0) / (detail::factorial(m) * detail::factorial(n - m)));
      for (std::size_t idx = 0; idx < sums.size(); ++idx)
        if (sums[idx] != 0) acc[idx] += phase * static_cast<double>(sums[idx]);
    }
    const double layer = tn / (c * c) * ((n % 2 == 0) ? 1.0 : -1.0) / std::pow(2.0, n);
    for (int j12 = 0; j12 <= n; ++j12)
      for (int j34 = 0; j34 <= n; ++j34) {
        const amplitude a = acc[static_cast<std::size_t>(j12) * side + static_cast<std::size_t>(j34)];
        if (a == amplitude{}) continue;
        const double root = std::sqrt(detail::factorial(j12) * detail::factorial(n - j12) *
                                      detail::factorial(j34) * detail::factorial(n - j34));
        terms[OccupationVector{j12, n - j12, j34, n - j34}] += layer * root * a;
      }
  }
  return FockState::from_terms(pm_modes(), n_max, std::move(terms), tail_bound(k, n_max));
}

}  // namespace pdcvis
