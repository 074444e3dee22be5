#pragma once

// Self-similar regularization of power series.
//
// A series a0 + a1 x + a2 x^2 + ... is rewritten as the continued fraction
//
//   b0 / (1 + b1 x / (1 + b2 x / (1 + ...)))
//
// whose truncations (convergents) can settle on a finite value even where
// the series itself diverges. For constant coefficients the fraction
// terminates after b1 and every convergent equals a / (1 - x).

#include <casimir/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace casimir::series {

/// Intermediate coefficients at or below this magnitude are treated as zero.
inline constexpr double degenerate_threshold = 1e-300;
inline constexpr double default_tolerance = 1e-10;

class PowerSeries {
 public:
  explicit PowerSeries(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) {
      throw error(errc::insufficient_data, "power series needs at least one coefficient");
    }
    for (double c : coefficients_) {
      if (!std::isfinite(c)) throw error(errc::invalid_parameter, "non-finite series coefficient");
    }
  }

  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::size_t size() const noexcept { return coefficients_.size(); }

  /// Truncated sum a0 + a1 x + ... + a_{n-1} x^{n-1}, Horner order.
  double partial_sum(double x) const noexcept {
    double acc = 0.0;
    for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

 private:
  std::vector<double> coefficients_;
};

class ContinuedFraction {
 public:
  explicit ContinuedFraction(std::vector<double> coefficients) : coefficients_(std::move(coefficients)) {
    if (coefficients_.empty()) {
      throw error(errc::insufficient_data, "continued fraction needs at least one coefficient");
    }
  }

  std::span<const double> coefficients() const noexcept { return coefficients_; }
  std::size_t size() const noexcept { return coefficients_.size(); }

  /// Convergent of depth `depth` (0 = b0 alone); nullopt when a denominator is exactly zero.
  std::optional<double> convergent(double x, std::size_t depth) const {
    if (depth >= coefficients_.size()) throw error(errc::invalid_count, "convergent depth out of range");
    if (depth == 0) return coefficients_.front();
    double tail = 1.0 + coefficients_[depth] * x;
    for (std::size_t k = depth - 1; k >= 1; --k) {
      if (tail == 0.0) return std::nullopt;
      tail = 1.0 + coefficients_[k] * x / tail;
    }
    if (tail == 0.0) return std::nullopt;
    return coefficients_.front() / tail;
  }

 private:
  std::vector<double> coefficients_;
};

struct RegularizedSum {
  double value = 0.0;
  bool converged = false;
  std::size_t convergents_used = 0;
  double residual = 0.0;
};

namespace detail {

// 1 / s for a series with s[0] != 0, truncated to s.size() terms. `mag`
// receives the running sum of |products| per term, a scale for rounding noise
// given `s_mag`, the magnitudes that produced s.
inline std::vector<double> reciprocal(std::span<const double> s, std::span<const double> s_mag,
                                      std::vector<double>& mag) {
  std::vector<double> r(s.size(), 0.0);
  mag.assign(s.size(), 0.0);
  r[0] = 1.0 / s[0];
  mag[0] = std::abs(r[0]);
  for (std::size_t n = 1; n < s.size(); ++n) {
    double acc = 0.0, size = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      acc += s[k] * r[n - k];
      size += s_mag[k] * mag[n - k];
    }
    r[n] = -acc / s[0];
    mag[n] = size / std::abs(s[0]);
  }
  return r;
}

inline bool all_negligible(std::span<const double> s) {
  return std::all_of(s.begin(), s.end(),
                     [](double c) { return std::abs(c) <= degenerate_threshold; });
}

// Every entry is within rounding noise of its magnitude scale.
inline bool within_noise(std::span<const double> s, std::span<const double> mag) {
  const double slack = 16.0 * static_cast<double>(s.size() + 1) * std::numeric_limits<double>::epsilon();
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (std::abs(s[i]) > std::max(slack * mag[i], degenerate_threshold)) return false;
  }
  return true;
}

}  // namespace detail

/// a0 / (1 - x): the fixed point of S = a0 + x S.
inline double regularized_geometric_sum(double a0, double x) {
  if (x == 1.0) throw error(errc::singular_input, "geometric ratio x = 1 has no regularized sum");
  if (!std::isfinite(a0) || !std::isfinite(x)) {
    throw error(errc::invalid_parameter, "geometric sum needs finite a0 and x");
  }
  return a0 / (1.0 - x);
}

/// Successive-division (Viskovatov) transform. A series of n terms yields n
/// fraction coefficients; if the remainder vanishes (exactly, or to within
/// rounding noise of the terms that produced it) the fraction terminates and
/// the remaining coefficients are zero.
inline ContinuedFraction to_continued_fraction(const PowerSeries& series) {
  const auto a = series.coefficients();
  if (a[0] == 0.0) {
    throw error(errc::unsupported_normalization, "leading coefficient a0 must be non-zero");
  }

  std::vector<double> b(a.size(), 0.0);
  b[0] = a[0];

  // Invariant: `rest` has leading coefficient 1 and equals
  // 1 / (1 + b_{k} x / (1 + ...)) for the level k being extracted.
  std::vector<double> rest(a.begin(), a.end());
  std::vector<double> rest_mag(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    rest[i] /= a[0];
    rest_mag[i] = std::abs(rest[i]);
  }

  std::vector<double> mag;
  for (std::size_t k = 1; k < a.size(); ++k) {
    const std::vector<double> inv = detail::reciprocal(rest, rest_mag, mag);
    std::vector<double> tail(inv.begin() + 1, inv.end());
    std::vector<double> tail_mag(mag.begin() + 1, mag.end());
    if (detail::all_negligible(tail) || detail::within_noise(tail, tail_mag)) break;
    if (std::abs(tail.front()) <= degenerate_threshold) {
      throw error(errc::degenerate_series, "vanishing intermediate coefficient at level " +
                                               std::to_string(k));
    }
    b[k] = tail.front();
    for (std::size_t i = 0; i < tail.size(); ++i) {
      tail[i] /= b[k];
      tail_mag[i] /= std::abs(b[k]);
    }
    rest = std::move(tail);
    rest_mag = std::move(tail_mag);
  }
  return ContinuedFraction(std::move(b));
}

/// First n convergents C0..C_{n-1}; undefined truncations are gaps.
inline std::vector<std::optional<double>> convergents(const ContinuedFraction& cf, double x,
                                                      std::size_t n) {
  if (n < 1 || n > cf.size()) {
    throw error(errc::invalid_count, "convergent count must lie in [1, " +
                                         std::to_string(cf.size()) + "]");
  }
  std::vector<std::optional<double>> out;
  out.reserve(n);
  for (std::size_t depth = 0; depth < n; ++depth) out.push_back(cf.convergent(x, depth));
  return out;
}

/// Continued-fraction resummation. Converged when the last two defined
/// convergents differ by at most `tol`.
inline RegularizedSum self_similar_sum(const PowerSeries& series, double x,
                                       double tol = default_tolerance) {
  if (!(tol > 0.0)) throw error(errc::invalid_parameter, "tolerance must be positive");
  const ContinuedFraction cf = to_continued_fraction(series);

  std::vector<double> defined;
  for (const auto& c : convergents(cf, x, cf.size())) {
    if (c && std::isfinite(*c)) defined.push_back(*c);
  }
  if (defined.size() < 2) {
    throw error(errc::insufficient_data, "fewer than two defined convergents");
  }

  RegularizedSum result;
  result.value = defined.back();
  result.residual = std::abs(defined.back() - defined[defined.size() - 2]);
  result.converged = result.residual <= tol;
  result.convergents_used = defined.size();
  return result;
}

/// Stereographic map of the real-axis point (t, 0) onto the unit circle,
/// projecting from the top (0, 1). t = 0 lands on (0, -1); |t| -> inf on (0, 1).
inline std::pair<double, double> project_to_circle(double t) {
  if (!std::isfinite(t)) throw error(errc::invalid_parameter, "projection needs finite t");
  if (std::abs(t) <= 1.0) {
    const double den = t * t + 1.0;
    return {2.0 * t / den, (t * t - 1.0) / den};
  }
  const double s = 1.0 / t;
  const double den = 1.0 + s * s;
  return {2.0 * s / den, (1.0 - s * s) / den};
}

}  // namespace casimir::series
