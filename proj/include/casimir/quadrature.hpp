#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature.
//
// The panel with the largest error estimate is bisected until the summed
// estimate meets the requested tolerance. The final value is summed over
// panels in left-to-right order, so the result does not depend on the order
// in which panels were refined.

#include <casimir/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace casimir::quadrature {

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

/// Thrown when the evaluation budget runs out; carries the best estimate.
class ConvergenceFailure : public error {
 public:
  explicit ConvergenceFailure(QuadratureResult best)
      : error(errc::convergence_failure, "quadrature did not reach tolerance within budget"),
        best_(best) {}
  const QuadratureResult& best_estimate() const noexcept { return best_; }

 private:
  QuadratureResult best_;
};

namespace detail {

// QUADPACK qk15 abscissae and weights.
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// 7-point Gauss weights on xgk[1], xgk[3], xgk[5], xgk[7]
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline constexpr std::size_t points_per_panel = 15;

struct Panel {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double error = 0.0;
};

template <typename F>
Panel gauss_kronrod_15(const F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  const double fc = f(center);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  double abs_sum = std::abs(kronrod);
  for (std::size_t j = 0; j < 7; ++j) {
    const double dx = half * xgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += wgk[j] * (f1 + f2);
    abs_sum += wgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += wg[j / 2] * (f1 + f2);
  }

  Panel p{lo, hi, kronrod * half, std::abs((kronrod - gauss) * half)};
  // Floor at the rounding level of the 15-point sum.
  const double roundoff = 50.0 * std::numeric_limits<double>::epsilon() * abs_sum * std::abs(half);
  p.error = std::max(p.error, roundoff);
  return p;
}

}  // namespace detail

template <typename F>
QuadratureResult integrate(const F& f, double lo, double hi, const Options& options = {}) {
  using detail::Panel;
  auto by_error = [](const Panel& l, const Panel& r) { return l.error < r.error; };
  std::priority_queue<Panel, std::vector<Panel>, decltype(by_error)> queue(by_error);

  queue.push(detail::gauss_kronrod_15(f, lo, hi));
  std::size_t evaluations = detail::points_per_panel;
  double total = queue.top().value;
  double total_error = queue.top().error;

  auto finish = [&]() {
    std::vector<Panel> panels;
    panels.reserve(queue.size());
    while (!queue.empty()) {
      panels.push_back(queue.top());
      queue.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& l, const Panel& r) { return l.lo < r.lo; });
    QuadratureResult r;
    for (const Panel& p : panels) {
      r.value += p.value;
      r.abs_error_estimate += p.error;
    }
    r.evaluations = evaluations;
    return r;
  };

  while (total_error > std::max(options.abs_tol, options.rel_tol * std::abs(total))) {
    if (evaluations + 2 * detail::points_per_panel > options.max_evaluations) {
      throw ConvergenceFailure(finish());
    }
    const Panel worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    const Panel left = detail::gauss_kronrod_15(f, worst.lo, mid);
    const Panel right = detail::gauss_kronrod_15(f, mid, worst.hi);
    evaluations += 2 * detail::points_per_panel;
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
  }
  return finish();
}

}  // namespace casimir::quadrature
