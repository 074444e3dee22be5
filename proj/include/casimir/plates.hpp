#pragma once

// Casimir interaction energies per unit area for ideal Dirichlet plates and
// for geometric (self-similar) stacks of them. Natural units, hbar = c = 1.
// Negative energies are attractive.

#include <casimir/error.hpp>
#include <casimir/series.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

namespace casimir::plates {

enum class FieldKind { DirichletScalar, Electromagnetic };

/// Inflation: plates at xa, x^2 a, ...  Contraction: a, a/x, a/x^2, ...
/// Combined: the union of both stacks.
enum class Direction { Inflation, Contraction, Combined };

constexpr std::string_view to_string(Direction d) noexcept {
  switch (d) {
    case Direction::Inflation: return "inflation";
    case Direction::Contraction: return "contraction";
    case Direction::Combined: return "combined";
  }
  return "unknown";
}

constexpr std::string_view to_string(FieldKind k) noexcept {
  return k == FieldKind::DirichletScalar ? "dirichlet" : "em";
}

struct StackConfig {
  double spacing = 1.0;  // base spacing a
  double ratio = 2.0;    // x
  Direction direction = Direction::Inflation;
  std::optional<int> truncation;  // plate count N; absent = infinite stack
};

struct EnergyDensity {
  double value = 0.0;
  bool regularized = false;
};

namespace detail {

inline constexpr double pi2 = std::numbers::pi * std::numbers::pi;

inline void check_spacing(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) throw error(errc::invalid_spacing, "spacing must be positive");
}

inline void check_ratio(double x) {
  if (!(x > 1.0) || !std::isfinite(x)) throw error(errc::invalid_ratio, "ratio x must exceed 1");
}

inline double cube(double v) { return v * v * v; }

// -pi^2 / (1440 a^3 (x-1)^3): pair energy of the gap a(x-1).
inline double unit_gap_energy(double a, double x) { return -pi2 / (1440.0 * cube(a) * cube(x - 1.0)); }

}  // namespace detail

inline EnergyDensity pair_interaction_energy(double a, FieldKind kind = FieldKind::DirichletScalar) {
  detail::check_spacing(a);
  const double scalar = -detail::pi2 / (1440.0 * detail::cube(a));
  return {kind == FieldKind::Electromagnetic ? 2.0 * scalar : scalar, false};
}

/// -d/da of the electromagnetic pair energy: -pi^2 / (240 a^4).
inline double force_per_area(double a) {
  detail::check_spacing(a);
  return -detail::pi2 / (240.0 * a * a * a * a);
}

inline EnergyDensity inflation_stack_energy(double a, double x) {
  detail::check_spacing(a);
  detail::check_ratio(x);
  return {-detail::pi2 / (1440.0 * detail::cube(a) * detail::cube(x - 1.0) * (detail::cube(x) - 1.0)),
          false};
}

/// Contraction stack energy obtained by regularizing the divergent gap sum
/// sum_{k>=0} E(a(x-1)/x^{k+1}) = sum_{k>=0} E0 x^{3k}, a geometric series
/// whose first term E0 is the outermost gap energy and whose ratio is x^3.
inline EnergyDensity contraction_stack_energy(double a, double x) {
  detail::check_spacing(a);
  detail::check_ratio(x);
  const double r = detail::cube(x);
  const double first_gap = detail::unit_gap_energy(a, x) * r;
  return {series::regularized_geometric_sum(first_gap, r), true};
}

/// Direct closed form pi^2 x^3 / (1440 a^3 (x-1)^3 (x^3-1)), kept as a cross-check
/// for the regularized route.
inline double contraction_stack_energy_closed_form(double a, double x) {
  detail::check_spacing(a);
  detail::check_ratio(x);
  const double r = detail::cube(x);
  return detail::pi2 * r / (1440.0 * detail::cube(a) * detail::cube(x - 1.0) * (r - 1.0));
}

/// Nearest-neighbour gap energies of a finite stack of N plates, outermost
/// gap first.
inline std::vector<double> gap_energies(const StackConfig& config) {
  if (!config.truncation) throw error(errc::must_truncate, "finite stack needs a plate count");
  detail::check_spacing(config.spacing);
  detail::check_ratio(config.ratio);
  const int n = *config.truncation;
  if (n < 2) throw error(errc::invalid_count, "a stack needs at least two plates");

  const double a = config.spacing;
  const double x = config.ratio;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n - 1));
  switch (config.direction) {
    case Direction::Inflation:
      // gap between x^k a and x^{k+1} a
      for (int k = 1; k < n; ++k) out.push_back(pair_interaction_energy(std::pow(x, k) * a * (x - 1.0)).value);
      break;
    case Direction::Contraction:
      // gap between a/x^k and a/x^{k+1}
      for (int k = 0; k < n - 1; ++k) out.push_back(pair_interaction_energy(a * (x - 1.0) / std::pow(x, k + 1)).value);
      break;
    case Direction::Combined:
      throw error(errc::invalid_parameter, "truncation is defined for inflation or contraction stacks");
  }
  return out;
}

/// Brute-force sum over the N-1 nearest-neighbour gaps. Contraction sums
/// grow without bound in N; the finite partial sum is returned as is.
inline EnergyDensity truncated_stack_energy(const StackConfig& config) {
  const std::vector<double> gaps = gap_energies(config);
  double sum = 0.0;
  // smallest magnitudes first
  if (config.direction == Direction::Inflation) {
    for (auto it = gaps.rbegin(); it != gaps.rend(); ++it) sum += *it;
  } else {
    for (double g : gaps) sum += g;
  }
  return {sum, false};
}

struct CombinedTerms {
  double contraction = 0.0;
  double inflation = 0.0;
  double junction = 0.0;  // pair energy across the gap (x-1)a joining the two stacks

  double sum() const noexcept { return contraction + inflation + junction; }
  double magnitude() const noexcept {
    return std::abs(contraction) + std::abs(inflation) + std::abs(junction);
  }
};

inline CombinedTerms combined_stack_terms(double a, double x) {
  return {contraction_stack_energy(a, x).value, inflation_stack_energy(a, x).value,
          pair_interaction_energy((x - 1.0) * a).value};
}

/// Plates at ..., a/x^2, a/x, a, xa, x^2 a, ...; vanishes identically.
inline EnergyDensity combined_stack_energy(double a, double x) {
  return {combined_stack_terms(a, x).sum(), true};
}

inline EnergyDensity stack_energy(const StackConfig& config) {
  if (config.truncation) return truncated_stack_energy(config);
  switch (config.direction) {
    case Direction::Inflation: return inflation_stack_energy(config.spacing, config.ratio);
    case Direction::Contraction: return contraction_stack_energy(config.spacing, config.ratio);
    case Direction::Combined: return combined_stack_energy(config.spacing, config.ratio);
  }
  throw error(errc::invalid_parameter, "unknown stack direction");
}

/// Residual of the self-similar recursion obtained by peeling off the
/// outermost plate:
///   inflation:   E(xa) - [x^-3 E(xa) + E12(x^2 a - x a)]
///   contraction: E(a)  - [x^3 E(a)  + E12(a - a/x)]
/// Both are identically zero.
inline double functional_equation_residual(double a, double x, Direction direction) {
  detail::check_spacing(a);
  detail::check_ratio(x);
  switch (direction) {
    case Direction::Inflation: {
      const double whole = inflation_stack_energy(a, x).value;
      const double rest = whole / detail::cube(x);
      return whole - (rest + pair_interaction_energy(x * x * a - x * a).value);
    }
    case Direction::Contraction: {
      const double whole = contraction_stack_energy(a, x).value;
      // E(a/x) = x^3 E(a)
      const double rest = whole * detail::cube(x);
      return whole - (rest + pair_interaction_energy(a - a / x).value);
    }
    case Direction::Combined: break;
  }
  throw error(errc::invalid_parameter, "functional equation is defined for inflation or contraction");
}

}  // namespace casimir::plates
