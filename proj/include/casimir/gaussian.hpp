#pragma once

// Gaussian Landau-Ginzburg model: quadratic kernel G(q) = t + K q^2 + L q^4 + ...,
// the Casimir-like energy density carried by one momentum shell
// Lambda/b < q < Lambda, and the exact coefficient map of the RG rescaling
// q' = b q, phi' = phi / B.

#include <casimir/error.hpp>
#include <casimir/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace casimir::gaussian {

using quadrature::QuadratureResult;

struct LGParams {
  double t = 0.0;
  double K = 1.0;
  double L = 0.0;
  std::vector<double> higher;  // coefficients of q^6, q^8, ...

  /// sqrt(K / t); infinite at criticality.
  double correlation_length() const {
    return t > 0.0 ? std::sqrt(K / t) : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const LGParams&, const LGParams&) = default;
};

/// Taylor expansions of t, K, L about Tc. `t_coeffs` starts at (T - Tc)^1;
/// `K_coeffs` and `L_coeffs` start at (T - Tc)^0.
struct TemperatureExpansion {
  double Tc = 0.0;
  std::vector<double> t_coeffs;
  std::vector<double> K_coeffs;
  std::vector<double> L_coeffs;
};

struct ShellSpec {
  int d = 3;
  double cutoff = 1.0;  // Lambda
  double b = 2.0;
  double T = 1.0;
};

namespace detail {

// sum_n c_n u^n, Horner
inline double polynomial(std::span<const double> c, double u) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
  return acc;
}

inline void check_shell(const ShellSpec& s) {
  if (s.d < 1) throw error(errc::invalid_dimension, "dimension must be >= 1");
  if (!(s.cutoff > 0.0) || !std::isfinite(s.cutoff)) throw error(errc::invalid_parameter, "cutoff must be positive");
  if (!(s.b > 1.0) || !std::isfinite(s.b)) throw error(errc::invalid_parameter, "shell factor b must exceed 1");
  if (!(s.T > 0.0) || !std::isfinite(s.T)) throw error(errc::invalid_parameter, "temperature must be positive");
}

inline double ipow(double base, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= base;
  return r;
}

}  // namespace detail

inline LGParams lg_params_at(const TemperatureExpansion& e, double T) {
  const double dT = T - e.Tc;
  LGParams p;
  p.t = dT * detail::polynomial(e.t_coeffs, dT);
  p.K = detail::polynomial(e.K_coeffs, dT);
  p.L = detail::polynomial(e.L_coeffs, dT);
  if (!(p.K > 0.0)) throw error(errc::unstable_kernel, "gradient coefficient K must be positive");
  if (p.t < 0.0) throw error(errc::below_criticality_unsupported, "t < 0 below the critical temperature");
  if (p.L < 0.0) throw error(errc::unstable_kernel, "Laplacian coefficient L must be non-negative");
  return p;
}

/// t + K q^2 + L q^4 + sum_j higher_j q^(6+2j)
inline double kernel(const LGParams& p, double q) {
  const double q2 = q * q;
  double acc = 0.0;
  for (auto it = p.higher.rbegin(); it != p.higher.rend(); ++it) acc = acc * q2 + *it;
  acc = acc * q2 + p.L;
  acc = acc * q2 + p.K;
  return acc * q2 + p.t;
}

/// Surface area of the unit sphere in d dimensions, 2 pi^(d/2) / Gamma(d/2).
inline double solid_angle(int d) {
  if (d < 1) throw error(errc::invalid_dimension, "dimension must be >= 1");
  return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// S_d / (2 pi)^d
inline double k_d(int d) { return solid_angle(d) / std::pow(2.0 * std::numbers::pi, d); }

/// Throws unstable_kernel unless G > 0 at both ends of [lo, hi] and at 33 interior points.
inline void check_kernel_positive(const LGParams& p, double lo, double hi) {
  constexpr int interior = 33;
  for (int i = 0; i <= interior + 1; ++i) {
    const double q = lo + (hi - lo) * i / (interior + 1);
    const double g = kernel(p, q);
    if (!(g > 0.0) || !std::isfinite(g)) {
      throw error(errc::unstable_kernel, "kernel non-positive at q = " + std::to_string(q));
    }
  }
}

/// -(T^2 / 2) k_d  int_{Lambda/b}^{Lambda} q^(d-1) / G(q) dq
inline QuadratureResult casimir_energy_density(const LGParams& p, const ShellSpec& s,
                                               const quadrature::Options& options = {}) {
  detail::check_shell(s);
  const double lo = s.cutoff / s.b;
  const double hi = s.cutoff;
  check_kernel_positive(p, lo, hi);

  auto integrand = [&](double q) { return detail::ipow(q, s.d - 1) / kernel(p, q); };
  QuadratureResult r = quadrature::integrate(integrand, lo, hi, options);
  const double prefactor = -0.5 * s.T * s.T * k_d(s.d);
  r.value *= prefactor;
  r.abs_error_estimate *= std::abs(prefactor);
  return r;
}

/// Same energy after substituting q = sqrt(t/K) x:
///   -(k_d/2) (t/K)^(d/2) (T^2/t) int x^(d-1) / (1 + x^2 + (L t/K^2) x^4 + ...) dx
inline QuadratureResult dimensionless_energy_density(const LGParams& p, const ShellSpec& s,
                                                     const quadrature::Options& options = {}) {
  if (!(p.t > 0.0)) throw error(errc::substitution_undefined, "q = sqrt(t/K) x requires t > 0");
  if (!(p.K > 0.0)) throw error(errc::substitution_undefined, "q = sqrt(t/K) x requires K > 0");
  detail::check_shell(s);
  check_kernel_positive(p, s.cutoff / s.b, s.cutoff);

  // the q^(2n) coefficient g_n becomes g_n t^(n-1) / K^n
  LGParams reduced{1.0, 1.0, p.L * p.t / (p.K * p.K), {}};
  for (std::size_t j = 0; j < p.higher.size(); ++j) {
    const double n = 3.0 + static_cast<double>(j);
    reduced.higher.push_back(p.higher[j] * std::pow(p.t, n - 1.0) / std::pow(p.K, n));
  }

  const double unit = std::sqrt(p.K / p.t);
  const double lo = s.cutoff * unit / s.b;
  const double hi = s.cutoff * unit;
  auto integrand = [&](double x) { return detail::ipow(x, s.d - 1) / kernel(reduced, x); };
  QuadratureResult r = quadrature::integrate(integrand, lo, hi, options);
  const double prefactor = -0.5 * k_d(s.d) * std::pow(p.t / p.K, 0.5 * s.d) * s.T * s.T / p.t;
  r.value *= prefactor;
  r.abs_error_estimate *= std::abs(prefactor);
  return r;
}

/// Closed form of the shell energy when G(q) ~ t across the shell:
///   -T^2 k_d Lambda^d (1 - b^-d) / (2 t d),
/// proportional to -(Lambda/b)^d (b^d - 1).
inline double leading_scaling_prediction(const ShellSpec& s, double t) {
  if (!(t > 0.0)) throw error(errc::invalid_regime, "leading scaling needs t > 0");
  detail::check_shell(s);
  return -s.T * s.T * k_d(s.d) * std::pow(s.cutoff, s.d) * (1.0 - std::pow(s.b, -s.d)) /
         (2.0 * t * s.d);
}

struct PowerLawFit {
  double exponent = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log|energy| against log(scale).
inline PowerLawFit fit_power_law(std::span<const std::pair<double, double>> samples) {
  if (samples.size() < 3) throw error(errc::invalid_samples, "need at least three samples");
  const bool negative = samples.front().second < 0.0;
  for (const auto& [scale, energy] : samples) {
    if (!(scale > 0.0)) throw error(errc::invalid_samples, "scales must be positive");
    if (energy == 0.0 || !std::isfinite(energy) || (energy < 0.0) != negative) {
      throw error(errc::invalid_samples, "energies must be non-zero and share a sign");
    }
  }

  const double n = static_cast<double>(samples.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [scale, energy] : samples) {
    mx += std::log(scale);
    my += std::log(std::abs(energy));
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [scale, energy] : samples) {
    const double dx = std::log(scale) - mx;
    const double dy = std::log(std::abs(energy)) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw error(errc::invalid_samples, "scales must not all coincide");

  PowerLawFit fit;
  fit.exponent = sxy / sxx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

/// Coefficient map of q' = b q, phi' = phi / B: the q^(2n) coefficient is
/// multiplied by B^2 b^-(d+2n). Written as (B / b^((d+2n)/2))^2 so that
/// B = fixed_point_B(b, d) leaves K bit-identical.
inline LGParams rg_rescale(const LGParams& p, double b, double B, int d) {
  if (!(b > 1.0) || !std::isfinite(b)) throw error(errc::invalid_parameter, "rescale factor b must exceed 1");
  if (!(B > 0.0) || !std::isfinite(B)) throw error(errc::invalid_parameter, "field rescale B must be positive");
  if (d < 1) throw error(errc::invalid_dimension, "dimension must be >= 1");

  auto factor = [&](int n) {
    const double f = B / std::pow(b, 0.5 * (d + 2 * n));
    return f * f;
  };
  LGParams out;
  out.t = factor(0) * p.t;
  out.K = factor(1) * p.K;
  out.L = factor(2) * p.L;
  out.higher.reserve(p.higher.size());
  for (std::size_t j = 0; j < p.higher.size(); ++j) {
    out.higher.push_back(factor(3 + static_cast<int>(j)) * p.higher[j]);
  }
  return out;
}

/// The field rescale that keeps K fixed: B = b^((d+2)/2).
inline double fixed_point_B(double b, int d) {
  if (!(b > 1.0) || !std::isfinite(b)) throw error(errc::invalid_parameter, "rescale factor b must exceed 1");
  if (d < 1) throw error(errc::invalid_dimension, "dimension must be >= 1");
  return std::pow(b, 0.5 * (d + 2));
}

struct Mode {
  double q = 0.0;
  double g = 1.0;  // kernel value G(q)
};

struct LogPartitionSplit {
  double shell_part = 0.0;
  double interior_part = 0.0;
  double total = 0.0;
};

/// Each decoupled Gaussian mode contributes -ln(g)/2. Modes in (cutoff/b, cutoff]
/// form the shell being integrated out; [0, cutoff/b] the retained interior.
inline LogPartitionSplit mode_split_log_partition(std::span<const Mode> modes, double b, double cutoff) {
  if (!(b > 1.0)) throw error(errc::invalid_parameter, "shell factor b must exceed 1");
  if (!(cutoff > 0.0)) throw error(errc::invalid_parameter, "cutoff must be positive");
  const double split = cutoff / b;
  LogPartitionSplit out;
  for (const Mode& m : modes) {
    if (!(m.g > 0.0) || !std::isfinite(m.g)) throw error(errc::unstable_mode, "mode weight must be positive");
    if (m.q < 0.0 || m.q > cutoff) throw error(errc::invalid_parameter, "mode momentum outside [0, cutoff]");
    const double contribution = -0.5 * std::log(m.g);
    (m.q > split ? out.shell_part : out.interior_part) += contribution;
  }
  out.total = out.shell_part + out.interior_part;
  return out;
}

}  // namespace casimir::gaussian
