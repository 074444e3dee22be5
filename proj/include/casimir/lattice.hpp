#pragma once

// Periodic scalar lattice fields and the discrete Parseval identities
//
//   int phi^2        = (1/V) sum_q |phi_q|^2
//   int (grad phi)^2 = (1/V) sum_q qhat^2 |phi_q|^2
//
// with phi_q = a^d sum_x phi(x) e^{-i q.x}, forward-difference gradients and
// qhat_mu^2 = (2/a)^2 sin^2(q_mu a / 2), the symbol of the forward difference.
// With these conventions both identities hold exactly at any lattice size.

#include <casimir/error.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace casimir::lattice {

class LatticeField {
 public:
  /// Row-major values; `extents` holds 1 or 2 axis lengths, each >= 2.
  LatticeField(std::vector<std::size_t> extents, double spacing, std::vector<double> values)
      : extents_(std::move(extents)), spacing_(spacing), values_(std::move(values)) {
    if (extents_.empty() || extents_.size() > 2) {
      throw error(errc::invalid_dimension, "lattice fields support d = 1 or 2");
    }
    std::size_t sites = 1;
    for (std::size_t n : extents_) {
      if (n < 2) throw error(errc::invalid_parameter, "each axis needs at least two sites");
      sites *= n;
    }
    if (!(spacing_ > 0.0)) throw error(errc::invalid_spacing, "lattice spacing must be positive");
    if (values_.size() != sites) throw error(errc::invalid_parameter, "value count does not match extents");
    for (double v : values_) {
      if (!std::isfinite(v)) throw error(errc::invalid_parameter, "non-finite field value");
    }
  }

  int dimension() const noexcept { return static_cast<int>(extents_.size()); }
  const std::vector<std::size_t>& extents() const noexcept { return extents_; }
  double spacing() const noexcept { return spacing_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t sites() const noexcept { return values_.size(); }
  double volume() const noexcept { return static_cast<double>(sites()) * cell_volume(); }
  double cell_volume() const noexcept { return std::pow(spacing_, dimension()); }

 private:
  std::vector<std::size_t> extents_;
  double spacing_;
  std::vector<double> values_;
};

/// Independent standard-normal values on every site.
inline LatticeField white_noise(int d, std::size_t sites_per_axis, std::uint64_t seed, double spacing = 1.0) {
  if (d != 1 && d != 2) throw error(errc::invalid_dimension, "lattice fields support d = 1 or 2");
  std::vector<std::size_t> extents(static_cast<std::size_t>(d), sites_per_axis);
  std::size_t total = 1;
  for (std::size_t n : extents) total *= n;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(total);
  for (double& v : values) v = normal(rng);
  return LatticeField(std::move(extents), spacing, std::move(values));
}

namespace detail {

using cplx = std::complex<double>;

// Twiddles e^{-2 pi i k / n} indexed by k mod n.
inline std::vector<cplx> twiddles(std::size_t n) {
  std::vector<cplx> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double angle = -2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    w[k] = {std::cos(angle), std::sin(angle)};
  }
  return w;
}

// In-place DFT of `n` elements spaced `stride` apart.
inline void dft_axis(std::vector<cplx>& data, std::size_t offset, std::size_t n, std::size_t stride,
                     const std::vector<cplx>& w) {
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += data[offset + j * stride] * w[(j * k) % n];
    out[k] = acc;
  }
  for (std::size_t k = 0; k < n; ++k) data[offset + k * stride] = out[k];
}

inline double lattice_symbol(std::size_t index, std::size_t n, double spacing) {
  const double s = std::sin(std::numbers::pi * static_cast<double>(index) / static_cast<double>(n));
  return 4.0 * s * s / (spacing * spacing);
}

}  // namespace detail

/// Fourier modes phi_q with continuum normalization a^d sum_x phi(x) e^{-iq.x}.
inline std::vector<std::complex<double>> fourier_modes(const LatticeField& field) {
  std::vector<detail::cplx> data(field.values().begin(), field.values().end());
  const auto& ext = field.extents();
  if (field.dimension() == 1) {
    detail::dft_axis(data, 0, ext[0], 1, detail::twiddles(ext[0]));
  } else {
    const std::size_t rows = ext[0], cols = ext[1];
    const auto w_cols = detail::twiddles(cols);
    for (std::size_t r = 0; r < rows; ++r) detail::dft_axis(data, r * cols, cols, 1, w_cols);
    const auto w_rows = detail::twiddles(rows);
    for (std::size_t c = 0; c < cols; ++c) detail::dft_axis(data, c, rows, cols, w_rows);
  }
  const double cell = field.cell_volume();
  for (auto& v : data) v *= cell;
  return data;
}

struct ParsevalSides {
  double phi2_real = 0.0;
  double phi2_modes = 0.0;
  double grad2_real = 0.0;
  double grad2_modes = 0.0;
};

inline ParsevalSides parseval_sides(const LatticeField& field) {
  const auto& ext = field.extents();
  const auto& phi = field.values();
  const double a = field.spacing();
  const double cell = field.cell_volume();
  const std::size_t cols = field.dimension() == 2 ? ext[1] : 1;
  const std::size_t rows = ext[0];

  ParsevalSides s;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = phi[r * cols + c];
      s.phi2_real += v * v;
      const double dr = (phi[((r + 1) % rows) * cols + c] - v) / a;
      s.grad2_real += dr * dr;
      if (field.dimension() == 2) {
        const double dc = (phi[r * cols + (c + 1) % cols] - v) / a;
        s.grad2_real += dc * dc;
      }
    }
  }
  s.phi2_real *= cell;
  s.grad2_real *= cell;

  const auto modes = fourier_modes(field);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double power = std::norm(modes[r * cols + c]);
      double symbol = detail::lattice_symbol(r, rows, a);
      if (field.dimension() == 2) symbol += detail::lattice_symbol(c, cols, a);
      s.phi2_modes += power;
      s.grad2_modes += symbol * power;
    }
  }
  const double volume = field.volume();
  s.phi2_modes /= volume;
  s.grad2_modes /= volume;
  return s;
}

struct ParsevalResiduals {
  double phi2_residual = 0.0;
  double grad2_residual = 0.0;
};

/// Relative gaps between the real-space and mode-space sides. The gradient
/// gap is normalized by at least int phi^2 / a^2, the natural scale of the
/// gradient energy, so a constant field does not divide rounding noise by zero.
inline ParsevalResiduals parseval_residuals(const LatticeField& field) {
  const ParsevalSides s = parseval_sides(field);
  const double a2 = field.spacing() * field.spacing();
  const double phi2_scale = std::max(std::abs(s.phi2_real), std::numeric_limits<double>::min());
  const double grad2_scale = std::max({std::abs(s.grad2_real), s.phi2_real / a2,
                                       std::numeric_limits<double>::min()});
  return {std::abs(s.phi2_real - s.phi2_modes) / phi2_scale,
          std::abs(s.grad2_real - s.grad2_modes) / grad2_scale};
}

}  // namespace casimir::lattice
