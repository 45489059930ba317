// Copyright 2026 The eprcrit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Bipartite wavefunction families sampled on grids, and the transform to
// momentum space.
//
// Fourier convention ([X, P] = i, symmetric kernel):
//
//   psi~(p_A, p_B) = (2 pi)^-1 \iint psi(x_A, x_B) exp(-i (p_A x_A + p_B x_B)) dx_A dx_B
//
// Families are written in the rotated coordinates u = x_A + x_B,
// v = x_A - x_B and their conjugates P = p_A + p_B, Q = p_A - p_B:
//
//   HermiteGauss(n):   H_n(u) exp(-u^2/2) exp(-v^2/2)
//   Engineered(s+,s-): u exp(-u^2/(4 s+^2)) exp(-v^2/(4 s-^2))
//   SincSpdc(L,K,w):   momentum space v(P) s(Q) with v(P) = exp(-w^2 P^2/4)
//                      and s(Q) = sinc(L Q^2 / (4K)), sinc(x) = sin(x)/x.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eprcrit/error.hpp"
#include "eprcrit/fft.hpp"
#include "eprcrit/grid_prob.hpp"
#include "eprcrit/matrix.hpp"

namespace eprcrit {

struct HermiteGauss {
  int n = 0;
};

/// Widths in mm.
struct Engineered {
  double sigma_plus = 1.0;
  double sigma_minus = 1.0;
};

/// crystal_length in mm, pump_wavenumber in 1/mm, pump_width in mm.
struct SincSpdc {
  double crystal_length = 1.0;
  double pump_wavenumber = 1.0;
  double pump_width = 1.0;

  /// Coefficient a in s(Q) = sinc(a Q^2).
  double chirp() const { return crystal_length / (4.0 * pump_wavenumber); }
};

class StateSpec {
 public:
  using Family = std::variant<HermiteGauss, Engineered, SincSpdc>;

  static StateSpec hermite_gauss(int n) {
    if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hermite order must be nonnegative");
    return StateSpec(HermiteGauss{n});
  }
  static StateSpec engineered(double sigma_plus, double sigma_minus) {
    require_positive(sigma_plus, "sigma_plus");
    require_positive(sigma_minus, "sigma_minus");
    return StateSpec(Engineered{sigma_plus, sigma_minus});
  }
  static StateSpec sinc_spdc(double crystal_length, double pump_wavenumber, double pump_width) {
    require_positive(crystal_length, "crystal_length");
    require_positive(pump_wavenumber, "pump_wavenumber");
    require_positive(pump_width, "pump_width");
    return StateSpec(SincSpdc{crystal_length, pump_wavenumber, pump_width});
  }

  const Family& family() const noexcept { return family_; }

  template <typename Visitor>
  decltype(auto) visit(Visitor&& v) const {
    return std::visit(std::forward<Visitor>(v), family_);
  }

  std::string describe() const;

 private:
  explicit StateSpec(Family f) : family_(f) {}

  static void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::InvalidArgument, std::string(name) + " must be positive");
    }
  }

  Family family_;
};

inline std::string StateSpec::describe() const {
  struct {
    std::string operator()(const HermiteGauss& h) const { return "hermite-gauss n=" + std::to_string(h.n); }
    std::string operator()(const Engineered& e) const {
      return "engineered sigma_plus=" + std::to_string(e.sigma_plus) + "mm sigma_minus=" +
             std::to_string(e.sigma_minus) + "mm";
    }
    std::string operator()(const SincSpdc& s) const {
      return "sinc-spdc L=" + std::to_string(s.crystal_length) + "mm K=" + std::to_string(s.pump_wavenumber) +
             "/mm w=" + std::to_string(s.pump_width) + "mm";
    }
  } describer;
  return visit(describer);
}

/// Physicists' Hermite polynomial by three-term recurrence.
inline double hermite(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hermite order must be nonnegative");
  if (n == 0) return 1.0;
  double prev = 1.0;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Complex amplitudes on an Axis pair, normalized so that
/// sum |amp|^2 step_a step_b = 1.
class WavefunctionGrid {
 public:
  WavefunctionGrid(Axis axis_a, Axis axis_b, Matrix<std::complex<double>> amplitude)
      : axis_a_(axis_a), axis_b_(axis_b), amplitude_(std::move(amplitude)) {
    if (amplitude_.rows() != axis_a_.count() || amplitude_.cols() != axis_b_.count()) {
      throw Error(ErrorCode::ShapeMismatch, "amplitude shape does not match axes");
    }
    const double n2 = norm_squared();
    if (!(n2 > 0.0) || !std::isfinite(n2)) throw Error(ErrorCode::AllZero, "wavefunction vanishes on the grid");
    const double scale = 1.0 / std::sqrt(n2);
    for (auto& a : amplitude_.flat()) a *= scale;
  }

  const Axis& axis_a() const noexcept { return axis_a_; }
  const Axis& axis_b() const noexcept { return axis_b_; }
  const Matrix<std::complex<double>>& amplitude() const noexcept { return amplitude_; }

  /// sum |amp|^2 step_a step_b.
  double norm_squared() const {
    double acc = 0.0;
    for (const auto& a : amplitude_.flat()) acc += std::norm(a);
    return acc * axis_a_.step() * axis_b_.step();
  }

 private:
  Axis axis_a_;
  Axis axis_b_;
  Matrix<std::complex<double>> amplitude_;
};

struct GridOptions {
  std::size_t points = 1024;
  double extent = 6.0;  // half-width of the position grid in characteristic widths
  double tail_tolerance = 1e-6;
  // The sinc factor has power-law tails that a 1024-point grid cannot push
  // below 1e-6 in both domains at once.
  double power_law_tail_tolerance = 1e-3;
};

/// Conjugate momentum axis of a position axis: step 2 pi / (count * step),
/// centred with index count/2 at p = 0.
inline Axis momentum_axis(const Axis& position) {
  const double dp = 2.0 * std::numbers::pi / (static_cast<double>(position.count()) * position.step());
  const double offset = -static_cast<double>(position.count() / 2) * dp;
  return Axis(offset, dp, position.count(), Unit::inverse_length);
}

namespace detail {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

// Two-sided tail of a normal density with standard deviation sigma beyond |t| > limit.
inline double gaussian_tail(double limit, double sigma) { return std::erfc(limit / (kSqrt2 * sigma)); }

// Two-sided tail of the density u^2 exp(-u^2/(2 s^2)) / (s^3 sqrt(2 pi)) beyond |u| > limit.
inline double quadratic_gaussian_tail(double limit, double sigma) {
  const double t = limit / sigma;
  return std::erfc(t / kSqrt2) + std::sqrt(2.0 / std::numbers::pi) * t * std::exp(-0.5 * t * t);
}

// Normalized Hermite function h_n(t), stable for large n and |t|.
inline double hermite_function(int n, double t) {
  double prev = 0.0;
  double cur = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * t * t);
  for (int k = 1; k <= n; ++k) {
    const double next = std::sqrt(2.0 / k) * t * cur - std::sqrt((k - 1.0) / k) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// Two-sided tail of h_n(t)^2 beyond |t| > limit (Simpson rule).
inline double hermite_function_tail(int n, double limit) {
  if (limit <= 0.0) return 1.0;
  const double upper = limit + std::sqrt(2.0 * n + 1.0) + 12.0;
  const int panels = 4000;
  const double h = (upper - limit) / panels;
  double acc = 0.0;
  for (int k = 0; k <= panels; ++k) {
    const double w = (k == 0 || k == panels) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const double f = hermite_function(n, limit + k * h);
    acc += w * f * f;
  }
  return std::min(1.0, 2.0 * acc * h / 3.0);
}

inline double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

// One-sided integral of sinc(t^2)^2 over [from, inf), trapezoid plus the
// averaged 1/(6 T^3) remainder.
inline double sinc_square_integral_from(double from) {
  const double upper = from + 100.0;
  const double h = std::min(1e-3, std::numbers::pi / (40.0 * upper));
  const auto steps = static_cast<std::size_t>(std::ceil((upper - from) / h));
  const double dh = (upper - from) / static_cast<double>(steps);
  double acc = 0.0;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = from + static_cast<double>(k) * dh;
    const double s = sinc(t * t);
    acc += (k == 0 || k == steps ? 0.5 : 1.0) * s * s;
  }
  return acc * dh + 1.0 / (6.0 * upper * upper * upper);
}

// Two-sided tail of sinc(a Q^2)^2 beyond |Q| > limit, in units t = sqrt(a) Q.
inline double sinc_momentum_tail(double scaled_limit) {
  static const double total = 2.0 * sinc_square_integral_from(0.0);
  if (scaled_limit <= 0.0) return 1.0;
  return std::min(1.0, 2.0 * sinc_square_integral_from(scaled_limit) / total);
}

// Position-space profile of the sinc factor, |S(v)|^2 with
// S(v) = \int sinc(Q^2) exp(i Q v / 2) dQ, tabulated once by a fine 1D FFT.
// Returns the two-sided tail beyond |v| > limit (units of sqrt(a)).
inline double sinc_position_tail(double scaled_limit) {
  struct Table {
    double dv = 0.0;
    std::vector<double> outside;  // outside[k] = mass with |v| > k dv
  };
  static const Table table = [] {
    constexpr std::size_t n = std::size_t{1} << 20;
    constexpr double dq = 0.01;
    std::vector<std::complex<double>> buf(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double q = (static_cast<double>(k) - static_cast<double>(n / 2)) * dq;
      buf[k] = sinc(q * q);
    }
    fft::transform(std::span<std::complex<double>>(buf), fft::Sign::backward);
    // Sample k of the DFT sits at v = 4 pi k / (n dq) up to the wrap.
    Table t;
    t.dv = 4.0 * std::numbers::pi / (static_cast<double>(n) * dq);
    const std::size_t half = n / 2;
    std::vector<double> radial(half, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double m = std::norm(buf[k]);
      total += m;
      const std::size_t r = k < half ? k : n - k;
      if (r < half) radial[r] += m;
    }
    t.outside.assign(half, 0.0);
    double acc = 0.0;
    for (std::size_t r = half; r-- > 0;) {
      t.outside[r] = acc / total;
      acc += radial[r];
    }
    return t;
  }();
  if (scaled_limit <= 0.0) return 1.0;
  const double pos = scaled_limit / table.dv;
  const auto idx = static_cast<std::size_t>(pos);
  if (idx + 1 >= table.outside.size()) {
    // Density falls as v^-4; extrapolate the tail as v^-3 from the table edge.
    const double edge = static_cast<double>(table.outside.size() - 1) * table.dv;
    return table.outside.back() * std::pow(edge / scaled_limit, 3.0);
  }
  return table.outside[idx];
}

struct TailEstimate {
  double position_gaussian = 0.0;
  double momentum_gaussian = 0.0;
  double position_power_law = 0.0;
  double momentum_power_law = 0.0;
};

// Mass outside the square |x_A|,|x_B| <= half_x and |p_A|,|p_B| <= half_p,
// bounded by the tails of the rotated-coordinate factors.
inline TailEstimate estimate_tails(const StateSpec& spec, double half_x, double half_p) {
  TailEstimate t;
  std::visit(
      [&](const auto& f) {
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<F, HermiteGauss>) {
          t.position_gaussian = hermite_function_tail(f.n, half_x) + gaussian_tail(half_x, std::sqrt(0.5));
          t.momentum_gaussian =
              hermite_function_tail(f.n, 0.5 * half_p) + gaussian_tail(half_p, std::sqrt(2.0));
        } else if constexpr (std::is_same_v<F, Engineered>) {
          t.position_gaussian =
              quadratic_gaussian_tail(half_x, f.sigma_plus) + gaussian_tail(half_x, f.sigma_minus);
          t.momentum_gaussian =
              quadratic_gaussian_tail(half_p, 1.0 / f.sigma_plus) + gaussian_tail(half_p, 1.0 / f.sigma_minus);
        } else {
          const double root_a = std::sqrt(f.chirp());
          t.position_gaussian = gaussian_tail(half_x, f.pump_width);
          t.momentum_gaussian = gaussian_tail(half_p, 1.0 / f.pump_width);
          t.position_power_law = sinc_position_tail(half_x / root_a);
          t.momentum_power_law = sinc_momentum_tail(half_p * root_a);
        }
      },
      spec.family());
  return t;
}

inline double half_extent(const Axis& a) { return std::min(-a.first(), a.last()); }

inline void check_grid_coverage(const StateSpec& spec, const Axis& axis_a, const Axis& axis_b,
                                const GridOptions& opts) {
  const double half_x = std::min(half_extent(axis_a), half_extent(axis_b));
  const double half_p = std::min(half_extent(momentum_axis(axis_a)), half_extent(momentum_axis(axis_b)));
  if (!(half_x > 0.0)) {
    throw Error(ErrorCode::GridTooNarrow, "position grid does not contain the origin");
  }
  const TailEstimate t = estimate_tails(spec, half_x, half_p);
  const double gaussian = t.position_gaussian + t.momentum_gaussian;
  const double power = t.position_power_law + t.momentum_power_law;
  if (gaussian > opts.tail_tolerance || power > opts.power_law_tail_tolerance) {
    throw Error(ErrorCode::GridTooNarrow,
                spec.describe() + ": estimated tail mass " + std::to_string(gaussian) + " (gaussian) + " +
                    std::to_string(power) + " (power-law) outside a grid of half-width " +
                    std::to_string(half_x) + " mm / " + std::to_string(half_p) + " 1/mm");
  }
}

}  // namespace detail

/// Standard-deviation-like widths of |psi|^2 along u = x_A + x_B and
/// v = x_A - x_B, used to size default grids.
struct RotatedWidths {
  double plus = 1.0;
  double minus = 1.0;
};

inline RotatedWidths characteristic_widths(const StateSpec& spec) {
  return spec.visit([](const auto& f) -> RotatedWidths {
    using F = std::decay_t<decltype(f)>;
    if constexpr (std::is_same_v<F, HermiteGauss>) {
      return {std::sqrt(f.n + 0.5), std::sqrt(0.5)};
    } else if constexpr (std::is_same_v<F, Engineered>) {
      return {std::sqrt(3.0) * f.sigma_plus, f.sigma_minus};
    } else {
      // The sinc factor's position profile has std 2.68 sqrt(a) but v^-4
      // tails; 6.7 sqrt(a) per width puts 6 widths at the 1e-4 tail point.
      return {f.pump_width, 6.7 * std::sqrt(f.chirp())};
    }
  });
}

/// Symmetric square position grid of opts.points per axis spanning
/// +-opts.extent characteristic widths.
inline std::pair<Axis, Axis> default_position_axes(const StateSpec& spec, const GridOptions& opts = {}) {
  if (opts.points < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 grid points");
  if (!(opts.extent > 0.0)) throw Error(ErrorCode::InvalidArgument, "grid extent must be positive");
  const RotatedWidths w = characteristic_widths(spec);
  const double half = opts.extent * std::max(w.plus, w.minus);
  const double step = 2.0 * half / static_cast<double>(opts.points);
  const Axis axis(-half, step, opts.points, Unit::length);
  return {axis, axis};
}

namespace detail {

// Forward continuous-FT approximation along both axes, in place. See the
// file comment for the kernel. With x_j = o + j s and p_m = q0 + m dp,
// exp(-i p_m x_j) = exp(-i p_m o) exp(-i q0 s j) exp(-2 pi i m j / N).
inline Matrix<std::complex<double>> apply_transform(const Matrix<std::complex<double>>& in, const Axis& from_a,
                                                    const Axis& from_b, const Axis& to_a, const Axis& to_b,
                                                    fft::Sign sign) {
  const double dir = sign == fft::Sign::forward ? -1.0 : 1.0;
  const std::size_t na = from_a.count();
  const std::size_t nb = from_b.count();
  // Pre-twiddle uses the first sample of the destination axis; post-twiddle
  // the offset of the source axis.
  std::vector<std::complex<double>> pre_a(na), pre_b(nb), post_a(na), post_b(nb);
  for (std::size_t j = 0; j < na; ++j) {
    pre_a[j] = std::polar(1.0, dir * to_a.first() * from_a.step() * static_cast<double>(j));
    post_a[j] = std::polar(1.0, dir * to_a.position(j) * from_a.first());
  }
  for (std::size_t j = 0; j < nb; ++j) {
    pre_b[j] = std::polar(1.0, dir * to_b.first() * from_b.step() * static_cast<double>(j));
    post_b[j] = std::polar(1.0, dir * to_b.position(j) * from_b.first());
  }
  Matrix<std::complex<double>> work(na, nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) work(i, j) = in(i, j) * pre_a[i] * pre_b[j];
  }
  fft::transform(work, sign);
  const double scale = from_a.step() * from_b.step() / (2.0 * std::numbers::pi);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) work(i, j) *= scale * post_a[i] * post_b[j];
  }
  return work;
}

inline std::complex<double> sinc_momentum_amplitude(const SincSpdc& f, double pa, double pb) {
  const double P = pa + pb;
  const double Q = pa - pb;
  return std::exp(-0.25 * f.pump_width * f.pump_width * P * P) * sinc(f.chirp() * Q * Q);
}

}  // namespace detail

/// psi~ on the conjugate momentum grid.
inline WavefunctionGrid momentum_transform(const WavefunctionGrid& wf) {
  const Axis pa = momentum_axis(wf.axis_a());
  const Axis pb = momentum_axis(wf.axis_b());
  return WavefunctionGrid(pa, pb,
                          detail::apply_transform(wf.amplitude(), wf.axis_a(), wf.axis_b(), pa, pb, fft::Sign::forward));
}

/// Inverse of momentum_transform back onto the given position axes, whose
/// conjugate grids must match the momentum grid of `wf`.
inline WavefunctionGrid inverse_momentum_transform(const WavefunctionGrid& wf, const Axis& position_a,
                                                   const Axis& position_b) {
  const Axis ca = momentum_axis(position_a);
  const Axis cb = momentum_axis(position_b);
  auto close = [](const Axis& x, const Axis& y) {
    return x.count() == y.count() && std::abs(x.step() - y.step()) <= 1e-12 * y.step() &&
           std::abs(x.offset() - y.offset()) <= 1e-9 * y.step();
  };
  if (!close(wf.axis_a(), ca) || !close(wf.axis_b(), cb)) {
    throw Error(ErrorCode::ShapeMismatch, "momentum grid is not conjugate to the requested position axes");
  }
  return WavefunctionGrid(position_a, position_b,
                          detail::apply_transform(wf.amplitude(), wf.axis_a(), wf.axis_b(), position_a, position_b,
                                                  fft::Sign::backward));
}

/// Samples the family's position wavefunction on the given axes. The sinc
/// family is defined in momentum space and brought back by the inverse
/// transform. Throws GridTooNarrow when the estimated truncated mass in
/// either domain exceeds the tolerances in `opts`.
inline WavefunctionGrid build_position_wavefunction(const StateSpec& spec, const Axis& axis_a, const Axis& axis_b,
                                                    const GridOptions& opts = {}) {
  detail::check_grid_coverage(spec, axis_a, axis_b, opts);
  const std::size_t na = axis_a.count();
  const std::size_t nb = axis_b.count();
  Matrix<std::complex<double>> amp(na, nb);

  if (const auto* h = std::get_if<HermiteGauss>(&spec.family())) {
    for (std::size_t i = 0; i < na; ++i) {
      const double xa = axis_a.position(i);
      for (std::size_t j = 0; j < nb; ++j) {
        const double xb = axis_b.position(j);
        const double u = xa + xb;
        const double v = xa - xb;
        amp(i, j) = hermite(h->n, u) * std::exp(-0.5 * (u * u + v * v));
      }
    }
    return WavefunctionGrid(axis_a, axis_b, std::move(amp));
  }
  if (const auto* e = std::get_if<Engineered>(&spec.family())) {
    const double cp = 0.25 / (e->sigma_plus * e->sigma_plus);
    const double cm = 0.25 / (e->sigma_minus * e->sigma_minus);
    for (std::size_t i = 0; i < na; ++i) {
      const double xa = axis_a.position(i);
      for (std::size_t j = 0; j < nb; ++j) {
        const double xb = axis_b.position(j);
        const double u = xa + xb;
        const double v = xa - xb;
        amp(i, j) = u * std::exp(-cp * u * u - cm * v * v);
      }
    }
    return WavefunctionGrid(axis_a, axis_b, std::move(amp));
  }
  const auto& s = std::get<SincSpdc>(spec.family());
  const Axis pa = momentum_axis(axis_a);
  const Axis pb = momentum_axis(axis_b);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) amp(i, j) = detail::sinc_momentum_amplitude(s, pa.position(i), pb.position(j));
  }
  return inverse_momentum_transform(WavefunctionGrid(pa, pb, std::move(amp)), axis_a, axis_b);
}

/// Born rule: mass = |amp|^2 step_a step_b, renormalized.
inline JointDistribution joint_distribution(const WavefunctionGrid& wf) {
  const double cell = wf.axis_a().step() * wf.axis_b().step();
  return normalize(wf.amplitude().map([cell](const std::complex<double>& a) { return std::norm(a) * cell; }),
                   wf.axis_a(), wf.axis_b());
}

/// Position- and momentum-space distributions of one state.
struct StateDistributions {
  JointDistribution x;
  JointDistribution p;
};

inline StateDistributions state_distributions(const StateSpec& spec, const Axis& axis_a, const Axis& axis_b,
                                              const GridOptions& opts = {}) {
  const WavefunctionGrid pos = build_position_wavefunction(spec, axis_a, axis_b, opts);
  return {joint_distribution(pos), joint_distribution(momentum_transform(pos))};
}

inline StateDistributions state_distributions(const StateSpec& spec, const GridOptions& opts = {}) {
  const auto [a, b] = default_position_axes(spec, opts);
  return state_distributions(spec, a, b, opts);
}

}  // namespace eprcrit
