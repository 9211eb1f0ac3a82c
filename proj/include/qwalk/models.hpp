#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "linalg.hpp"

namespace qwalk {

struct WalkParams1D {
  double theta1 = 0;
  double theta2 = 0;
  double gamma = 0;
  double phi = 0;
  cplx delta() const { return {gamma, phi}; }
};

struct WalkParams2D {
  double theta1 = 0;
  double theta2 = 0;
  double gamma_x = 0;
  double gamma_y = 0;
};

inline Coin rotation_coin(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  Coin m;
  m << c, -s, s, c;
  return m;
}

inline Coin scaling_op(cplx delta) {
  Coin m = Coin::Zero();
  m(0, 0) = std::exp(delta);
  m(1, 1) = std::exp(-delta);
  return m;
}

inline Coin translation(double k) {
  Coin m = Coin::Zero();
  m(0, 0) = std::exp(I * k);
  m(1, 1) = std::exp(-I * k);
  return m;
}

// T_down(k) = exp(ik(sz - 1)/2), T_up(k) = exp(ik(sz + 1)/2)
inline Coin shift_down(double k) {
  Coin m = Coin::Zero();
  m(0, 0) = 1.0;
  m(1, 1) = std::exp(-I * k);
  return m;
}

inline Coin shift_up(double k) {
  Coin m = Coin::Zero();
  m(0, 0) = std::exp(I * k);
  m(1, 1) = 1.0;
  return m;
}

inline Coin u1d_dtqw_k(double theta, double k) { return translation(k) * rotation_coin(theta); }

inline Coin u1d_ssqw_k(const WalkParams1D& p, double k) {
  const cplx d = p.delta();
  return shift_down(k) * scaling_op(d) * rotation_coin(p.theta2) * shift_up(k) * scaling_op(-d) *
         rotation_coin(p.theta1);
}

inline Coin u1d_ssqw_timesym_k(const WalkParams1D& p, double k) {
  const cplx d = p.delta();
  const Coin half = rotation_coin(p.theta1 / 2);
  return half * shift_down(k) * scaling_op(d) * rotation_coin(p.theta2) * shift_up(k) * scaling_op(-d) * half;
}

// Split-step walk as two ordinary DTQW steps at half momentum. The scalar
// phases of T_down(k) = e^{-ik/2} T(k/2) and T_up(k) = e^{ik/2} T(k/2) cancel,
// so this equals u1d_ssqw_k(theta1, theta2, 0, k) exactly.
inline Coin u1d_ssqw_decomposed_k(double theta1, double theta2, double k) {
  return u1d_dtqw_k(theta2, k / 2) * u1d_dtqw_k(theta1, k / 2);
}

inline cplx cos_quasi_energy_ssqw(const WalkParams1D& p, double k) {
  const double c1 = std::cos(p.theta1 / 2), s1 = std::sin(p.theta1 / 2);
  const double c2 = std::cos(p.theta2 / 2), s2 = std::sin(p.theta2 / 2);
  return c1 * c2 * std::cos(k) - s1 * s2 * std::cosh(2.0 * p.delta());
}

inline cplx quasi_energy_ssqw(const WalkParams1D& p, double k) {
  return principal_acos(cos_quasi_energy_ssqw(p, k));
}

inline BlochDecomposition bloch_ssqw(const WalkParams1D& p, double k) {
  const double c1 = std::cos(p.theta1 / 2), s1 = std::sin(p.theta1 / 2);
  const double c2 = std::cos(p.theta2 / 2), s2 = std::sin(p.theta2 / 2);
  const cplx d2 = 2.0 * p.delta();
  BlochDecomposition out;
  out.energy = quasi_energy_ssqw(p, k);
  const cplx se = std::sin(out.energy);
  if (std::abs(se) < 1e-9) throw GapClosed("bloch_ssqw: |sin E| < 1e-9");
  out.n = {(s1 * c2 * std::sin(k) - I * c1 * s2 * std::sinh(d2)) / se,
           (s1 * c2 * std::cos(k) + c1 * s2 * std::cosh(d2)) / se,
           (-c1 * c2 * std::sin(k) - I * s1 * s2 * std::sinh(d2)) / se};
  return out;
}

inline Coin u2d_k(const WalkParams2D& p, double kx, double ky) {
  const Coin r1 = rotation_coin(p.theta1), r2 = rotation_coin(p.theta2);
  const Coin tx = translation(kx), ty = translation(ky);
  const cplx gx = p.gamma_x, gy = p.gamma_y;
  return scaling_op(gy) * ty * r1 * scaling_op(-gy) * ty * r2 * scaling_op(gx) * tx * r1 * scaling_op(-gx) * tx;
}

inline Coin u2d_triangular_k(double theta1, double theta2, double kx, double ky) {
  const Coin r1 = rotation_coin(theta1);
  return translation(kx + ky) * r1 * translation(ky) * rotation_coin(theta2) * translation(kx) * r1;
}

// Two split-step walks along y and x, each conjugated into the square-lattice
// frame. Equals u2d_k at zero loss.
inline Coin u2d_decomposed_k(double theta1, double theta2, double kx, double ky) {
  const Coin ty = translation(ky), tx = translation(kx);
  const Coin wy = ty.adjoint() * u1d_ssqw_k({theta1, 0.0}, 2 * ky) * ty;
  const Coin wx = tx.adjoint() * u1d_ssqw_k({theta1, theta2}, 2 * kx) * tx;
  return wy * wx;
}

namespace detail {
struct Args2D {
  cplx a, b, c, d;  // kx+ky-igx+igy, kx+ky+igx-igy, kx-ky-igx-igy, kx-ky+igx+igy
};
inline Args2D args_2d(const WalkParams2D& p, double kx, double ky) {
  const cplx gx = p.gamma_x, gy = p.gamma_y;
  return {kx + ky - I * gx + I * gy, kx + ky + I * gx - I * gy, kx - ky - I * gx - I * gy,
          kx - ky + I * gx + I * gy};
}
}  // namespace detail

inline cplx cos_quasi_energy_2d(const WalkParams2D& p, double kx, double ky) {
  const auto [a, b, c, d] = detail::args_2d(p, kx, ky);
  const double S1 = std::sin(p.theta1), C1 = std::cos(p.theta1);
  const double s2 = std::sin(p.theta2 / 2), c2 = std::cos(p.theta2 / 2);
  return C1 * c2 * std::cos(a) * std::cos(b) - c2 * std::sin(a) * std::sin(b) -
         S1 * s2 * std::cos(c) * std::cos(b);
}

inline cplx quasi_energy_2d(const WalkParams2D& p, double kx, double ky) {
  return principal_acos(cos_quasi_energy_2d(p, kx, ky));
}

inline BlochDecomposition bloch_2d(const WalkParams2D& p, double kx, double ky) {
  const auto [a, b, c, d] = detail::args_2d(p, kx, ky);
  const double S1 = std::sin(p.theta1), C1 = std::cos(p.theta1);
  const double s2 = std::sin(p.theta2 / 2), c2 = std::cos(p.theta2 / 2);
  BlochDecomposition out;
  out.energy = quasi_energy_2d(p, kx, ky);
  const cplx se = std::sin(out.energy);
  if (std::abs(se) < 1e-9) throw GapClosed("bloch_2d: |sin E| < 1e-9");
  using std::cos, std::sin;
  const cplx nx = -S1 * c2 * cos(a) * sin(d) - C1 * s2 * cos(c) * sin(d) - s2 * sin(c) * cos(d);
  const cplx ny = S1 * c2 * cos(a) * cos(d) + C1 * s2 * cos(c) * cos(d) - s2 * sin(c) * sin(d);
  const cplx nz = -C1 * c2 * cos(a) * sin(b) - c2 * sin(a) * cos(b) + S1 * s2 * cos(c) * sin(b);
  out.n = {nx / se, ny / se, nz / se};
  return out;
}

enum class CriticalKind { RealCritical, ShiftedCritical, NoClosing };

struct Channel {
  double k0 = 0;  // 0 or pi
  double e0 = 0;  // 0 or pi
};

struct CriticalGamma {
  CriticalKind kind = CriticalKind::NoClosing;
  double gamma_c = std::numeric_limits<double>::quiet_NaN();
  double phi_c = 0;
  Channel channel;
  double x = 0;  // cosh argument
};

inline CriticalGamma critical_gamma(double theta1, double theta2, Channel ch) {
  const double c1 = std::cos(theta1 / 2), s1 = std::sin(theta1 / 2);
  const double c2 = std::cos(theta2 / 2), s2 = std::sin(theta2 / 2);
  if (std::abs(s1 * s2) < 1e-12) throw DegenerateCoin("critical_gamma: sin(theta1/2) sin(theta2/2) = 0");
  CriticalGamma out;
  out.channel = ch;
  out.x = (c1 * c2 * std::cos(ch.k0) - std::cos(ch.e0)) / (s1 * s2);
  // cos/sin of pi are not exact in floating point
  if (std::abs(out.x - 1.0) < 1e-14) out.x = 1.0;
  if (std::abs(out.x + 1.0) < 1e-14) out.x = -1.0;
  if (out.x >= 1.0) {
    out.kind = CriticalKind::RealCritical;
    out.gamma_c = 0.5 * std::acosh(out.x);
  } else if (out.x <= -1.0) {
    out.kind = CriticalKind::ShiftedCritical;
    out.gamma_c = 0.5 * std::acosh(-out.x);
    out.phi_c = pi / 2;
  }
  return out;
}

inline std::array<Channel, 4> all_channels() { return {{{0, 0}, {pi, 0}, {0, pi}, {pi, pi}}}; }

// Smallest positive real critical gamma over the four channels; NaN if none.
inline CriticalGamma min_critical_gamma(double theta1, double theta2) {
  CriticalGamma best;
  for (const Channel& ch : all_channels()) {
    const CriticalGamma c = critical_gamma(theta1, theta2, ch);
    if (c.kind != CriticalKind::RealCritical) continue;
    if (best.kind != CriticalKind::RealCritical || c.gamma_c < best.gamma_c) best = c;
  }
  return best;
}

// k_j = -pi + 2 pi j / n
inline std::vector<double> momentum_grid(int n) {
  if (n < 1) throw ValidationError("momentum_grid: n must be positive");
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) k[j] = -pi + 2 * pi * j / n;
  return k;
}

// The 2D walk is pi-periodic in kx and ky: k_j = -pi/2 + pi j / n
inline std::vector<double> reduced_grid(int n) {
  if (n < 1) throw ValidationError("reduced_grid: n must be positive");
  std::vector<double> k(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) k[j] = -pi / 2 + pi * j / n;
  return k;
}

// Grid plus k = 0 (the k0 = 0 closing channel is never on an odd grid).
inline std::vector<double> symmetry_grid(int n) {
  auto k = momentum_grid(n);
  bool has_zero = false;
  for (double v : k) has_zero = has_zero || v == 0.0;
  if (!has_zero) k.push_back(0.0);
  return k;
}

}  // namespace qwalk
