#pragma once

#include <string>
#include <vector>

#include "invariants.hpp"

namespace qwalk {

enum class Relation { PT, ExactPT, PHS, CS };

inline const char* relation_name(Relation r) {
  switch (r) {
    case Relation::PT: return "PT";
    case Relation::ExactPT: return "ExactPT";
    case Relation::PHS: return "PHS";
    case Relation::CS: return "CS";
  }
  return "?";
}

struct SymmetryReport {
  Relation relation = Relation::PT;
  double max_violation = 0;
  bool passed = false;
  int grid_size = 0;
  double tolerance = 0;
};

inline SymmetryReport make_report(Relation r, double v, int n, double tol) {
  return {r, v, v <= tol, n, tol};
}

// sigma_z U* sigma_z^-1 = U^-1
template <class Builder>
double pt_violation(Builder&& build, const std::vector<double>& ks) {
  const Coin sz = sigma_z();
  double v = 0;
  for (double k : ks) {
    const Coin u = build(k);
    v = std::max(v, max_abs(sz * u.conjugate() * sz - u.inverse()));
  }
  return v;
}

// conj(U(k)) = U(-k)
template <class Builder>
double phs_violation(Builder&& build, const std::vector<double>& ks) {
  double v = 0;
  for (double k : ks) v = std::max(v, max_abs(build(k).conjugate() - build(-k)));
  return v;
}

// sigma_x U sigma_x = U^dagger
template <class Builder>
double cs_violation(Builder&& build, const std::vector<double>& ks) {
  const Coin sx = sigma_x();
  double v = 0;
  for (double k : ks) {
    const Coin u = build(k);
    v = std::max(v, max_abs(sx * u * sx - u.adjoint()));
  }
  return v;
}

// The relation holds in the time-symmetric frame; u1d_ssqw_k is related to it
// by a real rotation, which turns sigma_z into a rotated Pauli matrix.
inline SymmetryReport check_pt_1d(const WalkParams1D& p, int n_points, double tol) {
  const double v = pt_violation([&](double k) { return u1d_ssqw_timesym_k(p, k); }, momentum_grid(n_points));
  return make_report(Relation::PT, v, n_points, tol);
}

inline double max_imag_energy_1d(const WalkParams1D& p, const std::vector<double>& ks) {
  double v = 0;
  for (double k : ks) v = std::max(v, std::abs(split_bands(u1d_ssqw_k(p, k)).e_lower.imag()));
  return v;
}

inline SymmetryReport check_exact_pt(const WalkParams1D& p, int n_points, double tol) {
  return make_report(Relation::ExactPT, max_imag_energy_1d(p, symmetry_grid(n_points)), n_points, tol);
}

inline SymmetryReport check_exact_pt(const WalkParams2D& p, int n_points, double tol) {
  const auto ks = momentum_grid(n_points);
  double v = 0;
  for (double kx : ks)
    for (double ky : ks) v = std::max(v, std::abs(split_bands(u2d_k(p, kx, ky)).e_lower.imag()));
  return make_report(Relation::ExactPT, v, n_points, tol);
}

inline SymmetryReport check_phs(const WalkParams1D& p, int n_points, double tol) {
  const double v = phs_violation([&](double k) { return u1d_ssqw_timesym_k(p, k); }, momentum_grid(n_points));
  return make_report(Relation::PHS, v, n_points, tol);
}

inline SymmetryReport check_phs(const WalkParams2D& p, int n_points, double tol) {
  const auto ks = momentum_grid(n_points);
  double v = 0;
  for (double kx : ks)
    for (double ky : ks) v = std::max(v, max_abs(u2d_k(p, kx, ky).conjugate() - u2d_k(p, -kx, -ky)));
  return make_report(Relation::PHS, v, n_points, tol);
}

inline SymmetryReport check_cs(const WalkParams1D& p, int n_points, double tol) {
  const double v = cs_violation([&](double k) { return u1d_ssqw_timesym_k(p, k); }, momentum_grid(n_points));
  return make_report(Relation::CS, v, n_points, tol);
}

struct ExceptionalPoint {
  double gamma = 0;
  bool gapless_at_zero = false;
  int iterations = 0;
};

inline ExceptionalPoint find_exceptional_point(double theta1, double theta2, double gamma_hi, int n_points,
                                               double tol = 1e-8) {
  const auto ks = symmetry_grid(n_points);
  auto exact = [&](double g) { return max_imag_energy_1d({theta1, theta2, g}, ks) <= tol; };
  ExceptionalPoint out;
  double min_gap = INFINITY;
  for (double k : ks) min_gap = std::min(min_gap, split_bands(u1d_ssqw_k({theta1, theta2, 0.0}, k)).gap);
  out.gapless_at_zero = min_gap < 1e-9;
  if (!exact(0.0)) {
    if (out.gapless_at_zero) return out;
    throw NoBracket("find_exceptional_point: exact PT already broken at gamma = 0");
  }
  if (exact(gamma_hi)) throw NoBracket("find_exceptional_point: exact PT unbroken at gamma_hi");
  double lo = 0, hi = gamma_hi;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (exact(mid) ? lo : hi) = mid;
    ++out.iterations;
  }
  out.gamma = 0.5 * (lo + hi);
  return out;
}

}  // namespace qwalk
