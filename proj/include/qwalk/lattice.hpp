#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "models.hpp"
#include "parallel.hpp"

namespace qwalk {

struct AnglePair {
  double theta1 = 0;
  double theta2 = 0;
};

// Sites n = -(N-1)/2 .. (N-1)/2 on a ring; |n| <= boundary is the inner region.
struct RegionSpec {
  int boundary = 0;
  AnglePair inner;
  AnglePair outer;
  const AnglePair& at(int n) const { return std::abs(n) <= boundary ? inner : outer; }
};

struct LatticeOperator {
  ComplexMatrix matrix;
  int n_sites = 0;
  RegionSpec spec;
};

inline int site_of(int index, int n_sites) { return index - (n_sites - 1) / 2; }

inline void validate_region(int n_sites, const RegionSpec& spec) {
  if (n_sites < 3 || n_sites % 2 == 0) throw InvalidRegion("lattice size must be odd and >= 3");
  if (spec.boundary <= 0 || spec.boundary >= (n_sites - 1) / 2)
    throw InvalidRegion("boundary must satisfy 0 < L_B < (N-1)/2");
}

namespace detail {

// Row operations on m (2N rows, basis index 2*i + spin): each applies
// a site-local operator from the left.
inline void apply_coin(ComplexMatrix& m, int n_sites, const std::vector<Coin>& coins) {
  for (int i = 0; i < n_sites; ++i) {
    const Coin& c = coins[i];
    const Eigen::RowVectorXcd up = m.row(2 * i), dn = m.row(2 * i + 1);
    m.row(2 * i) = c(0, 0) * up + c(0, 1) * dn;
    m.row(2 * i + 1) = c(1, 0) * up + c(1, 1) * dn;
  }
}

inline void apply_diag(ComplexMatrix& m, int n_sites, cplx up, cplx dn) {
  for (int i = 0; i < n_sites; ++i) {
    m.row(2 * i) *= up;
    m.row(2 * i + 1) *= dn;
  }
}

// Cyclic shift of one spin component by `step` sites.
inline void apply_shift(ComplexMatrix& m, int n_sites, int spin, int step) {
  ComplexMatrix src(n_sites, m.cols());
  for (int i = 0; i < n_sites; ++i) src.row(i) = m.row(2 * i + spin);
  for (int i = 0; i < n_sites; ++i) m.row(2 * (((i + step) % n_sites + n_sites) % n_sites) + spin) = src.row(i);
}

inline std::vector<Coin> rotations(int n_sites, const RegionSpec& spec, bool first) {
  std::vector<Coin> out(static_cast<std::size_t>(n_sites));
  for (int i = 0; i < n_sites; ++i) {
    const AnglePair& a = spec.at(site_of(i, n_sites));
    out[i] = rotation_coin(first ? a.theta1 : a.theta2);
  }
  return out;
}

}  // namespace detail

// T_down G R(theta2(n)) T_up G^-1 R(theta1(n)) on a ring of n_sites.
inline LatticeOperator build_chain_operator(int n_sites, const RegionSpec& spec, double gamma) {
  validate_region(n_sites, spec);
  const int dim = 2 * n_sites;
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  const double eg = std::exp(gamma), emg = std::exp(-gamma);
  detail::apply_coin(m, n_sites, detail::rotations(n_sites, spec, true));
  detail::apply_diag(m, n_sites, emg, eg);
  detail::apply_shift(m, n_sites, 0, +1);
  detail::apply_coin(m, n_sites, detail::rotations(n_sites, spec, false));
  detail::apply_diag(m, n_sites, eg, emg);
  detail::apply_shift(m, n_sites, 1, -1);
  return {std::move(m), n_sites, spec};
}

// G_y T_y R1(y) G_y^-1 T_y R2(y) G_x T_x(kx) R1(y) G_x^-1 T_x(kx) on a ring of n_y sites.
inline LatticeOperator build_strip_operator(int n_y, const RegionSpec& spec, double kx, double gamma_x,
                                            double gamma_y) {
  validate_region(n_y, spec);
  const int dim = 2 * n_y;
  ComplexMatrix m = ComplexMatrix::Identity(dim, dim);
  const auto r1 = detail::rotations(n_y, spec, true);
  const auto r2 = detail::rotations(n_y, spec, false);
  const cplx tx_up = std::exp(I * kx), tx_dn = std::exp(-I * kx);
  const double gx = std::exp(gamma_x), gy = std::exp(gamma_y);
  auto shift_y = [&] {
    detail::apply_shift(m, n_y, 0, +1);
    detail::apply_shift(m, n_y, 1, -1);
  };
  detail::apply_diag(m, n_y, tx_up, tx_dn);
  detail::apply_diag(m, n_y, 1 / gx, gx);
  detail::apply_coin(m, n_y, r1);
  detail::apply_diag(m, n_y, tx_up, tx_dn);
  detail::apply_diag(m, n_y, gx, 1 / gx);
  detail::apply_coin(m, n_y, r2);
  shift_y();
  detail::apply_diag(m, n_y, 1 / gy, gy);
  detail::apply_coin(m, n_y, r1);
  shift_y();
  detail::apply_diag(m, n_y, gy, 1 / gy);
  return {std::move(m), n_y, spec};
}

inline std::vector<EigenPair> chain_spectrum(const LatticeOperator& op, bool with_vectors = true) {
  return eig_general(op.matrix, with_vectors);
}

// Site marginals |psi_up|^2 + |psi_dn|^2, normalized.
inline std::vector<double> site_profile(const ComplexVector& v) {
  const int n = static_cast<int>(v.size() / 2);
  std::vector<double> p(static_cast<std::size_t>(n));
  double total = 0;
  for (int i = 0; i < n; ++i) total += p[i] = std::norm(v(2 * i)) + std::norm(v(2 * i + 1));
  for (double& x : p) x /= total;
  return p;
}

inline double ipr(const std::vector<double>& profile) {
  double s = 0;
  for (double x : profile) s += x * x;
  return s;
}

inline int peak_index(const std::vector<double>& profile) {
  return static_cast<int>(std::max_element(profile.begin(), profile.end()) - profile.begin());
}

struct EdgeStateReport {
  cplx eigenvalue;
  cplx quasi_energy;
  double ipr = 0;
  int peak_site = 0;
  bool is_edge = false;
  std::vector<double> profile;
};

struct EdgeDetectOptions {
  double real_axis_tol = 1e-6;
  double ipr_min = 0.05;
  int window = 10;
  double cluster_tol = 1e-8;
};

namespace detail {

// A degenerate cluster spans an invariant subspace; rotate it to the basis
// that diagonalizes the right-half projector so each vector sits on one side.
inline std::vector<ComplexVector> localize_cluster(const std::vector<ComplexVector>& vs) {
  const Eigen::Index dim = vs.front().size();
  const Eigen::Index m = static_cast<Eigen::Index>(vs.size());
  ComplexMatrix v(dim, m);
  for (Eigen::Index c = 0; c < m; ++c) v.col(c) = vs[c];
  Eigen::HouseholderQR<ComplexMatrix> qr(v);
  const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, m);
  const Eigen::Index mid = dim / 2;
  const ComplexMatrix proj = q.bottomRows(dim - mid).adjoint() * q.bottomRows(dim - mid);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(proj);
  const ComplexMatrix rotated = q * es.eigenvectors();
  std::vector<ComplexVector> out;
  for (Eigen::Index c = 0; c < m; ++c) out.push_back(rotated.col(c).normalized());
  return out;
}

}  // namespace detail

inline std::vector<EdgeStateReport> detect_edge_states(const std::vector<EigenPair>& pairs, int n_sites,
                                                       int boundary, const EdgeDetectOptions& opt = {}) {
  std::vector<const EigenPair*> cand;
  for (const EigenPair& p : pairs)
    if (std::abs(p.value.imag()) <= opt.real_axis_tol && p.value.real() != 0.0 && p.vector.size() > 0)
      cand.push_back(&p);
  std::vector<EdgeStateReport> out;
  std::vector<bool> used(cand.size(), false);
  for (std::size_t a = 0; a < cand.size(); ++a) {
    if (used[a]) continue;
    std::vector<std::size_t> cluster{a};
    used[a] = true;
    for (std::size_t b = a + 1; b < cand.size(); ++b)
      if (!used[b] && std::abs(cand[b]->value - cand[a]->value) < opt.cluster_tol) {
        cluster.push_back(b);
        used[b] = true;
      }
    std::vector<ComplexVector> vs;
    for (std::size_t c : cluster) vs.push_back(cand[c]->vector);
    if (vs.size() > 1) vs = detail::localize_cluster(vs);
    for (std::size_t c = 0; c < cluster.size(); ++c) {
      EdgeStateReport r;
      r.eigenvalue = cand[cluster[c]]->value;
      r.quasi_energy = quasi_energy_of(r.eigenvalue);
      r.profile = site_profile(vs[c]);
      r.ipr = ipr(r.profile);
      r.peak_site = site_of(peak_index(r.profile), n_sites);
      const int dist = std::min(std::abs(r.peak_site - boundary), std::abs(r.peak_site + boundary));
      r.is_edge = r.ipr >= opt.ipr_min && dist <= opt.window;
      out.push_back(std::move(r));
    }
  }
  return out;
}

inline int count_edge_states(const std::vector<EdgeStateReport>& rs) {
  return static_cast<int>(std::count_if(rs.begin(), rs.end(), [](const EdgeStateReport& r) { return r.is_edge; }));
}

struct Interval {
  double lo = 0;
  double hi = 0;
};

// Range of |Re E| over ky for one homogeneous region at fixed kx.
inline Interval bulk_band_range(const AnglePair& a, double kx, double gamma_x, double gamma_y, int n_ky) {
  Interval r{INFINITY, -INFINITY};
  const WalkParams2D p{a.theta1, a.theta2, gamma_x, gamma_y};
  for (double ky : momentum_grid(n_ky)) {
    const double e = quasi_energy_2d(p, kx, ky).real();
    r.lo = std::min(r.lo, e);
    r.hi = std::max(r.hi, e);
  }
  return r;
}

// Complement in [0, pi] of the union of both regions' bulk ranges.
inline std::vector<Interval> bulk_gaps(const RegionSpec& spec, double kx, double gamma_x, double gamma_y,
                                       int n_ky = 2001) {
  std::vector<Interval> bands{bulk_band_range(spec.inner, kx, gamma_x, gamma_y, n_ky),
                              bulk_band_range(spec.outer, kx, gamma_x, gamma_y, n_ky)};
  std::sort(bands.begin(), bands.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> gaps;
  double cur = 0;
  for (const Interval& b : bands) {
    if (b.lo > cur) gaps.push_back({cur, b.lo});
    cur = std::max(cur, b.hi);
  }
  if (cur < pi) gaps.push_back({cur, pi});
  return gaps;
}

inline bool in_gaps(double abs_re_e, const std::vector<Interval>& gaps) {
  for (const Interval& g : gaps)
    if (abs_re_e > g.lo && abs_re_e < g.hi) return true;
  return false;
}

struct StripState {
  cplx quasi_energy;
  double ipr = 0;
  int peak_site = 0;
};

struct StripRow {
  double kx = 0;
  std::vector<double> re_energies;  // sorted
  std::vector<StripState> states;   // filled when profiles are requested
  bool ok = true;
  std::string error;
};

inline std::vector<double> kx_grid(int samples) { return momentum_grid(samples); }

inline StripRow strip_row(const RegionSpec& spec, int n_y, double kx, double gamma_x, double gamma_y,
                          bool profiles) {
  StripRow row;
  row.kx = kx;
  try {
    const auto pairs = chain_spectrum(build_strip_operator(n_y, spec, kx, gamma_x, gamma_y), profiles);
    for (const EigenPair& p : pairs) {
      const cplx e = quasi_energy_of(p.value);
      row.re_energies.push_back(e.real());
      if (profiles) {
        const auto prof = site_profile(p.vector);
        row.states.push_back({e, ipr(prof), site_of(peak_index(prof), n_y)});
      }
    }
    std::sort(row.re_energies.begin(), row.re_energies.end());
  } catch (const NumericalError& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

inline std::vector<StripRow> strip_band_structure(const RegionSpec& spec, int n_y, int kx_samples, double gamma_x,
                                                  double gamma_y, bool profiles = false) {
  validate_region(n_y, spec);
  const auto ks = kx_grid(kx_samples);
  std::vector<StripRow> rows(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { rows[i] = strip_row(spec, n_y, ks[i], gamma_x, gamma_y, profiles); });
  return rows;
}

}  // namespace qwalk
