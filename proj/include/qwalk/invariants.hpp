#pragma once

#include <cmath>
#include <vector>

#include "models.hpp"

namespace qwalk {

enum class Band { Lower, Upper };

struct BandSplit {
  cplx e_lower;  // Re in [-pi, 0]; e_upper = -e_lower
  Spinor lower;
  Spinor upper;
  double gap;    // |lambda_+ - lambda_-|
  bool defective;
};

// Lower band: Re E < 0, i.e. arg(lambda) in (0, pi). When both eigenvalues
// sit on the real axis the decaying one (|lambda| < 1) is the lower band.
inline BandSplit split_bands(const Coin& u) {
  const Eig2 e = eig2(u);
  int lo = 0;
  const double a0 = std::arg(e.values[0]);
  const bool tie = std::abs(std::sin(a0)) < 1e-12 && std::abs(std::sin(std::arg(e.values[1]))) < 1e-12;
  if (tie) {
    lo = std::abs(e.values[0]) <= std::abs(e.values[1]) ? 0 : 1;
  } else {
    lo = a0 > 0 ? 0 : 1;
  }
  const cplx lam = e.values[lo];
  double a = std::arg(lam);
  if (a < 0) a = tie ? -a : a + 2 * pi;  // only reached on the tie set near -pi
  BandSplit out;
  out.e_lower = cplx(-a, std::log(std::abs(lam)));
  out.lower = e.vectors[lo];
  out.upper = e.vectors[1 - lo];
  out.gap = std::abs(e.values[0] - e.values[1]);
  out.defective = e.defective;
  return out;
}

struct BandData1D {
  std::vector<double> k;
  std::vector<Spinor> states;
  std::vector<cplx> energies;
  Band label = Band::Lower;
};

struct BandPair1D {
  BandData1D lower;
  BandData1D upper;
  std::vector<double> gap_closures;  // k samples with |lambda_+ - lambda_-| < 1e-9
  double min_gap = 0;
};

// Rephase states[j] so <psi_{j-1}|psi_j> is real and positive. eig2's gauge
// jumps between patches; an unwrapped link sum over those jumps is off by 2 pi
// whenever one of the jump phases drifts through +-pi.
inline void transport_gauge(std::vector<Spinor>& states) {
  for (std::size_t j = 1; j < states.size(); ++j) {
    const cplx ov = states[j - 1].dot(states[j]);
    if (std::abs(ov) > 1e-12) states[j] *= std::conj(ov) / std::abs(ov);
  }
}

template <class Builder>
BandPair1D band_spectrum_from(Builder&& build, const std::vector<double>& ks) {
  BandPair1D out;
  out.lower.label = Band::Lower;
  out.upper.label = Band::Upper;
  out.min_gap = INFINITY;
  for (double k : ks) {
    const BandSplit s = split_bands(build(k));
    out.lower.k.push_back(k);
    out.upper.k.push_back(k);
    out.lower.states.push_back(s.lower);
    out.upper.states.push_back(s.upper);
    out.lower.energies.push_back(s.e_lower);
    out.upper.energies.push_back(-s.e_lower);
    if (s.gap < 1e-9) out.gap_closures.push_back(k);
    out.min_gap = std::min(out.min_gap, s.gap);
  }
  transport_gauge(out.lower.states);
  transport_gauge(out.upper.states);
  return out;
}

inline BandPair1D band_spectrum_1d(const WalkParams1D& p, int n_points) {
  if (n_points < 3) throw ValidationError("band_spectrum_1d: n_points must be >= 3");
  return band_spectrum_from([&](double k) { return u1d_ssqw_k(p, k); }, momentum_grid(n_points));
}

inline double max_abs_imag(const BandPair1D& b) {
  double m = 0;
  for (cplx e : b.lower.energies) m = std::max(m, std::abs(e.imag()));
  return m;
}

// gamma_m = -sum_j arg <psi_j|psi_{j+1}>, cyclic, each link phase in (-pi, pi].
inline double pancharatnam_phase(const std::vector<Spinor>& states) {
  const std::size_t n = states.size();
  double sum = 0;
  for (std::size_t j = 0; j < n; ++j) {
    const cplx link = states[j].dot(states[(j + 1) % n]);
    if (std::abs(link) < 1e-12)
      throw OrthogonalLink("pancharatnam_phase: orthogonal link", static_cast<int>(j));
    sum -= std::arg(link);
  }
  return sum;
}

inline double pancharatnam_phase(const BandData1D& band) { return pancharatnam_phase(band.states); }

struct WindingResult {
  double w = 0;            // |total_phase| / pi
  bool is_integer = false;
  double total_phase = 0;  // signed, unwrapped
  int orientation = 1;     // sign of total_phase
};

inline WindingResult winding_number(const BandData1D& band) {
  WindingResult r;
  r.total_phase = pancharatnam_phase(band);
  r.orientation = r.total_phase < 0 ? -1 : 1;
  r.w = std::abs(r.total_phase) / pi;
  r.is_integer = std::abs(r.w - std::round(r.w)) < 1e-6;
  return r;
}

inline WindingResult winding_number(const WalkParams1D& p, int n_points, Band band = Band::Lower) {
  const BandPair1D b = band_spectrum_1d(p, n_points);
  return winding_number(band == Band::Lower ? b.lower : b.upper);
}

struct BandData2D {
  int nx = 0;
  int ny = 0;
  std::vector<double> kx;
  std::vector<double> ky;
  std::vector<Spinor> states;  // index i * ny + j
  std::vector<cplx> energies;
  Band label = Band::Lower;
  double min_gap = 0;
  const Spinor& at(int i, int j) const { return states[static_cast<std::size_t>(i) * ny + j]; }
};

inline BandData2D band_spectrum_2d(const WalkParams2D& p, int n, Band band = Band::Lower) {
  if (n < 2) throw ValidationError("band_spectrum_2d: grid must be at least 2x2");
  BandData2D out;
  out.nx = out.ny = n;
  out.kx = out.ky = reduced_grid(n);
  out.label = band;
  out.min_gap = INFINITY;
  out.states.reserve(static_cast<std::size_t>(n) * n);
  out.energies.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const BandSplit s = split_bands(u2d_k(p, out.kx[i], out.ky[j]));
      out.states.push_back(band == Band::Lower ? s.lower : s.upper);
      out.energies.push_back(band == Band::Lower ? s.e_lower : -s.e_lower);
      out.min_gap = std::min(out.min_gap, s.gap);
    }
  }
  return out;
}

struct ChernResult {
  int c = 0;
  double raw = 0;  // sum F / 2 pi before rounding
  std::vector<double> field_strength;
};

inline ChernResult chern_number(const BandData2D& b) {
  ChernResult r;
  r.field_strength.resize(b.states.size());
  double sum = 0;
  for (int i = 0; i < b.nx; ++i) {
    const int i1 = (i + 1) % b.nx;
    for (int j = 0; j < b.ny; ++j) {
      const int j1 = (j + 1) % b.ny;
      const Spinor& p1 = b.at(i, j);
      const Spinor& p2 = b.at(i1, j);
      const Spinor& p3 = b.at(i1, j1);
      const Spinor& p4 = b.at(i, j1);
      const cplx l[4] = {p1.dot(p2), p2.dot(p3), p3.dot(p4), p4.dot(p1)};
      for (const cplx& v : l)
        if (std::abs(v) < 1e-12) throw OrthogonalLink("chern_number: orthogonal link", i, j);
      const double f = std::arg(l[0] * l[1] * l[2] * l[3]);
      r.field_strength[static_cast<std::size_t>(i) * b.ny + j] = f;
      sum += f;
    }
  }
  r.raw = sum / (2 * pi);
  r.c = static_cast<int>(std::lround(r.raw));
  return r;
}

}  // namespace qwalk
