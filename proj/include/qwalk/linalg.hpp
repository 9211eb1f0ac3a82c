#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "errors.hpp"

namespace qwalk {

using cplx = std::complex<double>;
using Coin = Eigen::Matrix2cd;
using Spinor = Eigen::Vector2cd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

inline Coin sigma_x() { Coin m; m << 0, 1, 1, 0; return m; }
inline Coin sigma_y() { Coin m; m << 0, -I, I, 0; return m; }
inline Coin sigma_z() { Coin m; m << 1, 0, 0, -1; return m; }

struct EigenPair {
  cplx value;
  ComplexVector vector;
};

struct Eig2 {
  std::array<cplx, 2> values;
  std::array<Spinor, 2> vectors;
  bool degenerate = false;  // equal eigenvalues
  bool defective = false;   // single eigenvector
};

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const ComplexMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const cplx z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

// Null vector of the rank-deficient 2x2 matrix (m - lambda I).
inline Spinor null_vector2(const Coin& m, cplx lambda) {
  const cplx a = m(0, 0) - lambda, b = m(0, 1);
  const cplx c = m(1, 0), d = m(1, 1) - lambda;
  Spinor v1(-b, a), v2(-d, c);
  Spinor v = v1.norm() >= v2.norm() ? v1 : v2;
  const double n = v.norm();
  if (n == 0.0) return Spinor(1, 0);
  return v / n;
}

inline Eig2 eig2(const Coin& m) {
  Eig2 out;
  const cplx t = 0.5 * (m(0, 0) + m(1, 1));
  const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  cplx disc = t * t - det;
  const double scale = std::max({std::norm(t), std::abs(det), 1e-300});
  if (std::abs(disc) <= 1e-15 * scale) disc = 0.0;
  const cplx s = std::sqrt(disc);
  out.values = {t + s, t - s};
  if (disc == 0.0) {
    out.degenerate = true;
    const double off = std::max(std::abs(m(0, 1)), std::abs(m(1, 0)));
    const double diff = std::abs(m(0, 0) - m(1, 1));
    const double mscale = std::max(max_abs(m), 1e-300);
    if (off <= 1e-14 * mscale && diff <= 1e-14 * mscale) {
      out.vectors = {Spinor(1, 0), Spinor(0, 1)};
    } else {
      out.defective = true;
      const Spinor v = null_vector2(m, t);
      out.vectors = {v, v};
    }
    return out;
  }
  for (int i = 0; i < 2; ++i) out.vectors[i] = null_vector2(m, out.values[i]);
  return out;
}

inline bool canonical_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

inline std::vector<EigenPair> eig_general(const ComplexMatrix& m, bool with_vectors = true) {
  if (m.rows() != m.cols() || m.rows() < 1) throw ValidationError("eig_general: matrix must be square and non-empty");
  if (!all_finite(m)) throw ValidationError("eig_general: non-finite entries");
  Eigen::ComplexEigenSolver<ComplexMatrix> solver;
  solver.setMaxIterations(100 * static_cast<Eigen::Index>(m.rows()));
  solver.compute(m, with_vectors);
  if (solver.info() != Eigen::Success) throw ConvergenceFailure("eig_general: QR iteration did not converge");
  const auto n = m.rows();
  std::vector<EigenPair> out(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    out[i].value = solver.eigenvalues()(i);
    if (with_vectors) {
      ComplexVector v = solver.eigenvectors().col(i);
      out[i].vector = v / v.norm();
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const EigenPair& a, const EigenPair& b) { return canonical_less(a.value, b.value); });
  return out;
}

inline bool is_unitary(const ComplexMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw ValidationError("is_unitary: matrix must be square");
  const ComplexMatrix d = m.adjoint() * m - ComplexMatrix::Identity(m.rows(), m.cols());
  return max_abs(d) <= tol;
}

// Principal arccos, Re in [0, pi].
inline cplx principal_acos(cplx z) {
  cplx e = std::acos(z);
  if (e.real() < 0) e = -e;
  return e;
}

// Complex quasi-energy with lambda = exp(-iE): E = i log(lambda).
inline cplx quasi_energy_of(cplx lambda) { return I * std::log(lambda); }

using Bloch3 = std::array<cplx, 3>;

struct BlochDecomposition {
  cplx energy;
  Bloch3 n;
  bool branch_ambiguous = false;
};

inline Coin n_dot_sigma(const Bloch3& n) {
  return n[0] * sigma_x() + n[1] * sigma_y() + n[2] * sigma_z();
}

inline cplx bilinear_norm(const Bloch3& n) { return n[0] * n[0] + n[1] * n[1] + n[2] * n[2]; }

// exp(-i E n.sigma) = cos E - i sin E n.sigma, valid when n.n = 1.
inline Coin exp_bloch(cplx energy, const Bloch3& n) {
  return std::cos(energy) * Coin::Identity() - I * std::sin(energy) * n_dot_sigma(n);
}

// Bloch vector from n.sigma = (cos E - u) / (i sin E).
inline Bloch3 bloch_from(const Coin& u, cplx energy) {
  const cplx s = std::sin(energy);
  const Coin ns = (std::cos(energy) * Coin::Identity() - u) / (I * s);
  return {0.5 * (ns(0, 1) + ns(1, 0)), 0.5 * I * (ns(0, 1) - ns(1, 0)), 0.5 * (ns(0, 0) - ns(1, 1))};
}

inline BlochDecomposition hamiltonian_from_unitary(const Coin& u) {
  const cplx det = u.determinant();
  if (std::abs(det - 1.0) > 1e-9) throw ValidationError("hamiltonian_from_unitary: det(u) != 1");
  BlochDecomposition out;
  out.energy = principal_acos(0.5 * u.trace());
  const double re = out.energy.real();
  out.branch_ambiguous = std::abs(re) < 1e-9 || std::abs(re - pi) < 1e-9;
  if (std::abs(std::sin(out.energy)) < 1e-12) {
    out.n = {0.0, 0.0, 1.0};
    return out;
  }
  out.n = bloch_from(u, out.energy);
  return out;
}

}  // namespace qwalk
