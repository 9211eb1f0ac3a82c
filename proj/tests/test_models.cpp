#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qwalk/models.hpp"

using namespace qwalk;
using oracle::uniform;

namespace {

// Quasi-energies from the numerical eigenvalues, sorted so E[0] = +E.
std::array<cplx, 2> eig_energies(const Coin& u) {
  const Eig2 e = eig2(u);
  std::array<cplx, 2> out{quasi_energy_of(e.values[0]), quasi_energy_of(e.values[1])};
  if (out[0].real() < out[1].real()) std::swap(out[0], out[1]);
  return out;
}

// |E| agreement modulo the branch: cos is single-valued in E.
bool same_energy(cplx a, cplx b, double tol) {
  return std::abs(std::cos(a) - std::cos(b)) < tol && (std::abs(a - b) < tol || std::abs(a + b) < tol ||
                                                       std::abs(std::abs(a.real()) - pi) < 1e-6);
}

// On the branch cut (E, n) and (-E, -n) describe the same operator, E taken mod 2 pi.
bool same_decomposition(const BlochDecomposition& a, const BlochDecomposition& b) {
  auto close = [&](double sign) {
    if (std::abs(std::exp(-I * (a.energy - sign * b.energy)) - 1.0) > 1e-9) return false;
    for (int j = 0; j < 3; ++j)
      if (std::abs(a.n[j] - sign * b.n[j]) > 1e-9) return false;
    return true;
  };
  return close(1.0) || (a.branch_ambiguous && close(-1.0));
}

WalkParams1D random_1d(double gmax = 1.0) {
  return {uniform(-2 * pi, 2 * pi), uniform(-2 * pi, 2 * pi), uniform(0, gmax)};
}

WalkParams2D random_2d(double gmax = 1.0) {
  return {uniform(-2 * pi, 2 * pi), uniform(-2 * pi, 2 * pi), uniform(0, gmax), uniform(0, gmax)};
}

}  // namespace

TEST_CASE("rotation coin") {
  CHECK(max_abs(rotation_coin(0) - Coin::Identity()) < 1e-15);
  CHECK(max_abs(rotation_coin(2 * pi) + Coin::Identity()) < 1e-15);
  const Coin series = oracle::expm_series(cplx(0, -pi / 4) * sigma_y());
  CHECK(max_abs(rotation_coin(pi / 2) - series) < 1e-14);
  CHECK(std::abs(rotation_coin(pi / 2)(0, 1) + std::sqrt(0.5)) < 1e-15);
  for (int i = 0; i < 20; ++i) {
    const Coin r = rotation_coin(uniform(-10, 10));
    CHECK(is_unitary(r, 1e-14));
    CHECK(std::abs(r.determinant() - 1.0) < 1e-14);
  }
}

TEST_CASE("scaling operator") {
  CHECK(max_abs(scaling_op(0) - Coin::Identity()) == 0);
  const Coin g = scaling_op(0.3);
  CHECK(std::abs(g(0, 0) - std::exp(0.3)) < 1e-15);
  CHECK(std::abs(g(1, 1) - std::exp(-0.3)) < 1e-15);
  CHECK(std::abs(g(0, 1)) == 0);
  CHECK_FALSE(is_unitary(g, 1e-6));
  const Coin h = scaling_op(cplx(0, pi / 2));
  CHECK(std::abs(h(0, 0) - I) < 1e-15);
  CHECK(std::abs(h(1, 1) + I) < 1e-15);
  CHECK(is_unitary(h, 1e-14));
}

TEST_CASE("DTQW quasi-energy") {
  for (double k : {-2.5, -0.4, 0.0, 1.3, 3.0}) {
    const Coin u = u1d_dtqw_k(0, k);
    CHECK(max_abs(u - translation(k)) < 1e-15);
    CHECK(std::abs(eig_energies(u)[0].real() - std::abs(k)) < 1e-12);
  }
  CHECK(std::abs(std::cos(eig_energies(u1d_dtqw_k(pi / 2, 0))[0]) - std::cos(pi / 4)) < 1e-12);
  for (int i = 0; i < 200; ++i) {
    const double t = uniform(-2 * pi, 2 * pi), k = uniform(-pi, pi);
    const cplx e = eig_energies(u1d_dtqw_k(t, k))[0];
    CHECK(std::abs(std::cos(e) - std::cos(t / 2) * std::cos(k)) < 1e-10);
  }
}

TEST_CASE("split-step walk collapses to DTQW without a second rotation") {
  for (int i = 0; i < 50; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), k = uniform(-pi, pi);
    CHECK(max_abs(u1d_ssqw_k({t1, 0.0, 0.0}, k) - u1d_dtqw_k(t1, k)) < 1e-14);
  }
}

TEST_CASE("split-step walk equals two DTQW steps at half momentum") {
  for (int i = 0; i < 200; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi), k = uniform(-pi, pi);
    CHECK(max_abs(u1d_ssqw_k({t1, t2, 0.0}, k) - u1d_ssqw_decomposed_k(t1, t2, k)) < 1e-12);
  }
}

TEST_CASE("split-step quasi-energy matches the eigenvalues") {
  const WalkParams1D p{-pi / 2, pi / 2, 0.25};
  CHECK(same_energy(eig_energies(u1d_ssqw_k(p, 0.7))[0], quasi_energy_ssqw(p, 0.7), 1e-10));
  CHECK(std::abs(quasi_energy_ssqw({-pi / 2, pi / 2, 0.0}, 0.0)) < 1e-7);
  CHECK(is_unitary(u1d_ssqw_k({0.3, 2.2, 0.0}, 0.4), 1e-12));
}

TEST_CASE("exact-PT window of the split-step walk") {
  const auto ks = momentum_grid(201);
  auto max_im = [&](double g) {
    double m = 0;
    for (double k : ks) m = std::max(m, std::abs(quasi_energy_ssqw({-3 * pi / 8, pi / 4, g}, k).imag()));
    return m;
  };
  CHECK(max_im(0.0) == 0.0);
  CHECK(max_im(0.15) == 0.0);
  CHECK(max_im(0.2109) == 0.0);
  CHECK(max_im(0.3) > 0.0);
}

TEST_CASE("time-symmetric representation") {
  for (int i = 0; i < 100; ++i) {
    const WalkParams1D p = random_1d();
    const double k = uniform(-pi, pi);
    const auto a = eig_energies(u1d_ssqw_k(p, k)), b = eig_energies(u1d_ssqw_timesym_k(p, k));
    CHECK(std::abs(std::cos(a[0]) - std::cos(b[0])) < 1e-10);
    const WalkParams1D q{0.0, p.theta2, p.gamma};
    CHECK(max_abs(u1d_ssqw_timesym_k(q, k) - u1d_ssqw_k(q, k)) < 1e-14);
  }
  const Coin u = u1d_ssqw_timesym_k({-3 * pi / 8, pi / 8, 0.1}, 0.3);
  CHECK(max_abs(sigma_x() * u * sigma_x() - u.adjoint()) < 1e-10);
}

TEST_CASE("split-step Bloch vector") {
  SECTION("lossless components reduce to the unitary formulas") {
    for (int i = 0; i < 100; ++i) {
      const WalkParams1D p{uniform(-2 * pi, 2 * pi), uniform(-2 * pi, 2 * pi), 0.0};
      const double k = uniform(-pi, pi);
      BlochDecomposition b;
      try {
        b = bloch_ssqw(p, k);
      } catch (const GapClosed&) {
        continue;
      }
      const double c1 = std::cos(p.theta1 / 2), s1 = std::sin(p.theta1 / 2);
      const double c2 = std::cos(p.theta2 / 2), s2 = std::sin(p.theta2 / 2);
      const double se = std::sin(b.energy.real());
      CHECK(std::abs(b.energy.imag()) < 1e-12);
      CHECK(std::abs(b.n[0] - s1 * c2 * std::sin(k) / se) < 1e-9);
      CHECK(std::abs(b.n[1] - (c1 * s2 + s1 * c2 * std::cos(k)) / se) < 1e-9);
      CHECK(std::abs(b.n[2] + c1 * c2 * std::sin(k) / se) < 1e-9);
      for (const cplx& c : b.n) CHECK(std::abs(c.imag()) < 1e-9);
    }
  }
  SECTION("reconstruction") {
    const WalkParams1D p{-3 * pi / 8, pi / 8, 0.25};
    const BlochDecomposition b = bloch_ssqw(p, pi / 2);
    CHECK(std::abs(bilinear_norm(b.n) - 1.0) < 1e-9);
    CHECK(max_abs(exp_bloch(b.energy, b.n) - u1d_ssqw_k(p, pi / 2)) < 1e-8);
  }
  SECTION("k = 0 and theta2 = 0 leaves only n_y") {
    const BlochDecomposition b = bloch_ssqw({1.1, 0.0, 0.0}, 0.0);
    CHECK(std::abs(b.n[0]) < 1e-15);
    CHECK(std::abs(b.n[2]) < 1e-15);
    CHECK(std::abs(std::abs(b.n[1]) - 1.0) < 1e-12);
  }
  SECTION("gap closing raises") {
    CHECK_THROWS_AS(bloch_ssqw({-pi / 2, pi / 2, 0.0}, 0.0), GapClosed);
  }
}

TEST_CASE("2D walk decomposes into two conjugated split-step walks") {
  for (int i = 0; i < 200; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi);
    const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
    const Coin u = u2d_k({t1, t2, 0, 0}, kx, ky);
    CHECK(max_abs(u - u2d_decomposed_k(t1, t2, kx, ky)) < 1e-12);
    CHECK(is_unitary(u, 1e-12));
  }
}

TEST_CASE("triangular walk is unitarily equivalent to the square-lattice walk") {
  for (int i = 0; i < 100; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi);
    const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
    const Coin tri = u2d_triangular_k(t1, t2, kx, ky);
    const Coin sq = u2d_k({t1, t2, 0, 0}, kx, ky);
    CHECK(max_abs(translation(kx).adjoint() * tri * translation(kx) - sq) < 1e-12);
    CHECK(std::abs(tri.trace() - sq.trace()) < 1e-12);
  }
  const double kx = 0.4, ky = -1.2;
  CHECK(max_abs(u2d_triangular_k(0, 0, kx, ky) - translation(kx + ky) * translation(ky) * translation(kx)) < 1e-15);
}

TEST_CASE("2D quasi-energy") {
  SECTION("k = 0 collapses the trigonometry") {
    const double t1 = pi / 2, t2 = pi / 2;
    const cplx c = cos_quasi_energy_2d({t1, t2, 0, 0}, 0, 0);
    CHECK(std::abs(c - (std::cos(t1) * std::cos(t2 / 2) - std::sin(t1) * std::sin(t2 / 2))) < 1e-15);
  }
  SECTION("matches the eigenvalues") {
    for (int i = 0; i < 200; ++i) {
      const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
      const WalkParams2D p = i < 20 ? WalkParams2D{7 * pi / 6, 7 * pi / 6, 0, 0} : random_2d();
      CHECK(same_energy(eig_energies(u2d_k(p, kx, ky))[0], quasi_energy_2d(p, kx, ky), 1e-10));
    }
  }
  SECTION("first-order complexification under x loss") {
    const double gx = 1e-5;
    int checked = 0;
    for (int i = 0; i < 200 && checked < 50; ++i) {
      const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi);
      const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
      const cplx predicted = I * gx * std::sin(t1) * std::sin(t2 / 2) * std::sin(2 * ky);
      if (std::abs(predicted) < 0.1 * gx) continue;
      const cplx diff = cos_quasi_energy_2d({t1, t2, gx, 0}, kx, ky) - cos_quasi_energy_2d({t1, t2, 0, 0}, kx, ky);
      CHECK(std::abs(diff - predicted) / std::abs(predicted) <= 1e-3);
      ++checked;
    }
    CHECK(checked == 50);
  }
}

TEST_CASE("2D Bloch vector") {
  SECTION("lossless limit matches the unitary components") {
    for (int i = 0; i < 100; ++i) {
      const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi);
      const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
      BlochDecomposition b;
      try {
        b = bloch_2d({t1, t2, 0, 0}, kx, ky);
      } catch (const GapClosed&) {
        continue;
      }
      const double p = kx + ky, m = kx - ky, S1 = std::sin(t1), C1 = std::cos(t1);
      const double s2 = std::sin(t2 / 2), c2 = std::cos(t2 / 2), h = std::cos(t1 / 2) * std::cos(t1 / 2);
      const double se = std::sin(b.energy.real());
      const double nx = -S1 * c2 * std::cos(p) * std::sin(m) - h * s2 * std::sin(2 * m);
      const double ny = S1 * c2 * std::cos(p) * std::cos(m) + C1 * std::cos(m) * std::cos(m) * s2 -
                        std::sin(m) * std::sin(m) * s2;
      const double nz = -h * c2 * std::sin(2 * p) + S1 * s2 * std::sin(p) * std::cos(m);
      CHECK(std::abs(b.n[0] - nx / se) < 1e-8);
      CHECK(std::abs(b.n[1] - ny / se) < 1e-8);
      CHECK(std::abs(b.n[2] - nz / se) < 1e-8);
    }
  }
  SECTION("reconstruction with loss") {
    for (int i = 0; i < 200; ++i) {
      const WalkParams2D p = random_2d();
      const double kx = uniform(-pi, pi), ky = uniform(-pi, pi);
      BlochDecomposition b;
      try {
        b = bloch_2d(p, kx, ky);
      } catch (const GapClosed&) {
        continue;
      }
      if (std::abs(std::sin(b.energy)) < 1e-3) continue;
      CHECK(std::abs(bilinear_norm(b.n) - 1.0) < 1e-9);
      CHECK(max_abs(exp_bloch(b.energy, b.n) - u2d_k(p, kx, ky)) < 1e-8);
    }
  }
  SECTION("lossless scan is real and unit length") {
    const auto ks = momentum_grid(201);
    double worst_im = 0, worst_norm = 0;
    for (double kx : ks)
      for (double ky : ks) {
        const BlochDecomposition b = bloch_2d({7 * pi / 6, 7 * pi / 6, 0, 0}, kx, ky);
        for (const cplx& c : b.n) worst_im = std::max(worst_im, std::abs(c.imag()));
        worst_norm = std::max(worst_norm, std::abs(bilinear_norm(b.n) - 1.0));
      }
    CHECK(worst_im < 1e-9);
    CHECK(worst_norm < 1e-9);
  }
}

TEST_CASE("critical gamma") {
  const CriticalGamma a = critical_gamma(-3 * pi / 8, pi / 4, {0, 0});
  CHECK(a.kind == CriticalKind::RealCritical);
  CHECK(std::abs(a.gamma_c - 0.2110) < 5e-5);
  const CriticalGamma b = critical_gamma(-3 * pi / 8, 5 * pi / 8, {0, 0});
  CHECK(b.kind == CriticalKind::RealCritical);
  CHECK(std::abs(b.gamma_c - 0.2832) < 5e-5);
  const CriticalGamma c = critical_gamma(-pi / 2, pi / 2, {0, 0});
  CHECK(c.x == 1.0);
  CHECK(c.gamma_c == 0.0);
  const CriticalGamma d = critical_gamma(pi / 2, pi / 2, {0, 0});
  CHECK(d.kind == CriticalKind::ShiftedCritical);
  CHECK(d.gamma_c == 0.0);
  const CriticalGamma f = critical_gamma(pi / 3, pi / 3, {pi, 0});
  CHECK(f.kind == CriticalKind::ShiftedCritical);
  CHECK(f.phi_c == pi / 2);
  CHECK(std::abs(std::cosh(2 * f.gamma_c) + f.x) < 1e-12);
  CHECK_THROWS_AS(critical_gamma(0.0, 1.0, {0, 0}), DegenerateCoin);
  CHECK(std::abs(min_critical_gamma(-3 * pi / 8, pi / 4).gamma_c - a.gamma_c) < 1e-15);
}

TEST_CASE("critical ratio never falls inside the unit interval") {
  for (int i = 0; i < 500; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi);
    for (const Channel& ch : all_channels()) {
      const CriticalGamma g = critical_gamma(t1, t2, ch);
      CHECK(std::abs(g.x) >= 1.0 - 1e-12);
      CHECK(g.kind != CriticalKind::NoClosing);
    }
  }
}

TEST_CASE("critical gamma brackets the loss of a real spectrum") {
  const auto ks = symmetry_grid(201);
  int done = 0;
  while (done < 20) {
    const double t1 = -uniform(0.1, 2 * pi - 0.1), t2 = uniform(0.1, 2 * pi - 0.1);
    const CriticalGamma g = min_critical_gamma(t1, t2);
    if (g.kind != CriticalKind::RealCritical || g.gamma_c < 2e-3 || g.gamma_c > 3) continue;
    auto max_im = [&](double gamma) {
      double m = 0;
      for (double k : ks) m = std::max(m, std::abs(quasi_energy_ssqw({t1, t2, gamma}, k).imag()));
      return m;
    };
    CHECK(max_im(g.gamma_c - 1e-3) < 1e-8);
    CHECK(max_im(g.gamma_c + 1e-3) > 1e-4);
    ++done;
  }
}

TEST_CASE("every builder has unit determinant and paired quasi-energies") {
  for (int i = 0; i < 300; ++i) {
    const WalkParams1D p = random_1d(2.0);
    const WalkParams2D q = random_2d(2.0);
    const double k = uniform(-pi, pi), k2 = uniform(-pi, pi);
    const Coin us[] = {u1d_dtqw_k(p.theta1, k), u1d_ssqw_k(p, k), u1d_ssqw_timesym_k(p, k),
                       u1d_ssqw_k({p.theta1, p.theta2, p.gamma, pi / 2}, k), u2d_k(q, k, k2),
                       u2d_triangular_k(q.theta1, q.theta2, k, k2)};
    for (const Coin& u : us) {
      CHECK(std::abs(u.determinant() - 1.0) < 1e-9);
      const Eig2 e = eig2(u);
      const cplx ea = quasi_energy_of(e.values[0]), eb = quasi_energy_of(e.values[1]);
      // +-E modulo 2 pi
      CHECK(std::abs(std::exp(-I * (ea + eb)) - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("unitary exactly when lossless") {
  for (int i = 0; i < 100; ++i) {
    const double t1 = uniform(-2 * pi, 2 * pi), t2 = uniform(-2 * pi, 2 * pi), k = uniform(-pi, pi);
    CHECK(is_unitary(u1d_ssqw_k({t1, t2, 0.0}, k), 1e-10));
    CHECK_FALSE(is_unitary(u1d_ssqw_k({t1, t2, uniform(0.05, 1)}, k), 1e-10));
    CHECK(is_unitary(u2d_k({t1, t2, 0, 0}, k, -k), 1e-10));
    CHECK_FALSE(is_unitary(u2d_k({t1, t2, 0.3, 0.3}, k, 0.5), 1e-10));
  }
}

TEST_CASE("closed forms agree with numerical decomposition on random draws") {
  int compared = 0;
  for (int i = 0; i < 1000; ++i) {
    const WalkParams1D p = random_1d();
    const WalkParams2D q = random_2d();
    const double k = uniform(-pi, pi), k2 = uniform(-pi, pi);
    const BlochDecomposition n1 = hamiltonian_from_unitary(u1d_ssqw_k(p, k));
    const BlochDecomposition n2 = hamiltonian_from_unitary(u2d_k(q, k, k2));
    if (std::abs(std::sin(n1.energy)) > 1e-3) {
      CHECK(same_decomposition(n1, bloch_ssqw(p, k)));
      ++compared;
    }
    if (std::abs(std::sin(n2.energy)) > 1e-3) {
      CHECK(same_decomposition(n2, bloch_2d(q, k, k2)));
      ++compared;
    }
  }
  CHECK(compared > 1900);
}

TEST_CASE("momentum grids") {
  const auto k = momentum_grid(201);
  CHECK(k.size() == 201);
  CHECK(k.front() == -pi);
  CHECK(std::is_sorted(k.begin(), k.end()));
  CHECK(std::find(k.begin(), k.end(), 0.0) == k.end());
  CHECK(symmetry_grid(201).size() == 202);
  const auto r = reduced_grid(10);
  CHECK(r.front() == -pi / 2);
  CHECK(std::abs(r.back() - (pi / 2 - pi / 10)) < 1e-15);
}
