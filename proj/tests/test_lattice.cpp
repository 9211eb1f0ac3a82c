#include <catch_amalgamated.hpp>

#include "oracles.hpp"
#include "qwalk/lattice.hpp"
#include "qwalk/presets.hpp"

using namespace qwalk;

namespace {

// Greedy nearest matching of two eigenvalue multisets; returns the worst distance.
double multiset_distance(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0;
  for (const cplx& x : a) {
    auto it = std::min_element(b.begin(), b.end(), [&](cplx p, cplx q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*it - x));
    b.erase(it);
  }
  return worst;
}

std::vector<cplx> values_of(const std::vector<EigenPair>& pairs) {
  std::vector<cplx> v;
  for (const EigenPair& p : pairs) v.push_back(p.value);
  return v;
}

std::vector<double> ring_momenta(int n) {
  std::vector<double> k;
  for (int j = 0; j < n; ++j) k.push_back(2 * pi * j / n);
  return k;
}

RegionSpec homogeneous(double t1, double t2, int boundary) { return {boundary, {t1, t2}, {t1, t2}}; }

EdgeDetectOptions lossy_options() {
  EdgeDetectOptions o;
  o.real_axis_tol = 1e-4;
  return o;
}

}  // namespace

TEST_CASE("region validation") {
  CHECK_THROWS_AS(build_chain_operator(200, homogeneous(1, 1, 10), 0), InvalidRegion);
  CHECK_THROWS_AS(build_chain_operator(21, homogeneous(1, 1, 10), 0), InvalidRegion);
  CHECK_THROWS_AS(build_chain_operator(21, homogeneous(1, 1, 0), 0), InvalidRegion);
  CHECK_THROWS_AS(build_strip_operator(21, homogeneous(1, 1, -2), 0.3, 0, 0), InvalidRegion);
  CHECK_NOTHROW(build_chain_operator(21, homogeneous(1, 1, 9), 0));
  CHECK(site_of(0, 201) == -100);
  CHECK(site_of(200, 201) == 100);
  const RegionSpec s = presets::chain_regions();
  CHECK(s.at(50).theta2 == 5 * pi / 8);
  CHECK(s.at(-51).theta2 == pi / 4);
}

TEST_CASE("homogeneous chain matches the momentum-space spectrum") {
  for (double gamma : {0.0, 0.1, 0.4}) {
    const int n = 41;
    const WalkParams1D p{-3 * pi / 8, pi / 8, gamma};
    std::vector<cplx> expected;
    for (double k : ring_momenta(n)) {
      const Eig2 e = eig2(u1d_ssqw_k(p, k));
      expected.push_back(e.values[0]);
      expected.push_back(e.values[1]);
    }
    const auto got = values_of(chain_spectrum(build_chain_operator(n, homogeneous(p.theta1, p.theta2, 5), gamma), false));
    CHECK(multiset_distance(got, expected) < 1e-8);
  }
}

TEST_CASE("homogeneous strip matches the momentum-space spectrum") {
  const int n = 31;
  for (const auto& t : {std::array<double, 4>{7 * pi / 6, 7 * pi / 6, 0, 0}, std::array<double, 4>{3 * pi / 2, pi, 0.2, 0.1},
                        std::array<double, 4>{1.0, 2.0, 0.47, 0.47}}) {
    for (double kx : {-2.1, 0.0, 0.3, 1.7}) {
      const WalkParams2D p{t[0], t[1], t[2], t[3]};
      std::vector<cplx> expected;
      for (double ky : ring_momenta(n)) {
        const Eig2 e = eig2(u2d_k(p, kx, ky));
        expected.push_back(e.values[0]);
        expected.push_back(e.values[1]);
      }
      const auto op = build_strip_operator(n, homogeneous(t[0], t[1], 5), kx, t[2], t[3]);
      CHECK(multiset_distance(values_of(chain_spectrum(op, false)), expected) < 1e-8);
    }
  }
}

TEST_CASE("lattice operators are unitary without loss and have unit determinant") {
  const RegionSpec s{12, {-3 * pi / 8, 5 * pi / 8}, {-3 * pi / 8, pi / 4}};
  CHECK(is_unitary(build_chain_operator(51, s, 0.0).matrix, 1e-10));
  CHECK_FALSE(is_unitary(build_chain_operator(51, s, 0.1).matrix, 1e-10));
  const RegionSpec t{12, {7 * pi / 6, 7 * pi / 6}, {3 * pi / 2, pi}};
  CHECK(is_unitary(build_strip_operator(51, t, 0.7, 0, 0).matrix, 1e-10));
  const LatticeOperator big = build_chain_operator(201, presets::chain_regions(), 0.2);
  CHECK(std::abs(big.matrix.determinant() - 1.0) < 1e-6 * 201);
  CHECK(std::abs(build_strip_operator(51, t, 0.7, 0.3, 0.2).matrix.determinant() - 1.0) < 1e-6 * 51);
}

TEST_CASE("profiles and participation ratio") {
  ComplexVector v = ComplexVector::Zero(10);
  v(4) = 1;
  const auto p = site_profile(v);
  CHECK(p.size() == 5);
  CHECK(ipr(p) == 1.0);
  CHECK(peak_index(p) == 2);
  ComplexVector u = ComplexVector::Constant(10, cplx(0.3, 0.1));
  CHECK(std::abs(ipr(site_profile(u)) - 0.2) < 1e-15);
}

TEST_CASE("a cluster is rotated onto the two halves") {
  const int n = 20;
  ComplexVector left = ComplexVector::Zero(2 * n), right = ComplexVector::Zero(2 * n);
  left(4) = 1;
  right(30) = 1;
  const auto out = detail::localize_cluster({(left + right).normalized(), (left - I * right).normalized()});
  REQUIRE(out.size() == 2);
  for (const ComplexVector& v : out) CHECK(ipr(site_profile(v)) > 1 - 1e-12);
}

TEST_CASE("chain edge states") {
  const RegionSpec spec = presets::chain_regions();
  const int n = presets::kChainSites;

  SECTION("lossless chain: one edge state per boundary") {
    const auto pairs = chain_spectrum(build_chain_operator(n, spec, 0.0));
    for (const EigenPair& p : pairs) CHECK(std::abs(std::abs(p.value) - 1) < 1e-8);
    int real_axis = 0;
    for (const EigenPair& p : pairs) real_axis += std::abs(p.value.imag()) < 1e-6;
    CHECK(real_axis >= 2);
    const auto edges = detect_edge_states(pairs, n, spec.boundary);
    REQUIRE(count_edge_states(edges) == 2);
    std::vector<int> peaks;
    for (const auto& e : edges)
      if (e.is_edge) {
        peaks.push_back(e.peak_site);
        CHECK(e.ipr >= 0.05);
        CHECK(e.ipr <= 1.0);
        CHECK((std::abs(e.quasi_energy.real()) < 1e-6 || std::abs(std::abs(e.quasi_energy.real()) - pi) < 1e-6));
      }
    std::sort(peaks.begin(), peaks.end());
    CHECK(std::abs(peaks[0] + spec.boundary) <= 10);
    CHECK(std::abs(peaks[1] - spec.boundary) <= 10);
  }

  SECTION("edge pair survives loss below the critical value") {
    const auto pairs = chain_spectrum(build_chain_operator(n, spec, 0.2));
    CHECK(count_edge_states(detect_edge_states(pairs, n, spec.boundary, lossy_options())) == 2);
    // PT pairing lambda <-> 1 / conj(lambda)
    const auto vals = values_of(pairs);
    std::vector<cplx> mirrored;
    for (const cplx& v : vals) mirrored.push_back(1.0 / std::conj(v));
    CHECK(multiset_distance(vals, mirrored) < 1e-6);
  }

  SECTION("edge count is insensitive to loss and to the boundary position") {
    CHECK(count_edge_states(
              detect_edge_states(chain_spectrum(build_chain_operator(n, spec, 0.1)), n, spec.boundary, lossy_options())) ==
          2);
    for (int lb : {40, 60}) {
      RegionSpec s = spec;
      s.boundary = lb;
      CHECK(count_edge_states(detect_edge_states(chain_spectrum(build_chain_operator(n, s, 0.0)), n, lb)) == 2);
    }
  }

  SECTION("homogeneous chain has no edge states") {
    const auto pairs = chain_spectrum(build_chain_operator(n, homogeneous(-3 * pi / 8, pi / 4, 50), 0.0));
    CHECK(count_edge_states(detect_edge_states(pairs, n, 50)) == 0);
  }

  SECTION("past the critical value eigenvalues leave the unit circle") {
    const auto pairs = chain_spectrum(build_chain_operator(n, spec, 0.25), false);
    int off = 0;
    for (const EigenPair& p : pairs) off += std::abs(quasi_energy_of(p.value).imag()) > 1e-3;
    CHECK(off >= 10);
  }
}

TEST_CASE("empty input gives no edge states") { CHECK(detect_edge_states({}, 201, 50).empty()); }

TEST_CASE("bulk gaps") {
  const RegionSpec spec = presets::strip_regions();
  const auto gaps = bulk_gaps(spec, 0.3, 0, 0);
  REQUIRE_FALSE(gaps.empty());
  for (const Interval& g : gaps) {
    CHECK(g.lo < g.hi);
    CHECK(g.lo >= 0);
    CHECK(g.hi <= pi);
  }
  const Interval in = bulk_band_range(spec.inner, 0.3, 0, 0, 2001);
  CHECK_FALSE(in_gaps(0.5 * (in.lo + in.hi), gaps));
  CHECK(in_gaps(0.5 * (gaps[0].lo + gaps[0].hi), gaps));
}

TEST_CASE("strip band edges converge with the ring size") {
  for (const AnglePair& a : {AnglePair{7 * pi / 6, 7 * pi / 6}, AnglePair{3 * pi / 2, pi}}) {
    auto edges = [&](int ny) {
      const StripRow r = strip_row(homogeneous(a.theta1, a.theta2, 20), ny, 0.3, 0, 0, false);
      REQUIRE(r.ok);
      double lo = INFINITY, hi = 0;
      for (double e : r.re_energies) {
        lo = std::min(lo, std::abs(e));
        hi = std::max(hi, std::abs(e));
      }
      return std::pair{lo, hi};
    };
    const auto [lo1, hi1] = edges(101);
    const auto [lo2, hi2] = edges(201);
    CHECK(std::abs(lo1 - lo2) < 1e-2);
    CHECK(std::abs(hi1 - hi2) < 1e-2);
  }
}

TEST_CASE("strip rows") {
  const RegionSpec spec{12, {7 * pi / 6, 7 * pi / 6}, {3 * pi / 2, pi}};
  const auto rows = strip_band_structure(spec, 51, 8, 0.2, 0.2, true);
  REQUIRE(rows.size() == 8);
  CHECK(rows.front().kx == -pi);
  for (const StripRow& r : rows) {
    CHECK(r.ok);
    CHECK(r.re_energies.size() == 102);
    CHECK(r.states.size() == 102);
    CHECK(std::is_sorted(r.re_energies.begin(), r.re_energies.end()));
  }
  CHECK(std::is_sorted(rows.begin(), rows.end(), [](const StripRow& a, const StripRow& b) { return a.kx < b.kx; }));
  CHECK_THROWS_AS(strip_band_structure(spec, 50, 8, 0, 0), InvalidRegion);
}

TEST_CASE("lossless strip has states inside the bulk gap") {
  const RegionSpec spec = presets::strip_regions();
  int in_gap = 0;
  for (double kx : {-pi / 2, 0.4}) {
    const StripRow r = strip_row(spec, presets::kStripSites, kx, 0, 0, false);
    const auto gaps = bulk_gaps(spec, kx, 0, 0);
    for (double e : r.re_energies) in_gap += in_gaps(std::abs(e), gaps);
  }
  CHECK(in_gap >= 1);
}
