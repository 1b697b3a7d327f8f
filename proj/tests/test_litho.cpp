#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "opc/fixtures.hpp"
#include "opc/litho.hpp"

using namespace opc;

namespace {

KernelSet delta_kernel() {
  KernelSet ks;
  ks.size = 5;
  ks.kernels.assign(1, std::vector<std::complex<float>>(25, {0.f, 0.f}));
  ks.kernels[0][2 * 5 + 2] = {1.f, 0.f};
  ks.weights = {1.0};
  return ks;
}

RealGrid random_mask(int w, int h, uint64_t seed) {
  std::mt19937_64 rng(seed);
  RealGrid m(w, h);
  for (size_t i = 0; i < m.size(); ++i) m[i] = (rng() % 2) ? 1.0 : 0.0;
  return m;
}

}  // namespace

TEST_CASE("simulate: zero mask, delta kernel identity") {
  const KernelSet ks = delta_kernel();
  CHECK(simulate(RealGrid(16, 16, 0.0), ks) == RealGrid(16, 16, 0.0));

  const RealGrid m = random_mask(16, 16, 1);
  const RealGrid i = simulate(m, ks);
  for (size_t p = 0; p < m.size(); ++p) CHECK(i[p] == doctest::Approx(m[p]).epsilon(1e-12));
}

TEST_CASE("simulate matches direct convolution oracle") {
  const KernelSet ks = make_synthetic_kernels(15, 3, 1.0, 42);
  const RealGrid m = random_mask(64, 64, 2);
  LithoSim sim(ks, 64, 64);
  const auto fields = sim.simulate_full(m);
  RealGrid want(64, 64, 0.0);
  for (int k = 0; k < ks.count(); ++k) {
    const ComplexGrid a = fixtures::oracle_convolve(m, ks.kernels[k], ks.size);
    for (size_t p = 0; p < want.size(); ++p) want[p] += ks.weights[k] * std::norm(a[p]);
    // per-kernel amplitudes agree too
    for (size_t p = 0; p < want.size(); ++p)
      CHECK(std::abs(fields.amplitudes[k][p] - a[p]) <=
            1e-6 * std::max(1.0, std::abs(a[p])));
  }
  for (size_t p = 0; p < want.size(); ++p)
    CHECK(fields.intensity[p] == doctest::Approx(want[p]).epsilon(1e-6));
}

TEST_CASE("resist_hard: strict threshold") {
  RealGrid i(4, 4, 0.225);
  CHECK(resist_hard(i, 0.225) == RealGrid(4, 4, 0.0));  // I == I_th -> 0
  for (size_t p = 0; p < i.size(); ++p) i[p] = 0.225 + 1e-9;
  CHECK(resist_hard(i, 0.225) == RealGrid(4, 4, 1.0));

  const RealGrid m = random_mask(16, 16, 3);
  const RealGrid z = resist_hard(m, 0.5);
  for (size_t p = 0; p < m.size(); ++p) CHECK(z[p] == (m[p] > 0.5 ? 1.0 : 0.0));
}

TEST_CASE("resist_sigmoid scalar values") {
  RealGrid i(1, 1, 0.225);
  CHECK(resist_sigmoid(i, 50.0, 0.225).at(0, 0) == doctest::Approx(0.5));
  i.at(0, 0) = 0.225 + 0.02;  // alpha*(I - I_th) = 1
  CHECK(resist_sigmoid(i, 50.0, 0.225).at(0, 0) ==
        doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-6));
  CHECK(resist_sigmoid(i, 50.0, 0.225).at(0, 0) == doctest::Approx(0.7311).epsilon(1e-3));
  i.at(0, 0) = 0.5;
  CHECK(resist_sigmoid(i, 1e4, 0.225).at(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
  // strictly increasing in I
  RealGrid lo(1, 1, 0.3), hi(1, 1, 0.31);
  CHECK(resist_sigmoid(hi, 50.0, 0.225).at(0, 0) > resist_sigmoid(lo, 50.0, 0.225).at(0, 0));
}

TEST_CASE("corner_resists: degenerate and ordered corners") {
  const KernelSet ks = make_synthetic_kernels(15, 3, 1.0, 4);
  const RealGrid m = random_mask(32, 32, 5);
  const RealGrid i = simulate(m, ks);

  const CornerImages flat = corner_resists(i, {{1.0}, {1.0}, {1.0}}, 50.0, 0.225);
  CHECK(flat.z_max == flat.z_nom);
  CHECK(flat.z_min == flat.z_nom);

  const CornerImages c = corner_resists(i, {{0.98}, {1.0}, {1.02}}, 50.0, 0.225);
  for (size_t p = 0; p < i.size(); ++p) {
    CHECK(c.z_max[p] >= c.z_nom[p]);
    CHECK(c.z_nom[p] >= c.z_min[p]);
  }
  CHECK(c.dose_max == 1.02);
  CHECK(c.dose_min == 0.98);

  CHECK_THROWS_AS(corner_resists(i, {{0.98}, {1.02}}, 50.0, 0.225), ConfigError);
}

TEST_CASE("corner band has positive area on a line pattern") {
  const auto polys = fixtures::make_fixture("lines", 24).layout;
  const KernelSet ks = make_synthetic_kernels(21, 3, 1.0, 6);
  const MaskGrid m = fixtures::oracle_rasterize(polys, 96, 96);
  const RealGrid i = simulate(m, ks);
  const CornerImages c = corner_resists(i, {{0.9}, {1.0}, {1.1}}, 50.0, 0.225);
  const RealGrid zmax = resist_hard(i, 0.225 / 1.1), zmin = resist_hard(i, 0.225 / 0.9);
  double band = 0;
  for (size_t p = 0; p < i.size(); ++p) band += zmax[p] - zmin[p];
  CHECK(band > 0.0);
  (void)c;
}

TEST_CASE("synthetic kernels: normalization, determinism, energy") {
  const KernelSet one = make_synthetic_kernels(21, 1, 1.0, 9);
  const RealGrid clear(64, 64, 1.0);
  const RealGrid i = simulate(clear, one);
  CHECK(i.at(32, 32) == doctest::Approx(1.0).epsilon(0.05));

  const KernelSet a = make_synthetic_kernels(21, 3, 1.0, 9);
  const KernelSet b = make_synthetic_kernels(21, 3, 1.0, 9);
  CHECK(a.kernels == b.kernels);
  CHECK(a.weights == b.weights);

  // within one set the weighted energies are positive and dominance-ordered
  const KernelSet ks = make_synthetic_kernels(21, 4, 1.0, 9);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < ks.count(); ++k) {
    double e = 0.0;
    for (const auto& v : ks.kernels[k]) e += ks.weights[k] * std::norm(v);
    CHECK(e > 0.0);
    CHECK(e <= prev);
    prev = e;
  }
}

TEST_CASE("simulate_corners supports defocus kernel sets") {
  const KernelSet nominal = make_synthetic_kernels(15, 2, 1.2, 1);
  const KernelSet defocus = make_synthetic_kernels(15, 2, 0.8, 1);
  const RealGrid m = random_mask(32, 32, 8);
  std::vector<KernelSet> alts = {defocus};
  std::vector<ProcessCorner> corners = {{0.98, 0}, {1.0, -1}, {1.02, 0}};
  const CornerImages c = simulate_corners(m, nominal, corners, 50.0, 0.225, &alts);
  const CornerImages plain = simulate_corners(m, nominal, {{0.98}, {1.0}, {1.02}}, 50.0, 0.225);
  CHECK(c.z_nom == plain.z_nom);
  CHECK(c.z_max != plain.z_max);  // blurrier corner images differ
}
