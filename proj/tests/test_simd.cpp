#include <cmath>
#include <random>
#include <vector>

#include "bcsmile/simd/kernels.hpp"
#include "doctest.h"

using namespace bcsmile::simd;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

void check_close(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-12) {
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= tol * (1.0 + std::abs(a[i])));
}

}  // namespace

TEST_CASE("scalar kernels against plain loops") {
  const auto& k = kernels_for(Isa::scalar);
  std::mt19937_64 rng(3);
  const std::size_t rows = 5, cols = 7;
  auto w = random_vec(rng, rows * cols), x = random_vec(rng, cols), g = random_vec(rng, rows);

  std::vector<double> y(rows, 1.0), ref(rows, 1.0);
  k.gemv(w.data(), rows, cols, x.data(), y.data());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) ref[r] += w[r * cols + c] * x[c];
  check_close(y, ref);

  std::vector<double> o(cols, 0.0), oref(cols, 0.0);
  k.gemv_t(w.data(), rows, cols, g.data(), o.data());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) oref[c] += w[r * cols + c] * g[r];
  check_close(o, oref);

  auto w2 = w;
  k.rank1(w2.data(), rows, cols, g.data(), x.data());
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) CHECK(w2[r * cols + c] == doctest::Approx(w[r * cols + c] + g[r] * x[c]));

  std::vector<double> a{0.0, 0.0, 1.0, 1.0}, b{3.0, 4.0, 1.0, 1.0}, d(2);
  k.point_dist(a.data(), b.data(), 2, d.data());
  CHECK(d[0] == 5.0);
  CHECK(d[1] == 0.0);
}

TEST_CASE("vector kernels agree with the scalar reference") {
  if (!isa_available(Isa::avx2)) {
    MESSAGE("AVX2 not available on this build/CPU; only the scalar path is exercised");
    return;
  }
  const auto& s = kernels_for(Isa::scalar);
  const auto& v = kernels_for(Isa::avx2);
  std::mt19937_64 rng(11);
  // Sizes straddle the 4-wide lanes and the unrolled blocks.
  for (std::size_t n : {1u, 3u, 4u, 5u, 8u, 15u, 16u, 17u, 33u, 136u, 137u}) {
    auto a = random_vec(rng, n), b = random_vec(rng, n);
    const double ds = s.dot(a.data(), b.data(), n), dv = v.dot(a.data(), b.data(), n);
    CHECK(std::abs(ds - dv) <= 1e-12 * (1.0 + std::abs(ds)) * static_cast<double>(n));

    auto y1 = b, y2 = b;
    s.axpy(0.37, a.data(), y1.data(), n);
    v.axpy(0.37, a.data(), y2.data(), n);
    check_close(y1, y2);

    for (std::size_t rows : {1u, 3u, 9u}) {
      auto w = random_vec(rng, rows * n), g = random_vec(rng, rows);
      std::vector<double> o1(rows, 0.5), o2(rows, 0.5);
      s.gemv(w.data(), rows, n, a.data(), o1.data());
      v.gemv(w.data(), rows, n, a.data(), o2.data());
      check_close(o1, o2, 1e-11);

      std::vector<double> t1(n, -0.25), t2(n, -0.25);
      s.gemv_t(w.data(), rows, n, g.data(), t1.data());
      v.gemv_t(w.data(), rows, n, g.data(), t2.data());
      check_close(t1, t2, 1e-11);

      auto w1 = w, w2 = w;
      s.rank1(w1.data(), rows, n, g.data(), a.data());
      v.rank1(w2.data(), rows, n, g.data(), a.data());
      check_close(w1, w2);
    }

    auto p = random_vec(rng, 2 * n), q = random_vec(rng, 2 * n);
    std::vector<double> d1(n), d2(n);
    s.point_dist(p.data(), q.data(), n, d1.data());
    v.point_dist(p.data(), q.data(), n, d2.data());
    check_close(d1, d2);
  }
}

TEST_CASE("selected table is one of the available ISAs") {
  const auto& k = kernels();
  CHECK(isa_available(k.isa));
  CHECK(!isa_name(k.isa).empty());
}
