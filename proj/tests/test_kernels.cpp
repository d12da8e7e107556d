#include <omp.h>

#include <random>
#include <vector>

#include "doctest.h"
#include "nls/kernels.hpp"

using nls::kernels::cplx;

namespace {

std::vector<cplx> random_vec(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (cplx& z : v) z = cplx(unif(rng), unif(rng));
  return v;
}

}  // namespace

TEST_CASE("serial and omp kernels agree") {
  for (std::size_t n : {std::size_t(1), std::size_t(255), std::size_t(4096),
                        std::size_t(100003)}) {
    auto a = random_vec(n, 1);
    auto b = random_vec(n, 2);
    std::vector<unsigned char> edge(n);
    for (std::size_t i = 0; i < n; ++i) edge[i] = (i % 7) == 0;

    auto va = a;
    auto vb = a;
    nls::kernels::serial::multiply(va.data(), b.data(), n);
    nls::kernels::omp::multiply(vb.data(), b.data(), n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(va[i] == vb[i]);

    va = a;
    vb = a;
    nls::kernels::serial::scale(va.data(), cplx(0.7, -0.3), n);
    nls::kernels::omp::scale(vb.data(), cplx(0.7, -0.3), n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(va[i] == vb[i]);

    const auto ss = nls::kernels::serial::reduce_sums(a.data(), edge.data(), n);
    const auto so = nls::kernels::omp::reduce_sums(a.data(), edge.data(), n);
    REQUIRE(ss.sumsq == doctest::Approx(so.sumsq).epsilon(1e-13));
    REQUIRE(ss.maxabs == so.maxabs);
    REQUIRE(ss.edge_sumsq == doctest::Approx(so.edge_sumsq).epsilon(1e-13));

    const double ps = nls::kernels::serial::reduce_pow(a.data(), 4.0, n);
    const double po = nls::kernels::omp::reduce_pow(a.data(), 4.0, n);
    REQUIRE(ps == doctest::Approx(po).epsilon(1e-13));

    const cplx ds = nls::kernels::serial::reduce_dot(a.data(), b.data(), n);
    const cplx dd = nls::kernels::omp::reduce_dot(a.data(), b.data(), n);
    REQUIRE(std::abs(ds - dd) <= 1e-13 * std::abs(ds));
  }
}

TEST_CASE("omp reductions are bit-identical across thread counts") {
  const std::size_t n = 1 << 16;
  auto a = random_vec(n, 3);
  auto b = random_vec(n, 4);
  std::vector<unsigned char> edge(n, 0);
  for (std::size_t i = 0; i < n; i += 11) edge[i] = 1;

  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const auto s1 = nls::kernels::omp::reduce_sums(a.data(), edge.data(), n);
  const double p1 = nls::kernels::omp::reduce_pow(a.data(), 3.0, n);
  const cplx d1 = nls::kernels::omp::reduce_dot(a.data(), b.data(), n);

  omp_set_num_threads(3);
  const auto s3 = nls::kernels::omp::reduce_sums(a.data(), edge.data(), n);
  const double p3 = nls::kernels::omp::reduce_pow(a.data(), 3.0, n);
  const cplx d3 = nls::kernels::omp::reduce_dot(a.data(), b.data(), n);
  omp_set_num_threads(saved);

  REQUIRE(s1.sumsq == s3.sumsq);
  REQUIRE(s1.maxabs == s3.maxabs);
  REQUIRE(s1.edge_sumsq == s3.edge_sumsq);
  REQUIRE(p1 == p3);
  REQUIRE(d1 == d3);
}

TEST_CASE("reduce_dot matches a hand sum") {
  std::vector<cplx> a = {cplx(1, 2), cplx(-3, 0.5)};
  std::vector<cplx> b = {cplx(0, 1), cplx(2, 2)};
  // (1+2i)(-i) + (-3+0.5i)(2-2i) = (2-i) + (-5+7i) = -3+6i
  const cplx d = nls::kernels::reduce_dot(a.data(), b.data(), 2);
  REQUIRE(std::abs(d - cplx(-3.0, 6.0)) < 1e-15);
}
