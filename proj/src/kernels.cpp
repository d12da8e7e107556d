#include "nls/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nls::kernels {

namespace serial {

void multiply(cplx* v, const cplx* m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= m[i];
}

void scale(cplx* v, cplx a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) v[i] *= a;
}

Sums reduce_sums(const cplx* v, const unsigned char* edge, std::size_t n) {
  Sums s;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::norm(v[i]);
    s.sumsq += a;
    s.maxabs = std::max(s.maxabs, a);
    if (edge && edge[i]) s.edge_sumsq += a;
  }
  s.maxabs = std::sqrt(s.maxabs);
  return s;
}

double reduce_pow(const cplx* v, double p, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::pow(std::abs(v[i]), p);
  return s;
}

cplx reduce_dot(const cplx* a, const cplx* b, std::size_t n) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * std::conj(b[i]);
  return s;
}

}  // namespace serial

namespace omp {

// Chunk count is fixed so the reduction tree does not depend on the thread
// count; the final combine runs in chunk order on one thread.
constexpr std::size_t kChunks = 256;

void multiply(cplx* v, const cplx* m, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) v[i] *= m[i];
}

void scale(cplx* v, cplx a, std::size_t n) {
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < std::ptrdiff_t(n); ++i) v[i] *= a;
}

Sums reduce_sums(const cplx* v, const unsigned char* edge, std::size_t n) {
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<Sums> part(chunks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chunks); ++c) {
    const std::size_t lo = c * step, hi = std::min(n, lo + step);
    Sums s;
    for (std::size_t i = lo; i < hi; ++i) {
      const double a = std::norm(v[i]);
      s.sumsq += a;
      s.maxabs = std::max(s.maxabs, a);
      if (edge && edge[i]) s.edge_sumsq += a;
    }
    part[c] = s;
  }
  Sums s;
  for (const auto& p : part) {
    s.sumsq += p.sumsq;
    s.edge_sumsq += p.edge_sumsq;
    s.maxabs = std::max(s.maxabs, p.maxabs);
  }
  s.maxabs = std::sqrt(s.maxabs);
  return s;
}

double reduce_pow(const cplx* v, double p, std::size_t n) {
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<double> part(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chunks); ++c) {
    const std::size_t lo = c * step, hi = std::min(n, lo + step);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += std::pow(std::abs(v[i]), p);
    part[c] = s;
  }
  double s = 0.0;
  for (double p2 : part) s += p2;
  return s;
}

cplx reduce_dot(const cplx* a, const cplx* b, std::size_t n) {
  const std::size_t chunks = std::min(kChunks, std::max<std::size_t>(n, 1));
  const std::size_t step = (n + chunks - 1) / chunks;
  std::vector<cplx> part(chunks, cplx(0.0));
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t c = 0; c < std::ptrdiff_t(chunks); ++c) {
    const std::size_t lo = c * step, hi = std::min(n, lo + step);
    cplx s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += a[i] * std::conj(b[i]);
    part[c] = s;
  }
  cplx s = 0.0;
  for (const auto& p : part) s += p;
  return s;
}

}  // namespace omp

}  // namespace nls::kernels
