#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "nls/kernels.hpp"

using nls::kernels::cplx;

namespace {

template <typename F>
double time_best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
  }
  return best;
}

}  // namespace

int main() {
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);

  std::printf("threads: %d\n", omp_get_max_threads());
  std::printf("%-12s %-10s %12s %12s %8s\n", "kernel", "n", "serial_ms",
              "omp_ms", "speedup");

  for (std::size_t n : {std::size_t(1) << 14, std::size_t(1) << 18,
                        std::size_t(1) << 22}) {
    std::vector<cplx> a(n), b(n), scratch(n);
    std::vector<unsigned char> edge(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = cplx(unif(rng), unif(rng));
      b[i] = cplx(unif(rng), unif(rng));
      edge[i] = (i % 10) == 0;
    }
    volatile double sink = 0.0;

    const int reps = n > (std::size_t(1) << 20) ? 5 : 20;

    auto row = [&](const char* name, double ts, double to) {
      std::printf("%-12s %-10zu %12.4f %12.4f %8.2f\n", name, n, ts * 1e3,
                  to * 1e3, ts / to);
    };

    {
      const double ts = time_best_of(reps, [&] {
        scratch = a;
        nls::kernels::serial::multiply(scratch.data(), b.data(), n);
        sink = sink + scratch[0].real();
      });
      const double to = time_best_of(reps, [&] {
        scratch = a;
        nls::kernels::omp::multiply(scratch.data(), b.data(), n);
        sink = sink + scratch[0].real();
      });
      row("multiply", ts, to);
    }
    {
      const double ts = time_best_of(reps, [&] {
        scratch = a;
        nls::kernels::serial::scale(scratch.data(), cplx(0.5, 0.25), n);
        sink = sink + scratch[0].real();
      });
      const double to = time_best_of(reps, [&] {
        scratch = a;
        nls::kernels::omp::scale(scratch.data(), cplx(0.5, 0.25), n);
        sink = sink + scratch[0].real();
      });
      row("scale", ts, to);
    }
    {
      const double ts = time_best_of(reps, [&] {
        sink = sink + nls::kernels::serial::reduce_sums(a.data(), edge.data(), n).sumsq;
      });
      const double to = time_best_of(reps, [&] {
        sink = sink + nls::kernels::omp::reduce_sums(a.data(), edge.data(), n).sumsq;
      });
      row("reduce_sums", ts, to);
    }
    {
      const double ts = time_best_of(reps, [&] {
        sink = sink + nls::kernels::serial::reduce_pow(a.data(), 4.0, n);
      });
      const double to = time_best_of(reps, [&] {
        sink = sink + nls::kernels::omp::reduce_pow(a.data(), 4.0, n);
      });
      row("reduce_pow", ts, to);
    }
    {
      const double ts = time_best_of(reps, [&] {
        sink = sink + nls::kernels::serial::reduce_dot(a.data(), b.data(), n).real();
      });
      const double to = time_best_of(reps, [&] {
        sink = sink + nls::kernels::omp::reduce_dot(a.data(), b.data(), n).real();
      });
      row("reduce_dot", ts, to);
    }
  }
  return 0;
}
