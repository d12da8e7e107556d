#pragma once

#include <complex>
#include <cstddef>

// Data-parallel inner loops, each in two builds: a plain serial reference and
// an OpenMP version. The OpenMP reductions accumulate into a fixed number of
// chunks (independent of the thread count) and combine them in chunk order,
// so results are bit-identical across --threads settings; the serial
// reference uses naive left-to-right accumulation and is compared against in
// tests at close-to-machine tolerance.

namespace nls::kernels {

using cplx = std::complex<double>;

struct Sums {
  double sumsq = 0.0;      // sum |v|^2
  double maxabs = 0.0;     // max |v|
  double edge_sumsq = 0.0; // sum |v|^2 over flagged edge points
};

namespace serial {
void multiply(cplx* v, const cplx* m, std::size_t n);
void scale(cplx* v, cplx a, std::size_t n);
Sums reduce_sums(const cplx* v, const unsigned char* edge, std::size_t n);
double reduce_pow(const cplx* v, double p, std::size_t n);  // sum |v|^p
cplx reduce_dot(const cplx* a, const cplx* b, std::size_t n);  // sum a conj(b)
}  // namespace serial

namespace omp {
void multiply(cplx* v, const cplx* m, std::size_t n);
void scale(cplx* v, cplx a, std::size_t n);
Sums reduce_sums(const cplx* v, const unsigned char* edge, std::size_t n);
double reduce_pow(const cplx* v, double p, std::size_t n);
cplx reduce_dot(const cplx* a, const cplx* b, std::size_t n);
}  // namespace omp

// Dispatch used by the library; forwards to omp.
inline void multiply(cplx* v, const cplx* m, std::size_t n) { omp::multiply(v, m, n); }
inline void scale(cplx* v, cplx a, std::size_t n) { omp::scale(v, a, n); }
inline Sums reduce_sums(const cplx* v, const unsigned char* e, std::size_t n) { return omp::reduce_sums(v, e, n); }
inline double reduce_pow(const cplx* v, double p, std::size_t n) { return omp::reduce_pow(v, p, n); }
inline cplx reduce_dot(const cplx* a, const cplx* b, std::size_t n) { return omp::reduce_dot(a, b, n); }

}  // namespace nls::kernels
