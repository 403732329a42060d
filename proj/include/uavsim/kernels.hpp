#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Arithmetic kernels used by the learning and federation hot loops.
//
// Every kernel has a scalar reference implementation and, on x86-64, an
// AVX2 variant. The active variant is picked once at runtime from CPU
// features; set_backend() can force a specific one (used by the
// equivalence tests). Elementwise kernels (axpy, combine, ucb_fill) are
// bit-identical across backends because both paths use the same sequence
// of IEEE operations; reductions (reduce_sum, kl_sum) may differ in the
// last ulps due to accumulation order and the vectorized log.

namespace uavsim::kernels {

enum class Backend { automatic, scalar, avx2 };

// Returns false if the requested backend is unavailable on this CPU.
bool set_backend(Backend b);
Backend active_backend();
std::string_view backend_name();
bool cpu_has_avx2();

// Sum of all elements.
double reduce_sum(std::span<const double> x);

// y[i] += a * x[i]
void axpy(double a, std::span<const double> x, std::span<double> y);

// out[i] = w1 * x[i] + w2[i] * y[i]
void combine(double w1, std::span<const double> x, std::span<const double> w2,
             std::span<const double> y, std::span<double> out);

// out[i] = m[i] == 0 ? +inf : q[i] + sqrt(c / m[i]), c >= 0
void ucb_fill(std::span<const double> q, std::span<const double> m, double c,
              std::span<double> out);

// Sum of p[i] * ln(p[i] / q[i]) with the 0 * ln(0/q) = 0 convention.
// q must be strictly positive wherever p is.
double kl_sum(std::span<const double> p, std::span<const double> q);

namespace scalar {
double reduce_sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void combine(double w1, const double* x, const double* w2, const double* y,
             double* out, std::size_t n);
void ucb_fill(const double* q, const double* m, double c, double* out,
              std::size_t n);
double kl_sum(const double* p, const double* q, std::size_t n);
} // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double reduce_sum(const double* x, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void combine(double w1, const double* x, const double* w2, const double* y,
             double* out, std::size_t n);
void ucb_fill(const double* q, const double* m, double c, double* out,
              std::size_t n);
double kl_sum(const double* p, const double* q, std::size_t n);
} // namespace avx2
#endif

} // namespace uavsim::kernels
