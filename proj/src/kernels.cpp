#include "uavsim/kernels.hpp"

#include <atomic>
#include <cmath>
#include <limits>

namespace uavsim::kernels {

namespace scalar {

double reduce_sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = y[i] + a * x[i];
}

void combine(double w1, const double* x, const double* w2, const double* y,
             double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = w1 * x[i] + w2[i] * y[i];
}

void ucb_fill(const double* q, const double* m, double c, double* out,
              std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = (m[i] == 0.0) ? inf : q[i] + std::sqrt(c / m[i]);
  }
}

double kl_sum(const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) acc += p[i] * std::log(p[i] / q[i]);
  }
  return acc;
}

} // namespace scalar

namespace {

struct Dispatch {
  double (*reduce_sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  void (*combine)(double, const double*, const double*, const double*, double*,
                  std::size_t);
  void (*ucb_fill)(const double*, const double*, double, double*, std::size_t);
  double (*kl_sum)(const double*, const double*, std::size_t);
};

constexpr Dispatch kScalar{scalar::reduce_sum, scalar::axpy, scalar::combine,
                           scalar::ucb_fill, scalar::kl_sum};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Dispatch kAvx2{avx2::reduce_sum, avx2::axpy, avx2::combine,
                         avx2::ucb_fill, avx2::kl_sum};
#endif

std::atomic<const Dispatch*> g_active{nullptr};
std::atomic<Backend> g_backend{Backend::automatic};

const Dispatch* pick_auto() {
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return &kAvx2;
#endif
  return &kScalar;
}

const Dispatch& active() {
  const Dispatch* d = g_active.load(std::memory_order_acquire);
  if (!d) {
    d = pick_auto();
    g_active.store(d, std::memory_order_release);
#if defined(__x86_64__) || defined(_M_X64)
    g_backend.store(d == &kAvx2 ? Backend::avx2 : Backend::scalar,
                    std::memory_order_release);
#else
    g_backend.store(Backend::scalar, std::memory_order_release);
#endif
  }
  return *d;
}

} // namespace

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

bool set_backend(Backend b) {
  switch (b) {
    case Backend::automatic:
      g_active.store(nullptr, std::memory_order_release);
      g_backend.store(Backend::automatic, std::memory_order_release);
      active();
      return true;
    case Backend::scalar:
      g_active.store(&kScalar, std::memory_order_release);
      g_backend.store(Backend::scalar, std::memory_order_release);
      return true;
    case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
      if (cpu_has_avx2()) {
        g_active.store(&kAvx2, std::memory_order_release);
        g_backend.store(Backend::avx2, std::memory_order_release);
        return true;
      }
#endif
      return false;
  }
  return false;
}

Backend active_backend() {
  active();
  return g_backend.load(std::memory_order_acquire);
}

std::string_view backend_name() {
  switch (active_backend()) {
    case Backend::avx2: return "avx2";
    case Backend::scalar: return "scalar";
    default: return "auto";
  }
}

double reduce_sum(std::span<const double> x) {
  return active().reduce_sum(x.data(), x.size());
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  active().axpy(a, x.data(), y.data(), x.size());
}

void combine(double w1, std::span<const double> x, std::span<const double> w2,
             std::span<const double> y, std::span<double> out) {
  active().combine(w1, x.data(), w2.data(), y.data(), out.data(), x.size());
}

void ucb_fill(std::span<const double> q, std::span<const double> m, double c,
              std::span<double> out) {
  active().ucb_fill(q.data(), m.data(), c, out.data(), q.size());
}

double kl_sum(std::span<const double> p, std::span<const double> q) {
  return active().kl_sum(p.data(), q.data(), p.size());
}

} // namespace uavsim::kernels
