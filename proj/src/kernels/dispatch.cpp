#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ddlqr/kernels.hpp"

namespace ddlqr::kernels {
namespace {

using DotFn = double (*)(const double*, const double*, std::size_t);
using AxpyFn = void (*)(double, const double*, double*, std::size_t);

bool cpu_has_avx2() {
#if defined(DDLQR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa best_isa() {
  if (isa_available(Isa::avx2)) return Isa::avx2;
  if (isa_available(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

Isa initial_isa() {
  if (const char* env = std::getenv("DDLQR_KERNELS")) {
    const std::string_view v(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (v == isa_name(isa) && isa_available(isa)) return isa;
  }
  return best_isa();
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

DotFn dot_fn(Isa isa) {
  switch (isa) {
#if defined(DDLQR_HAVE_AVX2)
    case Isa::avx2: return &avx2::dot;
#endif
#if defined(DDLQR_HAVE_NEON)
    case Isa::neon: return &neon::dot;
#endif
    default: return &scalar::dot;
  }
}

AxpyFn axpy_fn(Isa isa) {
  switch (isa) {
#if defined(DDLQR_HAVE_AVX2)
    case Isa::avx2: return &avx2::axpy;
#endif
#if defined(DDLQR_HAVE_NEON)
    case Isa::neon: return &neon::axpy;
#endif
    default: return &scalar::axpy;
  }
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2: return cpu_has_avx2();
    case Isa::neon:
#if defined(DDLQR_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw std::invalid_argument(std::string("kernel variant unavailable: ") + isa_name(isa));
  current().store(isa, std::memory_order_relaxed);
}

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::dot: length mismatch");
  return dot_fn(active_isa())(x.data(), y.data(), x.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("kernels::axpy: length mismatch");
  axpy_fn(active_isa())(alpha, x.data(), y.data(), x.size());
}

}  // namespace ddlqr::kernels
