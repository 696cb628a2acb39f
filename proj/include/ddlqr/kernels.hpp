#pragma once

#include <cstddef>
#include <span>

// Data-parallel inner loops of the SDP solver. Every kernel has a scalar
// reference implementation; AVX2 (x86-64) and NEON (aarch64) variants are
// compiled in separate translation units and chosen at runtime.

namespace ddlqr::kernels {

enum class Isa { scalar, avx2, neon };

const char* isa_name(Isa isa);

/// Whether this binary carries the variant and the CPU can run it.
bool isa_available(Isa isa);

/// The variant used by dot/axpy. Defaults to the best available one; the
/// DDLQR_KERNELS environment variable (scalar|avx2|neon) overrides it.
Isa active_isa();

/// Throws std::invalid_argument if the variant is unavailable.
void set_isa(Isa isa);

/// Σ x[i]·y[i]. Throws std::invalid_argument on length mismatch.
double dot(std::span<const double> x, std::span<const double> y);

/// y += alpha·x.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

namespace scalar {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* x, const double* y, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
}  // namespace neon

}  // namespace ddlqr::kernels
