#pragma once

#include <cstddef>

// Dense double-precision kernels used by the tensor and kde modules.
// The scalar implementations are the reference semantics; the AVX2
// variants are selected at runtime when the CPU supports them and must
// agree with the scalar ones (elementwise ops bitwise, reductions up to
// summation-order rounding). See tests/test_kernels.cpp.
namespace temporank::kernels {

namespace scalar {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double max(const double* x, std::size_t n) noexcept;  // n >= 1
void add(const double* a, const double* b, double* out, std::size_t n) noexcept;
void mul(const double* a, const double* b, double* out, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;  // y += a*x
void scale(double a, double* x, std::size_t n) noexcept;                  // x *= a
void relu(const double* x, double* out, std::size_t n) noexcept;
}  // namespace scalar

#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double max(const double* x, std::size_t n) noexcept;
void add(const double* a, const double* b, double* out, std::size_t n) noexcept;
void mul(const double* a, const double* b, double* out, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
void relu(const double* x, double* out, std::size_t n) noexcept;
}  // namespace avx2
#endif

// True when AVX2 variants were compiled in and the CPU reports support.
bool avx2_available() noexcept;

// Name of the backend the dispatched entry points currently use.
const char* active_backend() noexcept;

// Force "scalar", "avx2" or "auto". Throws if the backend is unavailable.
// The TEMPORANK_KERNELS environment variable applies the same override
// at startup.
void force_backend(const char* name);

// Dispatched entry points.
double dot(const double* a, const double* b, std::size_t n) noexcept;
double sum(const double* x, std::size_t n) noexcept;
double max(const double* x, std::size_t n) noexcept;
void add(const double* a, const double* b, double* out, std::size_t n) noexcept;
void mul(const double* a, const double* b, double* out, std::size_t n) noexcept;
void axpy(double a, const double* x, double* y, std::size_t n) noexcept;
void scale(double a, double* x, std::size_t n) noexcept;
void relu(const double* x, double* out, std::size_t n) noexcept;

}  // namespace temporank::kernels
