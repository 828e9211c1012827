#include "temporank/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace temporank::kernels {

namespace {

struct Vtable {
    double (*dot)(const double*, const double*, std::size_t) noexcept;
    double (*sum)(const double*, std::size_t) noexcept;
    double (*max)(const double*, std::size_t) noexcept;
    void (*add)(const double*, const double*, double*, std::size_t) noexcept;
    void (*mul)(const double*, const double*, double*, std::size_t) noexcept;
    void (*axpy)(double, const double*, double*, std::size_t) noexcept;
    void (*scale)(double, double*, std::size_t) noexcept;
    void (*relu)(const double*, double*, std::size_t) noexcept;
    const char* name;
};

constexpr Vtable kScalar = {scalar::dot, scalar::sum, scalar::max, scalar::add,
                            scalar::mul, scalar::axpy, scalar::scale, scalar::relu,
                            "scalar"};

#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
constexpr Vtable kAvx2 = {avx2::dot, avx2::sum, avx2::max, avx2::add,
                          avx2::mul, avx2::axpy, avx2::scale, avx2::relu,
                          "avx2"};
#endif

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Vtable* pick_auto() noexcept {
#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
    if (cpu_has_avx2()) return &kAvx2;
#endif
    return &kScalar;
}

const Vtable* initial_backend() {
    if (const char* env = std::getenv("TEMPORANK_KERNELS")) {
        std::string want(env);
        if (want == "scalar") return &kScalar;
#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
        if (want == "avx2" && cpu_has_avx2()) return &kAvx2;
#endif
    }
    return pick_auto();
}

const Vtable* g_active = initial_backend();

}  // namespace

bool avx2_available() noexcept { return cpu_has_avx2(); }

const char* active_backend() noexcept { return g_active->name; }

void force_backend(const char* name) {
    std::string want(name);
    if (want == "scalar") {
        g_active = &kScalar;
    } else if (want == "auto") {
        g_active = pick_auto();
    } else if (want == "avx2") {
#if defined(__x86_64__) && defined(TEMPORANK_HAVE_AVX2)
        if (!cpu_has_avx2()) throw std::runtime_error("avx2 backend not supported by this CPU");
        g_active = &kAvx2;
#else
        throw std::runtime_error("avx2 backend not compiled in");
#endif
    } else {
        throw std::invalid_argument("unknown kernel backend: " + want);
    }
}

double dot(const double* a, const double* b, std::size_t n) noexcept { return g_active->dot(a, b, n); }
double sum(const double* x, std::size_t n) noexcept { return g_active->sum(x, n); }
double max(const double* x, std::size_t n) noexcept { return g_active->max(x, n); }
void add(const double* a, const double* b, double* out, std::size_t n) noexcept { g_active->add(a, b, out, n); }
void mul(const double* a, const double* b, double* out, std::size_t n) noexcept { g_active->mul(a, b, out, n); }
void axpy(double a, const double* x, double* y, std::size_t n) noexcept { g_active->axpy(a, x, y, n); }
void scale(double a, double* x, std::size_t n) noexcept { g_active->scale(a, x, n); }
void relu(const double* x, double* out, std::size_t n) noexcept { g_active->relu(x, out, n); }

}  // namespace temporank::kernels
