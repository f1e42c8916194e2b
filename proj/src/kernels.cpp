#include "otd/kernels.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

namespace otd::kernels {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
std::atomic<Impl> g_impl{Impl::Auto};
}  // namespace

void set_impl(Impl impl) {
#ifndef OTD_HAVE_AVX2
    if (impl == Impl::Avx2) throw std::runtime_error("AVX2 kernel not compiled in");
#else
    if (impl == Impl::Avx2 && !avx2_available())
        throw std::runtime_error("AVX2 not supported on this CPU");
#endif
    g_impl.store(impl);
}

Impl selected_impl() { return g_impl.load(); }

Impl active_impl() {
    Impl s = g_impl.load();
    if (s != Impl::Auto) return s;
#ifdef OTD_HAVE_AVX2
    if (avx2_available()) return Impl::Avx2;
#endif
    return Impl::Scalar;
}

std::string impl_name(Impl impl) {
    switch (impl) {
        case Impl::Auto: return "auto";
        case Impl::Scalar: return "scalar";
        case Impl::Avx2: return "avx2";
    }
    return "?";
}

Impl impl_from_name(const std::string& name) {
    if (name == "auto") return Impl::Auto;
    if (name == "scalar") return Impl::Scalar;
    if (name == "avx2") return Impl::Avx2;
    throw std::invalid_argument("unknown kernel impl: " + name);
}

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

double kde_kernel_sum_scalar(std::span<const double> xs, int m, double b, double y) {
    double sign = (m % 2 == 0) ? 1.0 : -1.0;
    double sum = 0.0, comp = 0.0;  // Kahan
    for (double x : xs) {
        double z = (y - x) / b;
        double he;
        if (m == 0) {
            he = 1.0;
        } else {
            double prev = 1.0, cur = z;
            for (int k = 1; k < m; ++k) {
                double next = z * cur - k * prev;
                prev = cur;
                cur = next;
            }
            he = cur;
        }
        double v = sign * he * kInvSqrt2Pi * std::exp(-0.5 * z * z);
        double t = sum + v;
        if (std::abs(sum) >= std::abs(v))
            comp += (sum - t) + v;
        else
            comp += (v - t) + sum;
        sum = t;
    }
    return sum + comp;
}

double kde_kernel_sum(std::span<const double> xs, int m, double b, double y) {
#ifdef OTD_HAVE_AVX2
    if (active_impl() == Impl::Avx2) return kde_kernel_sum_avx2(xs, m, b, y);
#endif
    return kde_kernel_sum_scalar(xs, m, b, y);
}

}  // namespace otd::kernels
