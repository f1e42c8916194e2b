#pragma once

#include <span>
#include <string>

namespace otd::kernels {

// Implementation selector for the kernel-sum inner loop. Auto picks AVX2 when
// the CPU supports it, scalar otherwise.
enum class Impl { Auto, Scalar, Avx2 };

void set_impl(Impl impl);
Impl selected_impl();
// The implementation actually used after Auto resolution.
Impl active_impl();
std::string impl_name(Impl impl);
Impl impl_from_name(const std::string& name);

// sum_i phi^{(m)}((y - xs[i]) / b) with phi the standard normal density and
// phi^{(m)}(z) = (-1)^m He_m(z) phi(z). Compensated accumulation in sample
// order; the result does not depend on how callers batch their y's.
double kde_kernel_sum(std::span<const double> xs, int m, double b, double y);

// Reference path, plain Kahan over the sample order.
double kde_kernel_sum_scalar(std::span<const double> xs, int m, double b, double y);

bool avx2_available();
#ifdef OTD_HAVE_AVX2
// 4-lane variant with per-lane Kahan accumulators and a fixed lane-combine
// order; equivalence-tested against the scalar path.
double kde_kernel_sum_avx2(std::span<const double> xs, int m, double b, double y);
#endif

}  // namespace otd::kernels
