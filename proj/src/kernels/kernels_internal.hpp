#pragma once

#include <cstddef>
#include <span>

#include "chbs/kernels.hpp"

namespace chbs::kernels {

void check_sizes(std::size_t expected, std::size_t got);
void check_batch_sizes(std::span<const double> r, std::span<double> value, std::span<double> slope);

namespace scalar {
void yosida_batch(const GraphSpec& g, double eps, std::span<const double> r, std::span<double> value,
                  std::span<double> slope);
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
double weighted_sum(std::span<const double> w, std::span<const double> a);
double weighted_abs_sum(std::span<const double> w, std::span<const double> a);
}  // namespace scalar

#if defined(CHBS_HAVE_AVX2_BUILD)
namespace avx2 {
const KernelTable& table();
}
#endif

}  // namespace chbs::kernels
