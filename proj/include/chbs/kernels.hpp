#pragma once

// Data-parallel inner loops of the scheme: nodewise Yosida evaluation and
// lumped-mass weighted reductions.
//
// Every kernel has a scalar reference implementation. An AVX2+FMA variant is
// compiled separately and chosen at runtime when the CPU supports it; the
// environment variable CHBS_SIMD=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

#include "chbs/monotone.hpp"

namespace chbs::kernels {

/// value[i] = beta_eps(r[i]), slope[i] = beta_eps'(r[i]).
using YosidaBatchFn = void (*)(const GraphSpec& g, double eps, std::span<const double> r, std::span<double> value,
                               std::span<double> slope);

/// Sum_i w[i] * a[i] * b[i].
using WeightedDotFn = double (*)(std::span<const double> w, std::span<const double> a, std::span<const double> b);

/// Sum_i w[i] * a[i].
using WeightedSumFn = double (*)(std::span<const double> w, std::span<const double> a);

/// Sum_i w[i] * |a[i]|.
using WeightedAbsSumFn = double (*)(std::span<const double> w, std::span<const double> a);

struct KernelTable {
    std::string_view name;
    YosidaBatchFn yosida_batch;
    WeightedDotFn weighted_dot;
    WeightedSumFn weighted_sum;
    WeightedAbsSumFn weighted_abs_sum;
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not built or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

/// The table used by the library; fixed on first call.
const KernelTable& active();

}  // namespace chbs::kernels
