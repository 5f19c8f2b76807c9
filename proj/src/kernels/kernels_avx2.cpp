// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after the runtime CPU check in dispatch.cpp.

#include <immintrin.h>

#include <cmath>

#include "chbs/kernels.hpp"
#include "kernels_internal.hpp"

namespace chbs::kernels::avx2 {

namespace {

constexpr std::size_t kLanes = 4;
constexpr int kMaxNewton = 200;

inline __m256d abs_pd(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

bool all_finite(std::span<const double> r) {
    for (double x : r) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

// j + eps*j^3 = |r|, Newton from j = |r| (an upper bound of the root). The cubic is
// convex on j > 0, so iterates decrease monotonically onto the root; a lane is
// frozen once its update falls below 4 ulp, matching the scalar stopping rule.
void polynomial_batch(double eps, std::span<const double> r, std::span<double> value, std::span<double> slope) {
    const __m256d veps = _mm256_set1_pd(eps);
    const __m256d three_eps = _mm256_set1_pd(3.0 * eps);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d three = _mm256_set1_pd(3.0);
    const __m256d tol = _mm256_set1_pd(4.0 * 2.220446049250313e-16);
    const __m256d sign_mask = _mm256_set1_pd(-0.0);

    const std::size_t n = r.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d x = _mm256_loadu_pd(r.data() + i);
        const __m256d sign = _mm256_and_pd(x, sign_mask);
        const __m256d a = abs_pd(x);
        __m256d j = a;
        __m256d done = _mm256_setzero_pd();
        for (int it = 0; it < kMaxNewton; ++it) {
            const __m256d j2 = _mm256_mul_pd(j, j);
            const __m256d g = _mm256_sub_pd(_mm256_fmadd_pd(_mm256_mul_pd(veps, j2), j, j), a);
            const __m256d dg = _mm256_fmadd_pd(three_eps, j2, one);
            const __m256d next = _mm256_max_pd(_mm256_sub_pd(j, _mm256_div_pd(g, dg)), _mm256_setzero_pd());
            const __m256d small = _mm256_cmp_pd(abs_pd(_mm256_sub_pd(next, j)), _mm256_mul_pd(tol, j), _CMP_LE_OQ);
            const __m256d exact = _mm256_cmp_pd(g, _mm256_setzero_pd(), _CMP_EQ_OQ);
            // frozen or exact lanes keep j; every other lane (including the one converging now) takes next
            j = _mm256_blendv_pd(next, j, _mm256_or_pd(done, exact));
            done = _mm256_or_pd(done, _mm256_or_pd(exact, small));
            if (_mm256_movemask_pd(done) == 0xF) break;
        }
        const __m256d j2 = _mm256_mul_pd(j, j);
        const __m256d d = _mm256_mul_pd(three, j2);
        const __m256d v = _mm256_or_pd(_mm256_mul_pd(j2, j), sign);
        const __m256d s = _mm256_div_pd(d, _mm256_fmadd_pd(veps, d, one));
        _mm256_storeu_pd(value.data() + i, v);
        _mm256_storeu_pd(slope.data() + i, s);
    }
    for (; i < n; ++i) {
        const YosidaEval e = yosida_eval(GraphSpec::polynomial(), eps, r[i]);
        value[i] = e.value;
        slope[i] = e.slope;
    }
}

void obstacle_batch(double eps, std::span<const double> r, std::span<double> value, std::span<double> slope) {
    const __m256d inv_eps = _mm256_set1_pd(1.0 / eps);
    const __m256d lo = _mm256_set1_pd(-1.0);
    const __m256d hi = _mm256_set1_pd(1.0);
    const std::size_t n = r.size();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        const __m256d x = _mm256_loadu_pd(r.data() + i);
        const __m256d c = _mm256_min_pd(_mm256_max_pd(x, lo), hi);
        const __m256d v = _mm256_div_pd(_mm256_sub_pd(x, c), _mm256_set1_pd(eps));
        const __m256d outside = _mm256_cmp_pd(abs_pd(x), hi, _CMP_GT_OQ);
        _mm256_storeu_pd(value.data() + i, v);
        _mm256_storeu_pd(slope.data() + i, _mm256_and_pd(outside, inv_eps));
    }
    for (; i < n; ++i) {
        const YosidaEval e = yosida_eval(GraphSpec::obstacle(), eps, r[i]);
        value[i] = e.value;
        slope[i] = e.slope;
    }
}

void yosida_batch(const GraphSpec& g, double eps, std::span<const double> r, std::span<double> value,
                  std::span<double> slope) {
    check_batch_sizes(r, value, slope);
    // Error paths (and the logarithmic graph, which needs a vector log) use the reference kernel.
    if (!(eps > 0.0) || !std::isfinite(eps) || !all_finite(r) || g.kind == GraphKind::Logarithmic) {
        scalar::yosida_batch(g, eps, r, value, slope);
        return;
    }
    if (g.kind == GraphKind::Polynomial) {
        polynomial_batch(eps, r, value, slope);
    } else {
        obstacle_batch(eps, r, value, slope);
    }
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    check_sizes(w.size(), a.size());
    check_sizes(w.size(), b.size());
    const std::size_t n = w.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        const __m256d p0 = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(a.data() + i));
        const __m256d p1 = _mm256_mul_pd(_mm256_loadu_pd(w.data() + i + 4), _mm256_loadu_pd(a.data() + i + 4));
        acc0 = _mm256_fmadd_pd(p0, _mm256_loadu_pd(b.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(p1, _mm256_loadu_pd(b.data() + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i] * b[i];
    return s;
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    check_sizes(w.size(), a.size());
    const std::size_t n = w.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 2 * kLanes <= n; i += 2 * kLanes) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), _mm256_loadu_pd(a.data() + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i + 4), _mm256_loadu_pd(a.data() + i + 4), acc1);
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += w[i] * a[i];
    return s;
}

double weighted_abs_sum(std::span<const double> w, std::span<const double> a) {
    check_sizes(w.size(), a.size());
    const std::size_t n = w.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + kLanes <= n; i += kLanes) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(w.data() + i), abs_pd(_mm256_loadu_pd(a.data() + i)), acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) s += w[i] * std::abs(a[i]);
    return s;
}

}  // namespace

const KernelTable& table() {
    static const KernelTable t{"avx2", &yosida_batch, &weighted_dot, &weighted_sum, &weighted_abs_sum};
    return t;
}

}  // namespace chbs::kernels::avx2
