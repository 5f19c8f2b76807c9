#include <cmath>

#include "chbs/errors.hpp"
#include "chbs/kernels.hpp"
#include "kernels_internal.hpp"

namespace chbs::kernels {

namespace scalar {

void yosida_batch(const GraphSpec& g, double eps, std::span<const double> r, std::span<double> value,
                  std::span<double> slope) {
    check_batch_sizes(r, value, slope);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const YosidaEval e = yosida_eval(g, eps, r[i]);
        value[i] = e.value;
        slope[i] = e.slope;
    }
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b) {
    check_sizes(w.size(), a.size());
    check_sizes(w.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i] * b[i];
    return s;
}

double weighted_sum(std::span<const double> w, std::span<const double> a) {
    check_sizes(w.size(), a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * a[i];
    return s;
}

double weighted_abs_sum(std::span<const double> w, std::span<const double> a) {
    check_sizes(w.size(), a.size());
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::abs(a[i]);
    return s;
}

}  // namespace scalar

void check_sizes(std::size_t expected, std::size_t got) {
    if (expected != got) throw ShapeError("kernel: operand length mismatch");
}

void check_batch_sizes(std::span<const double> r, std::span<double> value, std::span<double> slope) {
    check_sizes(r.size(), value.size());
    check_sizes(r.size(), slope.size());
}

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", &scalar::yosida_batch, &scalar::weighted_dot, &scalar::weighted_sum,
                                   &scalar::weighted_abs_sum};
    return table;
}

}  // namespace chbs::kernels
