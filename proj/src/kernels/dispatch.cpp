#include <cstdlib>
#include <string_view>

#include "chbs/kernels.hpp"
#include "kernels_internal.hpp"

namespace chbs::kernels {

const KernelTable* avx2_table() {
#if defined(CHBS_HAVE_AVX2_BUILD)
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &avx2::table() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() {
    static const KernelTable& chosen = [] () -> const KernelTable& {
        const char* forced = std::getenv("CHBS_SIMD");
        if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
        if (const KernelTable* t = avx2_table()) return *t;
        return scalar_table();
    }();
    return chosen;
}

}  // namespace chbs::kernels
