#include "fxprobe/kernels.h"

#include <cstdlib>
#include <string>

namespace fxprobe::kernels {
namespace {

bool cpu_has_avx2() {
#if defined(FXPROBE_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable& select() {
    if (const char* forced = std::getenv("FXPROBE_SIMD")) {
        const std::string name = forced;
        for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
            if (name == isa_name(isa)) {
                if (const KernelTable* t = table_for(isa)) return *t;
            }
        }
    }
    if (const KernelTable* t = table_for(Isa::avx2)) return *t;
    if (const KernelTable* t = table_for(Isa::neon)) return *t;
    return scalar_table();
}

}  // namespace

const KernelTable* table_for(Isa isa) {
    switch (isa) {
    case Isa::scalar:
        return &scalar_table();
    case Isa::avx2:
#if defined(FXPROBE_WITH_AVX2)
        if (cpu_has_avx2()) return &avx2_table();
#endif
        return nullptr;
    case Isa::neon:
#if defined(FXPROBE_WITH_NEON)
        return &neon_table();
#else
        return nullptr;
#endif
    }
    return nullptr;
}

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

std::string_view isa_name(Isa isa) {
    switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
    }
    return "unknown";
}

}  // namespace fxprobe::kernels
