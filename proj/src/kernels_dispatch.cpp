#include "sgur/kernels.hpp"

#include <cstdlib>
#include <string>

namespace sgur::kernels {

#if !defined(SGUR_BUILD_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif

#if !(defined(SGUR_BUILD_NEON) && defined(__aarch64__))
const Ops* neon_ops() { return nullptr; }
#endif

namespace {

const Ops& select() {
    const char* env = std::getenv("SGUR_SIMD");
    std::string mode = env ? env : "auto";
    if (mode == "scalar") return scalar_ops();
    if (mode == "avx2") {
        if (const Ops* o = avx2_ops()) return *o;
        return scalar_ops();
    }
    if (mode == "neon") {
        if (const Ops* o = neon_ops()) return *o;
        return scalar_ops();
    }
    if (const Ops* o = avx2_ops()) return *o;
    if (const Ops* o = neon_ops()) return *o;
    return scalar_ops();
}

}

const Ops& ops() {
    static const Ops& selected = select();
    return selected;
}

}
