#include "hardylab/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace hardylab::kernels {

namespace {
const KernelTable& select() {
    const char* env = std::getenv("HARDYLAB_SIMD");
    const std::string_view want = env ? env : "";
    if (want == "scalar") return scalar_table();
    if (avx2_supported()) return avx2_table();
    return scalar_table();
}
}  // namespace

const KernelTable& active() {
    static const KernelTable& table = select();
    return table;
}

}  // namespace hardylab::kernels
