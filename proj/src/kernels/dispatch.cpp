#include <cstdlib>
#include <string>

#include "itr/kernels/kernels.hpp"

namespace itr::kernels {

#if defined(ITR_HAVE_AVX2)
const Table& avx2_table_unchecked();
#endif

bool avx2_available() {
#if defined(ITR_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    static const bool ok = __builtin_cpu_supports("avx2");
    return ok;
#else
    return false;
#endif
}

const Table& avx2_table() {
#if defined(ITR_HAVE_AVX2)
    if (avx2_available()) return avx2_table_unchecked();
#endif
    return scalar_table();
}

const Table& table(Isa isa) { return isa == Isa::avx2 ? avx2_table() : scalar_table(); }

namespace {

const Table& select() {
    if (const char* env = std::getenv("ITR_ISA")) {
        const std::string want(env);
        if (want == "scalar") return scalar_table();
        if (want == "avx2") return avx2_table();
    }
    return avx2_available() ? avx2_table() : scalar_table();
}

}  // namespace

const Table& active() {
    static const Table& t = select();
    return t;
}

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace itr::kernels
