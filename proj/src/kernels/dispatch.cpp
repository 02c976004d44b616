#include <atomic>
#include <cstdlib>
#include <string>

#include "subembed/errors.hpp"
#include "subembed/kernels.hpp"

namespace subembed::kernels {
namespace {

Backend initial_backend() {
    if (const char* forced = std::getenv("SUBEMBED_KERNELS")) {
        if (std::string(forced) == "scalar") return Backend::scalar;
    }
    return (avx2::table() != nullptr && cpu_has_avx2()) ? Backend::avx2 : Backend::scalar;
}

std::atomic<const Table*>& current() {
    static std::atomic<const Table*> table{&table_for(initial_backend())};
    return table;
}

}  // namespace

bool cpu_has_avx2() noexcept {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Table& table_for(Backend backend) {
    if (backend == Backend::scalar) return scalar::table();
    const Table* t = avx2::table();
    if (t == nullptr || !cpu_has_avx2()) throw ConfigError("AVX2 kernels are not available on this host");
    return *t;
}

const Table& active() noexcept { return *current().load(std::memory_order_acquire); }

Backend active_backend() noexcept {
    return &active() == &scalar::table() ? Backend::scalar : Backend::avx2;
}

void set_backend(Backend backend) {
    current().store(&table_for(backend), std::memory_order_release);
}

std::string_view backend_name(Backend backend) noexcept {
    return backend == Backend::scalar ? "scalar" : "avx2";
}

}  // namespace subembed::kernels
