#include "glme/op_count.hpp"

namespace glme::opcount {

namespace {
thread_local std::uint64_t g_multiply_adds = 0;
}

std::uint64_t multiply_adds() noexcept { return g_multiply_adds; }

void reset() noexcept { g_multiply_adds = 0; }

void add(std::uint64_t n) noexcept { g_multiply_adds += n; }

}  // namespace glme::opcount
