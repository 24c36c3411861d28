#pragma once

#include <cstdint>

namespace glme::opcount {

/// Thread-local counter of scalar multiply-add operations performed by the
/// matrix kernels.  Used to compare the arithmetic cost of structured/sparse
/// applies against dense ones independently of wall-clock noise.
std::uint64_t multiply_adds() noexcept;

/// Reset the calling thread's counter to zero.
void reset() noexcept;

/// Add @p n multiply-adds to the calling thread's counter.
void add(std::uint64_t n) noexcept;

/// RAII helper: resets the counter on construction, reads it on demand.
class Scope {
public:
    Scope() noexcept { reset(); }
    std::uint64_t count() const noexcept { return multiply_adds(); }
};

}  // namespace glme::opcount
