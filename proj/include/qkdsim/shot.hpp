#pragma once

#include <cstdint>

namespace qkdsim {

// One execution's classical outputs. Bit i of `bits` is result bit i;
// bit j of `heralds` is erasure-herald slot j in circuit traversal order.
struct ShotRecord {
    uint64_t bits = 0;
    uint64_t heralds = 0;

    bool bit(int i) const { return (bits >> i) & 1; }
    bool any_herald() const { return heralds != 0; }
};

}  // namespace qkdsim
