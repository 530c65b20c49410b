#pragma once

#include <cstdint>
#include <vector>

#include "qkdsim/circuit.hpp"
#include "qkdsim/rng.hpp"
#include "qkdsim/shot.hpp"

namespace qkdsim {

// Per-measurement ideal bits of the noiseless circuit, precomputed once.
// Only circuits whose noiseless measurements are all deterministic are
// supported by the frame engine.
struct IdealTrace {
    std::vector<uint8_t> ideal_bit;      // by measurement order
    std::vector<uint8_t> measured_qubit; // by measurement order
    std::vector<int16_t> result_bit;     // by measurement order
    uint64_t ideal_bits_mask = 0;        // keyed by result bit
};

// Verifies (by stabilizer propagation) that every measurement is ideally
// deterministic and records its value. Throws otherwise.
IdealTrace precompute_ideal(const Circuit& circuit);

// Mutable per-shot state for callers that drive the circuit one
// instruction at a time (experiment drivers with early exits).
struct FrameState {
    uint64_t x = 0;
    uint64_t z = 0;
    uint64_t bits = 0;
    uint64_t heralds = 0;
    int meas_cursor = 0;
    int herald_cursor = 0;
};

void frame_apply(const Circuit& circuit, size_t index, const IdealTrace& trace,
                 FrameState& state, ShotRng& rng);

ShotRecord run_frame_shot(const Circuit& circuit, const IdealTrace& trace,
                          ShotRng& rng);

// Deterministic batch: shot k uses stream (master_seed, k).
std::vector<ShotRecord> sample_batch(const Circuit& circuit, const IdealTrace& trace,
                                     uint64_t shots, uint64_t master_seed);

}  // namespace qkdsim
