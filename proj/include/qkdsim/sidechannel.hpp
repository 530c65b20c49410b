#pragma once

#include <cstdint>
#include <vector>

#include "qkdsim/qkd.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

// Threshold photon-counting detector. Dark ions scatter at dark_rate,
// bright ions at bright_rate; "dark" is assigned below `threshold` counts.
struct DetectorModel {
    double bright_rate = 0.05;   // photons per us, bright ion
    double dark_rate = 1e-4;     // background photons per us
    int threshold = 2;
    double spam_floor = 1e-3;    // residual misassignment probability
};

enum class BiasKind : uint8_t { Quench, Pump };

// Exponential-saturation models of the quench (854 nm) and pump (397 nm)
// outcome-biasing pulses. p_dark0 is the unbiased dark probability per
// input state.
struct BiasModel {
    BiasKind kind = BiasKind::Quench;
    double tau_us = 0.6;         // quench default; pump default is 2.0
    double p_dark0[2] = {0.999, 0.001};  // input |0>, input |1>

    static BiasModel quench() { return BiasModel{BiasKind::Quench, 0.6, {0.999, 0.001}}; }
    static BiasModel pump() { return BiasModel{BiasKind::Pump, 2.0, {0.999, 0.001}}; }
};

struct DoubleDetection {
    int b_dark = 0;
    int e_dark = 0;
};

// B measures at b_exposure_us, then E re-detects the same projected ion
// at e_exposure_us. Counts are Poisson in rate * time.
DoubleDetection double_detection(const DetectorModel& detector, int true_state,
                                 double b_exposure_us, double e_exposure_us,
                                 ShotRng& rng);

double apply_bias(const BiasModel& model, int input_state, double duration_us);

// Adds E's second-detection bit (and re-derives x_B from the detector).
std::vector<RoundRecord> inject_leakage(const std::vector<RoundRecord>& records,
                                        const DetectorModel& detector,
                                        double e_exposure_us, uint64_t seed,
                                        double b_exposure_us = 1100.0);

// Replaces x_B with a draw from the biased dark probability.
std::vector<RoundRecord> inject_bias(const std::vector<RoundRecord>& records,
                                     const BiasModel& model, double duration_us,
                                     uint64_t seed);

// Plug-in mutual information I(x_B; e_leak) in bits.
double leak_mutual_information(const std::vector<RoundRecord>& records);

uint64_t sample_poisson(double mean, ShotRng& rng);

}  // namespace qkdsim
