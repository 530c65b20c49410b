#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qkdsim/noise.hpp"

namespace qkdsim {

struct RoundStats {
    int m = 0;  // number of individual stabilizer measurements
    double acceptance_rate = 0.0;
    double flip_rate_lq1 = 0.0;
    double flip_rate_lq2 = 0.0;
    uint64_t shots = 0;
    uint64_t accepted_shots = 0;
    uint64_t flips_lq1 = 0;
    uint64_t flips_lq2 = 0;
};

struct Qec422Params {
    ChannelSeq channel;   // applied once to each data qubit after encoding
    int m = 2;
    double p_d = 0.0;
    bool noise_on_spam = true;
    uint64_t shots = 1000000;
    uint64_t seed = 0;
    int workers = 1;
};

// E4 -> per-qubit channel -> m alternating stabilizer blocks (g_X first)
// -> E4^dag -> measure all, on the Pauli-frame engine. Accepts shots whose
// ancilla bits are all zero (and that saw no erasure herald).
RoundStats run_422(const Qec422Params& params);

struct Analytic422 {
    double acceptance = 0.0;
    double flip_pre = 0.0;
    double flip_post = 0.0;
};

Analytic422 analytic_422_bitflip(double p);

enum class ScalingChannel { BitFlip, Depolarizing };

struct ScalingPoint {
    double lambda = 0.0;
    double p_l = 0.0;
    double acceptance = 0.0;
    double physical_ref = 0.0;
    uint64_t shots = 0;
};

struct ScalingParams {
    std::vector<double> lambda_grid;
    double p = 0.1;
    double p_d = 0.01;
    bool circuit_noise = false;
    ScalingChannel channel = ScalingChannel::BitFlip;
    uint64_t shots = 1000000;   // per grid point; scaled up at small p_l
    uint64_t max_shots = 40000000;
    uint64_t seed = 0;
    int workers = 1;
};

std::vector<ScalingPoint> scaling_sweep(const ScalingParams& params);

// Unweighted least squares on log10-log10 points.
double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

// Interpolated crossing of the m=2 post-selected flip rate with the
// physical rate p for the bitflip channel.
double find_bitflip_crossover(const std::vector<double>& p_grid, uint64_t shots,
                              uint64_t seed, int workers = 1);

struct SyndromeHistogram {
    std::array<uint64_t, 64> counts{};                 // first nontrivial syndrome
    std::vector<std::array<uint64_t, 64>> per_round;   // by round of detection
    uint64_t erasure_discards = 0;
    uint64_t trivial_all_rounds = 0;
    uint64_t shots = 0;
};

struct SteaneMonitorResult {
    SyndromeHistogram histogram;
    uint64_t accepted = 0;
    uint64_t flips = 0;
    double acceptance = 0.0;
    double flip_rate = 0.0;
};

struct SteaneParams {
    std::vector<ChannelSeq> channel;  // size 1 (uniform) or 7 (per qubit)
    int rounds_max = 3;
    double p_d = 0.0;
    bool noise_on_spam = true;
    bool z_stabilizers_first = true;  // measurement order within a round
    uint64_t shots = 1000000;
    uint64_t seed = 0;
    int workers = 1;
};

// E7 -> per-qubit channel -> up to rounds_max full 6-stabilizer rounds
// (Z-stabilizers first), stopping each shot at its first nontrivial
// syndrome or herald; surviving shots decode and measure the data qubit.
SteaneMonitorResult run_steane_monitor(const SteaneParams& params);

// Total-variation similarity over the nontrivial syndrome bins.
double histogram_similarity(const SyndromeHistogram& a, const SyndromeHistogram& b);

// Exact post-selected logical flip rate for uniform depolarizing
// code-capacity noise (4^7 pattern enumeration).
double steane_postselected_flip_exact(double p);

// Sorted (count, syndrome) pairs, largest first.
std::vector<std::pair<uint64_t, int>> top_syndromes(const SyndromeHistogram& hist);

}  // namespace qkdsim
