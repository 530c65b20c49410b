#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "qkdsim/attacks.hpp"
#include "qkdsim/noise.hpp"

namespace qkdsim {

enum class Basis : uint8_t { Z = 0, X = 1 };

struct RoundRecord {
    uint8_t x_a = 0;
    Basis b_a = Basis::Z;
    Basis b_b = Basis::Z;
    uint8_t x_b = 0;
    int8_t x_e = -1;   // -1 when no attack configured
    int8_t b_e = -1;
    uint8_t herald = 0;
    int8_t e_leak = -1;  // set by the leakage side channel
};

struct CorrelationEstimate {
    double value = 0.0;
    uint64_t n_sifted = 0;
    double std_err = 0.0;
};

enum class Pair : uint8_t { AB, AE, BE };

struct QkdParams {
    uint64_t rounds = 0;
    std::optional<ClonerSpec> attack;
    std::optional<ChannelSeq> channel_noise;  // on the transmitted qubit
    double p_d = 0.0;                         // circuit-level depolarizing
    uint64_t seed = 0;
    int workers = 1;
};

std::vector<RoundRecord> run_bb84(const QkdParams& params);
std::vector<RoundRecord> run_bbm92(const QkdParams& params);

// One BB84 round as a circuit: data qubit 0 (bit 0 = x_B), Eve's blank
// qubit 1 (bit 1 = x_E when an attack is present). Channel noise acts
// after Alice's preparation, before interception.
Circuit build_bb84_round(int x_a, Basis b_a, Basis b_b,
                         const std::optional<ClonerSpec>& attack,
                         const std::optional<ChannelSeq>& channel, double p_d);

// One BBM92 round: qubit 0 to A (bit 0), qubit 1 to B (bit 1), Eve's
// blank qubit 2 (bit 2); the cloner intercepts the B-bound qubit.
Circuit build_bbm92_round(Basis b_a, Basis b_b,
                          const std::optional<ClonerSpec>& attack,
                          const std::optional<ChannelSeq>& channel, double p_d);

std::vector<RoundRecord> sift(const std::vector<RoundRecord>& records);

CorrelationEstimate correlation(const std::vector<RoundRecord>& sifted, Pair pair,
                                std::optional<Basis> basis_filter = std::nullopt);

struct QberResult {
    double qber = 0.0;
    bool abort = false;
};

QberResult qber_abort_check(const std::vector<RoundRecord>& sifted,
                            double threshold = 0.145);

// Columns: round,x_A,b_A,b_B,x_B,b_E,x_E,herald
void write_records_csv(std::ostream& os, const std::vector<RoundRecord>& records);

// Noiseless-oracle correlations of a full protocol round at fixed bases;
// uses exact_distribution, no sampling.
struct OracleCorrelations {
    double c_ab = 0.0;
    double c_ae = 0.0;
    double c_be = 0.0;
};

OracleCorrelations oracle_correlations_bb84(const std::optional<ClonerSpec>& attack,
                                            Basis basis,
                                            const std::optional<ChannelSeq>& channel = std::nullopt);
OracleCorrelations oracle_correlations_bbm92(const std::optional<ClonerSpec>& attack,
                                             Basis basis);

}  // namespace qkdsim
