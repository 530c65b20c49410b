#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "qkdsim/pauli.hpp"
#include "qkdsim/rng.hpp"

namespace qkdsim {

class Circuit;

struct BitFlip { double p; };
struct Depolarizing1 { double p; };
struct Depolarizing2 { double p; };
struct PauliChannel { double px, py, pz; };
struct TwirledAmplitudeDamping { double gamma; };
struct Dephasing { double p; };
struct HeraldedErase { double p; };
// Fixed Pauli over the tag's support qubits (support.size() == pauli.n).
struct DeterministicPauli { PauliString pauli; };

struct ChannelSpec;
using ChannelSeq = std::vector<ChannelSpec>;

// Independent per-qubit channels: entry i applies to support qubit i.
struct PerQubit { std::vector<ChannelSeq> channels; };

struct ChannelSpec {
    std::variant<BitFlip, Depolarizing1, Depolarizing2, PauliChannel,
                 TwirledAmplitudeDamping, Dephasing, HeraldedErase,
                 DeterministicPauli, PerQubit> v;
};

// A noise location: `seq` is sampled in order on `support`.
struct NoiseTag {
    ChannelSeq seq;
    std::vector<uint8_t> support;
    bool from_circuit_noise = false;
};

void validate_channel(const ChannelSpec& spec, size_t support_size);

// Number of herald slots one sample of this spec consumes.
int herald_slots(const ChannelSpec& spec);
int herald_slots(const ChannelSeq& seq);

struct SampledError {
    uint64_t x = 0;        // register-level masks
    uint64_t z = 0;
    uint64_t heralds = 0;  // bit i = herald slot i of this tag fired
    int herald_count = 0;
};

// Draws one realization. Masks are register-level (support maps local
// channel qubits onto circuit qubits).
SampledError sample_error(const ChannelSpec& spec,
                          const std::vector<uint8_t>& support, ShotRng& rng);
SampledError sample_error(const ChannelSeq& seq,
                          const std::vector<uint8_t>& support, ShotRng& rng);

PauliChannel twirl_amplitude_damping(double gamma);

// Depolarizing tags after every 1q gate / PrepZ, after every 2q gate and
// before every MeasureZ (the stated default; pass include_spam=false to
// restrict to gates only). Tagging an already-tagged circuit is an error.
Circuit attach_circuit_noise(const Circuit& circuit, double p_d,
                             bool include_spam = true);

ChannelSeq compose_channel(std::initializer_list<ChannelSpec> specs);

}  // namespace qkdsim
