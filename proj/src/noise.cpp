#include "qkdsim/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "qkdsim/circuit.hpp"

namespace qkdsim {

namespace {

void check_prob(double p, const char* what) {
    if (!(p >= 0.0 && p <= 1.0))
        throw std::invalid_argument(std::string(what) + " must be in [0,1]");
}

}  // namespace

void validate_channel(const ChannelSpec& spec, size_t support_size) {
    std::visit([&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BitFlip>) {
            check_prob(c.p, "BitFlip p");
            if (support_size != 1) throw std::invalid_argument("BitFlip acts on one qubit");
        } else if constexpr (std::is_same_v<T, Depolarizing1>) {
            check_prob(c.p, "Depolarizing1 p");
            if (support_size != 1) throw std::invalid_argument("Depolarizing1 acts on one qubit");
        } else if constexpr (std::is_same_v<T, Depolarizing2>) {
            check_prob(c.p, "Depolarizing2 p");
            if (support_size != 2) throw std::invalid_argument("Depolarizing2 acts on two qubits");
        } else if constexpr (std::is_same_v<T, PauliChannel>) {
            check_prob(c.px, "PauliChannel px");
            check_prob(c.py, "PauliChannel py");
            check_prob(c.pz, "PauliChannel pz");
            if (c.px + c.py + c.pz > 1.0 + 1e-12)
                throw std::invalid_argument("PauliChannel probabilities exceed 1");
            if (support_size != 1) throw std::invalid_argument("PauliChannel acts on one qubit");
        } else if constexpr (std::is_same_v<T, TwirledAmplitudeDamping>) {
            check_prob(c.gamma, "amplitude-damping gamma");
            if (support_size != 1) throw std::invalid_argument("TwirledAmplitudeDamping acts on one qubit");
        } else if constexpr (std::is_same_v<T, Dephasing>) {
            check_prob(c.p, "Dephasing p");
            if (support_size != 1) throw std::invalid_argument("Dephasing acts on one qubit");
        } else if constexpr (std::is_same_v<T, HeraldedErase>) {
            check_prob(c.p, "HeraldedErase p");
            if (support_size != 1) throw std::invalid_argument("HeraldedErase acts on one qubit");
        } else if constexpr (std::is_same_v<T, DeterministicPauli>) {
            if (static_cast<size_t>(c.pauli.n) != support_size)
                throw std::invalid_argument("DeterministicPauli arity mismatch");
        } else if constexpr (std::is_same_v<T, PerQubit>) {
            if (c.channels.size() != support_size)
                throw std::invalid_argument("PerQubit arity mismatch");
            for (const ChannelSeq& seq : c.channels)
                for (const ChannelSpec& sub : seq)
                    validate_channel(sub, 1);
        }
    }, spec.v);
}

int herald_slots(const ChannelSpec& spec) {
    return std::visit([](const auto& c) -> int {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, HeraldedErase>) {
            return 1;
        } else if constexpr (std::is_same_v<T, PerQubit>) {
            int total = 0;
            for (const ChannelSeq& seq : c.channels) total += herald_slots(seq);
            return total;
        } else {
            return 0;
        }
    }, spec.v);
}

int herald_slots(const ChannelSeq& seq) {
    int total = 0;
    for (const ChannelSpec& spec : seq) total += herald_slots(spec);
    return total;
}

namespace {

void sample_into(const ChannelSpec& spec, const std::vector<uint8_t>& support,
                 ShotRng& rng, SampledError& out) {
    std::visit([&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, BitFlip>) {
            if (rng.bernoulli(c.p)) out.x ^= 1ull << support[0];
        } else if constexpr (std::is_same_v<T, Depolarizing1>) {
            double u = rng.next_double();
            if (u < c.p) {
                uint64_t m = 1ull << support[0];
                double third = c.p / 3.0;
                if (u < third) out.x ^= m;
                else if (u < 2.0 * third) { out.x ^= m; out.z ^= m; }
                else out.z ^= m;
            }
        } else if constexpr (std::is_same_v<T, Depolarizing2>) {
            double u = rng.next_double();
            if (u < c.p) {
                // one of the 15 nontrivial two-qubit Paulis, uniformly
                int idx = static_cast<int>(u / (c.p / 15.0));
                if (idx > 14) idx = 14;
                int p0 = (idx + 1) & 3, p1 = (idx + 1) >> 2;
                uint64_t m0 = 1ull << support[0], m1 = 1ull << support[1];
                if (p0 == 1 || p0 == 2) out.x ^= m0;
                if (p0 == 2 || p0 == 3) out.z ^= m0;
                if (p1 == 1 || p1 == 2) out.x ^= m1;
                if (p1 == 2 || p1 == 3) out.z ^= m1;
            }
        } else if constexpr (std::is_same_v<T, PauliChannel>) {
            double u = rng.next_double();
            uint64_t m = 1ull << support[0];
            if (u < c.px) out.x ^= m;
            else if (u < c.px + c.py) { out.x ^= m; out.z ^= m; }
            else if (u < c.px + c.py + c.pz) out.z ^= m;
        } else if constexpr (std::is_same_v<T, TwirledAmplitudeDamping>) {
            PauliChannel pc = twirl_amplitude_damping(c.gamma);
            sample_into(ChannelSpec{pc}, support, rng, out);
        } else if constexpr (std::is_same_v<T, Dephasing>) {
            if (rng.bernoulli(c.p)) out.z ^= 1ull << support[0];
        } else if constexpr (std::is_same_v<T, HeraldedErase>) {
            if (rng.bernoulli(c.p)) {
                out.heralds |= 1ull << out.herald_count;
                uint64_t m = 1ull << support[0];
                uint64_t which = rng.next_u64() & 3;  // uniform {I,X,Y,Z}
                if (which == 1 || which == 2) out.x ^= m;
                if (which == 2 || which == 3) out.z ^= m;
            }
            ++out.herald_count;
        } else if constexpr (std::is_same_v<T, DeterministicPauli>) {
            for (size_t i = 0; i < support.size(); ++i) {
                uint64_t m = 1ull << support[i];
                if ((c.pauli.x >> i) & 1) out.x ^= m;
                if ((c.pauli.z >> i) & 1) out.z ^= m;
            }
        } else if constexpr (std::is_same_v<T, PerQubit>) {
            for (size_t i = 0; i < c.channels.size(); ++i) {
                std::vector<uint8_t> sub{support[i]};
                for (const ChannelSpec& s : c.channels[i])
                    sample_into(s, sub, rng, out);
            }
        }
    }, spec.v);
}

}  // namespace

SampledError sample_error(const ChannelSpec& spec,
                          const std::vector<uint8_t>& support, ShotRng& rng) {
    validate_channel(spec, support.size());
    SampledError out;
    sample_into(spec, support, rng, out);
    return out;
}

SampledError sample_error(const ChannelSeq& seq,
                          const std::vector<uint8_t>& support, ShotRng& rng) {
    SampledError out;
    for (const ChannelSpec& spec : seq) {
        validate_channel(spec, support.size());
        sample_into(spec, support, rng, out);
    }
    return out;
}

PauliChannel twirl_amplitude_damping(double gamma) {
    check_prob(gamma, "amplitude-damping gamma");
    double root = std::sqrt(1.0 - gamma);
    return PauliChannel{gamma / 4.0, gamma / 4.0, (2.0 - 2.0 * root - gamma) / 4.0};
}

Circuit attach_circuit_noise(const Circuit& circuit, double p_d, bool include_spam) {
    check_prob(p_d, "circuit noise p_d");
    if (circuit.has_circuit_noise())
        throw std::logic_error("circuit noise already attached");
    Circuit noisy = circuit;
    noisy.mark_circuit_noise();
    for (size_t i = 0; i < noisy.ops().size(); ++i) {
        const Instruction& in = noisy.ops()[i];
        NoiseTag tag;
        tag.from_circuit_noise = true;
        switch (in.op) {
            case Op::Cnot: case Op::Cz:
                tag.seq = {ChannelSpec{Depolarizing2{p_d}}};
                tag.support = {in.q0, in.q1};
                break;
            case Op::X: case Op::Y: case Op::Z:
            case Op::H: case Op::S: case Op::Sdg: case Op::Ry:
                tag.seq = {ChannelSpec{Depolarizing1{p_d}}};
                tag.support = {in.q0};
                break;
            case Op::PrepZ: case Op::MeasureZ:
                if (!include_spam) continue;
                tag.seq = {ChannelSpec{Depolarizing1{p_d}}};
                tag.support = {in.q0};
                break;
            case Op::Reset:
                continue;
        }
        noisy.tag_at(i, std::move(tag));
    }
    return noisy;
}

ChannelSeq compose_channel(std::initializer_list<ChannelSpec> specs) {
    ChannelSeq seq;
    for (const ChannelSpec& s : specs) {
        validate_channel(s, 1);
        seq.push_back(s);
    }
    return seq;
}

}  // namespace qkdsim
