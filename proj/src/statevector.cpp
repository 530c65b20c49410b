#include "qkdsim/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdsim {

namespace {

constexpr double kNormTol = 1e-8;
constexpr double kBranchFloor = 1e-15;

using cd = std::complex<double>;

}  // namespace

QuantumState::QuantumState(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 16)
        throw std::invalid_argument("statevector engine supports 1..16 qubits");
    amps_.assign(1ull << n_qubits, cd(0.0, 0.0));
    amps_[0] = cd(1.0, 0.0);
}

double QuantumState::norm_sq() const {
    double s = 0.0;
    for (const cd& a : amps_) s += std::norm(a);
    return s;
}

double QuantumState::prob_one(int q) const {
    uint64_t m = 1ull << q;
    double p = 0.0;
    for (uint64_t i = 0; i < amps_.size(); ++i)
        if (i & m) p += std::norm(amps_[i]);
    return p;
}

void QuantumState::apply_1q(int q, const cd m[4]) {
    uint64_t bit = 1ull << q;
    for (uint64_t i = 0; i < amps_.size(); ++i) {
        if (i & bit) continue;
        cd a0 = amps_[i], a1 = amps_[i | bit];
        amps_[i] = m[0] * a0 + m[1] * a1;
        amps_[i | bit] = m[2] * a0 + m[3] * a1;
    }
}

void QuantumState::apply_pauli_mask(uint64_t x_mask, uint64_t z_mask) {
    if (x_mask == 0 && z_mask == 0) return;
    for (uint64_t i = 0; i < amps_.size(); ++i)
        if (std::popcount(i & z_mask) & 1) amps_[i] = -amps_[i];
    if (x_mask != 0) {
        std::vector<cd> next(amps_.size());
        for (uint64_t i = 0; i < amps_.size(); ++i) next[i ^ x_mask] = amps_[i];
        amps_ = std::move(next);
    }
}

void QuantumState::collapse(int q, int outcome, double p_sel) {
    uint64_t m = 1ull << q;
    double scale = 1.0 / std::sqrt(p_sel);
    for (uint64_t i = 0; i < amps_.size(); ++i) {
        bool one = (i & m) != 0;
        if (one == (outcome != 0)) amps_[i] *= scale;
        else amps_[i] = cd(0.0, 0.0);
    }
}

void QuantumState::apply_unitary(const Instruction& instr) {
    static const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    switch (instr.op) {
        case Op::X: {
            const cd m[4] = {0, 1, 1, 0};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::Y: {
            const cd m[4] = {0, cd(0, -1), cd(0, 1), 0};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::Z: {
            const cd m[4] = {1, 0, 0, -1};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::H: {
            const cd m[4] = {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::S: {
            const cd m[4] = {1, 0, 0, cd(0, 1)};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::Sdg: {
            const cd m[4] = {1, 0, 0, cd(0, -1)};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::Ry: {
            double c = std::cos(instr.angle / 2.0), s = std::sin(instr.angle / 2.0);
            const cd m[4] = {c, -s, s, c};
            apply_1q(instr.q0, m);
            break;
        }
        case Op::Cnot: {
            uint64_t cm = 1ull << instr.q0, tm = 1ull << instr.q1;
            for (uint64_t i = 0; i < amps_.size(); ++i)
                if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
            break;
        }
        case Op::Cz: {
            uint64_t am = 1ull << instr.q0, bm = 1ull << instr.q1;
            for (uint64_t i = 0; i < amps_.size(); ++i)
                if ((i & am) && (i & bm)) amps_[i] = -amps_[i];
            break;
        }
        default:
            throw std::invalid_argument("apply_unitary on non-unitary instruction");
    }
}

int QuantumState::measure_collapse(int q, ShotRng& rng) {
    double p1 = prob_one(q);
    int outcome = rng.next_double() < p1 ? 1 : 0;
    double p_sel = outcome ? p1 : 1.0 - p1;
    if (p_sel < kBranchFloor) {
        outcome ^= 1;  // degenerate branch; take the other one
        p_sel = outcome ? p1 : 1.0 - p1;
    }
    collapse(q, outcome, p_sel);
    return outcome;
}

void QuantumState::apply(const Instruction& instr, ShotRng& rng, ShotRecord& record) {
    // MeasureZ tags fire before the measurement, others after their op.
    auto fire_tags = [&]() {
        for (const NoiseTag& tag : instr.noise) {
            SampledError err = sample_error(tag.seq, tag.support, rng);
            apply_pauli_mask(err.x, err.z);
            record.heralds |= err.heralds << herald_cursor_;
            herald_cursor_ += err.herald_count;
        }
    };

    switch (instr.op) {
        case Op::MeasureZ: {
            fire_tags();
            int outcome = measure_collapse(instr.q0, rng);
            if (outcome) record.bits |= 1ull << instr.bit;
            break;
        }
        case Op::PrepZ: case Op::Reset: {
            int outcome = measure_collapse(instr.q0, rng);
            if (outcome) {
                Instruction flip{Op::X, instr.q0};
                apply_unitary(flip);
            }
            fire_tags();
            break;
        }
        default: {
            apply_unitary(instr);
            fire_tags();
            break;
        }
    }
    double drift = std::abs(norm_sq() - 1.0);
    if (drift > kNormTol)
        throw std::runtime_error("statevector norm drift exceeds tolerance");
}

ShotRecord run_shot(const Circuit& circuit, ShotRng& rng) {
    QuantumState state(circuit.n_qubits());
    ShotRecord record;
    for (const Instruction& in : circuit.ops())
        state.apply(in, rng, record);
    return record;
}

namespace {

// Register-level masks of one deterministic tag.
std::pair<uint64_t, uint64_t> tag_masks(const NoiseTag& tag) {
    uint64_t x = 0, z = 0;
    for (const ChannelSpec& spec : tag.seq) {
        const auto* det = std::get_if<DeterministicPauli>(&spec.v);
        if (det == nullptr)
            throw std::invalid_argument("exact_distribution requires a noise-free circuit");
        for (size_t k = 0; k < tag.support.size(); ++k) {
            if ((det->pauli.x >> k) & 1) x ^= 1ull << tag.support[k];
            if ((det->pauli.z >> k) & 1) z ^= 1ull << tag.support[k];
        }
    }
    return {x, z};
}

// Depth-first branch expansion over measurement/reset outcomes.
void expand(const Circuit& circuit, size_t at, QuantumState state, double weight,
            uint64_t bits, std::map<uint64_t, double>& dist) {
    const auto& ops = circuit.ops();
    for (size_t i = at; i < ops.size(); ++i) {
        const Instruction& in = ops[i];
        if (in.op == Op::MeasureZ || in.op == Op::PrepZ || in.op == Op::Reset) {
            if (in.op == Op::MeasureZ)
                for (const NoiseTag& tag : in.noise) {
                    auto [x, z] = tag_masks(tag);
                    state.apply_pauli_mask(x, z);
                }
            double p1 = state.prob_one(in.q0);
            for (int outcome = 0; outcome < 2; ++outcome) {
                double p_sel = outcome ? p1 : 1.0 - p1;
                if (p_sel < 1e-18) continue;
                QuantumState branch = state;
                branch.collapse(in.q0, outcome, p_sel);
                uint64_t new_bits = bits;
                if (in.op == Op::MeasureZ) {
                    if (outcome) new_bits |= 1ull << in.bit;
                } else {
                    if (outcome) {
                        Instruction flip{Op::X, in.q0};
                        branch.apply_unitary(flip);
                    }
                    for (const NoiseTag& tag : in.noise) {
                        auto [x, z] = tag_masks(tag);
                        branch.apply_pauli_mask(x, z);
                    }
                }
                expand(circuit, i + 1, std::move(branch), weight * p_sel, new_bits, dist);
            }
            return;
        }
        state.apply_unitary(in);
        for (const NoiseTag& tag : in.noise) {
            auto [x, z] = tag_masks(tag);
            state.apply_pauli_mask(x, z);
        }
    }
    dist[bits] += weight;
}

}  // namespace

std::map<uint64_t, double> exact_distribution(const Circuit& circuit) {
    if (circuit.has_probabilistic_noise())
        throw std::invalid_argument("exact_distribution requires a noise-free circuit");
    std::map<uint64_t, double> dist;
    QuantumState state(circuit.n_qubits());
    expand(circuit, 0, std::move(state), 1.0, 0, dist);
    return dist;
}

}  // namespace qkdsim
