#include "qkdsim/pauliframe.hpp"

#include <cmath>
#include <stdexcept>

#include "qkdsim/stabilizer.hpp"

namespace qkdsim {

IdealTrace precompute_ideal(const Circuit& circuit) {
    if (!is_clifford(circuit))
        throw std::invalid_argument("frame engine requires a Clifford circuit");
    IdealTrace trace;
    StabilizerSim sim(circuit.n_qubits());
    for (const Instruction& in : circuit.ops()) {
        switch (in.op) {
            case Op::MeasureZ: {
                auto det = sim.deterministic_measure_z(in.q0);
                if (!det)
                    throw std::invalid_argument(
                        "frame engine requires deterministic ideal measurements");
                trace.ideal_bit.push_back(static_cast<uint8_t>(*det));
                trace.measured_qubit.push_back(in.q0);
                trace.result_bit.push_back(in.bit);
                if (*det) trace.ideal_bits_mask |= 1ull << in.bit;
                sim.measure_z(in.q0);
                break;
            }
            case Op::PrepZ: case Op::Reset:
                sim.reset_z(in.q0);
                break;
            default:
                sim.apply(in);
                break;
        }
    }
    return trace;
}

namespace {

// In-place phase-free conjugation of the frame through one instruction.
inline void conjugate_frame(const Instruction& in, uint64_t& x, uint64_t& z) {
    uint64_t m0 = 1ull << in.q0;
    switch (in.op) {
        case Op::H: {
            uint64_t xb = x & m0, zb = z & m0;
            x = (x & ~m0) | (zb ? m0 : 0);
            z = (z & ~m0) | (xb ? m0 : 0);
            break;
        }
        case Op::S: case Op::Sdg:
            if (x & m0) z ^= m0;
            break;
        case Op::Ry: {
            double a = in.angle;
            bool quarter = std::abs(std::abs(a) - M_PI / 2) <= 1e-12;
            if (quarter) {
                uint64_t xb = x & m0, zb = z & m0;
                x = (x & ~m0) | (zb ? m0 : 0);
                z = (z & ~m0) | (xb ? m0 : 0);
            }
            break;
        }
        case Op::Cnot: {
            uint64_t m1 = 1ull << in.q1;
            if (x & m0) x ^= m1;
            if (z & m1) z ^= m0;
            break;
        }
        case Op::Cz: {
            uint64_t m1 = 1ull << in.q1;
            if (x & m1) z ^= m0;
            if (x & m0) z ^= m1;
            break;
        }
        default:
            break;  // X/Y/Z commute up to phase
    }
}

}  // namespace

void frame_apply(const Circuit& circuit, size_t index, const IdealTrace& trace,
                 FrameState& st, ShotRng& rng) {
    const Instruction& in = circuit.ops()[index];
    auto fire_tags = [&]() {
        for (const NoiseTag& tag : in.noise) {
            SampledError err = sample_error(tag.seq, tag.support, rng);
            st.x ^= err.x;
            st.z ^= err.z;
            st.heralds |= err.heralds << st.herald_cursor;
            st.herald_cursor += err.herald_count;
        }
    };
    switch (in.op) {
        case Op::MeasureZ: {
            fire_tags();
            int k = st.meas_cursor++;
            int bit = trace.ideal_bit[k] ^ ((st.x >> in.q0) & 1);
            if (bit) st.bits |= 1ull << in.bit;
            break;
        }
        case Op::PrepZ: case Op::Reset: {
            uint64_t m = 1ull << in.q0;
            st.x &= ~m;
            st.z &= ~m;
            fire_tags();
            break;
        }
        default:
            conjugate_frame(in, st.x, st.z);
            fire_tags();
            break;
    }
}

ShotRecord run_frame_shot(const Circuit& circuit, const IdealTrace& trace,
                          ShotRng& rng) {
    FrameState st;
    for (size_t i = 0; i < circuit.size(); ++i)
        frame_apply(circuit, i, trace, st, rng);
    return ShotRecord{st.bits, st.heralds};
}

std::vector<ShotRecord> sample_batch(const Circuit& circuit, const IdealTrace& trace,
                                     uint64_t shots, uint64_t master_seed) {
    std::vector<ShotRecord> out;
    out.reserve(shots);
    for (uint64_t k = 0; k < shots; ++k) {
        ShotRng rng(master_seed, k);
        out.push_back(run_frame_shot(circuit, trace, rng));
    }
    return out;
}

}  // namespace qkdsim
