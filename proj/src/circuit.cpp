#include "qkdsim/circuit.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace qkdsim {

const char* op_name(Op op) {
    switch (op) {
        case Op::PrepZ: return "PREPZ";
        case Op::MeasureZ: return "MZ";
        case Op::Reset: return "RESET";
        case Op::X: return "X";
        case Op::Y: return "Y";
        case Op::Z: return "Z";
        case Op::H: return "H";
        case Op::S: return "S";
        case Op::Sdg: return "SDG";
        case Op::Ry: return "RY";
        case Op::Cnot: return "CNOT";
        case Op::Cz: return "CZ";
    }
    return "?";
}

bool op_is_two_qubit(Op op) { return op == Op::Cnot || op == Op::Cz; }

bool op_is_unitary(Op op) {
    return op != Op::PrepZ && op != Op::MeasureZ && op != Op::Reset;
}

Circuit::Circuit(int n_qubits, int n_bits)
    : n_qubits_(n_qubits), n_bits_(n_bits), bit_used_(n_bits > 0 ? n_bits : 0, false) {
    if (n_qubits < 1 || n_qubits > 64)
        throw std::invalid_argument("circuit supports 1..64 qubits");
    if (n_bits < 0 || n_bits > 64)
        throw std::invalid_argument("circuit supports 0..64 classical bits");
}

uint8_t Circuit::check_q(int q) const {
    if (q < 0 || q >= n_qubits_)
        throw std::out_of_range("qubit index out of range");
    return static_cast<uint8_t>(q);
}

Circuit& Circuit::push(Instruction instr) {
    ops_.push_back(std::move(instr));
    return *this;
}

Circuit& Circuit::ry(int q, double angle) {
    if (!std::isfinite(angle)) throw std::invalid_argument("Ry angle must be finite");
    Instruction in{Op::Ry, check_q(q)};
    in.angle = angle;
    return push(std::move(in));
}

Circuit& Circuit::cnot(int control, int target) {
    if (control == target) throw std::invalid_argument("CNOT targets must be distinct");
    return push({Op::Cnot, check_q(control), check_q(target)});
}

Circuit& Circuit::cz(int a, int b) {
    if (a == b) throw std::invalid_argument("CZ targets must be distinct");
    return push({Op::Cz, check_q(a), check_q(b)});
}

Circuit& Circuit::measure_z(int q, int bit) {
    if (bit < 0 || bit >= n_bits_)
        throw std::out_of_range("result bit out of range");
    if (bit_used_[bit])
        throw std::invalid_argument("result bit assigned twice");
    bit_used_[bit] = true;
    Instruction in{Op::MeasureZ, check_q(q)};
    in.bit = static_cast<int16_t>(bit);
    return push(std::move(in));
}

Circuit& Circuit::tag_last(ChannelSeq seq, std::vector<uint8_t> support) {
    if (ops_.empty()) throw std::logic_error("no instruction to tag");
    NoiseTag tag{std::move(seq), std::move(support)};
    tag_at(ops_.size() - 1, std::move(tag));
    return *this;
}

Circuit& Circuit::tag_last(const ChannelSpec& spec, std::vector<uint8_t> support) {
    return tag_last(ChannelSeq{spec}, std::move(support));
}

void Circuit::tag_at(size_t index, NoiseTag tag) {
    if (index >= ops_.size()) throw std::out_of_range("tag index out of range");
    for (uint8_t q : tag.support)
        if (q >= n_qubits_) throw std::out_of_range("tag support out of range");
    for (const ChannelSpec& spec : tag.seq) {
        validate_channel(spec, tag.support.size());
        herald_slots_ += herald_slots(spec);
    }
    ops_[index].noise.push_back(std::move(tag));
}

Circuit& Circuit::append(const Circuit& other) {
    if (other.n_qubits_ > n_qubits_ || other.n_bits_ > n_bits_)
        throw std::invalid_argument("appended circuit does not fit");
    for (const Instruction& in : other.ops_) {
        if (in.op == Op::MeasureZ) {
            measure_z(in.q0, in.bit);
            ops_.back().noise = in.noise;
        } else {
            ops_.push_back(in);
        }
    }
    herald_slots_ += other.herald_slots_;
    return *this;
}

bool Circuit::has_probabilistic_noise() const {
    for (const Instruction& in : ops_)
        for (const NoiseTag& tag : in.noise)
            for (const ChannelSpec& spec : tag.seq)
                if (!std::holds_alternative<DeterministicPauli>(spec.v))
                    return true;
    return false;
}

std::string Circuit::to_text() const {
    std::ostringstream ss;
    for (const Instruction& in : ops_) {
        ss << op_name(in.op) << ' ' << int(in.q0);
        if (op_is_two_qubit(in.op)) ss << ' ' << int(in.q1);
        if (in.op == Op::Ry) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%.6g", in.angle);
            ss << ' ' << buf;
        }
        if (in.op == Op::MeasureZ) ss << " -> " << in.bit;
        ss << '\n';
    }
    return ss.str();
}

namespace {

constexpr double kCliffordTol = 1e-12;

// Returns the multiple k of pi/2 in {-2..2}, or 99 if none matches.
int ry_quarter_turns(double angle) {
    for (int k = -2; k <= 2; ++k)
        if (std::abs(angle - k * (M_PI / 2.0)) <= kCliffordTol) return k;
    return 99;
}

}  // namespace

bool instruction_is_clifford(const Instruction& instr) {
    if (instr.op != Op::Ry) return true;
    return ry_quarter_turns(instr.angle) != 99;
}

bool is_clifford(const Circuit& circuit) {
    for (const Instruction& in : circuit.ops())
        if (!instruction_is_clifford(in)) return false;
    return true;
}

PauliString conjugate_pauli(const Instruction& instr, const PauliString& p) {
    if (!op_is_unitary(instr.op))
        throw std::invalid_argument("conjugation through non-unitary instruction");
    if (!instruction_is_clifford(instr))
        throw std::invalid_argument("conjugation through non-Clifford instruction");
    PauliString r = p;
    uint64_t m0 = 1ull << instr.q0;
    uint64_t m1 = 1ull << instr.q1;
    auto swap_xz = [&](uint64_t m) {
        uint64_t xb = r.x & m, zb = r.z & m;
        r.x = (r.x & ~m) | (zb ? m : 0);
        r.z = (r.z & ~m) | (xb ? m : 0);
    };
    switch (instr.op) {
        case Op::X: case Op::Y: case Op::Z:
            break;  // Pauli conjugation is identity up to phase
        case Op::H:
            swap_xz(m0);
            break;
        case Op::S: case Op::Sdg:
            if (r.x & m0) r.z ^= m0;
            break;
        case Op::Ry: {
            int k = ry_quarter_turns(instr.angle);
            if (k == 1 || k == -1) swap_xz(m0);  // X <-> Z, Y -> Y
            // k = 0 or +-2: identity up to phase
            break;
        }
        case Op::Cnot:
            if (r.x & m0) r.x ^= m1;
            if (r.z & m1) r.z ^= m0;
            break;
        case Op::Cz:
            if (r.x & m1) r.z ^= m0;
            if (r.x & m0) r.z ^= m1;
            break;
        default:
            break;
    }
    return r;
}

PauliString conjugate_through(const Circuit& circuit, PauliString p) {
    for (const Instruction& in : circuit.ops())
        p = conjugate_pauli(in, p);
    return p;
}

Circuit inverted(const Circuit& circuit) {
    Circuit inv(circuit.n_qubits(), circuit.n_bits());
    const auto& ops = circuit.ops();
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        Instruction in = *it;
        if (!op_is_unitary(in.op))
            throw std::invalid_argument("cannot invert non-unitary circuit");
        in.noise.clear();
        if (in.op == Op::S) in.op = Op::Sdg;
        else if (in.op == Op::Sdg) in.op = Op::S;
        else if (in.op == Op::Ry) in.angle = -in.angle;
        inv.ops_.push_back(std::move(in));
    }
    return inv;
}

}  // namespace qkdsim
