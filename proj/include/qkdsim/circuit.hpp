#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qkdsim/noise.hpp"
#include "qkdsim/pauli.hpp"

namespace qkdsim {

enum class Op : uint8_t {
    PrepZ, MeasureZ, Reset, X, Y, Z, H, S, Sdg, Ry, Cnot, Cz
};

const char* op_name(Op op);
bool op_is_two_qubit(Op op);
bool op_is_unitary(Op op);

struct Instruction {
    Op op;
    uint8_t q0 = 0;
    uint8_t q1 = 0;
    int16_t bit = -1;      // MeasureZ only
    double angle = 0.0;    // Ry only
    std::vector<NoiseTag> noise;  // fires after the op (before, for MeasureZ)
};

// Ordered instruction list over qubit/bit indices; the common IR for both
// engines. Instances are built once and then shared read-only.
class Circuit {
public:
    Circuit(int n_qubits, int n_bits);

    int n_qubits() const { return n_qubits_; }
    int n_bits() const { return n_bits_; }
    const std::vector<Instruction>& ops() const { return ops_; }
    size_t size() const { return ops_.size(); }

    Circuit& prep_z(int q)  { return push({Op::PrepZ, check_q(q)}); }
    Circuit& reset(int q)   { return push({Op::Reset, check_q(q)}); }
    Circuit& x(int q)       { return push({Op::X, check_q(q)}); }
    Circuit& y(int q)       { return push({Op::Y, check_q(q)}); }
    Circuit& z(int q)       { return push({Op::Z, check_q(q)}); }
    Circuit& h(int q)       { return push({Op::H, check_q(q)}); }
    Circuit& s(int q)       { return push({Op::S, check_q(q)}); }
    Circuit& sdg(int q)     { return push({Op::Sdg, check_q(q)}); }
    Circuit& ry(int q, double angle);
    Circuit& cnot(int control, int target);
    Circuit& cz(int a, int b);
    Circuit& measure_z(int q, int bit);

    // Attaches a noise tag to the most recent instruction.
    Circuit& tag_last(ChannelSeq seq, std::vector<uint8_t> support);
    Circuit& tag_last(const ChannelSpec& spec, std::vector<uint8_t> support);
    void tag_at(size_t index, NoiseTag tag);

    // Appends another circuit's instructions (same qubit/bit indexing).
    Circuit& append(const Circuit& other);

    int herald_slot_count() const { return herald_slots_; }
    bool has_circuit_noise() const { return has_circuit_noise_; }
    void mark_circuit_noise() { has_circuit_noise_ = true; }
    bool has_probabilistic_noise() const;

    // Line-oriented debug dump: `H 0`, `CNOT 0 1`, `RY 0 1.5708`, `MZ 0 -> 0`.
    std::string to_text() const;

private:
    friend Circuit inverted(const Circuit&);
    Circuit& push(Instruction instr);
    uint8_t check_q(int q) const;

    int n_qubits_;
    int n_bits_;
    std::vector<Instruction> ops_;
    std::vector<bool> bit_used_;
    int herald_slots_ = 0;
    bool has_circuit_noise_ = false;
};

// True iff every Ry angle is a multiple of pi/2 in {0, +-pi/2, +-pi}
// within 1e-12. Dispatch: QEC circuits are Clifford, cloner circuits not.
bool is_clifford(const Circuit& circuit);
bool instruction_is_clifford(const Instruction& instr);

// U P U^dag up to phase for a unitary Clifford instruction.
PauliString conjugate_pauli(const Instruction& instr, const PauliString& p);

// Conjugates through every instruction in order (unitary circuits only).
PauliString conjugate_through(const Circuit& circuit, PauliString p);

// Reversed circuit with each gate inverted; noise tags are not carried.
Circuit inverted(const Circuit& circuit);

}  // namespace qkdsim
