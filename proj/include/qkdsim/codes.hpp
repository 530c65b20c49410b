#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qkdsim/circuit.hpp"
#include "qkdsim/pauli.hpp"

namespace qkdsim {

struct StabilizerCode {
    std::string name;
    int n = 0, k = 0, d = 0;
    // Steane stabilizers are listed in measurement/syndrome order
    // (S1Z S2Z S3Z | S1X S2X S3X); the [[4,2,2]] code lists (g_X, g_Z).
    std::vector<PauliString> stabilizers;
    std::vector<PauliString> logical_x;
    std::vector<PauliString> logical_z;

    int t() const { return (d - 1) / 2; }
};

StabilizerCode code_422();
StabilizerCode code_steane();

// Config-facing lookup: "422" or "steane".
StabilizerCode code_by_name(const std::string& name);

// Unitary encoder E4 / E7 acting on qubits [0, n). E4|0000> = |00bar>,
// E7|0^7> = |0bar>; input-qubit Paulis map to logical representatives
// modulo the stabilizer group.
Circuit encoder_circuit(const StabilizerCode& code);

// Single-ancilla measurement of one X- or Z-type stabilizer: ancilla in
// |+>, controlled-P fan-out, H, MeasureZ, Reset.
void append_stabilizer_block(Circuit& circuit, const PauliString& stabilizer,
                             int ancilla, int result_bit);

// Table-driven Steane decoder: 3-bit syndrome (printed order, msb first)
// to the corrected qubit index, or -1 for the trivial syndrome.
int lut_decode(int syndrome3);

// Syndrome bits of a Pauli frame: bit i (msb-first) set iff the frame
// anticommutes with stabilizers[i].
uint64_t syndrome_bits(const StabilizerCode& code, const PauliString& frame);

// Frame membership in the group generated by `generators` (GF(2) solve).
bool in_pauli_group(const PauliString& p, const std::vector<PauliString>& generators);

std::string syndrome_string(uint64_t value, int bits);

}  // namespace qkdsim
