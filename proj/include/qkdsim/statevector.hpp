#pragma once

#include <complex>
#include <map>
#include <vector>

#include "qkdsim/circuit.hpp"
#include "qkdsim/rng.hpp"
#include "qkdsim/shot.hpp"

namespace qkdsim {

// Dense complex-amplitude state over <=16 qubits. Qubit 0 is the least
// significant bit of the basis-state index (same ordering as the
// Pauli-frame engine's masks).
class QuantumState {
public:
    explicit QuantumState(int n_qubits);

    int n_qubits() const { return n_; }
    const std::vector<std::complex<double>>& amplitudes() const { return amps_; }

    void apply(const Instruction& instr, ShotRng& rng, ShotRecord& record);
    void apply_unitary(const Instruction& instr);
    void apply_pauli_mask(uint64_t x_mask, uint64_t z_mask);
    void collapse(int q, int outcome, double p_selected);

    double prob_one(int q) const;
    double norm_sq() const;

private:
    void apply_1q(int q, const std::complex<double> m[4]);
    int measure_collapse(int q, ShotRng& rng);

    int n_;
    std::vector<std::complex<double>> amps_;
    int herald_cursor_ = 0;
};

// Runs the circuit once: noise tags sample one Pauli/herald realization,
// MeasureZ projects with Born probabilities and renormalizes.
ShotRecord run_shot(const Circuit& circuit, ShotRng& rng);

// Exhaustive Born-rule distribution over the measured bits. The circuit
// must not contain probabilistic noise tags (DeterministicPauli is fine).
std::map<uint64_t, double> exact_distribution(const Circuit& circuit);

}  // namespace qkdsim
