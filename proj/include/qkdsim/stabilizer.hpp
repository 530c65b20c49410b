#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "qkdsim/circuit.hpp"

namespace qkdsim {

// Sign-tracking stabilizer tableau (destabilizer/stabilizer rows) used to
// propagate noiseless Clifford circuits. Measurements report their value
// only when deterministic; random outcomes yield nullopt.
class StabilizerSim {
public:
    explicit StabilizerSim(int n_qubits);

    int n_qubits() const { return n_; }

    void apply_h(int q);
    void apply_s(int q);
    void apply_sdg(int q);
    void apply_x(int q);
    void apply_y(int q);
    void apply_z(int q);
    void apply_cnot(int control, int target);
    void apply_cz(int a, int b);

    // Unitary Clifford instructions only (Ry at multiples of pi/2).
    void apply(const Instruction& instr);

    // nullopt if the outcome is random; the state is not modified then.
    std::optional<int> deterministic_measure_z(int q) const;

    // Projective Z measurement; random outcomes pick `bias` (default 0).
    int measure_z(int q, int bias = 0);

    void reset_z(int q);

private:
    struct Row {
        uint64_t x = 0;
        uint64_t z = 0;
        int sign = 0;  // 0 -> +1, 1 -> -1
    };

    void rowsum(Row& h, const Row& i) const;

    int n_;
    std::vector<Row> rows_;  // [0,n): destabilizers, [n,2n): stabilizers
};

}  // namespace qkdsim
