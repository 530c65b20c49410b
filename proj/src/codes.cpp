#include "qkdsim/codes.hpp"

#include <bit>
#include <stdexcept>

namespace qkdsim {

StabilizerCode code_422() {
    StabilizerCode code;
    code.name = "422";
    code.n = 4; code.k = 2; code.d = 2;
    code.stabilizers = {PauliString::from_str("XXXX"), PauliString::from_str("ZZZZ")};
    code.logical_x = {PauliString::from_str("XXII"), PauliString::from_str("IXIX")};
    code.logical_z = {PauliString::from_str("ZIZI"), PauliString::from_str("IIZZ")};
    return code;
}

StabilizerCode code_steane() {
    StabilizerCode code;
    code.name = "steane";
    code.n = 7; code.k = 1; code.d = 3;
    auto z_on = [](std::initializer_list<int> qs) {
        PauliString p(7);
        for (int q : qs) p.set(q, 'Z');
        return p;
    };
    auto x_on = [](std::initializer_list<int> qs) {
        PauliString p(7);
        for (int q : qs) p.set(q, 'X');
        return p;
    };
    code.stabilizers = {
        z_on({1, 2, 4, 5}), z_on({0, 2, 4, 6}), z_on({3, 4, 5, 6}),  // S1Z S2Z S3Z
        x_on({1, 2, 4, 5}), x_on({0, 2, 4, 6}), x_on({3, 4, 5, 6}),  // S1X S2X S3X
    };
    code.logical_x = {x_on({0, 1, 2})};
    code.logical_z = {z_on({0, 3, 6})};
    return code;
}

StabilizerCode code_by_name(const std::string& name) {
    if (name == "422") return code_422();
    if (name == "steane") return code_steane();
    throw std::invalid_argument("unknown code: " + name);
}

Circuit encoder_circuit(const StabilizerCode& code) {
    if (code.name == "422") {
        // Z2 propagates to g_X, Z3 to g_Z; X0/Z0 and X1/Z1 become
        // representatives of the two logical pairs.
        Circuit e(4, 0);
        e.cnot(1, 3).cnot(0, 1).h(2).cnot(2, 0).cnot(2, 1).cnot(2, 3);
        return e;
    }
    if (code.name == "steane") {
        // Logical fan-out from qubit 0, then one |+>-seeded fan-out per
        // X generator (seeds 5, 6, 3 are |0> at their H by construction).
        Circuit e(7, 0);
        e.cnot(0, 1).cnot(0, 2);
        e.h(5).cnot(5, 1).cnot(5, 2).cnot(5, 4);
        e.h(6).cnot(6, 0).cnot(6, 2).cnot(6, 4);
        e.h(3).cnot(3, 4).cnot(3, 5).cnot(3, 6);
        return e;
    }
    throw std::invalid_argument("unknown code: " + code.name);
}

void append_stabilizer_block(Circuit& circuit, const PauliString& stabilizer,
                             int ancilla, int result_bit) {
    bool x_type = stabilizer.z == 0 && stabilizer.x != 0;
    bool z_type = stabilizer.x == 0 && stabilizer.z != 0;
    if (!x_type && !z_type)
        throw std::invalid_argument("stabilizer block requires pure X- or Z-type");
    circuit.prep_z(ancilla);
    circuit.h(ancilla);
    uint64_t support = x_type ? stabilizer.x : stabilizer.z;
    for (int q = 0; q < stabilizer.n; ++q) {
        if (!((support >> q) & 1)) continue;
        if (x_type) circuit.cnot(ancilla, q);
        else circuit.cz(ancilla, q);
    }
    circuit.h(ancilla);
    circuit.measure_z(ancilla, result_bit);
    circuit.reset(ancilla);
}

int lut_decode(int syndrome3) {
    static constexpr std::array<int, 8> table = {-1, 3, 0, 6, 1, 5, 2, 4};
    if (syndrome3 < 0 || syndrome3 > 7)
        throw std::out_of_range("syndrome must be 3 bits");
    return table[syndrome3];
}

uint64_t syndrome_bits(const StabilizerCode& code, const PauliString& frame) {
    uint64_t value = 0;
    int m = static_cast<int>(code.stabilizers.size());
    for (int i = 0; i < m; ++i)
        if (frame.anticommutes_with(code.stabilizers[i]))
            value |= 1ull << (m - 1 - i);
    return value;
}

bool in_pauli_group(const PauliString& p, const std::vector<PauliString>& generators) {
    // GF(2) span test over stacked (x|z) bit vectors.
    using Vec = std::pair<uint64_t, uint64_t>;
    auto lead = [](const Vec& v) -> int {
        if (v.first) return 64 + (63 - std::countl_zero(v.first));
        if (v.second) return 63 - std::countl_zero(v.second);
        return -1;
    };
    auto has_bit = [](const Vec& v, int bit) {
        return bit >= 64 ? ((v.first >> (bit - 64)) & 1) : ((v.second >> bit) & 1);
    };
    std::vector<Vec> basis;
    auto reduce = [&](Vec v) {
        for (const Vec& b : basis)
            if (has_bit(v, lead(b))) { v.first ^= b.first; v.second ^= b.second; }
        return v;
    };
    for (const PauliString& g : generators) {
        Vec v = reduce({g.x, g.z});
        if (v.first || v.second) basis.push_back(v);
    }
    Vec t = reduce({p.x, p.z});
    return t.first == 0 && t.second == 0;
}

std::string syndrome_string(uint64_t value, int bits) {
    std::string s(bits, '0');
    for (int i = 0; i < bits; ++i)
        if ((value >> (bits - 1 - i)) & 1) s[i] = '1';
    return s;
}

}  // namespace qkdsim
