#include "qkdsim/stabilizer.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace qkdsim {

StabilizerSim::StabilizerSim(int n_qubits) : n_(n_qubits) {
    if (n_qubits < 1 || n_qubits > 64)
        throw std::invalid_argument("stabilizer sim supports 1..64 qubits");
    rows_.resize(2 * n_);
    for (int i = 0; i < n_; ++i) {
        rows_[i].x = 1ull << i;        // destabilizer X_i
        rows_[n_ + i].z = 1ull << i;   // stabilizer Z_i
    }
}

// Phase exponent of g(x1,z1,x2,z2) summed over qubits, standard CHP rowsum.
void StabilizerSim::rowsum(Row& h, const Row& i) const {
    int phase = 2 * h.sign + 2 * i.sign;
    uint64_t support = i.x | i.z;
    while (support) {
        int q = std::countr_zero(support);
        support &= support - 1;
        uint64_t m = 1ull << q;
        int x1 = (i.x & m) ? 1 : 0, z1 = (i.z & m) ? 1 : 0;
        int x2 = (h.x & m) ? 1 : 0, z2 = (h.z & m) ? 1 : 0;
        if (x1 && z1) phase += z2 - x2;                 // i has Y
        else if (x1) phase += z2 * (2 * x2 - 1);        // i has X
        else phase += x2 * (1 - 2 * z2);                // i has Z
    }
    h.x ^= i.x;
    h.z ^= i.z;
    h.sign = ((phase % 4) + 4) % 4 == 2 ? 1 : 0;
}

void StabilizerSim::apply_h(int q) {
    uint64_t m = 1ull << q;
    for (Row& r : rows_) {
        if ((r.x & m) && (r.z & m)) r.sign ^= 1;
        uint64_t xb = r.x & m, zb = r.z & m;
        r.x = (r.x & ~m) | (zb ? m : 0);
        r.z = (r.z & ~m) | (xb ? m : 0);
    }
}

void StabilizerSim::apply_s(int q) {
    uint64_t m = 1ull << q;
    for (Row& r : rows_) {
        if ((r.x & m) && (r.z & m)) r.sign ^= 1;
        if (r.x & m) r.z ^= m;
    }
}

void StabilizerSim::apply_sdg(int q) {
    apply_s(q);
    apply_s(q);
    apply_s(q);
}

void StabilizerSim::apply_x(int q) {
    uint64_t m = 1ull << q;
    for (Row& r : rows_)
        if (r.z & m) r.sign ^= 1;
}

void StabilizerSim::apply_z(int q) {
    uint64_t m = 1ull << q;
    for (Row& r : rows_)
        if (r.x & m) r.sign ^= 1;
}

void StabilizerSim::apply_y(int q) {
    uint64_t m = 1ull << q;
    for (Row& r : rows_)
        if (((r.x & m) != 0) != ((r.z & m) != 0)) r.sign ^= 1;
}

void StabilizerSim::apply_cnot(int control, int target) {
    uint64_t cm = 1ull << control, tm = 1ull << target;
    for (Row& r : rows_) {
        int xc = (r.x & cm) ? 1 : 0, zc = (r.z & cm) ? 1 : 0;
        int xt = (r.x & tm) ? 1 : 0, zt = (r.z & tm) ? 1 : 0;
        if (xc && zt && (xt ^ zc ^ 1)) r.sign ^= 1;
        if (xc) r.x ^= tm;
        if (zt) r.z ^= cm;
    }
}

void StabilizerSim::apply_cz(int a, int b) {
    apply_h(b);
    apply_cnot(a, b);
    apply_h(b);
}

void StabilizerSim::apply(const Instruction& instr) {
    switch (instr.op) {
        case Op::X: apply_x(instr.q0); break;
        case Op::Y: apply_y(instr.q0); break;
        case Op::Z: apply_z(instr.q0); break;
        case Op::H: apply_h(instr.q0); break;
        case Op::S: apply_s(instr.q0); break;
        case Op::Sdg: apply_sdg(instr.q0); break;
        case Op::Cnot: apply_cnot(instr.q0, instr.q1); break;
        case Op::Cz: apply_cz(instr.q0, instr.q1); break;
        case Op::Ry: {
            double a = instr.angle;
            auto near = [&](double v) { return std::abs(a - v) <= 1e-12; };
            if (near(0.0)) break;
            if (near(M_PI / 2)) { apply_z(instr.q0); apply_h(instr.q0); break; }   // Ry(pi/2) = H.Z
            if (near(-M_PI / 2)) { apply_h(instr.q0); apply_z(instr.q0); break; }  // Ry(-pi/2) = Z.H
            if (near(M_PI) || near(-M_PI)) { apply_z(instr.q0); apply_x(instr.q0); break; }  // +-XZ
            throw std::invalid_argument("non-Clifford Ry in stabilizer sim");
        }
        default:
            throw std::invalid_argument("non-unitary instruction in stabilizer apply");
    }
}

std::optional<int> StabilizerSim::deterministic_measure_z(int q) const {
    uint64_t m = 1ull << q;
    for (int i = n_; i < 2 * n_; ++i)
        if (rows_[i].x & m) return std::nullopt;
    Row scratch;  // identity, +1
    for (int i = 0; i < n_; ++i)
        if (rows_[i].x & m) rowsum(scratch, rows_[n_ + i]);
    return scratch.sign;
}

int StabilizerSim::measure_z(int q, int bias) {
    uint64_t m = 1ull << q;
    int p = -1;
    for (int i = n_; i < 2 * n_; ++i)
        if (rows_[i].x & m) { p = i; break; }
    if (p < 0) {
        auto det = deterministic_measure_z(q);
        return *det;
    }
    // random outcome: standard update, outcome = bias
    for (int i = 0; i < 2 * n_; ++i)
        if (i != p && (rows_[i].x & m)) rowsum(rows_[i], rows_[p]);
    rows_[p - n_] = rows_[p];
    rows_[p] = Row{};
    rows_[p].z = m;
    rows_[p].sign = bias;
    return bias;
}

void StabilizerSim::reset_z(int q) {
    int outcome = measure_z(q, 0);
    if (outcome) apply_x(q);
}

}  // namespace qkdsim
