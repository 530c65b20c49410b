#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace qkdsim {

// Phase-free n-qubit Pauli, stored as paired X/Z bit masks (n <= 64).
// Only (anti)commutation and support matter downstream, so signs are
// dropped throughout.
struct PauliString {
    uint64_t x = 0;
    uint64_t z = 0;
    int n = 0;

    PauliString() = default;
    explicit PauliString(int n_qubits) : n(n_qubits) {
        if (n_qubits < 0 || n_qubits > 64)
            throw std::invalid_argument("PauliString supports 0..64 qubits");
    }

    static PauliString from_str(const std::string& s) {
        PauliString p(static_cast<int>(s.size()));
        for (size_t i = 0; i < s.size(); ++i)
            p.set(static_cast<int>(i), s[i]);
        return p;
    }

    static PauliString single(int n_qubits, int qubit, char pauli) {
        PauliString p(n_qubits);
        p.set(qubit, pauli);
        return p;
    }

    void set(int q, char pauli) {
        if (q < 0 || q >= n) throw std::out_of_range("pauli qubit index");
        uint64_t m = 1ull << q;
        x &= ~m; z &= ~m;
        switch (pauli) {
            case 'I': case '_': break;
            case 'X': x |= m; break;
            case 'Y': x |= m; z |= m; break;
            case 'Z': z |= m; break;
            default: throw std::invalid_argument("pauli letter must be one of IXYZ_");
        }
    }

    char at(int q) const {
        bool xb = (x >> q) & 1, zb = (z >> q) & 1;
        if (xb && zb) return 'Y';
        if (xb) return 'X';
        if (zb) return 'Z';
        return 'I';
    }

    int weight() const { return std::popcount(x | z); }
    bool is_identity() const { return (x | z) == 0; }

    bool commutes_with(const PauliString& other) const {
        return (std::popcount(x & other.z) + std::popcount(z & other.x)) % 2 == 0;
    }
    bool anticommutes_with(const PauliString& other) const {
        return !commutes_with(other);
    }

    // Phase-free product: componentwise XOR.
    PauliString operator*(const PauliString& other) const {
        PauliString p(n);
        p.x = x ^ other.x;
        p.z = z ^ other.z;
        return p;
    }

    bool operator==(const PauliString& other) const {
        return n == other.n && x == other.x && z == other.z;
    }

    std::string str() const {
        std::string s;
        s.reserve(n);
        for (int q = 0; q < n; ++q) s.push_back(at(q));
        return s;
    }
};

}  // namespace qkdsim
