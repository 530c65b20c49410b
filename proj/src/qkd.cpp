#include "qkdsim/qkd.hpp"

#include <cmath>
#include <stdexcept>

#include "qkdsim/parallel.hpp"
#include "qkdsim/statevector.hpp"

namespace qkdsim {

Circuit build_bb84_round(int x_a, Basis b_a, Basis b_b,
                         const std::optional<ClonerSpec>& attack,
                         const std::optional<ChannelSeq>& channel, double p_d) {
    Circuit c(2, attack ? 2 : 1);
    c.prep_z(0);
    if (x_a) c.x(0);
    if (b_a == Basis::X) c.h(0);
    if (channel) c.tag_last(*channel, {0});  // acts before interception
    if (attack) {
        c.prep_z(1);
        append_cloner(c, *attack, 0, 1);
    }
    if (b_b == Basis::X) c.h(0);
    c.measure_z(0, 0);
    if (attack) {
        if (b_b == Basis::X) c.h(1);
        c.measure_z(1, 1);
    }
    if (p_d > 0.0) return attach_circuit_noise(c, p_d);
    return c;
}

Circuit build_bbm92_round(Basis b_a, Basis b_b,
                          const std::optional<ClonerSpec>& attack,
                          const std::optional<ChannelSeq>& channel, double p_d) {
    Circuit c(3, attack ? 3 : 2);
    c.prep_z(0);
    c.prep_z(1);
    c.h(0);
    c.cnot(0, 1);
    if (channel) c.tag_last(*channel, {1});  // on the B-bound transmission
    if (attack) {
        c.prep_z(2);
        append_cloner(c, *attack, 1, 2);
    }
    if (b_a == Basis::X) c.h(0);
    c.measure_z(0, 0);
    if (b_b == Basis::X) c.h(1);
    c.measure_z(1, 1);
    if (attack) {
        if (b_b == Basis::X) c.h(2);  // E waits for the broadcast basis
        c.measure_z(2, 2);
    }
    if (p_d > 0.0) return attach_circuit_noise(c, p_d);
    return c;
}

std::vector<RoundRecord> run_bb84(const QkdParams& params) {
    if (params.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    std::vector<RoundRecord> records(params.rounds);
    parallel_chunks(0, params.rounds, params.workers,
                    [&](uint64_t begin, uint64_t end, int) {
        for (uint64_t r = begin; r < end; ++r) {
            ShotRng rng(params.seed, r);
            RoundRecord rec;
            rec.x_a = rng.next_bit() ? 1 : 0;
            rec.b_a = rng.next_bit() ? Basis::X : Basis::Z;
            rec.b_b = rng.next_bit() ? Basis::X : Basis::Z;
            Circuit c = build_bb84_round(rec.x_a, rec.b_a, rec.b_b, params.attack,
                                         params.channel_noise, params.p_d);
            ShotRecord shot = run_shot(c, rng);
            rec.x_b = shot.bit(0);
            if (params.attack) {
                rec.x_e = shot.bit(1);
                rec.b_e = static_cast<int8_t>(rec.b_b);
            }
            rec.herald = shot.any_herald() ? 1 : 0;
            records[r] = rec;
        }
    });
    return records;
}

std::vector<RoundRecord> run_bbm92(const QkdParams& params) {
    if (params.rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    std::vector<RoundRecord> records(params.rounds);
    parallel_chunks(0, params.rounds, params.workers,
                    [&](uint64_t begin, uint64_t end, int) {
        for (uint64_t r = begin; r < end; ++r) {
            ShotRng rng(params.seed, r);
            RoundRecord rec;
            rec.b_a = rng.next_bit() ? Basis::X : Basis::Z;
            rec.b_b = rng.next_bit() ? Basis::X : Basis::Z;
            Circuit c = build_bbm92_round(rec.b_a, rec.b_b, params.attack,
                                          params.channel_noise, params.p_d);
            ShotRecord shot = run_shot(c, rng);
            rec.x_a = shot.bit(0);
            rec.x_b = shot.bit(1);
            if (params.attack) {
                rec.x_e = shot.bit(2);
                rec.b_e = static_cast<int8_t>(rec.b_b);
            }
            rec.herald = shot.any_herald() ? 1 : 0;
            records[r] = rec;
        }
    });
    return records;
}

std::vector<RoundRecord> sift(const std::vector<RoundRecord>& records) {
    std::vector<RoundRecord> kept;
    kept.reserve(records.size() / 2 + 1);
    for (const RoundRecord& r : records)
        if (r.b_a == r.b_b) kept.push_back(r);
    return kept;
}

CorrelationEstimate correlation(const std::vector<RoundRecord>& sifted, Pair pair,
                                std::optional<Basis> basis_filter) {
    double sum = 0.0;
    uint64_t n = 0;
    for (const RoundRecord& r : sifted) {
        if (basis_filter && r.b_a != *basis_filter) continue;
        int first, second;
        switch (pair) {
            case Pair::AB: first = r.x_a; second = r.x_b; break;
            case Pair::AE: first = r.x_a; second = r.x_e; break;
            case Pair::BE: first = r.x_b; second = r.x_e; break;
        }
        if (second < 0)
            throw std::invalid_argument("correlation pair requires Eve's bit");
        sum += (2.0 * first - 1.0) * (2.0 * second - 1.0);
        ++n;
    }
    if (n == 0) throw std::invalid_argument("correlation over empty selection");
    CorrelationEstimate est;
    est.value = sum / static_cast<double>(n);
    est.n_sifted = n;
    est.std_err = std::sqrt(std::max(0.0, 1.0 - est.value * est.value) /
                            static_cast<double>(n));
    return est;
}

QberResult qber_abort_check(const std::vector<RoundRecord>& sifted, double threshold) {
    if (sifted.empty()) throw std::invalid_argument("qber over empty input");
    uint64_t bad = 0;
    for (const RoundRecord& r : sifted)
        if (r.x_a != r.x_b) ++bad;
    QberResult res;
    res.qber = static_cast<double>(bad) / static_cast<double>(sifted.size());
    res.abort = res.qber > threshold;
    return res;
}

void write_records_csv(std::ostream& os, const std::vector<RoundRecord>& records) {
    os << "round,x_A,b_A,b_B,x_B,b_E,x_E,herald\n";
    for (size_t i = 0; i < records.size(); ++i) {
        const RoundRecord& r = records[i];
        os << i << ',' << int(r.x_a) << ',' << (r.b_a == Basis::Z ? 'Z' : 'X') << ','
           << (r.b_b == Basis::Z ? 'Z' : 'X') << ',' << int(r.x_b) << ',';
        if (r.b_e >= 0) os << (r.b_e == 0 ? 'Z' : 'X');
        os << ',';
        if (r.x_e >= 0) os << int(r.x_e);
        os << ',' << int(r.herald) << '\n';
    }
}

namespace {

OracleCorrelations correlations_from_distribution(
    const std::function<Circuit(int)>& round_builder, bool bbm92, bool has_eve) {
    // Average (2x-1)(2y-1) products under the exact distribution; BB84
    // averages over Alice's two inputs, BBM92 reads Alice's bit out of
    // the distribution itself.
    OracleCorrelations out;
    int n_inputs = bbm92 ? 1 : 2;
    for (int x_a = 0; x_a < n_inputs; ++x_a) {
        Circuit c = round_builder(x_a);
        auto dist = exact_distribution(c);
        for (const auto& [bits, p] : dist) {
            int a = bbm92 ? ((bits >> 0) & 1) : x_a;
            int b = bbm92 ? ((bits >> 1) & 1) : ((bits >> 0) & 1);
            int e = has_eve ? (bbm92 ? ((bits >> 2) & 1) : ((bits >> 1) & 1)) : 0;
            double sa = 2.0 * a - 1.0, sb = 2.0 * b - 1.0, se = 2.0 * e - 1.0;
            out.c_ab += p * sa * sb / n_inputs;
            if (has_eve) {
                out.c_ae += p * sa * se / n_inputs;
                out.c_be += p * sb * se / n_inputs;
            }
        }
    }
    return out;
}

}  // namespace

OracleCorrelations oracle_correlations_bb84(const std::optional<ClonerSpec>& attack,
                                            Basis basis,
                                            const std::optional<ChannelSeq>& channel) {
    return correlations_from_distribution(
        [&](int x_a) {
            return build_bb84_round(x_a, basis, basis, attack, channel, 0.0);
        },
        false, attack.has_value());
}

OracleCorrelations oracle_correlations_bbm92(const std::optional<ClonerSpec>& attack,
                                             Basis basis) {
    return correlations_from_distribution(
        [&](int) {
            return build_bbm92_round(basis, basis, attack, std::nullopt, 0.0);
        },
        true, attack.has_value());
}

}  // namespace qkdsim
