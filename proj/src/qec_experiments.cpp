#include "qkdsim/qec_experiments.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qkdsim/codes.hpp"
#include "qkdsim/parallel.hpp"
#include "qkdsim/pauliframe.hpp"

namespace qkdsim {

namespace {

struct Built422 {
    Circuit circuit{1, 0};
    IdealTrace trace;
    uint64_t ancilla_mask = 0;
};

Built422 build_422(const Qec422Params& params) {
    const int m = params.m;
    if (m < 0 || m > 56) throw std::invalid_argument("m must be in [0, 56]");
    StabilizerCode code = code_422();
    Circuit enc = encoder_circuit(code);
    Circuit c(4 + m, m + 4);
    c.append(enc);
    if (!params.channel.empty())
        for (uint8_t q = 0; q < 4; ++q)
            c.tag_last(params.channel, {q});
    for (int k = 0; k < m; ++k) {
        const PauliString& g = code.stabilizers[k % 2];  // g_X odd rounds, g_Z even
        append_stabilizer_block(c, g, 4 + k, k);
    }
    c.append(inverted(enc));
    for (int q = 0; q < 4; ++q)
        c.measure_z(q, m + q);
    if (params.p_d > 0.0) c = attach_circuit_noise(c, params.p_d, params.noise_on_spam);
    Built422 built;
    built.circuit = std::move(c);
    built.ancilla_mask = m > 0 ? (1ull << m) - 1 : 0;
    built.trace = precompute_ideal(built.circuit);
    return built;
}

}  // namespace

RoundStats run_422(const Qec422Params& params) {
    Built422 built = build_422(params);
    const int m = params.m;
    struct Acc {
        uint64_t accepted = 0, flips1 = 0, flips2 = 0;
    };
    std::vector<Acc> accs(resolve_workers(params.workers));
    parallel_chunks(0, params.shots, params.workers,
                    [&](uint64_t begin, uint64_t end, int w) {
        Acc local;
        for (uint64_t s = begin; s < end; ++s) {
            ShotRng rng(params.seed, s);
            ShotRecord shot = run_frame_shot(built.circuit, built.trace, rng);
            if (shot.any_herald()) continue;
            if ((shot.bits & built.ancilla_mask) != 0) continue;
            ++local.accepted;
            if (shot.bit(m + 0)) ++local.flips1;
            if (shot.bit(m + 1)) ++local.flips2;
        }
        accs[w] = local;
    });
    RoundStats stats;
    stats.m = m;
    stats.shots = params.shots;
    for (const Acc& a : accs) {
        stats.accepted_shots += a.accepted;
        stats.flips_lq1 += a.flips1;
        stats.flips_lq2 += a.flips2;
    }
    stats.acceptance_rate =
        static_cast<double>(stats.accepted_shots) / static_cast<double>(params.shots);
    if (stats.accepted_shots > 0) {
        stats.flip_rate_lq1 = static_cast<double>(stats.flips_lq1) /
                              static_cast<double>(stats.accepted_shots);
        stats.flip_rate_lq2 = static_cast<double>(stats.flips_lq2) /
                              static_cast<double>(stats.accepted_shots);
    }
    return stats;
}

Analytic422 analytic_422_bitflip(double p) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("p must be in [0,1]");
    double q = 1.0 - p;
    Analytic422 a;
    // odd-weight X patterns are detectable; two weight-1, four weight-2
    // and two weight-3 patterns flip each logical qubit
    a.acceptance = 1.0 - 4.0 * p * q * q * q - 4.0 * p * p * p * q;
    a.flip_pre = 2.0 * p * q * q * q + 4.0 * p * p * q * q + 2.0 * p * p * p * q;
    a.flip_post = 4.0 * p * p * q * q / a.acceptance;
    return a;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("slope fit needs matched points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    size_t n = xs.size();
    for (size_t i = 0; i < n; ++i) {
        double lx = std::log10(xs[i]), ly = std::log10(ys[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    return (n * sxy - sx * sy) / denom;
}

std::vector<ScalingPoint> scaling_sweep(const ScalingParams& params) {
    std::vector<ScalingPoint> points;
    for (double lambda : params.lambda_grid) {
        if (lambda <= 0.0) throw std::invalid_argument("lambda must be positive");
        double p = lambda * params.p;
        if (p > 1.0) throw std::invalid_argument("scaled p exceeds 1");
        Qec422Params run;
        run.m = 2;
        run.seed = params.seed + static_cast<uint64_t>(points.size()) * 0x10000000ull;
        run.workers = params.workers;
        if (params.channel == ScalingChannel::BitFlip)
            run.channel = {ChannelSpec{BitFlip{p}}};
        else
            run.channel = {ChannelSpec{Depolarizing1{p}}};
        if (params.circuit_noise) run.p_d = lambda * params.p_d;
        // keep enough accepted flip events at small rates
        double expect = params.circuit_noise ? std::max(4.0 * p * p, 0.3 * lambda * params.p_d)
                                             : 4.0 * p * p;
        uint64_t want = static_cast<uint64_t>(200.0 / std::max(expect, 1e-12));
        run.shots = std::clamp<uint64_t>(want, params.shots, params.max_shots);
        RoundStats stats = run_422(run);
        ScalingPoint pt;
        pt.lambda = lambda;
        pt.shots = run.shots;
        pt.acceptance = stats.acceptance_rate;
        pt.p_l = (stats.flip_rate_lq1 + stats.flip_rate_lq2) / 2.0;
        double qq = params.channel == ScalingChannel::BitFlip ? p : 2.0 * p / 3.0;
        pt.physical_ref = qq * (1.0 - qq) + qq * qq;
        points.push_back(pt);
    }
    return points;
}

double find_bitflip_crossover(const std::vector<double>& p_grid, uint64_t shots,
                              uint64_t seed, int workers) {
    if (p_grid.size() < 2) throw std::invalid_argument("crossover needs a grid");
    std::vector<double> diff(p_grid.size());
    for (size_t i = 0; i < p_grid.size(); ++i) {
        Qec422Params run;
        run.channel = {ChannelSpec{BitFlip{p_grid[i]}}};
        run.m = 2;
        run.shots = shots;
        run.seed = seed + i * 0x10000000ull;
        run.workers = workers;
        RoundStats stats = run_422(run);
        double p_l = (stats.flip_rate_lq1 + stats.flip_rate_lq2) / 2.0;
        diff[i] = p_l - p_grid[i];
    }
    for (size_t i = 0; i + 1 < p_grid.size(); ++i) {
        if (diff[i] <= 0.0 && diff[i + 1] > 0.0) {
            double t = -diff[i] / (diff[i + 1] - diff[i]);
            return p_grid[i] + t * (p_grid[i + 1] - p_grid[i]);
        }
    }
    throw std::runtime_error("no logical-physical crossover in grid");
}

namespace {

struct BuiltSteane {
    Circuit circuit{1, 0};
    IdealTrace trace;
    size_t encode_end = 0;                 // instruction index after channel
    std::vector<size_t> round_end;         // one past each round's last instr
};

BuiltSteane build_steane(const SteaneParams& params) {
    const int rounds = params.rounds_max;
    if (rounds < 0 || rounds > 6)
        throw std::invalid_argument("rounds_max must be in [0, 6]");
    std::vector<ChannelSeq> channel = params.channel;
    if (channel.size() == 1) channel.assign(7, channel[0]);
    if (channel.size() != 7)
        throw std::invalid_argument("steane channel needs 1 or 7 entries");
    StabilizerCode code = code_steane();
    Circuit enc = encoder_circuit(code);
    int n_qubits = 7 + 6 * rounds;
    int n_bits = 6 * rounds + 7;
    Circuit c(n_qubits, n_bits);
    c.append(enc);
    for (uint8_t q = 0; q < 7; ++q)
        if (!channel[q].empty()) c.tag_last(channel[q], {q});
    BuiltSteane built;
    built.encode_end = c.size();
    for (int r = 0; r < rounds; ++r) {
        for (int j = 0; j < 6; ++j) {
            // stabilizers are listed Z-first; the syndrome bit index stays
            // tied to the stabilizer either way
            int which = params.z_stabilizers_first ? j : (j + 3) % 6;
            append_stabilizer_block(c, code.stabilizers[which], 7 + 6 * r + j,
                                    6 * r + which);
        }
        built.round_end.push_back(c.size());
    }
    c.append(inverted(enc));
    for (int q = 0; q < 7; ++q)
        c.measure_z(q, 6 * rounds + q);
    if (params.p_d > 0.0)
        c = attach_circuit_noise(c, params.p_d, params.noise_on_spam);
    built.circuit = std::move(c);
    built.trace = precompute_ideal(built.circuit);
    return built;
}

}  // namespace

SteaneMonitorResult run_steane_monitor(const SteaneParams& params) {
    BuiltSteane built = build_steane(params);
    const int rounds = params.rounds_max;
    struct Acc {
        std::array<uint64_t, 64> counts{};
        std::vector<std::array<uint64_t, 64>> per_round;
        uint64_t erasure = 0, trivial = 0, accepted = 0, flips = 0;
    };
    std::vector<Acc> accs(resolve_workers(params.workers));
    for (Acc& a : accs) a.per_round.resize(rounds);

    parallel_chunks(0, params.shots, params.workers,
                    [&](uint64_t begin, uint64_t end, int w) {
        Acc& local = accs[w];
        for (uint64_t s = begin; s < end; ++s) {
            ShotRng rng(params.seed, s);
            FrameState st;
            size_t i = 0;
            for (; i < built.encode_end; ++i)
                frame_apply(built.circuit, i, built.trace, st, rng);
            if (st.heralds != 0) {
                ++local.erasure;
                continue;
            }
            bool discarded = false;
            for (int r = 0; r < rounds && !discarded; ++r) {
                for (; i < built.round_end[r]; ++i)
                    frame_apply(built.circuit, i, built.trace, st, rng);
                int syndrome = 0;
                for (int j = 0; j < 6; ++j)
                    if ((st.bits >> (6 * r + j)) & 1) syndrome |= 1 << (5 - j);
                if (syndrome != 0) {
                    ++local.counts[syndrome];
                    ++local.per_round[r][syndrome];
                    discarded = true;
                }
            }
            if (discarded) continue;
            ++local.trivial;
            for (; i < built.circuit.size(); ++i)
                frame_apply(built.circuit, i, built.trace, st, rng);
            ++local.accepted;
            if ((st.bits >> (6 * rounds)) & 1) ++local.flips;
        }
    });

    SteaneMonitorResult result;
    result.histogram.per_round.resize(rounds);
    result.histogram.shots = params.shots;
    for (const Acc& a : accs) {
        for (int v = 0; v < 64; ++v) result.histogram.counts[v] += a.counts[v];
        for (int r = 0; r < rounds; ++r)
            for (int v = 0; v < 64; ++v)
                result.histogram.per_round[r][v] += a.per_round[r][v];
        result.histogram.erasure_discards += a.erasure;
        result.histogram.trivial_all_rounds += a.trivial;
        result.accepted += a.accepted;
        result.flips += a.flips;
    }
    result.acceptance =
        static_cast<double>(result.accepted) / static_cast<double>(params.shots);
    result.flip_rate = result.accepted > 0
        ? static_cast<double>(result.flips) / static_cast<double>(result.accepted)
        : 0.0;
    return result;
}

double histogram_similarity(const SyndromeHistogram& a, const SyndromeHistogram& b) {
    uint64_t ta = 0, tb = 0;
    for (int v = 1; v < 64; ++v) { ta += a.counts[v]; tb += b.counts[v]; }
    if (ta == 0 || tb == 0) throw std::invalid_argument("empty syndrome histogram");
    double tv = 0.0;
    for (int v = 1; v < 64; ++v) {
        double pa = static_cast<double>(a.counts[v]) / static_cast<double>(ta);
        double pb = static_cast<double>(b.counts[v]) / static_cast<double>(tb);
        tv += std::abs(pa - pb);
    }
    return 1.0 - tv / 2.0;
}

double steane_postselected_flip_exact(double p) {
    StabilizerCode code = code_steane();
    Circuit decode = inverted(encoder_circuit(code));
    double probs[4] = {1.0 - p, p / 3.0, p / 3.0, p / 3.0};
    double accepted = 0.0, flipped = 0.0;
    for (int pattern = 0; pattern < 16384; ++pattern) {
        PauliString frame(7);
        double weight = 1.0;
        int rest = pattern;
        for (int q = 0; q < 7; ++q) {
            int letter = rest & 3;
            rest >>= 2;
            weight *= probs[letter];
            if (letter == 1) frame.set(q, 'X');
            else if (letter == 2) frame.set(q, 'Y');
            else if (letter == 3) frame.set(q, 'Z');
        }
        if (weight == 0.0) continue;
        if (syndrome_bits(code, frame) != 0) continue;
        accepted += weight;
        PauliString out = conjugate_through(decode, frame);
        if ((out.x >> 0) & 1) flipped += weight;
    }
    return flipped / accepted;
}

std::vector<std::pair<uint64_t, int>> top_syndromes(const SyndromeHistogram& hist) {
    std::vector<std::pair<uint64_t, int>> order;
    for (int v = 1; v < 64; ++v)
        if (hist.counts[v] > 0) order.emplace_back(hist.counts[v], v);
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    return order;
}

}  // namespace qkdsim
