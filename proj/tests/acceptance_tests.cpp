// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion failed.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "qkdsim/attacks.hpp"
#include "qkdsim/codes.hpp"
#include "qkdsim/pauliframe.hpp"
#include "qkdsim/qec_experiments.hpp"
#include "qkdsim/qkd.hpp"
#include "qkdsim/runner.hpp"
#include "qkdsim/sidechannel.hpp"
#include "qkdsim/statevector.hpp"

using namespace qkdsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[criterion %02d] %s: %s\n", criterion, pass ? "PASS" : "FAIL",
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

double sigma(double p, uint64_t n) {
    return std::sqrt(std::max(p * (1.0 - p), 1e-12) / double(n));
}

// --- 1. PCCM exactness -------------------------------------------------

void criterion_1() {
    bool pass = true;
    double worst_exact = 0.0;
    for (int i = 0; i <= 8; ++i) {
        double theta = M_PI * i / 8.0;
        auto [want_ab, want_ae] = expected_pccm_correlations(theta);
        for (Basis basis : {Basis::Z, Basis::X}) {
            auto oc = oracle_correlations_bb84(PccmSpec{theta}, basis);
            worst_exact = std::max({worst_exact, std::abs(oc.c_ab - want_ab),
                                    std::abs(oc.c_ae - want_ae),
                                    std::abs(oc.c_ab * oc.c_ab + oc.c_ae * oc.c_ae - 1.0)});
        }
    }
    if (worst_exact > 1e-9) pass = false;

    double worst_sampled = 0.0;
    for (int i = 0; i <= 8; ++i) {
        double theta = M_PI * i / 8.0;
        QkdParams params;
        params.rounds = 4000;  // ~2000 sifted
        params.seed = 1000 + i;
        params.workers = 2;
        params.attack = PccmSpec{theta};
        auto sifted = sift(run_bb84(params));
        auto [want_ab, want_ae] = expected_pccm_correlations(theta);
        worst_sampled = std::max(
            {worst_sampled,
             std::abs(correlation(sifted, Pair::AB).value - want_ab),
             std::abs(correlation(sifted, Pair::AE).value - want_ae)});
    }
    if (worst_sampled > 4.0 * 0.0224) pass = false;
    report(1, pass,
           fmt("oracle dev %.2e (tol 1e-9), sampled dev %.4f (tol %.4f)",
               worst_exact, worst_sampled, 4.0 * 0.0224));
}

// --- 2. deterministic error signatures ----------------------------------

void criterion_2() {
    bool pass = true;
    std::string detail;
    ChannelSeq det_x{ChannelSpec{DeterministicPauli{PauliString::from_str("X")}}};
    ChannelSeq prob_x{ChannelSpec{BitFlip{0.25}}};
    for (double theta : {0.7853981633974483, 1.5707963267948966, 2.356194490192345}) {
        QkdParams params;
        params.rounds = 8000;  // ~2000 sifted per basis
        params.seed = 2000 + uint64_t(theta * 1000);
        params.workers = 2;
        params.attack = PccmSpec{theta};
        params.channel_noise = det_x;
        auto sifted = sift(run_bb84(params));
        double want = std::cos(theta / 2.0);
        double tol = 4.0 / std::sqrt(2000.0);
        auto z = correlation(sifted, Pair::AB, Basis::Z);
        auto avg = correlation(sifted, Pair::AB);
        if (std::abs(z.value + want) > tol) pass = false;
        if (std::abs(avg.value) > tol) pass = false;

        params.channel_noise = prob_x;
        params.seed += 7;
        auto sifted_p = sift(run_bb84(params));
        auto zp = correlation(sifted_p, Pair::AB, Basis::Z);
        if (std::abs(zp.value - 0.5 * want) > tol) pass = false;
        if (detail.empty())
            detail = fmt("theta=%.2f: Z %.3f vs %.3f, avg %.3f, p=.25 Z %.3f vs %.3f",
                         theta, z.value, -want, avg.value, zp.value, 0.5 * want);
    }
    report(2, pass, detail);
}

// --- 3. imbalanced cloner ------------------------------------------------

void criterion_3() {
    bool pass = true;
    double worst_match = 0.0;
    for (double psi : {0.3, 0.6, 0.9, 1.2}) {
        QkdParams params;
        params.rounds = 4000;
        params.seed = 3000 + uint64_t(psi * 100);
        params.workers = 2;
        params.attack = ImbalancedSpec{psi, optimal_phi(psi, 0.0)};
        auto sifted = sift(run_bb84(params));
        auto [want_ab, want_ae] = expected_pccm_correlations(2.0 * psi);
        worst_match = std::max(
            {worst_match,
             std::abs(correlation(sifted, Pair::AB).value - want_ab),
             std::abs(correlation(sifted, Pair::AE).value - want_ae)});
    }
    if (worst_match > 4.0 * 0.0224) pass = false;

    ChannelSeq det_x{ChannelSpec{DeterministicPauli{PauliString::from_str("X")}}};
    double worst_sum = 2.0;
    for (double psi : {0.5, 0.7853981633974483, 1.0}) {
        ImbalancedSpec spec{psi, optimal_phi(psi, 0.25)};
        auto x = oracle_correlations_bb84(spec, Basis::X, det_x);
        worst_sum = std::min(worst_sum, x.c_ab * x.c_ab + x.c_ae * x.c_ae);
    }
    if (worst_sum <= 1.0) pass = false;
    report(3, pass,
           fmt("p=0 sweep dev %.4f (tol %.4f); min X-sifted sum %.4f (> 1)",
               worst_match, 4.0 * 0.0224, worst_sum));
}

// --- 4. QCL --------------------------------------------------------------

void criterion_4() {
    QclConfig cfg;
    cfg.alpha = 10.0;
    cfg.target_fidelity = 0.85;
    cfg.shots_per_config = 500;
    cfg.max_iterations = 30;
    cfg.initial_theta = 1.0;
    cfg.seed = 4001;
    uint64_t counter = 0;
    auto evaluator = [&](double theta) {
        uint64_t eval_seed = cfg.seed ^ (0x9E3779B97F4A7C15ull * ++counter);
        uint64_t ab = 0, ae = 0, n = 0;
        for (int bit = 0; bit < 2; ++bit) {
            for (int basis = 0; basis < 2; ++basis) {
                Basis b = basis ? Basis::X : Basis::Z;
                Circuit c = build_bb84_round(bit, b, b, PccmSpec{theta},
                                             std::nullopt, 0.0);
                for (int s = 0; s < cfg.shots_per_config; ++s) {
                    ShotRng rng(eval_seed, (uint64_t(bit * 2 + basis) << 32) | s);
                    ShotRecord shot = run_shot(c, rng);
                    ++n;
                    if (shot.bit(0) == (bit != 0)) ++ab;
                    if (shot.bit(1) == (bit != 0)) ++ae;
                }
            }
        }
        return std::make_pair(double(ab) / n, double(ae) / n);
    };
    QclResult res = qcl_optimize(cfg, evaluator);
    double f_exact = pccm_fidelity_ab(res.theta_star);
    bool pass = res.trace.size() <= 30 && std::abs(f_exact - 0.85) <= 0.01;
    report(4, pass,
           fmt("theta*=%.4f (ref 1.5908), F_AB=%.4f (target 0.85 +- 0.01), %zu iters",
               res.theta_star, f_exact, res.trace.size()));
}

// --- 5. BBM92 ------------------------------------------------------------

void criterion_5() {
    bool pass = true;
    double worst = 0.0;
    std::vector<double> thetas;
    for (int i = 0; i <= 8; ++i) thetas.push_back(M_PI * i / 8.0);
    double best_cbe = -1.0;
    size_t best_idx = 0;
    std::vector<double> cbes;
    for (size_t i = 0; i < thetas.size(); ++i) {
        QkdParams params;
        params.rounds = 2000;  // ~1000 sifted
        params.seed = 5000 + i;
        params.workers = 2;
        params.attack = PccmSpec{thetas[i]};
        auto sifted = sift(run_bbm92(params));
        auto [want_ab, want_ae] = expected_pccm_correlations(thetas[i]);
        double tol = 4.0 / std::sqrt(double(sifted.size()));
        worst = std::max({worst,
                          std::abs(correlation(sifted, Pair::AB).value - want_ab) - tol,
                          std::abs(correlation(sifted, Pair::AE).value - want_ae) - tol});
        double cbe = correlation(sifted, Pair::BE).value;
        cbes.push_back(cbe);
        if (cbe > best_cbe) { best_cbe = cbe; best_idx = i; }
    }
    if (worst > 0.0) pass = false;
    double endpoint_tol = 4.0 / std::sqrt(1000.0);
    if (std::abs(cbes.front()) > endpoint_tol) pass = false;
    if (std::abs(cbes.back()) > endpoint_tol) pass = false;
    if (best_idx == 0 || best_idx + 1 == thetas.size()) pass = false;
    report(5, pass,
           fmt("curve dev-minus-tol %.4f, C_BE(0)=%.3f C_BE(pi)=%.3f max at theta=%.2f",
               worst, cbes.front(), cbes.back(), thetas[best_idx]));
}

// --- 6. [[4,2,2]] bitflip numbers -----------------------------------------

void criterion_6() {
    bool pass = true;
    Qec422Params params;
    params.channel = {ChannelSpec{BitFlip{0.1}}};
    params.shots = 1000000;
    params.workers = 2;

    params.m = 2;
    params.seed = 6001;
    RoundStats post = run_422(params);
    if (std::abs(post.acceptance_rate - 0.7056) > 0.003) pass = false;
    double flip_post = (post.flip_rate_lq1 + post.flip_rate_lq2) / 2.0;
    if (std::abs(flip_post - 0.0459) > 0.002) pass = false;

    params.m = 1;
    params.seed = 6002;
    RoundStats one = run_422(params);
    if (std::abs(one.acceptance_rate - 1.0) > 0.001) pass = false;

    params.m = 0;
    params.seed = 6003;
    RoundStats pre = run_422(params);
    double flip_pre = (pre.flip_rate_lq1 + pre.flip_rate_lq2) / 2.0;
    if (std::abs(flip_pre - 0.180) > 0.003) pass = false;

    // Monte Carlo vs analytic oracle at three strengths
    for (double p : {0.05, 0.1, 0.2}) {
        Analytic422 want = analytic_422_bitflip(p);
        Qec422Params mc;
        mc.channel = {ChannelSpec{BitFlip{p}}};
        mc.shots = 1000000;
        mc.workers = 2;
        mc.m = 2;
        mc.seed = 6100 + uint64_t(p * 1000);
        RoundStats stats = run_422(mc);
        if (std::abs(stats.acceptance_rate - want.acceptance) >
            4.0 * sigma(want.acceptance, mc.shots)) pass = false;
        if (std::abs(stats.flip_rate_lq1 - want.flip_post) >
            4.0 * sigma(want.flip_post, stats.accepted_shots)) pass = false;
        mc.m = 0;
        mc.seed += 3;
        RoundStats pre_mc = run_422(mc);
        if (std::abs(pre_mc.flip_rate_lq1 - want.flip_pre) >
            4.0 * sigma(want.flip_pre, mc.shots)) pass = false;
    }
    report(6, pass,
           fmt("acc(m=2)=%.4f acc(m=1)=%.4f flip_pre=%.4f flip_post=%.4f",
               post.acceptance_rate, one.acceptance_rate, flip_pre, flip_post));
}

// --- 7. scaling ------------------------------------------------------------

void criterion_7() {
    bool pass = true;
    ScalingParams params;
    params.lambda_grid = {0.01, 0.0178, 0.0316, 0.0562, 0.1};
    params.seed = 7001;
    params.workers = 2;
    params.shots = 1000000;
    params.max_shots = 40000000;
    auto channel_only = scaling_sweep(params);
    std::vector<double> xs, ys;
    for (const auto& pt : channel_only) { xs.push_back(pt.lambda); ys.push_back(pt.p_l); }
    double slope_channel = fit_loglog_slope(xs, ys);
    if (std::abs(slope_channel - 2.0) > 0.15) pass = false;

    params.circuit_noise = true;
    params.seed = 7002;
    params.max_shots = 8000000;
    auto noisy = scaling_sweep(params);
    xs.clear(); ys.clear();
    for (const auto& pt : noisy) { xs.push_back(pt.lambda); ys.push_back(pt.p_l); }
    double slope_circuit = fit_loglog_slope(xs, ys);
    if (std::abs(slope_circuit - 1.0) > 0.15) pass = false;

    double crossover = find_bitflip_crossover(
        {0.19, 0.20, 0.21, 0.22, 0.23, 0.24, 0.25, 0.26, 0.27}, 1000000, 7003, 2);
    bool crossover_ok = std::abs(crossover - 0.25) <= 0.02;
    if (!crossover_ok) pass = false;
    // exact root of flip_post(p) = p for reference; the 0.25 figure is the
    // leading-order 4p^2 < p bound
    double lo_p = 0.1, hi_p = 0.4;
    for (int i = 0; i < 60; ++i) {
        double mid = (lo_p + hi_p) / 2.0;
        if (analytic_422_bitflip(mid).flip_post < mid) lo_p = mid;
        else hi_p = mid;
    }
    report(7, pass,
           fmt("slope(channel)=%.3f (2.0+-0.15) slope(circuit)=%.3f (1.0+-0.15) "
               "crossover=%.4f (required 0.25+-0.02; exact root of the analytic "
               "forms is %.4f)",
               slope_channel, slope_circuit, crossover, (lo_p + hi_p) / 2.0));
}

// --- 8/9/10. Steane monitor ------------------------------------------------

std::vector<ChannelSeq> hot_qubit_channel() {
    std::vector<ChannelSeq> channel{ChannelSeq{ChannelSpec{Depolarizing1{0.3}}}};
    for (int q = 1; q < 7; ++q)
        channel.push_back({ChannelSpec{Depolarizing1{0.03}}});
    return channel;
}

void criterion_8() {
    bool pass = true;
    std::string detail;
    std::vector<SteaneMonitorResult> results;
    for (double p_d : {0.0, 0.01}) {
        SteaneParams params;
        params.channel = hot_qubit_channel();
        params.rounds_max = 3;
        params.p_d = p_d;
        params.shots = 1000000;
        params.seed = 8001 + uint64_t(p_d * 1000);
        params.workers = 2;
        SteaneMonitorResult result = run_steane_monitor(params);
        auto top = top_syndromes(result.histogram);
        std::set<int> top3{top[0].second, top[1].second, top[2].second};
        bool ok = top3 == std::set<int>{0b010000, 0b010010, 0b000010};
        if (!ok) pass = false;
        detail += fmt("p_d=%.2f top3={%s,%s,%s} ", p_d,
                      syndrome_string(top[0].second, 6).c_str(),
                      syndrome_string(top[1].second, 6).c_str(),
                      syndrome_string(top[2].second, 6).c_str());
        results.push_back(result);
    }
    // reported, not asserted: how closely the noisy histogram matches
    detail += fmt("similarity=%.3f", histogram_similarity(results[0].histogram,
                                                          results[1].histogram));
    report(8, pass, detail);
}

void criterion_9() {
    bool pass = true;
    std::string detail;
    for (double p_d : {0.0, 0.01}) {
        SteaneParams params;
        params.channel = {ChannelSeq{ChannelSpec{PauliChannel{0.1, 0.01, 0.01}}}};
        params.rounds_max = 3;
        params.p_d = p_d;
        params.shots = 1000000;
        params.seed = 9001 + uint64_t(p_d * 1000);
        params.workers = 2;
        SteaneMonitorResult result = run_steane_monitor(params);
        auto top = top_syndromes(result.histogram);
        int pure_z = 0;
        for (int i = 0; i < 7 && i < int(top.size()); ++i)
            if ((top[i].second & 0b000111) == 0) ++pure_z;
        if (pure_z != 7) pass = false;
        detail += fmt("p_d=%.2f pure-Z in top-7: %d/7 ", p_d, pure_z);
    }
    report(9, pass, detail);
}

void criterion_10() {
    bool pass = true;
    ChannelSeq composite = compose_channel({ChannelSpec{TwirledAmplitudeDamping{0.2}},
                                            ChannelSpec{Dephasing{0.2}},
                                            ChannelSpec{HeraldedErase{0.2}}});
    std::vector<double> flip_rates;
    SteaneMonitorResult last;
    for (int rounds = 0; rounds <= 6; ++rounds) {
        SteaneParams params;
        params.channel = {composite};
        params.rounds_max = rounds;
        params.shots = 1000000;
        // common random numbers across round counts: the plateau claim
        // compares the same channel realizations under more measurements
        params.seed = 10001;
        params.workers = 2;
        SteaneMonitorResult result = run_steane_monitor(params);
        flip_rates.push_back(result.flip_rate);
        if (rounds == 6) last = result;
    }
    if (!(flip_rates[0] > flip_rates[1])) pass = false;
    double lo = flip_rates[1], hi = flip_rates[1];
    for (int r = 1; r <= 6; ++r) {
        lo = std::min(lo, flip_rates[r]);
        hi = std::max(hi, flip_rates[r]);
    }
    double rel_var = (hi - lo) / std::max(lo, 1e-12);
    if (rel_var >= 0.10) pass = false;

    auto top = top_syndromes(last.histogram);
    bool pure_x = true;
    for (int i = 0; i < 3 && i < int(top.size()); ++i)
        if ((top[i].second & 0b111000) != 0) pure_x = false;
    if (!pure_x) pass = false;
    report(10, pass,
           fmt("flip r0=%.4f r1=%.4f plateau rel var %.3f (<0.10), top bins pure-X: %s",
               flip_rates[0], flip_rates[1], rel_var, pure_x ? "yes" : "no"));
}

// --- 11. Steane O(p^3) -------------------------------------------------------

void criterion_11() {
    std::vector<double> ps = {0.003, 0.006, 0.012, 0.02, 0.03};
    std::vector<double> flips;
    for (double p : ps) flips.push_back(steane_postselected_flip_exact(p));
    double slope = fit_loglog_slope(ps, flips);
    bool pass = std::abs(slope - 3.0) <= 0.2;

    // MC spot check at the top of the range
    SteaneParams params;
    params.channel = {ChannelSeq{ChannelSpec{Depolarizing1{0.03}}}};
    params.rounds_max = 1;
    params.shots = 10000000;
    params.seed = 11001;
    params.workers = 2;
    SteaneMonitorResult mc = run_steane_monitor(params);
    double exact = flips.back();
    if (std::abs(mc.flip_rate - exact) > 4.0 * sigma(exact, mc.accepted)) pass = false;
    report(11, pass,
           fmt("slope=%.3f (3.0+-0.2); MC@0.03 %.2e vs exact %.2e", slope,
               mc.flip_rate, exact));
}

// --- 12. engine equivalence ---------------------------------------------------

void criterion_12() {
    bool pass = true;
    double worst_margin = -1.0;
    for (int trial = 0; trial < 50; ++trial) {
        ShotRng gen(12000 + trial, 0);
        int n_data = 3 + int(gen.next_below(3));
        int anc = n_data;
        Circuit c(n_data + 1, n_data + 1);
        // mirror block keeps every measurement ideally deterministic
        std::vector<Instruction> forward;
        int depth = 8 + int(gen.next_below(8));
        for (int i = 0; i < depth; ++i) {
            int kind = int(gen.next_below(6));
            int q = int(gen.next_below(n_data));
            int r = int(gen.next_below(n_data));
            if (q == r) r = (q + 1) % n_data;
            switch (kind) {
                case 0: c.h(q); break;
                case 1: c.s(q); break;
                case 2: c.x(q); break;
                case 3: c.sdg(q); break;
                case 4: c.cnot(q, r); break;
                default: c.cz(q, r); break;
            }
            forward.push_back(c.ops().back());
        }
        for (auto it = forward.rbegin(); it != forward.rend(); ++it) {
            Instruction inv = *it;
            if (inv.op == Op::S) inv.op = Op::Sdg;
            else if (inv.op == Op::Sdg) inv.op = Op::S;
            switch (inv.op) {
                case Op::H: c.h(inv.q0); break;
                case Op::S: c.s(inv.q0); break;
                case Op::Sdg: c.sdg(inv.q0); break;
                case Op::X: c.x(inv.q0); break;
                case Op::Cnot: c.cnot(inv.q0, inv.q1); break;
                case Op::Cz: c.cz(inv.q0, inv.q1); break;
                default: break;
            }
        }
        for (int q = 0; q < n_data; ++q)
            if (gen.next_bit()) c.x(q);
        c.prep_z(anc);
        c.cnot(int(gen.next_below(n_data)), anc);
        c.cnot(int(gen.next_below(n_data)), anc);
        c.measure_z(anc, anc);
        for (int q = 0; q < n_data; ++q) c.measure_z(q, q);

        // random Pauli noise tags
        int n_tags = 2 + int(gen.next_below(4));
        for (int t = 0; t < n_tags; ++t) {
            size_t at = gen.next_below(c.size());
            int q = int(gen.next_below(n_data));
            NoiseTag tag;
            switch (gen.next_below(4)) {
                case 0: tag.seq = {ChannelSpec{BitFlip{0.05 + 0.2 * gen.next_double()}}};
                        tag.support = {uint8_t(q)}; break;
                case 1: tag.seq = {ChannelSpec{Depolarizing1{0.3 * gen.next_double()}}};
                        tag.support = {uint8_t(q)}; break;
                case 2: tag.seq = {ChannelSpec{PauliChannel{0.1, 0.1, 0.1}}};
                        tag.support = {uint8_t(q)}; break;
                default: {
                    int r = (q + 1) % n_data;
                    tag.seq = {ChannelSpec{Depolarizing2{0.3}}};
                    tag.support = {uint8_t(q), uint8_t(r)};
                    break;
                }
            }
            c.tag_at(at, std::move(tag));
        }

        IdealTrace trace = precompute_ideal(c);
        const uint64_t shots = 100000;
        std::map<uint64_t, uint64_t> fc, sc;
        for (uint64_t s = 0; s < shots; ++s) {
            ShotRng rng(13000 + trial, s);
            ++fc[run_frame_shot(c, trace, rng).bits];
        }
        for (uint64_t s = 0; s < shots; ++s) {
            ShotRng rng(14000 + trial, s);
            ++sc[run_shot(c, rng).bits];
        }
        std::set<uint64_t> keys;
        for (auto& [k, v] : fc) keys.insert(k);
        for (auto& [k, v] : sc) keys.insert(k);
        double tv = 0.0;
        for (uint64_t k : keys)
            tv += std::abs(double(fc[k]) - double(sc[k])) / shots;
        tv /= 2.0;
        double bound = 5.0 * std::sqrt(double(keys.size()) / shots);
        worst_margin = std::max(worst_margin, tv - bound);
        if (tv > bound) pass = false;
    }
    report(12, pass, fmt("worst (TV - bound) over 50 circuits = %.4f (<= 0)",
                         worst_margin));
}

// --- 13. decoder table ----------------------------------------------------------

void criterion_13() {
    bool pass = true;
    const int want[8] = {-1, 3, 0, 6, 1, 5, 2, 4};
    for (int s = 0; s < 8; ++s)
        if (lut_decode(s) != want[s]) pass = false;

    StabilizerCode code = code_steane();
    for (int q = 0; q < 7 && pass; ++q) {
        for (char letter : {'X', 'Y', 'Z'}) {
            PauliString err = PauliString::single(7, q, letter);
            uint64_t syndrome = syndrome_bits(code, err);
            PauliString correction(7);
            if (int fix = lut_decode(int(syndrome >> 3)); fix >= 0)
                correction.set(fix, 'X');
            if (int fix = lut_decode(int(syndrome & 7)); fix >= 0) {
                char cur = correction.at(fix);
                correction.set(fix, cur == 'X' ? 'Y' : 'Z');
            }
            if (!in_pauli_group(err * correction, code.stabilizers)) pass = false;
        }
    }
    report(13, pass, "table matches on all 8 syndromes; all 21 weight-1 errors restored");
}

// --- 14. determinism --------------------------------------------------------------

void criterion_14() {
    fs::path tmp = fs::temp_directory_path() / "qkdsim_acceptance_det";
    fs::remove_all(tmp);
    nlohmann::json cfg{{"experiment", "qec422"},
                       {"seed", 14001},
                       {"shots", 20000},
                       {"m_grid", {0, 1, 2}},
                       {"channel", {{"type", "depolarizing1"}, {"p", 0.1}}}};
    RunOptions a;
    a.out_dir = tmp.string();
    a.label = "w1";
    a.workers = 1;
    RunOptions b = a;
    b.label = "w4";
    b.workers = 4;
    RunResult ra = run_experiment(cfg, a);
    RunResult rb = run_experiment(cfg, b);
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    bool pass = slurp(ra.run_dir / "results.csv") == slurp(rb.run_dir / "results.csv");
    fs::remove_all(tmp);
    report(14, pass, "1-worker and 4-worker CSV outputs are byte-identical");
}

// --- 15. side channels --------------------------------------------------------------

void criterion_15() {
    bool pass = true;
    BiasModel quench = BiasModel::quench();
    BiasModel pump = BiasModel::pump();
    for (int state = 0; state < 2; ++state) {
        if (apply_bias(quench, state, 3.0) >= 0.01) pass = false;
        if (apply_bias(pump, state, 10.0) <= 0.99) pass = false;
        double prev_q = 2.0, prev_p = -1.0;
        for (double t = 0.0; t <= 20.0; t += 0.25) {
            double pq = apply_bias(quench, state, t);
            double pp = apply_bias(pump, state, t);
            if (pq > prev_q + 1e-12 || pp < prev_p - 1e-12) pass = false;
            if (pq < 0.0 || pq > 1.0 || pp < 0.0 || pp > 1.0) pass = false;
            prev_q = pq;
            prev_p = pp;
        }
    }
    // detection agreement monotone in exposure (sampled, 4-sigma slack)
    DetectorModel det;
    double prev = -1.0;
    for (double exposure : {0.0, 30.0, 80.0, 200.0, 600.0, 1100.0}) {
        ShotRng rng(15001, uint64_t(exposure));
        int agree = 0;
        const int shots = 40000;
        for (int i = 0; i < shots; ++i) {
            auto dd = double_detection(det, i & 1, 1100.0, exposure, rng);
            agree += dd.e_dark == dd.b_dark;
        }
        double rate = double(agree) / shots;
        if (rate < prev - 4.0 * std::sqrt(0.25 / shots)) pass = false;
        prev = rate;
    }
    report(15, pass,
           fmt("quench(3us)=%.4f/%.4f pump(10us)=%.4f/%.4f, monotonicity ok",
               apply_bias(quench, 0, 3.0), apply_bias(quench, 1, 3.0),
               apply_bias(pump, 0, 10.0), apply_bias(pump, 1, 10.0)));
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12();
    criterion_13();
    criterion_14();
    criterion_15();
    std::printf("%d of 15 criteria passed\n", 15 - g_failures);
    return g_failures == 0 ? 0 : 1;
}
