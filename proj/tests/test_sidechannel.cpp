#include <doctest.h>

#include <cmath>

#include "qkdsim/qkd.hpp"
#include "qkdsim/sidechannel.hpp"

using namespace qkdsim;

TEST_CASE("poisson sampler mean") {
    for (double mean : {0.5, 4.0, 55.0}) {
        ShotRng rng(1, 0);
        double sum = 0.0;
        const int draws = 20000;
        for (int i = 0; i < draws; ++i) sum += double(sample_poisson(mean, rng));
        CHECK(std::abs(sum / draws - mean) < 5.0 * std::sqrt(mean / draws));
    }
    ShotRng rng(1, 1);
    CHECK(sample_poisson(0.0, rng) == 0);
}

TEST_CASE("zero exposure always reads dark") {
    DetectorModel det;
    ShotRng rng(2, 0);
    for (int i = 0; i < 200; ++i) {
        auto dd = double_detection(det, i & 1, 1100.0, 0.0, rng);
        CHECK(dd.e_dark == 1);
    }
}

TEST_CASE("long exposures give near-perfect agreement") {
    DetectorModel det;
    ShotRng rng(3, 0);
    int agree = 0;
    const int shots = 4000;
    for (int i = 0; i < shots; ++i) {
        auto dd = double_detection(det, i & 1, 1100.0, 1100.0, rng);
        agree += dd.e_dark == dd.b_dark;
    }
    CHECK(double(agree) / shots > 1.0 - 3.0 * det.spam_floor - 0.02);
}

TEST_CASE("short exposures inflate false-dark assignments for bright ions") {
    DetectorModel det;
    auto e_dark_rate = [&](double exposure) {
        ShotRng rng(4, uint64_t(exposure * 1000));
        int dark = 0;
        const int shots = 4000;
        for (int i = 0; i < shots; ++i)
            dark += double_detection(det, 1, 1100.0, exposure, rng).e_dark;
        return double(dark) / shots;
    };
    CHECK(e_dark_rate(40.0) > e_dark_rate(200.0) + 0.2);
    CHECK(e_dark_rate(600.0) < 0.01);
}

TEST_CASE("detection agreement is monotone in exposure") {
    DetectorModel det;
    double prev = -1.0;
    for (double exposure : {0.0, 20.0, 60.0, 120.0, 300.0, 1100.0}) {
        ShotRng rng(5, uint64_t(exposure));
        int agree = 0;
        const int shots = 20000;
        for (int i = 0; i < shots; ++i) {
            auto dd = double_detection(det, i & 1, 1100.0, exposure, rng);
            agree += dd.e_dark == dd.b_dark;
        }
        double rate = double(agree) / shots;
        CHECK(rate > prev - 4.0 * std::sqrt(0.25 / shots));
        prev = rate;
    }
}

TEST_CASE("bias models hit their closed-form limits") {
    BiasModel quench = BiasModel::quench();
    CHECK(apply_bias(quench, 0, 0.0) == doctest::Approx(quench.p_dark0[0]));
    CHECK(apply_bias(quench, 1, 0.0) == doctest::Approx(quench.p_dark0[1]));
    CHECK(apply_bias(quench, 0, 3.0) < 0.01);
    CHECK(apply_bias(quench, 1, 3.0) < 0.01);

    BiasModel pump = BiasModel::pump();
    CHECK(apply_bias(pump, 0, 10.0) > 0.99);
    CHECK(apply_bias(pump, 1, 10.0) > 0.99);
    CHECK_THROWS(apply_bias(pump, 1, -1.0));
}

TEST_CASE("bias probabilities stay in range and are monotone") {
    BiasModel quench = BiasModel::quench();
    BiasModel pump = BiasModel::pump();
    for (int state = 0; state < 2; ++state) {
        double prev_q = 2.0, prev_p = -1.0;
        for (double t = 0.0; t <= 30.0; t += 0.5) {
            double pq = apply_bias(quench, state, t);
            double pp = apply_bias(pump, state, t);
            CHECK(pq >= 0.0);
            CHECK(pq <= 1.0);
            CHECK(pp >= 0.0);
            CHECK(pp <= 1.0);
            CHECK(pq <= prev_q + 1e-12);
            CHECK(pp >= prev_p - 1e-12);
            prev_q = pq;
            prev_p = pp;
        }
    }
}

namespace {

std::vector<RoundRecord> base_records(uint64_t rounds, uint64_t seed) {
    QkdParams params;
    params.rounds = rounds;
    params.seed = seed;
    return run_bb84(params);
}

}  // namespace

TEST_CASE("zero-duration bias leaves the records unchanged in distribution") {
    auto records = base_records(20000, 91);
    BiasModel quench = BiasModel::quench();
    auto biased = inject_bias(records, quench, 0.0, 17);
    auto q0 = qber_abort_check(sift(records));
    auto q1 = qber_abort_check(sift(biased));
    CHECK(std::abs(q1.qber - q0.qber) < 0.01);
}

TEST_CASE("a saturated pump forces dark outcomes and a half qber") {
    auto records = base_records(20000, 92);
    auto biased = inject_bias(records, BiasModel::pump(), 50.0, 18);
    for (const RoundRecord& r : biased) CHECK(r.x_b == 0);
    auto q = qber_abort_check(sift(biased));
    CHECK(std::abs(q.qber - 0.5) < 4.0 * std::sqrt(0.25 / double(sift(biased).size())));
    CHECK(q.abort);
}

TEST_CASE("leakage mutual information saturates at long exposure") {
    auto records = base_records(10000, 93);
    DetectorModel det;
    auto leaked = inject_leakage(records, det, 1100.0, 19);
    CHECK(leak_mutual_information(leaked) > 0.9);

    auto blind = inject_leakage(records, det, 0.0, 20);
    CHECK(leak_mutual_information(blind) < 0.01);

    CHECK_THROWS(leak_mutual_information(records));  // no e_leak bits
}

TEST_CASE("neutral side-channel parameters leave bb84 undisturbed") {
    auto records = base_records(20000, 94);
    DetectorModel det;
    auto leaked = inject_leakage(records, det, 2000.0, 21);
    uint64_t changed = 0;
    for (size_t i = 0; i < records.size(); ++i)
        changed += records[i].x_b != leaked[i].x_b;
    // only SPAM-floor flips expected
    CHECK(double(changed) / records.size() < 3.0 * det.spam_floor + 0.01);
}
