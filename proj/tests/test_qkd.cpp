#include <doctest.h>

#include <cmath>
#include <sstream>

#include "qkdsim/qkd.hpp"

using namespace qkdsim;

TEST_CASE("sift keeps matched bases, in order, idempotently") {
    std::vector<RoundRecord> records(8);
    for (size_t i = 0; i < records.size(); ++i) {
        records[i].b_a = Basis::Z;
        records[i].b_b = (i % 2 == 0) ? Basis::Z : Basis::X;
        records[i].x_a = uint8_t(i & 1);
    }
    auto kept = sift(records);
    CHECK(kept.size() == 4);
    auto again = sift(kept);
    CHECK(again.size() == kept.size());

    for (auto& r : records) r.b_b = r.b_a;
    CHECK(sift(records).size() == records.size());
}

TEST_CASE("sifted fraction is about one half") {
    QkdParams params;
    params.rounds = 4000;
    params.seed = 12;
    auto sifted = sift(run_bb84(params));
    double frac = double(sifted.size()) / 4000.0;
    CHECK(std::abs(frac - 0.5) < 4.0 * std::sqrt(0.25 / 4000.0));
}

TEST_CASE("correlation arithmetic and standard error") {
    std::vector<RoundRecord> records(4);
    int xa[4] = {0, 1, 0, 1}, xb[4] = {0, 1, 1, 1};
    for (int i = 0; i < 4; ++i) {
        records[i].x_a = xa[i];
        records[i].x_b = xb[i];
    }
    CorrelationEstimate est = correlation(records, Pair::AB);
    CHECK(est.value == doctest::Approx(0.5));

    std::vector<RoundRecord> perfect(100);
    for (auto& r : perfect) { r.x_a = 1; r.x_b = 1; }
    est = correlation(perfect, Pair::AB);
    CHECK(est.value == doctest::Approx(1.0));
    CHECK(est.std_err == doctest::Approx(0.0));

    std::vector<RoundRecord> nil(2000);
    for (size_t i = 0; i < nil.size(); ++i) { nil[i].x_a = 0; nil[i].x_b = i & 1; }
    est = correlation(nil, Pair::AB);
    CHECK(est.std_err == doctest::Approx(0.02236).epsilon(1e-3));

    CHECK_THROWS(correlation({}, Pair::AB));
    CHECK_THROWS(correlation(records, Pair::AE));  // no Eve bit recorded
}

TEST_CASE("noiseless protocol gives identical sifted keys") {
    QkdParams params;
    params.rounds = 10000;
    params.seed = 3;
    for (const RoundRecord& r : sift(run_bb84(params)))
        CHECK(r.x_a == r.x_b);
}

TEST_CASE("pccm sampled correlations match the closed forms") {
    QkdParams params;
    params.rounds = 4000;
    params.seed = 19;
    params.attack = PccmSpec{M_PI / 2};
    auto sifted = sift(run_bb84(params));
    double tol = 4.0 * 0.0224;
    CHECK(std::abs(correlation(sifted, Pair::AB).value - std::sqrt(0.5)) < tol);
    CHECK(std::abs(correlation(sifted, Pair::AE).value - std::sqrt(0.5)) < tol);
}

TEST_CASE("no-cloning circle from the exact oracle") {
    for (int i = 0; i <= 8; ++i) {
        double theta = M_PI * i / 8.0;
        for (Basis basis : {Basis::Z, Basis::X}) {
            auto oc = oracle_correlations_bb84(PccmSpec{theta}, basis);
            CHECK(std::abs(oc.c_ab * oc.c_ab + oc.c_ae * oc.c_ae - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("bitflip channel scales Z-sifted correlations by 1-2p") {
    QkdParams params;
    params.rounds = 60000;
    params.seed = 23;
    params.attack = PccmSpec{0.9};
    params.channel_noise = ChannelSeq{ChannelSpec{BitFlip{0.25}}};
    auto sifted = sift(run_bb84(params));
    double want = std::cos(0.45);
    double tol = 4.0 / std::sqrt(15000.0);
    CHECK(std::abs(correlation(sifted, Pair::AB, Basis::Z).value - 0.5 * want) < tol);
    CHECK(std::abs(correlation(sifted, Pair::AB, Basis::X).value - want) < tol);
}

TEST_CASE("deterministic X flips Z-sifted sign and kills the average") {
    QkdParams params;
    params.rounds = 16000;
    params.seed = 29;
    params.attack = PccmSpec{0.8};
    params.channel_noise =
        ChannelSeq{ChannelSpec{DeterministicPauli{PauliString::from_str("X")}}};
    auto sifted = sift(run_bb84(params));
    double want = std::cos(0.4);
    double tol = 4.0 / std::sqrt(4000.0);
    CHECK(std::abs(correlation(sifted, Pair::AB, Basis::Z).value + want) < tol);
    CHECK(std::abs(correlation(sifted, Pair::AB, Basis::X).value - want) < tol);
    CHECK(std::abs(correlation(sifted, Pair::AB).value) < tol);
}

TEST_CASE("qber abort threshold") {
    std::vector<RoundRecord> records(10000);
    for (size_t i = 0; i < records.size(); ++i) {
        records[i].x_a = 0;
        records[i].x_b = i < 1464 ? 1 : 0;
    }
    QberResult res = qber_abort_check(records);
    CHECK(res.qber == doctest::Approx(0.1464));
    CHECK(res.abort);

    for (size_t i = 0; i < records.size(); ++i) records[i].x_b = i < 1450 ? 1 : 0;
    res = qber_abort_check(records);
    CHECK_FALSE(res.abort);

    CHECK_THROWS(qber_abort_check({}));
}

TEST_CASE("bbm92 matched bases agree without an attack") {
    QkdParams params;
    params.rounds = 6000;
    params.seed = 31;
    for (const RoundRecord& r : sift(run_bbm92(params)))
        CHECK(r.x_a == r.x_b);
}

TEST_CASE("bbm92 pccm correlations track the bb84 closed forms") {
    QkdParams params;
    params.rounds = 8000;
    params.seed = 37;
    params.attack = PccmSpec{1.2};
    auto sifted = sift(run_bbm92(params));
    auto [want_ab, want_ae] = std::pair{std::cos(0.6), std::sin(0.6)};
    double tol = 4.0 / std::sqrt(double(sifted.size()));
    CHECK(std::abs(correlation(sifted, Pair::AB).value - want_ab) < tol);
    CHECK(std::abs(correlation(sifted, Pair::AE).value - want_ae) < tol);
}

TEST_CASE("bbm92 eve is uncorrelated with bob at zero attack angle") {
    QkdParams params;
    params.rounds = 8000;
    params.seed = 41;
    params.attack = PccmSpec{0.0};
    auto sifted = sift(run_bbm92(params));
    CHECK(std::abs(correlation(sifted, Pair::BE).value) <
          4.0 / std::sqrt(double(sifted.size())));
}

TEST_CASE("round record CSV schema") {
    QkdParams params;
    params.rounds = 3;
    params.seed = 43;
    params.attack = PccmSpec{0.5};
    auto records = run_bb84(params);
    std::ostringstream os;
    write_records_csv(os, records);
    std::string text = os.str();
    CHECK(text.rfind("round,x_A,b_A,b_B,x_B,b_E,x_E,herald\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

TEST_CASE("a deterministic X channel without an attack halves the key") {
    QkdParams params;
    params.rounds = 20000;
    params.seed = 47;
    params.channel_noise =
        ChannelSeq{ChannelSpec{DeterministicPauli{PauliString::from_str("X")}}};
    auto sifted = sift(run_bb84(params));
    // Z-sifted rounds fully flipped, X-sifted untouched
    QberResult q = qber_abort_check(sifted);
    CHECK(std::abs(q.qber - 0.5) < 4.0 * std::sqrt(0.25 / double(sifted.size())));
    CHECK(q.abort);
}

TEST_CASE("bbm92 eve-bob correlation matches the exact oracle at mid angle") {
    double theta = M_PI / 2;
    auto oracle = oracle_correlations_bbm92(PccmSpec{theta}, Basis::Z);
    CHECK(oracle.c_be > 0.2);  // interior peak exists
    QkdParams params;
    params.rounds = 20000;
    params.seed = 53;
    params.attack = PccmSpec{theta};
    auto sifted = sift(run_bbm92(params));
    auto z = correlation(sifted, Pair::BE, Basis::Z);
    CHECK(std::abs(z.value - oracle.c_be) < 4.0 * z.std_err + 0.01);
}
