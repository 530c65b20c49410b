#include "qkdsim/sidechannel.hpp"

#include <cmath>
#include <stdexcept>

namespace qkdsim {

uint64_t sample_poisson(double mean, ShotRng& rng) {
    if (mean < 0.0) throw std::invalid_argument("poisson mean must be >= 0");
    if (mean == 0.0) return 0;
    if (mean > 25.0) {
        // normal approximation; only threshold comparisons far in the
        // bulk matter at these means
        double u1 = rng.next_double(), u2 = rng.next_double();
        if (u1 < 1e-300) u1 = 1e-300;
        double gauss = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
        double v = mean + std::sqrt(mean) * gauss;
        return v < 0.0 ? 0 : static_cast<uint64_t>(std::llround(v));
    }
    double limit = std::exp(-mean);
    uint64_t k = 0;
    double prod = rng.next_double();
    while (prod > limit) {
        ++k;
        prod *= rng.next_double();
    }
    return k;
}

DoubleDetection double_detection(const DetectorModel& detector, int true_state,
                                 double b_exposure_us, double e_exposure_us,
                                 ShotRng& rng) {
    if (b_exposure_us < 0.0 || e_exposure_us < 0.0)
        throw std::invalid_argument("exposure must be >= 0");
    // |0> is shelved (dark), |1> scatters (bright); E reads the ion in
    // the state B's measurement projected it to.
    bool bright = true_state == 1;
    if (detector.spam_floor > 0.0 && rng.bernoulli(detector.spam_floor))
        bright = !bright;
    double rate = bright ? detector.bright_rate : detector.dark_rate;
    DoubleDetection out;
    uint64_t b_counts = sample_poisson(rate * b_exposure_us, rng);
    uint64_t e_counts = sample_poisson(rate * e_exposure_us, rng);
    out.b_dark = b_counts < static_cast<uint64_t>(detector.threshold) ? 1 : 0;
    out.e_dark = e_counts < static_cast<uint64_t>(detector.threshold) ? 1 : 0;
    return out;
}

double apply_bias(const BiasModel& model, int input_state, double duration_us) {
    if (duration_us < 0.0) throw std::invalid_argument("duration must be >= 0");
    double base = model.p_dark0[input_state ? 1 : 0];
    double decay = std::exp(-duration_us / model.tau_us);
    if (model.kind == BiasKind::Quench)
        return base * decay;                  // shelved population pumped back
    return 1.0 - (1.0 - base) * decay;        // population pumped into |0>
}

std::vector<RoundRecord> inject_leakage(const std::vector<RoundRecord>& records,
                                        const DetectorModel& detector,
                                        double e_exposure_us, uint64_t seed,
                                        double b_exposure_us) {
    std::vector<RoundRecord> out = records;
    for (size_t i = 0; i < out.size(); ++i) {
        ShotRng rng(seed, i);
        DoubleDetection det = double_detection(detector, out[i].x_b,
                                               b_exposure_us, e_exposure_us, rng);
        out[i].x_b = det.b_dark ? 0 : 1;
        out[i].e_leak = static_cast<int8_t>(det.e_dark);
    }
    return out;
}

std::vector<RoundRecord> inject_bias(const std::vector<RoundRecord>& records,
                                     const BiasModel& model, double duration_us,
                                     uint64_t seed) {
    std::vector<RoundRecord> out = records;
    for (size_t i = 0; i < out.size(); ++i) {
        ShotRng rng(seed, i);
        double p_dark = apply_bias(model, out[i].x_b, duration_us);
        out[i].x_b = rng.bernoulli(p_dark) ? 0 : 1;
    }
    return out;
}

double leak_mutual_information(const std::vector<RoundRecord>& records) {
    double joint[2][2] = {{0, 0}, {0, 0}};
    double total = 0.0;
    for (const RoundRecord& r : records) {
        if (r.e_leak < 0) continue;
        joint[r.x_b & 1][r.e_leak & 1] += 1.0;
        total += 1.0;
    }
    if (total == 0.0) throw std::invalid_argument("no leakage bits in records");
    double mi = 0.0;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            double p = joint[a][b] / total;
            if (p == 0.0) continue;
            double pa = (joint[a][0] + joint[a][1]) / total;
            double pb = (joint[0][b] + joint[1][b]) / total;
            mi += p * std::log2(p / (pa * pb));
        }
    }
    return mi;
}

}  // namespace qkdsim
