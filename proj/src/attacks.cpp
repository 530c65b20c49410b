#include "qkdsim/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qkdsim {

namespace {

// V = H.Sdg maps the x-z great circle (the BB84 states) onto the x-y
// equator, where the economical cloner is covariant.
void append_v(Circuit& c, int q) { c.sdg(q).h(q); }
void append_v_dag(Circuit& c, int q) { c.h(q).s(q); }

// Givens rotation on span{|01>,|10>}: |10> -> cos(eta)|10> + sin(eta)|01>.
void append_excitation_givens(Circuit& c, int data, int blank, double eta) {
    c.cnot(data, blank);
    c.cnot(blank, data);
    c.ry(data, eta);
    c.cnot(blank, data);
    c.ry(data, -eta);
    c.cnot(data, blank);
}

// Rz(g) out of the available gate set: Rz = H Rx H with Rx = S Ry(-g) Sdg.
void append_rz(Circuit& c, int q, double g) {
    c.h(q).sdg(q).ry(q, -g).s(q).h(q);
}

// exp(-i(g/2) X_d Z_b): the blank picks up Rz(+-g) conditioned on the
// data's X eigenvalue. Commutes with X_data, so B's X statistics are
// untouched while E's clone tilts toward the data's X eigenvalue (the
// cloner's blank frame leaves the no-clone pole on the y axis, where a
// z rotation swings it into E's x readout).
void append_x_frame_copier(Circuit& c, int data, int blank, double g) {
    c.h(data);
    c.cnot(data, blank);
    append_rz(c, blank, g);
    c.cnot(data, blank);
    c.h(data);
}

}  // namespace

void append_cloner(Circuit& circuit, const ClonerSpec& spec, int data, int blank) {
    if (const auto* pccm = std::get_if<PccmSpec>(&spec)) {
        // tolerate rounded inputs like 3.1416 at the boundary
        double theta = std::clamp(pccm->theta, 0.0, M_PI);
        if (std::abs(theta - pccm->theta) > 1e-4)
            throw std::invalid_argument("PCCM attack angle must be in [0, pi]");
        append_v(circuit, data);
        append_excitation_givens(circuit, data, blank, theta / 2.0);
        append_v_dag(circuit, data);
        append_v_dag(circuit, blank);
        return;
    }
    const auto& imb_raw = std::get<ImbalancedSpec>(spec);
    ImbalancedSpec imb{std::clamp(imb_raw.psi, 0.0, M_PI / 2.0), imb_raw.phi};
    if (std::abs(imb.psi - imb_raw.psi) > 1e-4)
        throw std::invalid_argument("imbalanced attack angle must be in [0, pi/2]");
    // Symmetric core at effective PCCM angle 2*psi; detuning phi away from
    // optimal_phi(psi, 0) = psi - pi/2 feeds the X-frame copier.
    double copier = std::sin(2.0 * imb.psi) * ((imb.psi - M_PI / 2.0) - imb.phi);
    append_v(circuit, data);
    append_excitation_givens(circuit, data, blank, imb.psi);
    append_v_dag(circuit, data);
    append_v_dag(circuit, blank);
    if (std::abs(copier) > 1e-15)
        append_x_frame_copier(circuit, data, blank, copier);
}

double pccm_fidelity_ab(double theta) { return (1.0 + std::cos(theta / 2.0)) / 2.0; }
double pccm_fidelity_ae(double theta) { return (1.0 + std::sin(theta / 2.0)) / 2.0; }

std::pair<double, double> expected_pccm_correlations(double theta) {
    return {std::cos(theta / 2.0), std::sin(theta / 2.0)};
}

double optimal_phi(double psi, double p) {
    if (psi < 0.0 || psi > M_PI / 2 + 1e-12)
        throw std::invalid_argument("psi must be in [0, pi/2]");
    if (p < 0.0 || p > 0.5)
        throw std::invalid_argument("p must be in [0, 0.5]");
    if (psi == 0.0) return -M_PI / 2.0;  // cot singularity limit
    double w = (1.0 - 2.0 * p);
    return -std::atan(w * w / std::tan(psi));
}

QclResult qcl_optimize(const QclConfig& config, const QclEvaluator& evaluator) {
    if (config.target_fidelity < 0.5 || config.target_fidelity > 1.0)
        throw std::invalid_argument("target fidelity must be in [0.5, 1]");
    if (config.alpha <= 0.0)
        throw std::invalid_argument("alpha must be positive");
    QclResult result;
    auto loss_of = [&](double f_ab, double f_ae) {
        double d = f_ab - config.target_fidelity;
        return config.alpha * d * d - f_ae;
    };
    auto probe = [&](double theta) {
        theta = std::clamp(theta, 0.0, M_PI);
        auto [f_ab, f_ae] = evaluator(theta);
        result.trace.push_back({theta, loss_of(f_ab, f_ae), f_ab, f_ae});
        return result.trace.back();
    };

    int budget = config.max_iterations;
    // Phase 1: coarse scan of the loss to bracket the basin.
    int scan_points = std::min(7, std::max(3, budget / 3));
    double best_theta = std::clamp(config.initial_theta, 0.0, M_PI);
    double best_loss = 0.0;
    for (int i = 0; i < scan_points; ++i) {
        double theta = M_PI * static_cast<double>(i) / (scan_points - 1);
        QclIterate it = probe(theta);
        if (i == 0 || it.loss < best_loss) { best_loss = it.loss; best_theta = it.theta; }
    }
    double step = M_PI / (scan_points - 1);
    double lo = std::max(0.0, best_theta - 2.0 * step);
    double hi = std::min(M_PI, best_theta + 2.0 * step);

    // Phase 2: drive F_AB to the target inside the bracket (penalty-limit
    // refinement; F_AB is monotone in theta). Robbins-Monro steps absorb
    // the shot noise.
    double theta = (config.initial_theta >= lo && config.initial_theta <= hi)
                       ? config.initial_theta
                       : best_theta;
    const int poll_budget = budget >= 24 ? 9 : 0;
    int rm_budget = budget - static_cast<int>(result.trace.size()) - poll_budget;
    for (int k = 1; k <= rm_budget; ++k) {
        QclIterate it = probe(theta);
        double gain = 2.2 / (2.0 + k);
        // dF_AB/dtheta < 0, so move along +gain * (F - f)
        theta = std::clamp(theta + gain * (it.f_ab - config.target_fidelity) * M_PI,
                           lo, hi);
    }
    result.theta_star = theta;
    if (poll_budget > 0) {
        // Final polish: probe around the iterate, then invert a local
        // linear fit of F_AB(theta) at the target. Every evaluation near
        // the root (including the Robbins-Monro tail) enters the fit.
        double h = 0.12;
        for (int rep = 0; rep < 3; ++rep)
            for (int j = -1; j <= 1; ++j)
                probe(std::clamp(theta + j * h, 0.0, M_PI));
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int n = 0;
        for (const QclIterate& it : result.trace) {
            if (std::abs(it.theta - theta) > 0.25) continue;
            sx += it.theta; sy += it.f_ab;
            sxx += it.theta * it.theta;
            sxy += it.theta * it.f_ab;
            ++n;
        }
        double denom = n * sxx - sx * sx;
        double beta = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
        if (beta < -1e-6) {
            double alpha = (sy - beta * sx) / n;
            result.theta_star = std::clamp(
                (config.target_fidelity - alpha) / beta, lo, hi);
        }
    }
    return result;
}

}  // namespace qkdsim
