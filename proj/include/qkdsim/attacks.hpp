#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "qkdsim/circuit.hpp"

namespace qkdsim {

struct PccmSpec { double theta; };                  // theta in [0, pi]
struct ImbalancedSpec { double psi; double phi; };  // psi in [0, pi/2]

using ClonerSpec = std::variant<PccmSpec, ImbalancedSpec>;

// Appends the cloning unitary onto (data, blank); the blank qubit must
// already be prepared in |0>.
void append_cloner(Circuit& circuit, const ClonerSpec& spec, int data, int blank);

// Sifted, input-averaged closed forms for the phase-covariant cloner:
// F_AB = (1+cos(theta/2))/2, F_AE = (1+sin(theta/2))/2.
double pccm_fidelity_ab(double theta);
double pccm_fidelity_ae(double theta);

// (C_AB, C_AE) = (cos(theta/2), sin(theta/2)).
std::pair<double, double> expected_pccm_correlations(double theta);

// Tuning angle -arctan((1-2p)^2 cot(psi)); psi -> 0 returns the -pi/2 limit.
double optimal_phi(double psi, double p);

struct QclConfig {
    double alpha = 10.0;
    double target_fidelity = 0.85;
    int shots_per_config = 500;  // per (bit, basis) configuration
    int max_iterations = 30;
    double initial_theta = 1.0;
    uint64_t seed = 0;
};

struct QclIterate {
    double theta;
    double loss;
    double f_ab;
    double f_ae;
};

struct QclResult {
    double theta_star;
    std::vector<QclIterate> trace;
};

// evaluator(theta) -> shot-estimated (F_AB, F_AE).
using QclEvaluator = std::function<std::pair<double, double>(double)>;

// Derivative-free minimization of alpha*(F_AB - f)^2 - F_AE over [0, pi]:
// a coarse loss scan brackets the basin, then the remaining budget pins
// F_AB to the target (the large-penalty limit of the same loss) by
// stochastic approximation.
QclResult qcl_optimize(const QclConfig& config, const QclEvaluator& evaluator);

}  // namespace qkdsim
