#pragma once

#include "prodstate/simaccess.hpp"

#include <vector>

namespace prodstate {

struct LocalOptConfig {
    double eps = 0.05;
    double delta = 0.01;
    double C = 0.0;
    /// 0 selects ten times the iteration bound derived from eps and C.
    int max_outer_iters = 0;
};

/// One executed update of the local optimizer, with exact fidelities of the oracle's hidden state.
struct LocalStep {
    double a_norm = 0;
    double fidelity_before = 0;
    double fidelity_after = 0;
    int lambda = 0;
};

struct LocalOptTrace {
    std::vector<LocalStep> steps;
    int outer_iters = 0;
    int m = 0;
    std::uint64_t copies = 0;
};

/// Derived ladder length m = ceil(log(90 / (C' eps)) / 2) with C' = max(eps, C).
int local_opt_levels(double eps, double C);

/// Per-level failure probability delta_lambda.
double local_opt_level_delta(double eps, double delta, double C, int lambda);

/// Iteration bound used for the safety cap (before the factor ten).
long long local_opt_iteration_bound(double eps, double C);

/// Local product-state optimization from `start`.
ProductParams local_optimize(StateOracle& o, const ProductParams& start, const LocalOptConfig& cfg,
                             LocalOptTrace* trace = nullptr);

struct HighFidTrace {
    std::vector<LocalStep> steps;
    std::uint64_t copies = 0;
};

/// Divide-and-conquer learner for states with a product state of fidelity >= 5/6 + eps.
ProductParams high_fidelity_learn(StateOracle& o, double eps, double delta, HighFidTrace* trace = nullptr);

/// Constant-precision single-qubit tomography: X, Y, Z measured ceil(50 log(2/delta)) times each.
ProductParams single_qubit_estimate(StateOracle& o, double delta);

/// Certified upper bound alpha2 + min(3 |z|, |z|^2 / c) on any product fidelity.
double fidelity_upper_bound(double alpha2, double norm_z, double c);

} // namespace prodstate
