#include "oracles.hpp"

#include "prodstate/highfid.hpp"

#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

using namespace prodstate;

TEST(FidelityUpperBound, Examples) {
    EXPECT_EQ(fidelity_upper_bound(0.7, 0.0, 0.1), 0.7);
    EXPECT_NEAR(fidelity_upper_bound(0.8, 0.1, 2.0 / 15.0), 0.875, 1e-15);
    EXPECT_NEAR(fidelity_upper_bound(0.5, 0.9, 0.1), 0.5 + 2.7, 1e-15);
    EXPECT_THROW(fidelity_upper_bound(0.5, 0.1, 0.0), std::invalid_argument);
}

TEST(LocalOptSchedule, DerivedValues) {
    EXPECT_EQ(local_opt_levels(0.05, 0.0), 6);
    EXPECT_EQ(local_opt_levels(0.05, 0.5), 5);
    EXPECT_EQ(local_opt_iteration_bound(0.05, 0.0), 40689 + 108000);
    double total = 0;
    for (int l = 1; l <= local_opt_levels(0.05, 0.0); ++l) total += local_opt_level_delta(0.05, 0.1, 0.0, l);
    EXPECT_LT(total, 0.1);
}

TEST(LocalOptimize, ZeroStateIsFixedPoint) {
    StateOracle o = StateOracle::exact(product_state_vector(ProductParams::zeros(4)), 0.0, 1);
    LocalOptTrace tr;
    ProductParams out = local_optimize(o, ProductParams::zeros(4), LocalOptConfig{}, &tr);
    EXPECT_NEAR(tangent_distance(out, ProductParams::zeros(4)), 0.0, 1e-12);
    EXPECT_TRUE(tr.steps.empty());
    EXPECT_EQ(tr.copies, o.copies_consumed());
}

TEST(LocalOptimize, ClimbsFromModerateOverlap) {
    Rng rng(2);
    ProductParams target = random_params(4, 1.0, rng);
    std::vector<Matrix2c> gens;
    for (int i = 0; i < 4; ++i) {
        Matrix2c h;
        cplx c = complex_normal(rng);
        h << 0, std::conj(c), c, 0;
        gens.push_back(h);
    }
    auto rotated = [&](double t) {
        std::vector<Matrix2c> us;
        for (const auto& h : gens) us.push_back(Matrix2c(cplx(0, -t) * h).exp());
        return apply_site_unitaries(target, us);
    };
    double lo = 0, hi = 1.5;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (product_overlap(rotated(mid), target) > 0.7 ? lo : hi) = mid;
    }
    ProductParams start = rotated(lo);
    const double f0 = product_overlap(start, target);
    ASSERT_NEAR(f0, 0.7, 1e-6);
    QuantumState s = product_state_vector(target);
    StateOracle o = StateOracle::exact(s, 0.0, 3);
    LocalOptConfig cfg;
    cfg.eps = 0.05;
    LocalOptTrace tr;
    ProductParams out = local_optimize(o, start, cfg, &tr);
    EXPECT_GE(fidelity(s, out), 0.95);
    EXPECT_FALSE(tr.steps.empty());
    for (const auto& st : tr.steps) EXPECT_GE(st.fidelity_after - st.fidelity_before, st.a_norm * st.a_norm / 20 - 1e-9);
}

TEST(LocalOptimize, RejectsBadConfig) {
    StateOracle o = StateOracle::exact(maximally_mixed(2), 0.0, 4);
    LocalOptConfig cfg;
    cfg.eps = 0.5;
    EXPECT_THROW(local_optimize(o, ProductParams::zeros(2), cfg), std::invalid_argument);
    cfg.eps = 0.05;
    cfg.C = 0.7;
    EXPECT_THROW(local_optimize(o, ProductParams::zeros(2), cfg), std::invalid_argument);
    EXPECT_THROW(local_optimize(o, ProductParams::zeros(3), LocalOptConfig{}), std::invalid_argument);
}

TEST(SingleQubitEstimate, RecoversPureState) {
    Rng rng(5);
    for (int t = 0; t < 5; ++t) {
        ProductParams p = haar_product_params(1, rng);
        StateOracle o = StateOracle::exact(product_state_vector(p), 0.0, 5 + t);
        EXPECT_GT(product_overlap(single_qubit_estimate(o, 0.05), p), 0.97);
    }
}

TEST(HighFidelityLearn, PureProducts) {
    Rng rng(6);
    for (int n = 1; n <= 8; ++n) {
        ProductParams p = haar_product_params(n, rng);
        QuantumState s = product_state_vector(p);
        StateOracle o = StateOracle::exact(s, 0.0, 60 + n);
        HighFidTrace tr;
        ProductParams out = high_fidelity_learn(o, 0.05, 0.05, &tr);
        EXPECT_GE(fidelity(s, out), 0.95) << "n=" << n;
        EXPECT_EQ(tr.copies, o.copies_consumed());
    }
}

TEST(HighFidelityLearn, NoisyZeroState) {
    const int n = 6;
    const double w = 0.95;
    VectorXc z = VectorXc::Zero(64);
    z(0) = 1;
    MatrixXc rho = w * z * z.adjoint() + (1 - w) * MatrixXc::Identity(64, 64) / 64.0;
    QuantumState s = QuantumState::mixed(n, 2, rho);
    const double opt = w + (1 - w) / 64;
    EXPECT_NEAR(oracle::planted_product_opt(ProductParams::zeros(n), w, 0.05), opt, 1e-12);
    StateOracle o = StateOracle::exact(s, 0.01, 7);
    ProductParams out = high_fidelity_learn(o, 0.1, 0.05);
    EXPECT_GE(fidelity(s, out), opt - 0.1);
}

TEST(HighFidelityLearn, RejectsEps) {
    StateOracle o = StateOracle::exact(maximally_mixed(2), 0.0, 8);
    EXPECT_THROW(high_fidelity_learn(o, 0.2, 0.05), std::invalid_argument);
    EXPECT_THROW(high_fidelity_learn(o, 0.1, 1.0), std::invalid_argument);
}
