#include "oracles.hpp"

#include "prodstate/simaccess.hpp"

#include <gtest/gtest.h>

using namespace prodstate;

namespace {

QuantumState zero_state(int n) { return product_state_vector(ProductParams::zeros(n)); }

} // namespace

TEST(StateOracle, CopyAccountingIsMonotone) {
    StateOracle o = StateOracle::exact(zero_state(3), 0.0, 1);
    EXPECT_EQ(o.copies_consumed(), 0u);
    std::uint64_t last = 0;
    for (int t = 0; t < 3; ++t) {
        estimate_fidelity(o, 3, ProductParams::zeros(3), 0.1, 0.1);
        EXPECT_GT(o.copies_consumed(), last);
        last = o.copies_consumed();
    }
    EXPECT_EQ(o.copies_consumed(), 3 * estimate_fidelity_copies(0.1, 0.1));
    o.consume(std::numeric_limits<std::uint64_t>::max());
    EXPECT_EQ(o.copies_consumed(), std::numeric_limits<std::uint64_t>::max());
}

TEST(StateOracle, ForkAndRestrictHaveOwnCounters) {
    StateOracle o = StateOracle::exact(maximally_mixed(3), 0.0, 2);
    StateOracle f = o.fork(1);
    StateOracle r = o.restrict(1, 2, 2);
    EXPECT_EQ(r.n(), 2);
    EXPECT_NEAR(r.density().trace().real(), 1.0, 1e-12);
    EXPECT_LT((r.density() - MatrixXc::Identity(4, 4) / 4.0).norm(), 1e-12);
    f.consume(10);
    EXPECT_EQ(o.copies_consumed(), 0u);
    EXPECT_EQ(f.copies_consumed(), 10u);
}

TEST(StateOracle, RestrictMatchesPartialTraceOracle) {
    Rng rng(3);
    MatrixXc rho = random_density_matrix(16, 3, rng);
    StateOracle o = StateOracle::exact(QuantumState::mixed(4, 2, rho), 0.0, 3);
    EXPECT_LT((o.restrict(0, 2, 0).density() - oracle::partial_trace_suffix(rho, 4, 2)).norm(), 1e-12);
}

TEST(SaturatingArithmetic, Caps) {
    const auto mx = std::numeric_limits<std::uint64_t>::max();
    EXPECT_EQ(sat_mul(mx, 2), mx);
    EXPECT_EQ(sat_mul(3, 4), 12u);
    EXPECT_EQ(sat_ceil(1e30), mx);
    EXPECT_EQ(sat_ceil(2.1), 3u);
}

TEST(EstimateZ, Examples) {
    StateOracle o = StateOracle::exact(zero_state(4), 0.0, 4);
    EXPECT_LT(estimate_z(o, {}, 0.05, 0.05).norm(), 0.05);

    const int n = 3;
    const double alpha = 0.8, beta = 0.6;
    VectorXc psi = VectorXc::Zero(8);
    psi(0) = alpha;
    psi(4) = beta;  // |100>: site 1 flipped
    QuantumState s = QuantumState::pure(n, 2, psi);
    VectorXc want = VectorXc::Zero(n);
    want(0) = alpha * beta;
    EXPECT_LT((true_z(s.density(), n, {}) - want).norm(), 1e-15);
    StateOracle e = StateOracle::exact(s, 0.0, 5);
    EXPECT_LT((estimate_z(e, {}, 0.05, 0.05) - want).norm(), 0.05);
}

TEST(EstimateZ, NormAtMostHalf) {
    Rng rng(6);
    for (int t = 0; t < 500; ++t) {
        const int n = 1 + t % 6;
        MatrixXc rho = random_density_matrix(ipow(2, n), 1 + t % 4, rng);
        EXPECT_LE(true_z(rho, n, {}).norm(), 0.5 + 1e-9);
    }
}

TEST(EstimateZ, ShadowSamplesAreUnbiased) {
    Rng rng(7);
    const int n = 3;
    MatrixXc rho = random_density_matrix(8, 2, rng);
    VectorXc truth = true_z(rho, n, {});
    MatrixXc reg = compressed_register(rho, n, {});
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(reg);
    const int N = 10000;
    VectorXc sum = VectorXc::Zero(n);
    Eigen::VectorXd sq_re = Eigen::VectorXd::Zero(n), sq_im = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < N; ++k) {
        VectorXc z = shadow_z_sample(es.eigenvalues(), es.eigenvectors(), n, rng);
        sum += z;
        for (int i = 0; i < n; ++i) {
            sq_re(i) += z(i).real() * z(i).real();
            sq_im(i) += z(i).imag() * z(i).imag();
        }
    }
    VectorXc mean = sum / double(N);
    for (int i = 0; i < n; ++i) {
        const double sre = std::sqrt(std::max(1e-12, sq_re(i) / N - std::pow(mean(i).real(), 2)) / N);
        const double sim = std::sqrt(std::max(1e-12, sq_im(i) / N - std::pow(mean(i).imag(), 2)) / N);
        EXPECT_LE(std::abs(mean(i).real() - truth(i).real()), 5 * sre);
        EXPECT_LE(std::abs(mean(i).imag() - truth(i).imag()), 5 * sim);
    }
}

TEST(EstimateZ, SamplingBackendWithinTolerance) {
    Rng rng(8);
    const int n = 2;
    MatrixXc rho = random_density_matrix(4, 1, rng);
    StateOracle o = StateOracle::sampling(QuantumState::mixed(n, 2, rho), 8);
    EXPECT_LT((estimate_z(o, {}, 0.2, 0.1) - true_z(rho, n, {})).norm(), 0.2);
    EXPECT_EQ(o.copies_consumed(), estimate_z_budget(n, 0.2, 0.1).total());
}

TEST(MedianOfMeans, PicksCentralMean) {
    std::vector<VectorXc> means;
    for (double x : {0.0, 0.1, 0.2, 5.0}) means.push_back(VectorXc::Constant(2, x));
    EXPECT_NEAR(median_of_means(means)(0).real(), 0.1, 1e-15);
}

TEST(SubspaceTomography, ExactBackendIsBitForBit) {
    Rng rng(9);
    MatrixXc rho = random_density_matrix(32, 3, rng);
    StateOracle o = StateOracle::exact(QuantumState::mixed(5, 2, rho), 0.0, 9);
    MatrixXc est = subspace_tomography(o, 3, 1, 0.1, 0.1);
    EXPECT_EQ(est, truncate_weight(oracle::partial_trace_suffix(rho, 5, 3), 3, 1));
    StateOracle z = StateOracle::exact(zero_state(4), 0.0, 10);
    MatrixXc e0 = subspace_tomography(z, 2, 2, 0.1, 0.1);
    MatrixXc want = MatrixXc::Zero(4, 4);
    want(0, 0) = 1;
    EXPECT_EQ(e0, want);
}

TEST(SubspaceTomography, NoiseStaysWithinTolerance) {
    Rng rng(10);
    MatrixXc rho = random_density_matrix(16, 2, rng);
    StateOracle o = StateOracle::exact(QuantumState::mixed(4, 2, rho), 0.05, 10);
    MatrixXc est = subspace_tomography(o, 4, 2, 0.1, 0.1);
    MatrixXc tr = truncate_weight(rho, 4, 2);
    EXPECT_LE(op_norm(est - tr), 0.1 + 1e-12);
    for (std::uint64_t b = 0; b < 16; ++b)
        if (popcount(b) > 2) EXPECT_EQ(est.row(b).norm() + est.col(b).norm(), 0.0);
}

TEST(SubnormalizedTomography, Examples) {
    StateOracle o = StateOracle::exact(zero_state(4), 0.0, 11);
    MatrixXc s = subnormalized_tomography(o, {}, 2, 0.05, 0.1);
    MatrixXc want = MatrixXc::Zero(4, 4);
    want(0, 0) = 1;
    EXPECT_LT((s - want).norm(), 1e-12);
    VectorXc ones = VectorXc::Zero(16);
    ones(15) = 1;
    StateOracle q = StateOracle::exact(QuantumState::pure(4, 2, ones), 0.0, 12);
    EXPECT_LT(subnormalized_tomography(q, {}, 2, 0.05, 0.1).norm(), 1e-12);
}

TEST(EstimateFidelity, Examples) {
    Rng rng(13);
    ProductParams p = random_params(4, 2.0, rng);
    StateOracle o = StateOracle::exact(product_state_vector(p), 0.0, 13);
    EXPECT_NEAR(estimate_fidelity(o, 4, p, 0.05, 0.1), 1.0, 0.05);
    StateOracle m = StateOracle::exact(maximally_mixed(4), 0.0, 14);
    EXPECT_NEAR(estimate_fidelity(m, 3, ProductParams::zeros(3), 0.05, 0.1), 0.125, 0.05);
    StateOracle s = StateOracle::sampling(maximally_mixed(2), 15);
    EXPECT_NEAR(estimate_fidelity(s, 2, ProductParams::zeros(2), 0.05, 0.1), 0.25, 0.05);
}

TEST(PauliTomography, ConvergesOnSingleQubit) {
    Rng rng(16);
    MatrixXc rho = random_density_matrix(2, 1, rng);
    MatrixXc est = pauli_tomography(rho, 1, 200000, rng);
    EXPECT_LT(op_norm(est - rho), 0.02);
}

TEST(ApplyFrame, BlockGateMatchesKron) {
    Rng rng(17);
    MatrixXc rho = random_density_matrix(8, 2, rng);
    MatrixXc u = haar_unitary(4, rng);
    Frame f{BlockGate{1, 2, u}};
    MatrixXc full = prodstate::kron(MatrixXc::Identity(2, 2), u);
    EXPECT_LT((apply_frame(rho, 3, 2, f) - full * rho * full.adjoint()).norm(), 1e-12);
}
