#include "oracles.hpp"

#include "prodstate/hardness.hpp"

#include <gtest/gtest.h>

using namespace prodstate;

namespace {

Graph triangle() { return Graph{3, {{0, 1}, {1, 2}, {0, 2}}}; }

Tensor4 rank_one(const std::array<VectorXc, 4>& f) {
    const int m = static_cast<int>(f[0].size());
    Tensor4 t = Tensor4::zeros(m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) t(i, j, k, l) = f[0](i) * f[1](j) * f[2](k) * f[3](l);
    return t;
}

} // namespace

TEST(CliqueTensor, Structure) {
    Tensor4 t = clique_tensor(triangle());
    EXPECT_EQ(t.m, 3);
    EXPECT_EQ(t.nonzeros(1e-15), 12u);
    for (auto x : t.data)
        if (std::abs(x) > 0) EXPECT_EQ(x, cplx(0.5));
    EXPECT_EQ(t(0, 1, 0, 1), cplx(0.5));
    EXPECT_EQ(t(1, 0, 0, 1), cplx(0.5));
    EXPECT_EQ(t(0, 0, 1, 1), cplx(0.0));
    EXPECT_THROW(clique_tensor(Graph{3, {}}), std::invalid_argument);
    EXPECT_THROW(clique_tensor(Graph{3, {{0, 0}}}), std::invalid_argument);
    EXPECT_EQ(graphs_on_four_vertices().size(), 10u);
}

TEST(SpectralNorm, ClosedForms) {
    EXPECT_NEAR(spectral_norm_oracle(clique_tensor(triangle()), 200, 1), 2.0 / 3.0, 1e-3);
    EXPECT_NEAR(spectral_norm_oracle(clique_tensor(Graph{2, {{0, 1}}}), 0, 2), 0.5, 1e-3);
    Rng rng(3);
    std::array<VectorXc, 4> f{random_unit_vector(3, rng), random_unit_vector(3, rng), random_unit_vector(3, rng),
                              random_unit_vector(3, rng)};
    EXPECT_NEAR(spectral_norm_oracle(rank_one(f), 0, 4), 1.0, 1e-6);
    EXPECT_EQ(spectral_norm_oracle(Tensor4::zeros(2), 0, 5), 0.0);
}

TEST(SpectralNorm, JobsIndependent) {
    Rng rng(6);
    Tensor4 t = random_tensor(3, rng);
    EXPECT_EQ(spectral_norm_oracle(t, 40, 7, 1), spectral_norm_oracle(t, 40, 7, 3));
}

TEST(SpectralNorm, CliqueRecovery) {
    const auto gs = graphs_on_four_vertices();
    for (std::size_t i = 0; i < gs.size(); ++i)
        EXPECT_EQ(clique_number_from_norm(spectral_norm_oracle(clique_tensor(gs[i]), 0, 10 + i)),
                  oracle::clique_number(gs[i]));
    EXPECT_EQ(clique_number_from_norm(0.5), 2);
    EXPECT_EQ(clique_number_from_norm(0.749), 4);
}

TEST(TensorState, BasisTensor) {
    Tensor4 t = Tensor4::zeros(3);
    t(0, 0, 0, 0) = 1;
    QuantumState s = tensor_to_state(t);
    EXPECT_EQ(s.n, 12);
    const auto idx = tensor_state_index(3, 0, 0, 0, 0);
    EXPECT_EQ(popcount(idx), 4);
    EXPECT_NEAR(std::abs(s.psi(idx)), 1.0, 1e-15);
    EXPECT_THROW(tensor_to_state(Tensor4::zeros(2)), std::invalid_argument);
}

TEST(TensorState, NormIdentityAndSupport) {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
        const int m = 1 + t % 3;
        Tensor4 T = random_tensor(m, rng);
        VectorXc a = tensor_amplitudes(T);
        EXPECT_NEAR(a.norm(), T.frobenius(), 1e-12 * T.frobenius());
        EXPECT_NEAR(tensor_to_state(T).psi.norm(), 1.0, 1e-12);
        std::vector<char> on(a.size(), 0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                for (int k = 0; k < m; ++k)
                    for (int l = 0; l < m; ++l) {
                        const auto x = tensor_state_index(m, i, j, k, l);
                        on[x] = 1;
                        EXPECT_EQ(a(x), T(i, j, k, l));
                    }
        for (Eigen::Index x = 0; x < a.size(); ++x)
            if (!on[x]) EXPECT_EQ(a(x), cplx(0));
    }
}

TEST(IsometryEmbed, PreservesNorms) {
    Rng rng(9);
    Tensor4 t = random_tensor(2, rng);
    Tensor4 same = random_isometry_embed(t, 2, 10);
    EXPECT_NEAR(same.frobenius(), t.frobenius(), 1e-10 * t.frobenius());
    Tensor4 e = random_isometry_embed(t, 4, 11);
    EXPECT_EQ(e.m, 4);
    EXPECT_NEAR(e.frobenius(), t.frobenius(), 1e-10 * t.frobenius());
    EXPECT_NEAR(spectral_norm_oracle(e, 0, 12), spectral_norm_oracle(t, 0, 13), 1e-2);
    EXPECT_THROW(random_isometry_embed(t, 1, 14), std::invalid_argument);
}

TEST(IsometryEmbed, RankOneStaysRankOne) {
    Tensor4 t = Tensor4::zeros(2);
    t(0, 0, 0, 0) = 1;
    Tensor4 e = random_isometry_embed(t, 5, 15);
    EXPECT_NEAR(e.frobenius(), 1.0, 1e-12);
    EXPECT_NEAR(spectral_norm_oracle(e, 20, 16), 1.0, 1e-6);
}

TEST(IsometryEmbed, EntryBoundAudit) {
    Tensor4 t = clique_tensor(triangle()).normalized();
    const double bound = std::pow(10.0 * 3, 2) / std::pow(24.0, 2);
    int within = 0;
    for (int s = 0; s < 100; ++s) within += random_isometry_embed(t, 24, 100 + s).max_abs() <= bound;
    EXPECT_GE(within, 99);
}

TEST(Sandwich, Examples) {
    Tensor4 e = Tensor4::zeros(1);
    e(0, 0, 0, 0) = 1;
    SandwichReport r = opt_sandwich_check(e, 1.0, 1.0);
    EXPECT_TRUE(r.lower_ok);
    EXPECT_TRUE(r.ok());

    Tensor4 k2 = clique_tensor(Graph{2, {{0, 1}}});
    SpectralResult sr = spectral_norm_als(k2, 0, 17);
    SandwichReport rk = opt_sandwich_check(k2, product_overlap_lower_bound(k2, sr), 0, 18);
    EXPECT_TRUE(rk.ok());
    EXPECT_FALSE(rk.informative);
    EXPECT_FALSE(rk.regime.empty());

    Rng rng(19);
    Tensor4 big = random_isometry_embed(random_tensor(2, rng), 8, 20);
    SpectralResult sb = spectral_norm_als(big, 60, 21);
    EXPECT_TRUE(opt_sandwich_check(big, product_overlap_lower_bound(big, sb), 60, 22).ok());
}
