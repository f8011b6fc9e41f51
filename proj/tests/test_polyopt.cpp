#include "oracles.hpp"

#include "prodstate/polyopt.hpp"

#include <gtest/gtest.h>

using namespace prodstate;

namespace {

std::vector<cplx> identity_flat(int n, double scale) {
    std::vector<cplx> t(n * n, 0.0);
    for (int i = 0; i < n; ++i) t[i * n + i] = scale;
    return t;
}

std::vector<cplx> e1e1(int n) {
    std::vector<cplx> t(n * n, 0.0);
    t[0] = 1.0;
    return t;
}

OptDomain open_domain(int n, double nu, double mu, double gamma) {
    OptDomain d;
    d.A = MatrixXc(0, n);
    d.v = VectorXc(0);
    d.nu = nu;
    d.mu = mu;
    d.gamma = gamma;
    return d;
}

PolySystem random_system(int n, int deg, Rng& rng) {
    std::vector<std::vector<cplx>> tk;
    double total = 0;
    for (int k = 1; k <= deg; ++k) {
        std::vector<cplx> t(ipow(n, 2 * k));
        for (auto& x : t) x = complex_normal(rng);
        double f = 0;
        for (auto x : t) f += std::norm(x);
        total += std::sqrt(f);
        tk.push_back(std::move(t));
    }
    for (auto& t : tk)
        for (auto& x : t) x /= total;
    return PolySystem::standard(n, 0.0, tk);
}

} // namespace

TEST(EvaluatePoly, Examples) {
    Rng rng(1);
    PolySystem c = PolySystem::standard(3, 0.3, {});
    for (int t = 0; t < 5; ++t) EXPECT_NEAR(std::abs(evaluate_poly(c, random_unit_vector(3, rng)) - 0.3), 0, 1e-15);
    const int n = 4;
    PolySystem id = PolySystem::standard(n, 0.0, {identity_flat(n, 1 / std::sqrt(double(n)))});
    for (int t = 0; t < 5; ++t) {
        VectorXc x = 1.7 * random_unit_vector(n, rng);
        EXPECT_NEAR(std::abs(evaluate_poly(id, x) - x.squaredNorm() / std::sqrt(double(n))), 0, 1e-12);
    }
    PolySystem r1 = PolySystem::standard(n, 0.0, {e1e1(n)});
    EXPECT_NEAR(std::abs(evaluate_poly(r1, VectorXc::Unit(n, 0)) - 1.0), 0, 1e-15);
}

TEST(EvaluatePoly, MatchesDirectEnumeration) {
    Rng rng(2);
    for (int t = 0; t < 20; ++t) {
        PolySystem s = random_system(2 + t % 3, 1 + t % 2, rng);
        s.t0 = 0.1;
        PolyTerm odd;
        odd.a = 1;
        odd.b = 0;
        odd.t.assign(s.n, 0.0);
        odd.t[0] = cplx(0.01, 0.02);
        s.terms.push_back(odd);
        VectorXc x = random_unit_vector(s.n, rng);
        EXPECT_NEAR(std::abs(evaluate_poly(s, x) - oracle::poly_eval_direct(s, x)), 0, 1e-12);
    }
}

TEST(PolySystem, Validation) {
    EXPECT_THROW(PolySystem::standard(2, 0.6, {std::vector<cplx>(4, 0.5)}).validate(), std::invalid_argument);
    EXPECT_THROW(PolySystem::standard(2, 0.0, {std::vector<cplx>(3, 0.1)}).validate(), std::invalid_argument);
    EXPECT_EQ(PolySystem::standard(2, 0.1, {std::vector<cplx>(4, 0.1), std::vector<cplx>(16, 0.0)}).degree(), 2);
    EXPECT_NEAR(PolySystem::standard(2, 0.1, {std::vector<cplx>(4, 0.1)}).norm_sum(), 0.3, 1e-15);
}

TEST(EffectiveSubspace, Examples) {
    EXPECT_EQ(effective_subspace(PolySystem::standard(3, 0.2, {std::vector<cplx>(9, 0.0)}), 0.1).cols(), 0);
    MatrixXc W = effective_subspace(PolySystem::standard(3, 0.0, {e1e1(3)}), 0.1);
    ASSERT_EQ(W.cols(), 1);
    EXPECT_NEAR(std::abs(W(0, 0)), 1.0, 1e-12);
}

TEST(EffectiveSubspace, ProjectionPreservesValues) {
    Rng rng(3);
    const double eps = 0.1;
    for (int t = 0; t < 10; ++t) {
        PolySystem s = random_system(4, 2, rng);
        MatrixXc W = effective_subspace(s, eps);
        MatrixXc P = W * W.adjoint();
        EXPECT_LT((P * P - P).norm(), 1e-10);
        EXPECT_LT((P - P.adjoint()).norm(), 1e-10);
        for (int k = 0; k < 50; ++k) {
            VectorXc x = random_unit_vector(4, rng);
            EXPECT_LE(std::abs(evaluate_poly(s, x) - evaluate_poly(s, P * x)), eps);
        }
    }
}

TEST(ReduceSystem, AgreesOnSubspace) {
    Rng rng(4);
    PolySystem s = random_system(4, 2, rng);
    MatrixXc B = haar_isometry(4, 2, rng);
    PolySystem r = reduce_system(s, B);
    for (int k = 0; k < 20; ++k) {
        VectorXc c = random_unit_vector(2, rng);
        EXPECT_NEAR(std::abs(evaluate_poly(r, c) - evaluate_poly(s, B * c)), 0, 1e-12);
    }
}

TEST(Domain, MembershipAndSupportSize) {
    OptDomain d = open_domain(4, 1.0, 0.5, 0.1);
    EXPECT_TRUE(in_domain(d, VectorXc::Constant(4, 0.5), 1.0));
    EXPECT_FALSE(in_domain(d, VectorXc::Unit(4, 0), 1.0));
    EXPECT_TRUE(in_domain(d, VectorXc::Unit(4, 0) * 0.7 + VectorXc::Unit(4, 1) * 0.7, 2.0));
    EXPECT_LE(domain_violation(d, VectorXc::Constant(4, 0.5), 1.0), 0.0);
    EXPECT_EQ(support_size(d, 4), 4);
    EXPECT_EQ(support_size(open_domain(4, 1.0, 1.0, 0.05), 4), 2);
    EXPECT_EQ(support_size(open_domain(4, 0.5, 1.0, 0.05), 4), 1);
    d.A = MatrixXc::Ones(1, 3);
    d.v = VectorXc::Zero(1);
    EXPECT_THROW(d.validate(4), std::invalid_argument);
}

TEST(SolveConstrained, TopEigenvector) {
    const int n = 2;
    PolySystem s = PolySystem::standard(n, 0.0, {e1e1(n)});
    SolveOptions o;
    o.pitch = 0.1;
    SolveResult r = solve_constrained(s, open_domain(n, 1.0, 1.0, 0.05), 0.1, o);
    ASSERT_TRUE(r.x);
    EXPECT_GE(r.value, 1 - 0.1);
    EXPECT_TRUE(in_domain(open_domain(n, 1.0, 1.0, 0.05), *r.x, 2.0));
}

TEST(SolveConstrained, InfeasibleDomain) {
    PolySystem s = PolySystem::standard(4, 0.5, {});
    SolveResult r = solve_constrained(s, open_domain(4, 1.0, 0.1, 0.01), 0.1);
    EXPECT_FALSE(r.x);
}

TEST(SolveConstrained, ConstantSystem) {
    PolySystem s = PolySystem::standard(2, cplx(0, 0.4), {});
    OptDomain d = open_domain(2, 0.8, 1.0, 0.1);
    SolveResult r = solve_constrained(s, d, 0.1);
    ASSERT_TRUE(r.x);
    EXPECT_NEAR(r.value, 0.4, 1e-15);
    EXPECT_TRUE(in_domain(d, *r.x, 2.0));
}

TEST(SolveConstrained, SubspaceConstraintAndDenseOracle) {
    Rng rng(5);
    for (int t = 0; t < 4; ++t) {
        PolySystem s = random_system(2, 2, rng);
        OptDomain d = open_domain(2, 0.8, 1.0, 0.2);
        d.A = random_unit_vector(2, rng).adjoint();
        d.v = d.A * (0.8 * random_unit_vector(2, rng));
        SolveResult r = solve_constrained(s, d, 0.1);
        ASSERT_TRUE(r.x);
        EXPECT_TRUE(in_domain(d, *r.x, 2.0));
        EXPECT_NEAR(std::abs(oracle::poly_eval_direct(s, *r.x)), r.value, 1e-12);
        EXPECT_GE(r.value, oracle::poly_grid_max(s, d, 0.05, 1.0) - 0.1);
    }
}

TEST(SolveConstrained, IndependentOfJobs) {
    Rng rng(6);
    PolySystem s = random_system(2, 2, rng);
    OptDomain d = open_domain(2, 0.9, 1.0, 0.3);
    SolveOptions a, b;
    b.jobs = 3;
    SolveResult ra = solve_constrained(s, d, 0.1, a), rb = solve_constrained(s, d, 0.1, b);
    ASSERT_TRUE(ra.x && rb.x);
    EXPECT_EQ(ra.value, rb.value);
    EXPECT_EQ(*ra.x, *rb.x);
}

TEST(SolveConstrained, BudgetExceeded) {
    Rng rng(7);
    PolySystem s = random_system(6, 1, rng);
    SolveOptions o;
    o.net_budget = 10;
    EXPECT_THROW(solve_constrained(s, open_domain(6, 1.0, 0.3, 0.05), 0.01, o), ResourceError);
}

TEST(SparseWitness, Examples) {
    SolveOptions o;
    o.pitch = 0.25;
    auto w = sparse_witness_exists(open_domain(3, 1.0, 1.0, 0.05), 3, 1, o);
    ASSERT_TRUE(w);
    EXPECT_TRUE(in_domain(open_domain(3, 1.0, 1.0, 0.05), *w, 1.0));
    int nonzero = 0;
    for (Eigen::Index i = 0; i < w->size(); ++i) nonzero += std::abs((*w)(i)) > 1e-12;
    EXPECT_EQ(nonzero, 1);

    OptDomain d = open_domain(3, 1.0, 1.0, 0.01);
    d.A = VectorXc::Unit(3, 0).transpose();
    d.v = VectorXc::Ones(1);
    auto w2 = sparse_witness_exists(d, 3, 1, o);
    ASSERT_TRUE(w2);
    EXPECT_TRUE(in_domain(d, *w2, 1.0));

    EXPECT_FALSE(sparse_witness_exists(open_domain(4, 1.0, 0.1, 0.01), 4, 4, o));
}
