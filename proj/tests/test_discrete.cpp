#include "oracles.hpp"

#include "prodstate/discrete.hpp"

#include <gtest/gtest.h>

using namespace prodstate;

namespace {

std::vector<VectorXc> pauli_axes() {
    const double r = 1 / std::sqrt(2.0);
    std::vector<VectorXc> a(6, VectorXc(2));
    a[0] << 1, 0;
    a[1] << 0, 1;
    a[2] << r, r;
    a[3] << r, -r;
    a[4] << r, cplx(0, r);
    a[5] << r, cplx(0, -r);
    return a;
}

std::vector<VectorXc> computational() {
    std::vector<VectorXc> a(2, VectorXc::Zero(2));
    a[0](0) = 1;
    a[1](1) = 1;
    return a;
}

QuantumState product_of(const std::vector<VectorXc>& sites) {
    return QuantumState::pure(static_cast<int>(sites.size()), 2, oracle::kron_state(sites));
}

} // namespace

TEST(DiscreteClass, Validation) {
    EXPECT_THROW(DiscreteClass({}, 0.5), std::invalid_argument);
    EXPECT_THROW(DiscreteClass({pauli_axes()}, 0.4), std::invalid_argument);
    EXPECT_THROW(DiscreteClass({pauli_axes()}, 1.0), std::invalid_argument);
    EXPECT_THROW(DiscreteClass({{VectorXc::Ones(2)}}, 0.5), std::invalid_argument);
    EXPECT_THROW(DiscreteClass({{}}, 0.5), std::invalid_argument);
    DiscreteClass c({pauli_axes(), computational()}, 0.5);
    EXPECT_EQ(c.size(), 12u);
    EXPECT_EQ(c.s(), 6);
    EXPECT_NEAR(c.max_overlap(), 0.5, 1e-12);
    EXPECT_TRUE(c.size_bound_applies());
    EXPECT_THROW(c.member({0, 2}), std::invalid_argument);
}

TEST(DiscreteSizeBound, Examples) {
    EXPECT_NEAR(discrete_size_bound(3, 4, 0.5, 0.5), 14400.0, 1e-6);
    EXPECT_NEAR(discrete_size_bound(1, 1, 0.5, 1.0), 10.0, 1e-9);
    EXPECT_THROW(discrete_size_bound(3, 4, 1.0, 0.5), std::invalid_argument);
}

TEST(Census, Examples) {
    DiscreteClass c({pauli_axes(), pauli_axes()}, 0.5);
    VectorXc zz = VectorXc::Zero(4);
    zz(0) = 1;
    QuantumState z2 = QuantumState::pure(2, 2, zz);
    EXPECT_EQ(class_fidelity_census(z2, c, 0.9), (std::vector<ClassMember>{{0, 0}}));
    EXPECT_EQ(class_fidelity_census(z2, c, 0.0).size(), 36u);
    EXPECT_TRUE(class_fidelity_census(z2, c, 1.01).empty());
    EXPECT_THROW(class_fidelity_census(z2, c, 0.5, 10), ResourceError);
}

TEST(Census, MatchesOracle) {
    Rng rng(1);
    DiscreteClass c({pauli_axes(), pauli_axes(), computational()}, 0.5);
    for (int t = 0; t < 10; ++t) {
        MatrixXc rho = random_density_matrix(8, 1 + t % 3, rng);
        QuantumState s = QuantumState::mixed(3, 2, rho);
        for (double th : {0.1, 0.3, 0.6})
            EXPECT_EQ(class_fidelity_census(s, c, th), oracle::census(rho, c.sites(), th));
    }
}

TEST(ClassFidelity, PrefixMonotone) {
    Rng rng(2);
    DiscreteClass c({pauli_axes(), pauli_axes(), pauli_axes()}, 0.5);
    for (int t = 0; t < 50; ++t) {
        QuantumState s = QuantumState::mixed(3, 2, random_density_matrix(8, 2, rng));
        ClassMember idx{int(rng() % 6), int(rng() % 6), int(rng() % 6)};
        double prev = 1.0;
        for (int m = 0; m <= 3; ++m) {
            ClassMember p(idx.begin(), idx.begin() + m);
            const double f = class_fidelity(s, c, p);
            EXPECT_LE(f, prev + 1e-12);
            prev = f;
        }
    }
}

TEST(DiscreteLearn, PlantedMemberFound) {
    DiscreteClass c({pauli_axes(), pauli_axes(), pauli_axes()}, 0.5);
    auto ax = pauli_axes();
    QuantumState s = product_of({ax[2], ax[4], ax[1]});
    StateOracle o = StateOracle::exact(s, 0.01, 3);
    DiscreteTrace tr;
    auto S = discrete_learn(o, c, 0.8, 0.1, 0.05, &tr);
    ASSERT_EQ(S, (std::vector<ClassMember>{{2, 4, 1}}));
    for (const auto& m : S) EXPECT_GE(class_fidelity(s, c, m), 0.8);
    EXPECT_EQ(tr.survivors.size(), 3u);
    EXPECT_EQ(tr.copies, o.copies_consumed());
    EXPECT_EQ(tr.estimates, 18u);
    EXPECT_NEAR(tr.survivor_guard, 4 * std::pow(180.0, std::log(2 / 0.7) / std::log(2.0)), 1e-6);
}

TEST(DiscreteLearn, EmptyCases) {
    auto comp = computational();
    DiscreteClass c({comp, comp, comp}, 0.5);
    const double r = 1 / std::sqrt(2.0);
    VectorXc plus(2);
    plus << r, r;
    StateOracle o1 = StateOracle::exact(product_of({plus, plus, plus}), 0.0, 4);
    EXPECT_TRUE(discrete_learn(o1, c, 0.8, 0.1, 0.05).empty());
    StateOracle o2 = StateOracle::exact(maximally_mixed(3), 0.0, 5);
    EXPECT_TRUE(discrete_learn(o2, c, 0.5, 0.1, 0.05).empty());
}

TEST(DiscreteLearn, ContainmentAndBound) {
    Rng rng(6);
    DiscreteClass c({pauli_axes(), pauli_axes(), pauli_axes()}, 0.5);
    const double eta = 0.5, eps = 0.2;
    for (int t = 0; t < 20; ++t) {
        QuantumState s = QuantumState::mixed(3, 2, random_density_matrix(8, 1 + t % 2, rng));
        StateOracle o = StateOracle::exact(s, 0.02, 100 + t);
        auto S = discrete_learn(o, c, eta, eps, 0.05);
        auto hi = class_fidelity_census(s, c, eta);
        auto lo = class_fidelity_census(s, c, eta - eps);
        for (const auto& m : hi) EXPECT_TRUE(std::binary_search(S.begin(), S.end(), m));
        for (const auto& m : S) EXPECT_TRUE(std::binary_search(lo.begin(), lo.end(), m));
        EXPECT_LE(double(S.size()), discrete_size_bound(3, 6, 0.5, eta - eps));
        EXPECT_TRUE(std::is_sorted(S.begin(), S.end()));
    }
}

TEST(DiscreteLearn, Validation) {
    DiscreteClass c({pauli_axes(), pauli_axes()}, 0.5);
    StateOracle o = StateOracle::exact(maximally_mixed(2), 0.0, 7);
    EXPECT_THROW(discrete_learn(o, c, 0.5, 0.3, 0.05), std::invalid_argument);
    EXPECT_THROW(discrete_learn(o, c, 1.5, 0.1, 0.05), std::invalid_argument);
    EXPECT_THROW(discrete_learn(o, c, 0.5, 0.1, 0.0), std::invalid_argument);
    StateOracle o3 = StateOracle::exact(maximally_mixed(3), 0.0, 8);
    EXPECT_THROW(discrete_learn(o3, c, 0.5, 0.1, 0.05), std::invalid_argument);
}
