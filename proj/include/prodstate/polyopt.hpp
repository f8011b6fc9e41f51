#pragma once

#include "prodstate/linalg.hpp"

#include <optional>
#include <vector>

namespace prodstate {

/// Term <T, (x*)^{(x)a} (x) x^{(x)b}> with T stored densely, first index most significant.
struct PolyTerm {
    int a = 0;
    int b = 0;
    std::vector<cplx> t;
};

/// f(x) = t0 + sum over terms. Standard systems only have a == b terms.
struct PolySystem {
    int n = 0;
    cplx t0 = 0.0;
    std::vector<PolyTerm> terms;

    /// System with T^(k) = tk[k - 1] of bidegree (k, k).
    static PolySystem standard(int n, cplx t0, const std::vector<std::vector<cplx>>& tk);

    /// Largest max(a, b) over the terms.
    int degree() const;

    /// |t0| + sum of Frobenius norms.
    double norm_sum() const;

    /// Shape checks plus norm_sum() <= 1 + 1e-9.
    void validate() const;
};

/// x in C^n with | |x| - nu | <= g, |A x - v| <= g, max_i |x_i| <= mu + g, where g = gamma * scale.
struct OptDomain {
    MatrixXc A;  // r x n, possibly r = 0
    VectorXc v;
    double nu = 1.0;
    double mu = 1.0;
    double gamma = 0.05;

    void validate(int n) const;
};

/// Membership in D^{scale * gamma}.
bool in_domain(const OptDomain& dom, const VectorXc& x, double scale);

/// Largest violation of the D^{scale * gamma} constraints (<= 0 means member).
double domain_violation(const OptDomain& dom, const VectorXc& x, double scale);

cplx evaluate_poly(const PolySystem& sys, const VectorXc& x);

/// Orthonormal basis of the span of large mode-flattening singular vectors and their conjugates.
MatrixXc effective_subspace(const PolySystem& sys, double eps);

/// System restricted to x = B c (B has orthonormal columns).
PolySystem reduce_system(const PolySystem& sys, const MatrixXc& B);

struct SolveOptions {
    std::uint64_t net_budget = 5'000'000;
    bool polish = true;
    int polish_top = 8;
    int jobs = 1;
    /// Net pitch override; <= 0 selects gamma / sqrt(2 dim).
    double pitch = 0.0;
};

struct SolveResult {
    std::optional<VectorXc> x;
    double value = 0.0;
    std::uint64_t net_points = 0;
    int support_size = 0;
    int subspace_dim = 0;
    std::uint64_t subsets = 0;
};

/// Sparse support size k = min(n, floor(((nu + gamma) / (mu + gamma))^2) + 1).
int support_size(const OptDomain& dom, int n);

/// Net search for max |f| over D^{2 gamma}; x empty when no net point is feasible.
SolveResult solve_constrained(const PolySystem& sys, const OptDomain& dom, double eps,
                              const SolveOptions& opts = {});

/// A point of D^gamma of the form (row space of A) + (k-sparse), if the structured net finds one.
std::optional<VectorXc> sparse_witness_exists(const OptDomain& dom, int n, int k, const SolveOptions& opts = {});

} // namespace prodstate
