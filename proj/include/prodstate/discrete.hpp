#pragma once

#include "prodstate/simaccess.hpp"

#include <vector>

namespace prodstate {

/// Finite product class A_1 x ... x A_n of per-site unit vectors with pairwise overlaps <= gamma.
class DiscreteClass {
public:
    DiscreteClass() = default;
    DiscreteClass(std::vector<std::vector<VectorXc>> sites, double gamma);

    int n() const { return static_cast<int>(sites_.size()); }
    int s() const;
    int local_dim() const { return local_dim_; }
    double gamma() const { return gamma_; }
    const std::vector<VectorXc>& site(int k) const { return sites_[k]; }
    const std::vector<std::vector<VectorXc>>& sites() const { return sites_; }

    /// Number of class members (saturating).
    std::uint64_t size() const;

    /// True when gamma >= 1/e, the regime where discrete_size_bound applies.
    bool size_bound_applies() const { return gamma_ >= std::exp(-1.0); }

    /// Per-site vectors of the member given by index tuple `idx` (prefix allowed).
    std::vector<VectorXc> member(const std::vector<int>& idx) const;

    /// Largest pairwise overlap |<phi|phi'>|^2 over distinct states of one site.
    double max_overlap() const;

private:
    std::vector<std::vector<VectorXc>> sites_;
    double gamma_ = 0.5;
    int local_dim_ = 2;
};

using ClassMember = std::vector<int>;

/// (10 n s)^{log(2 / eta) / log(1 / gamma)}.
double discrete_size_bound(int n, int s, double gamma, double eta);

struct DiscreteTrace {
    std::vector<std::size_t> survivors;  ///< survivors after each site
    double per_call_delta = 0.0;
    double survivor_guard = 0.0;
    std::uint64_t estimates = 0;
    std::uint64_t copies = 0;
};

/// Sitewise sweep keeping prefixes with estimated fidelity >= eta - eps / 2. Sorted lexicographically.
std::vector<ClassMember> discrete_learn(StateOracle& o, const DiscreteClass& cls, double eta, double eps, double delta,
                                        DiscreteTrace* trace = nullptr);

/// Exact <pi|rho_[m]|pi> for the (prefix) member `idx`.
double class_fidelity(const QuantumState& rho, const DiscreteClass& cls, const ClassMember& idx);

/// All members with exact fidelity >= threshold, lexicographic order.
std::vector<ClassMember> class_fidelity_census(const QuantumState& rho, const DiscreteClass& cls, double threshold,
                                               std::uint64_t budget = 1'000'000);

} // namespace prodstate
