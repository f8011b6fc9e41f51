#pragma once

#include "prodstate/polyopt.hpp"
#include "prodstate/simaccess.hpp"

#include <optional>
#include <vector>

namespace prodstate {

struct CoverParams {
    double eta = 0.5;
    double eps = 0.1;
    double delta = 0.05;

    /// Desk-scale overrides. Zero or negative values select the formula value.
    int degree_cap = 0;            ///< cap on the truncation degree d
    double net_pitch = 0.0;        ///< pitch of the net over F_S (default tol)
    double net_radius = 0.0;       ///< radius of the net over F_S (default B_root)
    std::uint64_t net_budget = 5'000'000;
    int min_support = 0;           ///< smallest |S| enumerated
    int max_support = -1;          ///< largest |S| enumerated (default floor(B^2 / mu^2))
    bool polish = true;            ///< local ascent from the best net points
    double gamma = 0.05;           ///< tolerance handed to the polynomial optimizer
    int jobs = 1;

    double b() const { return 2.0 / eta; }
    double B_far() const { return 3.0 / eta; }
    double B_root() const { return 4.0 / eta; }
    double eps_tilde() const { return eps / 100.0; }
    double mu() const;
    /// Truncation degree for an m-site prefix.
    int degree(int m) const;
    double tol(int m) const;
    double pitch(int m) const { return net_pitch > 0 ? net_pitch : tol(m); }
    double radius() const { return net_radius > 0 ? std::min(net_radius, B_root()) : B_root(); }

    void validate() const;
};

struct Cover {
    std::vector<ProductParams> members;
    int m = 0;
    CoverParams params;
};

struct ExtendStats {
    std::uint64_t net_points = 0;
    std::uint64_t subsets = 0;
    std::uint64_t candidates = 0;
    double best_value = 0.0;
};

/// p_{z_S, nu}(z_Sbar) with nu = |z_Sbar|: the truncated-state surrogate for <pi_z|rho|pi_z>.
double cover_objective(const MatrixXc& trunc, int m, const std::vector<int>& S, const VectorXc& z);

/// Same with an explicit nu in the exponential prefactor.
double cover_objective(const MatrixXc& trunc, int m, const std::vector<int>& S, const VectorXc& z, double nu);

/// One call of the cover oracle. `trunc` is the truncation estimate of rho_[m] in the frame where
/// `root` is |0^m>; constraints and the result are in the original frame.
std::optional<ProductParams> extend_candidate(const MatrixXc& trunc, const std::vector<ProductParams>& constraints,
                                              const ProductParams& root, const CoverParams& params,
                                              ExtendStats* stats = nullptr);

struct CoverTrace {
    std::vector<std::vector<ProductParams>> prefixes;  ///< C_1 .. C_n
    std::uint64_t extend_calls = 0;
    std::uint64_t tomography_calls = 0;
    std::uint64_t copies = 0;
};

/// The six single-qubit states |0>, |1>, |+>, |->, |+i>, |-i>.
std::vector<ProductParams> qubit_net();

Cover build_cover(StateOracle& o, const CoverParams& params, CoverTrace* trace = nullptr);

struct OptEstimate {
    double estimate = 0.0;
    std::optional<ProductParams> witness;
    int builds = 0;
    std::vector<std::pair<double, std::size_t>> history;  ///< (eta, cover size) per build
};

/// Bisection on eta using build_cover. `base` supplies the desk-scale overrides.
OptEstimate estimate_opt(StateOracle& o, double eps, double delta, const CoverParams& base = {});

struct CoverReport {
    int prop1_violations = 0;
    int prop2_violations = 0;
    int prop3_violations = 0;
    int witnesses_checked = 0;
    bool size_ok = true;
    double min_member_fidelity = 1.0;
    double min_pair_distance = kInf;

    bool ok() const { return prop1_violations == 0 && prop2_violations == 0 && prop3_violations == 0 && size_ok; }
};

/// Audit the three cover properties; property 3 over `trials` random product states.
CoverReport verify_cover(const QuantumState& rho, const Cover& c, int trials, std::uint64_t seed);

} // namespace prodstate
