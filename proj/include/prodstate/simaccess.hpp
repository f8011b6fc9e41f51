#pragma once

#include "prodstate/qcore.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace prodstate {

/// A unitary on sites [first, first + k).
struct BlockGate {
    int first = 0;
    int k = 1;
    MatrixXc u;
};

using Frame = std::vector<BlockGate>;

/// Copy-limited access to a hidden state, either exact (with injected noise) or by simulated measurement.
class StateOracle {
public:
    enum class Backend { exact, sampling };

    static StateOracle exact(QuantumState hidden, double noise_opnorm = 0.0, std::uint64_t seed = 0);
    static StateOracle sampling(QuantumState hidden, std::uint64_t seed);

    Backend backend() const { return backend_; }
    bool is_exact() const { return backend_ == Backend::exact; }
    double noise() const { return noise_; }
    std::uint64_t seed() const { return seed_; }
    int n() const { return hidden_.n; }
    int local_dim() const { return hidden_.local_dim; }
    const QuantumState& hidden() const { return hidden_; }
    const MatrixXc& density() const { return rho_; }

    std::uint64_t copies_consumed() const { return copies_; }
    void consume(std::uint64_t copies);

    Rng& rng() { return rng_; }

    /// Independent handle over the same hidden state with a derived seed and its own counter.
    StateOracle fork(std::uint64_t stream) const;

    /// Independent handle over the reduced state of sites [first, first + len).
    StateOracle restrict(int first, int len, std::uint64_t stream) const;

private:
    StateOracle(QuantumState hidden, Backend b, double noise, std::uint64_t seed);

    QuantumState hidden_;
    MatrixXc rho_;
    Backend backend_;
    double noise_;
    std::uint64_t seed_;
    Rng rng_;
    std::uint64_t copies_ = 0;
};

/// Saturating product of copy counts.
std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b);

/// Saturating ceiling of a nonnegative real.
std::uint64_t sat_ceil(double x);

/// Sample count per mean and number of means used by estimate_z.
struct ZEstimateBudget {
    std::uint64_t per_mean;
    std::uint64_t means;
    std::uint64_t total() const { return sat_mul(per_mean, means); }
};

ZEstimateBudget estimate_z_budget(int n, double eps, double delta);

/// Exact z_i = <e_i| U rho U^dagger |0^n> for U = (x) basis.
VectorXc true_z(const MatrixXc& rho, int n, const std::vector<Matrix2c>& basis);

/// Estimate of z in the frame given by `basis`; empty basis means identity.
VectorXc estimate_z(StateOracle& o, const std::vector<Matrix2c>& basis, double eps, double delta);

/// Geometric median of means: the mean with the smallest median distance to the others (first on ties).
VectorXc median_of_means(const std::vector<VectorXc>& means);

/// Compressed register (weight 0/1 block plus a leftover dimension) used by the shadow estimator.
MatrixXc compressed_register(const MatrixXc& rho, int n, const std::vector<Matrix2c>& basis);

/// Embedding dimension of the compressed register.
int compressed_dim(int n);

/// One classical-shadow sample of the z vector from the compressed register.
VectorXc shadow_z_sample(const Eigen::VectorXd& evals, const MatrixXc& evecs, int n, Rng& rng);

std::uint64_t subspace_tomography_copies(int m, int d, double eps, double delta);

/// Estimate of Pi_{<=d} rho_[m] Pi_{<=d} as a 2^m x 2^m matrix supported on weight <= d.
/// `frame` optionally rotates the m sites before tomography.
MatrixXc subspace_tomography(StateOracle& o, int prefix_m, int d, double eps, double delta,
                             const std::vector<Matrix2c>& frame = {});

std::uint64_t subnormalized_tomography_copies(int local_dim, int keep, double eps, double delta);

/// Estimate of (<0^i| x I) U rho U^dagger (|0^i> x I), reduced to the first `keep` remaining sites.
/// keep < 0 keeps all n - i sites.
MatrixXc subnormalized_tomography(StateOracle& o, const Frame& frame, int zeroed_prefix, double eps, double delta,
                                  int keep = -1);

std::uint64_t estimate_fidelity_copies(double eps, double delta);

/// Estimate of <pi|rho_[m]|pi> for a qubit product state on m sites.
double estimate_fidelity(StateOracle& o, int prefix_m, const ProductParams& p, double eps, double delta);

/// Estimate of <pi|rho_[m]|pi> for a product of per-site unit vectors.
double estimate_fidelity(StateOracle& o, int prefix_m, const std::vector<VectorXc>& sites, double eps, double delta);

/// Pauli-basis tomography of an nq-qubit state from `copies` simulated shots (linear inversion).
MatrixXc pauli_tomography(const MatrixXc& state, int nq, std::uint64_t copies, Rng& rng);

/// Apply a frame to a dense density matrix.
MatrixXc apply_frame(const MatrixXc& rho, int n, int d, const Frame& frame);

/// Exact truncation Pi_{<=d} rho Pi_{<=d} for an m-qubit matrix.
MatrixXc truncate_weight(const MatrixXc& rho, int m, int d);

/// Dense product of per-site vectors.
VectorXc product_of_sites(const std::vector<VectorXc>& sites);

} // namespace prodstate
