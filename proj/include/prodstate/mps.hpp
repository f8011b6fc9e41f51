#pragma once

#include "prodstate/simaccess.hpp"

#include <vector>

namespace prodstate {

/// Open-boundary MPS: tensors[i][s] is the r_{i-1} x r_i matrix A_i^{(s)}.
struct MatrixProductState {
    int n = 0;
    int local_dim = 2;
    std::vector<std::vector<MatrixXc>> tensors;

    /// r_0, ..., r_n.
    std::vector<int> bond_dims() const;
    int max_bond() const;

    /// Shape and boundary checks.
    void validate() const;
};

/// Unitaries U_1 .. U_L on kappa consecutive sites (U_i on sites [i-1, i-1+kappa)).
struct DisentanglerPlan {
    int kappa = 0;
    double tau = 0.0;
    std::vector<MatrixXc> unitaries;
};

struct MpsLearnOptions {
    int kappa_override = 0;  ///< desk-scale override of kappa (0 keeps the formula value)
};

struct MpsTrace {
    DisentanglerPlan plan;
    std::vector<double> traces;  ///< tr sigma_i per step, then the final register
    std::vector<int> subspace_dims;  ///< dimension of the >= tau eigenspace per step
    std::uint64_t copies = 0;
};

/// tau = eps^2 / (9 n^2 r^4).
double mps_tau(int n, int r, double eps);

/// ceil(log_d(1/tau)) + 1, capped at n.
int mps_kappa(int n, int d, int r, double eps);

MatrixProductState mps_learn(StateOracle& o, int r, double eps, double delta, const MpsLearnOptions& opts = {},
                             MpsTrace* trace = nullptr);

/// U with U w_j = |j> for the columns w_j of W (so W lands on |0> x anything) and W^perp on the rest.
MatrixXc disentangling_unitary(const MatrixXc& W, int local_dim);

QuantumState mps_to_state(const MatrixProductState& m, std::uint64_t max_dim = 1u << 24);

/// Left-to-right SVD decomposition of a dense vector over n sites with a right boundary bond of size `right`.
/// Entries of `v` are indexed (s_1 .. s_n, b) with b fastest.
std::vector<std::vector<MatrixXc>> decompose_block(const VectorXc& v, int n, int d, int right, double tol = 1e-13);

/// Dense pure state to an exact MPS.
MatrixProductState state_to_mps(const QuantumState& s, double tol = 1e-13);

int schmidt_rank(const QuantumState& s, int cut, double tol = 1e-10);

} // namespace prodstate
