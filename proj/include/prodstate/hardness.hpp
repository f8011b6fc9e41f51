#pragma once

#include "prodstate/qcore.hpp"

#include <string>
#include <utility>
#include <vector>

namespace prodstate {

/// Dense m x m x m x m complex tensor, index (i, j, k, l) with l fastest.
struct Tensor4 {
    int m = 0;
    std::vector<cplx> data;

    static Tensor4 zeros(int m);

    cplx& operator()(int i, int j, int k, int l) { return data[((std::size_t(i) * m + j) * m + k) * m + l]; }
    const cplx& operator()(int i, int j, int k, int l) const {
        return data[((std::size_t(i) * m + j) * m + k) * m + l];
    }

    double frobenius() const;
    double max_abs() const;
    std::size_t nonzeros(double tol = 0.0) const;
    Tensor4 normalized() const;
};

/// Simple undirected graph on vertices 0..vertices-1.
struct Graph {
    int vertices = 0;
    std::vector<std::pair<int, int>> edges;

    /// Range, self-loop and duplicate checks.
    void validate() const;
};

/// The ten non-isomorphic graphs on four vertices with at least one edge.
std::vector<Graph> graphs_on_four_vertices();

/// A_G: 1/2 at (s,t,s,t), (t,s,t,s), (s,t,t,s), (t,s,s,t) for every edge.
Tensor4 clique_tensor(const Graph& g);

/// Unnormalized amplitudes T_ijkl on |e_i e_j e_k e_l> (norm |T|_F).
VectorXc tensor_amplitudes(const Tensor4& t);

/// Pure state on 4m qubits with amplitude T_ijkl / |T|_F on |e_i e_j e_k e_l>.
QuantumState tensor_to_state(const Tensor4& t);

/// Qubit index of |e_i e_j e_k e_l> in tensor_to_state.
std::uint64_t tensor_state_index(int m, int i, int j, int k, int l);

/// U^{(x)4} T for a Haar-random n x m isometry U.
Tensor4 random_isometry_embed(const Tensor4& t, int n, std::uint64_t seed);

/// Random tensor with complex Gaussian entries.
Tensor4 random_tensor(int m, Rng& rng);

struct SpectralResult {
    double value = 0.0;
    VectorXc x, y, u, v;
};

/// Multistart alternating maximization of |<T, x (x) y (x) u (x) v>| over unit vectors (lower bound).
/// restarts <= 0 selects 50 m^2. Independent of `jobs`.
SpectralResult spectral_norm_als(const Tensor4& t, int restarts, std::uint64_t seed, int jobs = 1,
                                 int max_side = 64);

double spectral_norm_oracle(const Tensor4& t, int restarts, std::uint64_t seed, int jobs = 1);

/// Nearest integer to 1 / (1 - nu).
int clique_number_from_norm(double nu);

/// max over c in a grid of the overlap of psi_T with the product state built from c * (x, y, u, v).
double product_overlap_lower_bound(const Tensor4& t, const SpectralResult& s);

struct SandwichReport {
    int n = 0;
    double opt_T = 0.0;
    double opt_psi = 0.0;
    double M = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool lower_ok = false;
    bool upper_ok = false;
    bool informative = false;  ///< false when the additive slack already exceeds 1
    std::string regime;
    bool ok() const { return lower_ok && upper_ok; }
};

/// Both sides of e^-2 OPT_T - 10M/n^0.2 <= OPT_psi <= e^-2 OPT_T + 10/n^0.1 + 10M/n^0.2 on the normalized tensor.
SandwichReport opt_sandwich_check(const Tensor4& t, double product_opt, double opt_T);

/// Same with OPT_T from spectral_norm_oracle.
SandwichReport opt_sandwich_check(const Tensor4& t, double product_opt, int restarts = 0, std::uint64_t seed = 0);

} // namespace prodstate
