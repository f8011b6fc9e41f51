#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace prodstate {

using cplx = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;
using Rng = std::mt19937_64;

/// Raised when a configured size or copy budget would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t ipow(std::uint64_t base, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) r *= base;
    return r;
}

inline int popcount(std::uint64_t x) { return __builtin_popcountll(x); }

/// Digit of site `site` (0-based, site 0 most significant) in basis index b.
inline int site_digit(std::uint64_t b, int n, int d, int site) {
    return static_cast<int>((b / ipow(d, n - 1 - site)) % d);
}

/// Number of nonzero digits of b (Hamming weight for qubits).
inline int digit_weight(std::uint64_t b, int n, int d) {
    if (d == 2) return popcount(b);
    int w = 0;
    for (int i = 0; i < n; ++i) {
        if (b % d) ++w;
        b /= d;
    }
    return w;
}

/// Complex standard normal: real and imaginary parts N(0, 1/2).
inline cplx complex_normal(Rng& rng) {
    std::normal_distribution<double> g(0.0, std::sqrt(0.5));
    double re = g(rng);
    double im = g(rng);
    return {re, im};
}

/// Haar-random isometry (rows x cols, rows >= cols) via QR with R-diagonal phase fix.
MatrixXc haar_isometry(int rows, int cols, Rng& rng);

inline MatrixXc haar_unitary(int dim, Rng& rng) { return haar_isometry(dim, dim, rng); }

/// Uniformly random unit vector in C^dim.
VectorXc random_unit_vector(int dim, Rng& rng);

/// Random density matrix of the given dimension (Ginibre, rank `rank`).
MatrixXc random_density_matrix(int dim, int rank, Rng& rng);

/// Apply a d x d operator to one site of a dense vector.
void apply_site_op(VectorXc& psi, int n, int d, int site, const MatrixXc& u);

/// Apply a d^k x d^k operator to sites [first, first + k) of a dense vector.
void apply_block_op(VectorXc& psi, int n, int d, int first, int k, const MatrixXc& u);

/// rho -> U rho U^dagger for a single-site U.
void conjugate_site_op(MatrixXc& rho, int n, int d, int site, const MatrixXc& u);

/// rho -> U rho U^dagger for U acting on sites [first, first + k).
void conjugate_block_op(MatrixXc& rho, int n, int d, int first, int k, const MatrixXc& u);

/// Reduced state on the first m sites.
MatrixXc trace_out_suffix(const MatrixXc& rho, int n, int d, int m);

/// Reduced state on sites [first, first + len).
MatrixXc reduced_block(const MatrixXc& rho, int n, int d, int first, int len);

/// Kronecker product.
MatrixXc kron(const MatrixXc& a, const MatrixXc& b);

/// Largest singular value.
double op_norm(const MatrixXc& a);

/// Sum of singular values.
double trace_norm(const MatrixXc& a);

/// Clip negative eigenvalues of a Hermitian matrix; rescale to unit trace only if trace > 1.
MatrixXc project_psd_subnormalized(const MatrixXc& h);

/// Eigenvector for the largest eigenvalue, phase-fixed so its largest-magnitude entry is real positive.
VectorXc top_eigenvector(const MatrixXc& h);

/// Phase-fix: largest-magnitude entry real positive (first index on ties).
void fix_phase(VectorXc& v);

/// Random Hermitian matrix with operator norm exactly `norm`.
MatrixXc random_hermitian(int dim, double norm, Rng& rng);

/// Orthonormal basis for the column span of `a` (columns with singular value <= tol dropped).
MatrixXc orthonormal_span(const MatrixXc& a, double tol = 1e-10);

} // namespace prodstate
