#pragma once

#include "prodstate/linalg.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace prodstate {

/// Magnitude cap standing in for the point at infinity.
inline constexpr double Z_MAX = 1e12;

/// Nonnegative real or +infinity.
using ExtReal = double;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Parameters z_1..z_n of the product state prod_i (|0> + z_i |1>) / sqrt(1 + |z_i|^2).
template <typename Real>
class BasicProductParams {
public:
    using Scalar = std::complex<Real>;

    BasicProductParams() = default;

    explicit BasicProductParams(std::vector<Scalar> z) : z_(std::move(z)) { validate(); }

    /// All-zero parameters (the state |0^n>).
    static BasicProductParams zeros(int n) {
        if (n < 0) throw std::invalid_argument("ProductParams: negative size");
        BasicProductParams p;
        p.z_.assign(n, Scalar(0));
        return p;
    }

    /// Parameters with |z_i| clamped to Z_MAX instead of rejected.
    static BasicProductParams clamped(std::vector<Scalar> z) {
        for (auto& zi : z) {
            if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag()))
                throw std::invalid_argument("ProductParams: non-finite entry");
            Real a = std::abs(zi);
            if (a > Real(Z_MAX)) zi *= Real(Z_MAX) / a;
        }
        return BasicProductParams(std::move(z));
    }

    int size() const { return static_cast<int>(z_.size()); }
    const Scalar& operator[](int i) const { return z_[i]; }
    const std::vector<Scalar>& z() const { return z_; }

    /// Parameters of sites [first, first + len).
    BasicProductParams slice(int first, int len) const {
        if (first < 0 || len < 0 || first + len > size())
            throw std::invalid_argument("ProductParams::slice: range out of bounds");
        return BasicProductParams(std::vector<Scalar>(z_.begin() + first, z_.begin() + first + len));
    }

    /// Concatenation (this sites first).
    BasicProductParams append(const BasicProductParams& o) const {
        std::vector<Scalar> z = z_;
        z.insert(z.end(), o.z_.begin(), o.z_.end());
        return BasicProductParams(std::move(z));
    }

    bool operator==(const BasicProductParams& o) const { return z_ == o.z_; }

private:
    void validate() const {
        for (const auto& zi : z_) {
            if (!std::isfinite(zi.real()) || !std::isfinite(zi.imag()))
                throw std::invalid_argument("ProductParams: non-finite entry");
            if (std::abs(zi) > Real(Z_MAX))
                throw std::invalid_argument("ProductParams: |z_i| exceeds Z_MAX");
        }
    }

    std::vector<Scalar> z_;
};

using ProductParams = BasicProductParams<double>;

/// Single-site amplitudes (a0, a1) with a0 real positive.
template <typename Real>
inline std::pair<std::complex<Real>, std::complex<Real>> site_amplitudes(const std::complex<Real>& z) {
    Real a0 = Real(1) / std::sqrt(Real(1) + std::norm(z));
    return {std::complex<Real>(a0), z * a0};
}

/// Single-site parameter of a unit vector (alpha, beta): beta / alpha, capped at Z_MAX.
inline cplx site_param(cplx alpha, cplx beta) {
    double aa = std::abs(alpha);
    double ab = std::abs(beta);
    if (ab == 0.0) return 0.0;
    if (aa == 0.0 || ab / aa > Z_MAX) return beta / ab * Z_MAX;
    return beta / alpha;
}

/// Dense or density-matrix state over n sites of dimension local_dim, site 0 most significant.
struct QuantumState {
    enum class Kind { pure, mixed };

    int n = 0;
    int local_dim = 2;
    Kind kind = Kind::pure;
    VectorXc psi;
    MatrixXc rho;

    static QuantumState pure(int n, int local_dim, VectorXc psi, double tol = 1e-9);
    static QuantumState mixed(int n, int local_dim, MatrixXc rho, double tol = 1e-9);

    /// Unvalidated state (used for sub-normalized projections).
    static QuantumState raw_pure(int n, int local_dim, VectorXc psi);
    static QuantumState raw_mixed(int n, int local_dim, MatrixXc rho);

    std::uint64_t dim() const { return ipow(local_dim, n); }
    bool is_pure() const { return kind == Kind::pure; }

    /// rho for mixed states, |psi><psi| for pure ones.
    MatrixXc density() const;
};

/// Maximally mixed state on n qubits.
QuantumState maximally_mixed(int n, int local_dim = 2);

template <typename Real>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1> product_state_vector_t(const BasicProductParams<Real>& p) {
    using C = std::complex<Real>;
    const int n = p.size();
    Eigen::Matrix<C, Eigen::Dynamic, 1> v(std::size_t(1) << n);
    v(0) = C(1);
    std::size_t len = 1;
    for (int i = 0; i < n; ++i) {
        auto [a0, a1] = site_amplitudes(p[i]);
        for (std::size_t b = len; b-- > 0;) {
            C x = v(b);
            v(2 * b) = x * a0;
            v(2 * b + 1) = x * a1;
        }
        len *= 2;
    }
    return v;
}

/// |pi_z> as a pure QuantumState; the |0^n> amplitude is real positive.
QuantumState product_state_vector(const ProductParams& p);

/// Dense amplitude vector of |pi_z>.
VectorXc product_vector(const ProductParams& p);

/// Tangent distance; +infinity when a site pair is orthogonal.
template <typename Real>
Real tangent_distance_t(const BasicProductParams<Real>& p, const BasicProductParams<Real>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("tangent_distance: dimension mismatch");
    Real s = 0;
    for (int i = 0; i < p.size(); ++i) {
        std::complex<Real> num = p[i] - q[i];
        std::complex<Real> den = Real(1) + std::conj(p[i]) * q[i];
        Real an = std::abs(num);
        Real ad = std::abs(den);
        if (an == Real(0)) continue;
        if (ad == Real(0)) return std::numeric_limits<Real>::infinity();
        Real r = an / ad;
        s += r * r;
    }
    return std::sqrt(s);
}

inline ExtReal tangent_distance(const ProductParams& p, const ProductParams& q) { return tangent_distance_t(p, q); }

/// |<pi_p|pi_q>|^2 in closed form.
template <typename Real>
Real product_overlap_t(const BasicProductParams<Real>& p, const BasicProductParams<Real>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("product_overlap: dimension mismatch");
    Real f = 1;
    for (int i = 0; i < p.size(); ++i) {
        auto [pa, pb] = site_amplitudes(p[i]);
        auto [qa, qb] = site_amplitudes(q[i]);
        f *= std::norm(std::conj(pa) * qa + std::conj(pb) * qb);
    }
    return f;
}

inline double product_overlap(const ProductParams& p, const ProductParams& q) { return product_overlap_t(p, q); }

enum class HammingMode { leq, geq };

/// Zero all amplitudes (rows and columns) whose Hamming weight violates the mode.
QuantumState project_hamming(const QuantumState& s, HammingMode mode, int d);

/// Single-site unitaries U_i with U_i |pi_{z_i}> = |0>.
std::vector<Matrix2c> recenter_unitaries(const ProductParams& p);

/// Parameters of (U_1 x ... x U_n)|pi_p>.
ProductParams apply_site_unitaries(const ProductParams& p, const std::vector<Matrix2c>& u);

/// <pi_p|rho|pi_p> or |<pi_p|psi>|^2.
double fidelity(const QuantumState& s, const ProductParams& p);

/// Fidelity against an arbitrary dense vector.
double fidelity(const QuantumState& s, const VectorXc& phi);

/// Expected Hamming weight sum_i |z_i|^2 / (1 + |z_i|^2).
double expected_weight(const ProductParams& p);

/// Upper-tail bound on Pr[|x| >= d] for d >= mu.
double upper_tail_bound(double mu, double d);

/// Lower-tail bound on Pr[|x| <= c] for c <= mu.
double lower_tail_bound(double mu, double c);

/// Exact distribution of the Hamming weight under |pi_z> (entry k is Pr[|x| = k]).
std::vector<double> weight_distribution(const ProductParams& p);

/// Weight distribution of independent bits with success probabilities q_i.
std::vector<double> weight_distribution(const std::vector<double>& q);

/// Lower bound -p0 log p0 on Pr[|x| = 1].
double p1_lower_bound(double p0);

/// Upper bound 2 (1 - sqrt(p0))^2 on Pr[|x| >= 2].
double p2_upper_bound(double p0);

/// Alternating single-site maximization of <pi|rho|pi> from `start` (qubits).
ProductParams product_ascent(const MatrixXc& rho, const ProductParams& start, int sweeps);

/// Random product parameters with |z_i| <= zmax (uniform modulus and phase).
ProductParams random_params(int n, double zmax, Rng& rng);

/// Haar-random product parameters.
ProductParams haar_product_params(int n, Rng& rng);

} // namespace prodstate
