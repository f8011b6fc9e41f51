#include "prodstate/qcore.hpp"

#include <algorithm>

namespace prodstate {

namespace {

void check_dims(int n, int local_dim, std::uint64_t len) {
    if (n < 1) throw std::invalid_argument("QuantumState: n must be >= 1");
    if (local_dim < 2) throw std::invalid_argument("QuantumState: local_dim must be >= 2");
    if (len != ipow(local_dim, n)) throw std::invalid_argument("QuantumState: data length mismatch");
}

} // namespace

QuantumState QuantumState::pure(int n, int local_dim, VectorXc psi, double tol) {
    check_dims(n, local_dim, psi.size());
    if (std::abs(psi.norm() - 1.0) > tol) throw std::invalid_argument("QuantumState: pure state not normalized");
    return raw_pure(n, local_dim, std::move(psi));
}

QuantumState QuantumState::mixed(int n, int local_dim, MatrixXc rho, double tol) {
    check_dims(n, local_dim, rho.rows());
    if (rho.rows() != rho.cols()) throw std::invalid_argument("QuantumState: density matrix not square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > tol)
        throw std::invalid_argument("QuantumState: density matrix not Hermitian");
    if (std::abs(rho.trace().real() - 1.0) > tol) throw std::invalid_argument("QuantumState: trace != 1");
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) throw std::invalid_argument("QuantumState: negative eigenvalue");
    return raw_mixed(n, local_dim, std::move(rho));
}

QuantumState QuantumState::raw_pure(int n, int local_dim, VectorXc psi) {
    QuantumState s;
    s.n = n;
    s.local_dim = local_dim;
    s.kind = Kind::pure;
    s.psi = std::move(psi);
    return s;
}

QuantumState QuantumState::raw_mixed(int n, int local_dim, MatrixXc rho) {
    QuantumState s;
    s.n = n;
    s.local_dim = local_dim;
    s.kind = Kind::mixed;
    s.rho = std::move(rho);
    return s;
}

MatrixXc QuantumState::density() const {
    if (kind == Kind::mixed) return rho;
    return psi * psi.adjoint();
}

QuantumState maximally_mixed(int n, int local_dim) {
    const auto dim = ipow(local_dim, n);
    return QuantumState::raw_mixed(n, local_dim, MatrixXc::Identity(dim, dim) / double(dim));
}

QuantumState product_state_vector(const ProductParams& p) {
    if (p.size() < 1) throw std::invalid_argument("product_state_vector: n must be >= 1");
    return QuantumState::raw_pure(p.size(), 2, product_state_vector_t(p));
}

VectorXc product_vector(const ProductParams& p) { return product_state_vector_t(p); }

QuantumState project_hamming(const QuantumState& s, HammingMode mode, int d) {
    if (s.local_dim != 2) throw std::invalid_argument("project_hamming: qubit states only");
    if (d < 0 || d > s.n) throw std::invalid_argument("project_hamming: d out of range");
    const auto dim = s.dim();
    std::vector<char> keep(dim);
    for (std::uint64_t b = 0; b < dim; ++b) {
        int w = popcount(b);
        keep[b] = mode == HammingMode::leq ? (w <= d) : (w >= d);
    }
    QuantumState out = s;
    if (s.is_pure()) {
        for (std::uint64_t b = 0; b < dim; ++b)
            if (!keep[b]) out.psi(b) = 0.0;
    } else {
        for (std::uint64_t b = 0; b < dim; ++b) {
            if (keep[b]) continue;
            out.rho.row(b).setZero();
            out.rho.col(b).setZero();
        }
    }
    return out;
}

std::vector<Matrix2c> recenter_unitaries(const ProductParams& p) {
    std::vector<Matrix2c> us;
    us.reserve(p.size());
    for (int i = 0; i < p.size(); ++i) {
        auto [a0, a1] = site_amplitudes(p[i]);
        Matrix2c u;
        u << std::conj(a0), std::conj(a1), -a1, a0;
        us.push_back(u);
    }
    return us;
}

ProductParams apply_site_unitaries(const ProductParams& p, const std::vector<Matrix2c>& u) {
    if (static_cast<int>(u.size()) != p.size()) throw std::invalid_argument("apply_site_unitaries: size mismatch");
    std::vector<cplx> z(p.size());
    for (int i = 0; i < p.size(); ++i) {
        auto [a0, a1] = site_amplitudes(p[i]);
        cplx al = u[i](0, 0) * a0 + u[i](0, 1) * a1;
        cplx be = u[i](1, 0) * a0 + u[i](1, 1) * a1;
        z[i] = site_param(al, be);
    }
    return ProductParams(std::move(z));
}

double fidelity(const QuantumState& s, const VectorXc& phi) {
    if (static_cast<std::uint64_t>(phi.size()) != s.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    if (s.is_pure()) return std::norm(phi.dot(s.psi));
    return std::max(0.0, phi.dot(s.rho * phi).real());
}

double fidelity(const QuantumState& s, const ProductParams& p) {
    if (s.local_dim != 2 || p.size() != s.n) throw std::invalid_argument("fidelity: dimension mismatch");
    return fidelity(s, product_vector(p));
}

double expected_weight(const ProductParams& p) {
    double mu = 0;
    for (const auto& zi : p.z()) mu += std::norm(zi) / (1.0 + std::norm(zi));
    return mu;
}

double upper_tail_bound(double mu, double d) {
    if (mu <= 0) return d > 0 ? 0.0 : 1.0;
    if (d < mu) throw std::invalid_argument("upper_tail_bound: requires d >= mu");
    return std::min(1.0, std::exp(-d * std::log(d / mu) + (d - mu)));
}

double lower_tail_bound(double mu, double c) {
    if (c > mu) throw std::invalid_argument("lower_tail_bound: requires c <= mu");
    if (mu <= 0) return 1.0;
    return std::min(1.0, std::exp(-(2 * mu - c) * std::log(2 - c / mu) + (mu - c)));
}

std::vector<double> weight_distribution(const std::vector<double>& q) {
    std::vector<double> dist(q.size() + 1, 0.0);
    dist[0] = 1.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t k = i + 1; k-- > 0;) {
            dist[k + 1] += dist[k] * q[i];
            dist[k] *= 1.0 - q[i];
        }
    }
    return dist;
}

std::vector<double> weight_distribution(const ProductParams& p) {
    std::vector<double> q(p.size());
    for (int i = 0; i < p.size(); ++i) q[i] = std::norm(p[i]) / (1.0 + std::norm(p[i]));
    return weight_distribution(q);
}

double p1_lower_bound(double p0) {
    if (p0 <= 0) return 0.0;
    return -p0 * std::log(p0);
}

double p2_upper_bound(double p0) {
    double s = 1.0 - std::sqrt(std::max(0.0, p0));
    return 2.0 * s * s;
}

ProductParams product_ascent(const MatrixXc& rho, const ProductParams& start, int sweeps) {
    const int n = start.size();
    if (rho.rows() != static_cast<Eigen::Index>(ipow(2, n))) throw std::invalid_argument("product_ascent: dimension mismatch");
    std::vector<VectorXc> sites(n, VectorXc(2));
    for (int i = 0; i < n; ++i) {
        auto [a0, a1] = site_amplitudes(start[i]);
        sites[i] << a0, a1;
    }
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int i = 0; i < n; ++i) {
            MatrixXc V(rho.rows(), 2);
            for (int s = 0; s < 2; ++s) {
                std::vector<VectorXc> t = sites;
                t[i] = VectorXc::Unit(2, s);
                VectorXc col = VectorXc::Ones(1);
                for (const auto& f : t) {
                    VectorXc nc(col.size() * 2);
                    for (Eigen::Index a = 0; a < col.size(); ++a) nc.segment(2 * a, 2) = col(a) * f;
                    col = nc;
                }
                V.col(s) = col;
            }
            MatrixXc M = V.adjoint() * rho * V;
            sites[i] = top_eigenvector(M);
        }
    }
    std::vector<cplx> z(n);
    for (int i = 0; i < n; ++i) z[i] = site_param(sites[i](0), sites[i](1));
    return ProductParams(std::move(z));
}

ProductParams random_params(int n, double zmax, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<cplx> z(n);
    for (auto& zi : z) zi = std::polar(zmax * u(rng), 2.0 * M_PI * u(rng));
    return ProductParams(std::move(z));
}

ProductParams haar_product_params(int n, Rng& rng) {
    std::vector<cplx> z(n);
    for (auto& zi : z) {
        VectorXc v = random_unit_vector(2, rng);
        zi = site_param(v(0), v(1));
    }
    return ProductParams(std::move(z));
}

} // namespace prodstate
