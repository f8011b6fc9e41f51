#include "prodstate/simaccess.hpp"

#include <algorithm>
#include <array>
#include <climits>
#include <cmath>
#include <limits>

namespace prodstate {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

void check_eps_delta(double eps, double delta, const char* who) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument(std::string(who) + ": eps must be in (0,1)");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument(std::string(who) + ": delta must be in (0,1)");
}

int log2_exact(int d) {
    int q = 0;
    while ((1 << q) < d) ++q;
    if ((1 << q) != d) throw std::invalid_argument("local dimension must be a power of 2");
    return q;
}

/// Hermitian perturbation with the given trace norm (trace_norm = true) or operator norm.
MatrixXc random_perturbation(int dim, double size, bool trace_norm, Rng& rng) {
    MatrixXc h = random_hermitian(dim, 1.0, rng);
    double s = trace_norm ? prodstate::trace_norm(h) : op_norm(h);
    if (s <= 0) return MatrixXc::Zero(dim, dim);
    return h * (size / s);
}

std::vector<std::uint64_t> weight_le_indices(int m, int d) {
    std::vector<std::uint64_t> idx;
    for (std::uint64_t b = 0; b < (std::uint64_t(1) << m); ++b)
        if (popcount(b) <= d) idx.push_back(b);
    return idx;
}

/// Multinomial counts over `probs` with N trials.
std::vector<std::uint64_t> multinomial(const Eigen::VectorXd& probs, std::uint64_t N, Rng& rng) {
    std::vector<std::uint64_t> counts(probs.size(), 0);
    double rest = probs.sum();
    std::uint64_t left = N;
    for (Eigen::Index b = 0; b < probs.size() && left > 0; ++b) {
        if (b + 1 == probs.size()) {
            counts[b] = left;
            break;
        }
        double p = rest > 0 ? std::clamp(probs(b) / rest, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> bin(static_cast<long long>(std::min<std::uint64_t>(left, LLONG_MAX)), p);
        std::uint64_t c = static_cast<std::uint64_t>(bin(rng));
        counts[b] = c;
        left -= c;
        rest -= probs(b);
    }
    return counts;
}

} // namespace

StateOracle::StateOracle(QuantumState hidden, Backend b, double noise, std::uint64_t seed)
    : hidden_(std::move(hidden)), backend_(b), noise_(noise), seed_(seed), rng_(seed) {
    rho_ = hidden_.density();
}

StateOracle StateOracle::exact(QuantumState hidden, double noise_opnorm, std::uint64_t seed) {
    if (!(noise_opnorm >= 0)) throw std::invalid_argument("StateOracle: noise must be >= 0");
    return StateOracle(std::move(hidden), Backend::exact, noise_opnorm, seed);
}

StateOracle StateOracle::sampling(QuantumState hidden, std::uint64_t seed) {
    return StateOracle(std::move(hidden), Backend::sampling, 0.0, seed);
}

void StateOracle::consume(std::uint64_t copies) { copies_ = copies_ > kSat - copies ? kSat : copies_ + copies; }

StateOracle StateOracle::fork(std::uint64_t stream) const {
    std::seed_seq seq{seed_, stream, std::uint64_t(0x9e3779b97f4a7c15ULL)};
    std::array<std::uint32_t, 2> w;
    seq.generate(w.begin(), w.end());
    std::uint64_t s = (std::uint64_t(w[0]) << 32) | w[1];
    StateOracle o(*this);
    o.seed_ = s;
    o.rng_.seed(s);
    o.copies_ = 0;
    return o;
}

StateOracle StateOracle::restrict(int first, int len, std::uint64_t stream) const {
    if (first < 0 || len < 1 || first + len > n()) throw std::invalid_argument("StateOracle::restrict: range out of bounds");
    StateOracle f = fork(stream);
    MatrixXc red = reduced_block(rho_, n(), local_dim(), first, len);
    f.hidden_ = QuantumState::raw_mixed(len, local_dim(), red);
    f.rho_ = std::move(red);
    return f;
}

std::uint64_t sat_mul(std::uint64_t a, std::uint64_t b) {
    if (a == 0 || b == 0) return 0;
    if (a > kSat / b) return kSat;
    return a * b;
}

std::uint64_t sat_ceil(double x) {
    if (!(x > 0)) return 0;
    if (x >= 1.8e19) return kSat;
    return static_cast<std::uint64_t>(std::ceil(x));
}

ZEstimateBudget estimate_z_budget(int n, double eps, double delta) {
    check_eps_delta(eps, delta, "estimate_z");
    return {sat_ceil(27.0 * n / (eps * eps)), sat_ceil(8.0 * std::log(1.0 / delta))};
}

VectorXc true_z(const MatrixXc& rho, int n, const std::vector<Matrix2c>& basis) {
    std::vector<Matrix2c> u = basis;
    if (u.empty()) u.assign(n, Matrix2c::Identity());
    if (static_cast<int>(u.size()) != n) throw std::invalid_argument("true_z: basis size mismatch");
    // phi_0 = U^dagger |0^n>, phi_i = U^dagger |e_i>, z_i = <phi_i|rho|phi_0>
    std::vector<VectorXc> col0(n), col1(n);
    for (int i = 0; i < n; ++i) {
        Matrix2c ud = u[i].adjoint();
        col0[i] = ud.col(0);
        col1[i] = ud.col(1);
    }
    VectorXc phi0 = product_of_sites(col0);
    VectorXc w = rho * phi0;
    VectorXc z(n);
    for (int i = 0; i < n; ++i) {
        std::vector<VectorXc> s = col0;
        s[i] = col1[i];
        z(i) = product_of_sites(s).dot(w);
    }
    return z;
}

int compressed_dim(int n) {
    int q = 0;
    while ((1 << q) < n + 1) ++q;
    return 1 << (1 + q);
}

MatrixXc compressed_register(const MatrixXc& rho, int n, const std::vector<Matrix2c>& basis) {
    std::vector<Matrix2c> u = basis;
    if (u.empty()) u.assign(n, Matrix2c::Identity());
    std::vector<VectorXc> col0(n), col1(n);
    for (int i = 0; i < n; ++i) {
        Matrix2c ud = u[i].adjoint();
        col0[i] = ud.col(0);
        col1[i] = ud.col(1);
    }
    MatrixXc phis(rho.rows(), n + 1);
    phis.col(0) = product_of_sites(col0);
    for (int i = 0; i < n; ++i) {
        std::vector<VectorXc> s = col0;
        s[i] = col1[i];
        phis.col(i + 1) = product_of_sites(s);
    }
    MatrixXc block = phis.adjoint() * rho * phis;
    const int D = compressed_dim(n);
    MatrixXc c = MatrixXc::Zero(D, D);
    c.topLeftCorner(n + 1, n + 1) = block;
    c(n + 1, n + 1) = std::max(0.0, 1.0 - block.trace().real());
    return c;
}

VectorXc shadow_z_sample(const Eigen::VectorXd& evals, const MatrixXc& evecs, int n, Rng& rng) {
    const int D = static_cast<int>(evecs.rows());
    std::discrete_distribution<int> pick(evals.data(), evals.data() + evals.size());
    int k = pick(rng);
    std::gamma_distribution<double> g2(2.0, 1.0), gd(D - 1.0, 1.0);
    double x = g2(rng), y = gd(rng);
    double t = x / (x + y);
    std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
    VectorXc ek = evecs.col(k);
    VectorXc w(D);
    for (int i = 0; i < D; ++i) w(i) = complex_normal(rng);
    w -= ek * ek.dot(w);
    w /= w.norm();
    VectorXc v = std::sqrt(t) * std::polar(1.0, ph(rng)) * ek + std::sqrt(1.0 - t) * w;
    VectorXc z(n);
    for (int i = 0; i < n; ++i) z(i) = double(D + 1) * v(i + 1) * std::conj(v(0));
    return z;
}

VectorXc median_of_means(const std::vector<VectorXc>& means) {
    if (means.empty()) throw std::invalid_argument("median_of_means: no means");
    std::size_t best = 0;
    double best_med = kInf;
    std::vector<double> dist(means.size());
    for (std::size_t i = 0; i < means.size(); ++i) {
        for (std::size_t j = 0; j < means.size(); ++j) dist[j] = (means[i] - means[j]).norm();
        std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
        double med = dist[dist.size() / 2];
        if (med < best_med) {
            best_med = med;
            best = i;
        }
    }
    return means[best];
}

VectorXc estimate_z(StateOracle& o, const std::vector<Matrix2c>& basis, double eps, double delta) {
    if (o.local_dim() != 2) throw std::invalid_argument("estimate_z: qubit oracle required");
    const int n = o.n();
    if (!basis.empty() && static_cast<int>(basis.size()) != n)
        throw std::invalid_argument("estimate_z: basis size mismatch");
    ZEstimateBudget budget = estimate_z_budget(n, eps, delta);
    o.consume(budget.total());
    if (o.is_exact()) {
        VectorXc z = true_z(o.density(), n, basis);
        double h = std::min(eps, o.noise());
        if (h > 0) z += h * random_unit_vector(n, o.rng());
        return z;
    }
    MatrixXc c = compressed_register(o.density(), n, basis);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(c);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    std::vector<VectorXc> means;
    means.reserve(budget.means);
    for (std::uint64_t k = 0; k < budget.means; ++k) {
        VectorXc acc = VectorXc::Zero(n);
        for (std::uint64_t s = 0; s < budget.per_mean; ++s) acc += shadow_z_sample(ev, es.eigenvectors(), n, o.rng());
        means.push_back(acc / double(budget.per_mean));
    }
    return median_of_means(means);
}

std::uint64_t subspace_tomography_copies(int m, int d, double eps, double delta) {
    check_eps_delta(eps, delta, "subspace_tomography");
    return sat_ceil(std::pow(10.0 * m, 2.0 * d) / (eps * eps) * std::log(1.0 / delta));
}

MatrixXc truncate_weight(const MatrixXc& rho, int m, int d) {
    MatrixXc out = rho;
    for (std::uint64_t b = 0; b < (std::uint64_t(1) << m); ++b) {
        if (popcount(b) <= d) continue;
        out.row(b).setZero();
        out.col(b).setZero();
    }
    return out;
}

MatrixXc apply_frame(const MatrixXc& rho, int n, int d, const Frame& frame) {
    MatrixXc r = rho;
    for (const auto& g : frame) {
        if (g.first < 0 || g.k < 1 || g.first + g.k > n) throw std::invalid_argument("apply_frame: gate out of range");
        conjugate_block_op(r, n, d, g.first, g.k, g.u);
    }
    return r;
}

MatrixXc pauli_tomography(const MatrixXc& state, int nq, std::uint64_t copies, Rng& rng) {
    const std::uint64_t dim = std::uint64_t(1) << nq;
    const std::uint64_t settings = ipow(3, nq);
    const std::uint64_t paulis = ipow(4, nq);
    const cplx I(0, 1);
    Matrix2c had, sdg_had;
    had << 1, 1, 1, -1;
    had /= std::sqrt(2.0);
    Matrix2c sdg;
    sdg << 1, 0, 0, -I;
    sdg_had = had * sdg;
    // counts[setting][outcome]
    std::vector<std::vector<std::uint64_t>> counts(settings);
    std::vector<std::uint64_t> shots(settings, copies / settings);
    for (std::uint64_t s = 0; s < copies % settings; ++s) ++shots[s];
    for (std::uint64_t s = 0; s < settings; ++s) {
        MatrixXc r = state;
        std::uint64_t code = s;
        for (int q = nq - 1; q >= 0; --q) {
            int axis = code % 3;  // 0 X, 1 Y, 2 Z
            code /= 3;
            if (axis == 0) conjugate_site_op(r, nq, 2, q, had);
            if (axis == 1) conjugate_site_op(r, nq, 2, q, sdg_had);
        }
        Eigen::VectorXd probs = r.diagonal().real().cwiseMax(0.0);
        counts[s] = shots[s] > 0 ? multinomial(probs, shots[s], rng) : std::vector<std::uint64_t>(dim, 0);
    }
    Matrix2c pm[4];
    pm[0] = Matrix2c::Identity();
    pm[1] << 0, 1, 1, 0;
    pm[2] << 0, -I, I, 0;
    pm[3] << 1, 0, 0, -1;
    MatrixXc est = MatrixXc::Zero(dim, dim);
    std::vector<int> ops(nq);
    for (std::uint64_t p = 0; p < paulis; ++p) {
        std::uint64_t code = p;
        for (int q = nq - 1; q >= 0; --q) {
            ops[q] = code % 4;
            code /= 4;
        }
        double sum = 0;
        std::uint64_t used = 0;
        for (std::uint64_t s = 0; s < settings; ++s) {
            if (shots[s] == 0) continue;
            std::uint64_t sc = s;
            bool ok = true;
            std::vector<int> axes(nq);
            for (int q = nq - 1; q >= 0; --q) {
                axes[q] = sc % 3 + 1;
                sc /= 3;
            }
            for (int q = 0; q < nq; ++q)
                if (ops[q] != 0 && ops[q] != axes[q]) ok = false;
            if (!ok) continue;
            double e = 0;
            for (std::uint64_t b = 0; b < dim; ++b) {
                if (!counts[s][b]) continue;
                int sign = 1;
                for (int q = 0; q < nq; ++q)
                    if (ops[q] != 0 && ((b >> (nq - 1 - q)) & 1)) sign = -sign;
                e += sign * double(counts[s][b]);
            }
            sum += e / double(shots[s]);
            ++used;
        }
        if (used == 0) continue;
        double ev = sum / double(used);
        MatrixXc pmat = pm[ops[0]];
        for (int q = 1; q < nq; ++q) pmat = kron(pmat, pm[ops[q]]);
        est += ev * pmat;
    }
    return est / double(dim);
}

MatrixXc subspace_tomography(StateOracle& o, int prefix_m, int d, double eps, double delta,
                             const std::vector<Matrix2c>& frame) {
    if (o.local_dim() != 2) throw std::invalid_argument("subspace_tomography: qubit oracle required");
    if (prefix_m < 1 || prefix_m > o.n()) throw std::invalid_argument("subspace_tomography: prefix_m out of range");
    if (d < 0 || d > prefix_m) throw std::invalid_argument("subspace_tomography: d out of range");
    if (!frame.empty() && static_cast<int>(frame.size()) != prefix_m)
        throw std::invalid_argument("subspace_tomography: frame size mismatch");
    std::uint64_t copies = subspace_tomography_copies(prefix_m, d, eps, delta);
    MatrixXc red = trace_out_suffix(o.density(), o.n(), 2, prefix_m);
    for (std::size_t i = 0; i < frame.size(); ++i) conjugate_site_op(red, prefix_m, 2, static_cast<int>(i), frame[i]);
    MatrixXc target = truncate_weight(red, prefix_m, d);
    o.consume(copies);
    if (o.is_exact()) {
        double h = std::min(eps, o.noise());
        if (h <= 0) return target;
        auto idx = weight_le_indices(prefix_m, d);
        const int k = static_cast<int>(idx.size());
        for (;;) {
            MatrixXc pert = random_perturbation(k, h, false, o.rng());
            MatrixXc noisy = target;
            for (int a = 0; a < k; ++a)
                for (int b = 0; b < k; ++b) noisy(idx[a], idx[b]) += pert(a, b);
            MatrixXc out = truncate_weight(project_psd_subnormalized(noisy), prefix_m, d);
            if (op_norm(out - target) <= eps) return out;
            h /= 2;
        }
    }
    if (prefix_m > 5) throw ResourceError("subspace_tomography: sampling backend limited to 5 qubits");
    MatrixXc est = pauli_tomography(red, prefix_m, copies, o.rng());
    return truncate_weight(project_psd_subnormalized(truncate_weight(est, prefix_m, d)), prefix_m, d);
}

std::uint64_t subnormalized_tomography_copies(int local_dim, int keep, double eps, double delta) {
    check_eps_delta(eps, delta, "subnormalized_tomography");
    return sat_ceil(std::pow(double(local_dim), 3.0 * keep) / (eps * eps) * std::log(1.0 / delta));
}

MatrixXc subnormalized_tomography(StateOracle& o, const Frame& frame, int zeroed_prefix, double eps, double delta,
                                  int keep) {
    const int n = o.n();
    const int d = o.local_dim();
    if (zeroed_prefix < 0 || zeroed_prefix >= n)
        throw std::invalid_argument("subnormalized_tomography: zeroed_prefix out of range");
    const int rest = n - zeroed_prefix;
    if (keep < 0) keep = rest;
    if (keep < 1 || keep > rest) throw std::invalid_argument("subnormalized_tomography: keep out of range");
    std::uint64_t copies = subnormalized_tomography_copies(d, keep, eps, delta);
    MatrixXc r = apply_frame(o.density(), n, d, frame);
    const std::uint64_t drest = ipow(d, rest);
    MatrixXc sigma_full = r.topLeftCorner(drest, drest);
    MatrixXc sigma = trace_out_suffix(sigma_full, rest, d, keep);
    o.consume(copies);
    if (o.is_exact()) {
        double h = std::min(eps, o.noise());
        if (h <= 0) return sigma;
        for (;;) {
            MatrixXc noisy = sigma + random_perturbation(sigma.rows(), h, true, o.rng());
            MatrixXc out = project_psd_subnormalized(noisy);
            if (trace_norm(out - sigma) <= eps) return out;
            h /= 2;
        }
    }
    const int nq = log2_exact(d) * keep;
    if (nq > 5) throw ResourceError("subnormalized_tomography: sampling backend limited to 5 qubits");
    double mu = std::clamp(sigma.trace().real(), 0.0, 1.0);
    std::binomial_distribution<long long> bin(static_cast<long long>(std::min<std::uint64_t>(copies, LLONG_MAX)), mu);
    std::uint64_t kept = static_cast<std::uint64_t>(bin(o.rng()));
    if (kept == 0) return MatrixXc::Zero(sigma.rows(), sigma.cols());
    MatrixXc est = pauli_tomography(sigma / mu, nq, kept, o.rng());
    MatrixXc st = project_psd_subnormalized(est);
    double tr = st.trace().real();
    if (tr > 0) st /= tr;
    return st * (double(kept) / double(copies));
}

std::uint64_t estimate_fidelity_copies(double eps, double delta) {
    check_eps_delta(eps, delta, "estimate_fidelity");
    return sat_ceil(std::log(2.0 / delta) / (2.0 * eps * eps));
}

VectorXc product_of_sites(const std::vector<VectorXc>& sites) {
    VectorXc v = VectorXc::Ones(1);
    for (const auto& s : sites) {
        VectorXc nv(v.size() * s.size());
        for (Eigen::Index a = 0; a < v.size(); ++a) nv.segment(a * s.size(), s.size()) = v(a) * s;
        v = std::move(nv);
    }
    return v;
}

double estimate_fidelity(StateOracle& o, int prefix_m, const std::vector<VectorXc>& sites, double eps, double delta) {
    if (prefix_m < 1 || prefix_m > o.n() || static_cast<int>(sites.size()) != prefix_m)
        throw std::invalid_argument("estimate_fidelity: dimension mismatch");
    for (const auto& s : sites)
        if (s.size() != o.local_dim()) throw std::invalid_argument("estimate_fidelity: local dimension mismatch");
    std::uint64_t N = estimate_fidelity_copies(eps, delta);
    MatrixXc red = trace_out_suffix(o.density(), o.n(), o.local_dim(), prefix_m);
    VectorXc phi = product_of_sites(sites);
    double f = std::clamp(phi.dot(red * phi).real(), 0.0, 1.0);
    o.consume(N);
    if (o.is_exact()) {
        double h = std::min(eps, o.noise());
        if (h <= 0) return f;
        std::uniform_real_distribution<double> u(-h, h);
        return std::clamp(f + u(o.rng()), 0.0, 1.0);
    }
    std::binomial_distribution<long long> bin(static_cast<long long>(std::min<std::uint64_t>(N, LLONG_MAX)), f);
    return double(bin(o.rng())) / double(N);
}

double estimate_fidelity(StateOracle& o, int prefix_m, const ProductParams& p, double eps, double delta) {
    if (o.local_dim() != 2 || p.size() != prefix_m) throw std::invalid_argument("estimate_fidelity: dimension mismatch");
    std::vector<VectorXc> sites(prefix_m);
    for (int i = 0; i < prefix_m; ++i) {
        auto [a0, a1] = site_amplitudes(p[i]);
        sites[i] = VectorXc(2);
        sites[i] << a0, a1;
    }
    return estimate_fidelity(o, prefix_m, sites, eps, delta);
}

} // namespace prodstate
