#include "prodstate/hardness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <thread>

namespace prodstate {

Tensor4 Tensor4::zeros(int m) {
    if (m < 1) throw std::invalid_argument("Tensor4: side must be >= 1");
    Tensor4 t;
    t.m = m;
    t.data.assign(ipow(m, 4), 0.0);
    return t;
}

double Tensor4::frobenius() const {
    double s = 0;
    for (const auto& x : data) s += std::norm(x);
    return std::sqrt(s);
}

double Tensor4::max_abs() const {
    double s = 0;
    for (const auto& x : data) s = std::max(s, std::abs(x));
    return s;
}

std::size_t Tensor4::nonzeros(double tol) const {
    return std::count_if(data.begin(), data.end(), [&](const cplx& x) { return std::abs(x) > tol; });
}

Tensor4 Tensor4::normalized() const {
    double f = frobenius();
    if (f == 0) throw std::invalid_argument("Tensor4: zero tensor");
    Tensor4 t = *this;
    for (auto& x : t.data) x /= f;
    return t;
}

void Graph::validate() const {
    if (vertices < 1) throw std::invalid_argument("Graph: no vertices");
    std::set<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
        if (a < 0 || b < 0 || a >= vertices || b >= vertices) throw std::invalid_argument("Graph: vertex out of range");
        if (a == b) throw std::invalid_argument("Graph: self-loop");
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) throw std::invalid_argument("Graph: duplicate edge");
    }
}

std::vector<Graph> graphs_on_four_vertices() {
    using E = std::vector<std::pair<int, int>>;
    std::vector<E> es = {
        {{0, 1}},
        {{0, 1}, {1, 2}},
        {{0, 1}, {2, 3}},
        {{0, 1}, {1, 2}, {0, 2}},
        {{0, 1}, {1, 2}, {2, 3}},
        {{0, 1}, {0, 2}, {0, 3}},
        {{0, 1}, {1, 2}, {2, 3}, {3, 0}},
        {{0, 1}, {1, 2}, {0, 2}, {2, 3}},
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}},
        {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}},
    };
    std::vector<Graph> out;
    for (auto& e : es) out.push_back({4, e});
    return out;
}

Tensor4 clique_tensor(const Graph& g) {
    g.validate();
    if (g.edges.empty()) throw std::invalid_argument("clique_tensor: graph needs at least one edge");
    Tensor4 t = Tensor4::zeros(g.vertices);
    for (auto [s, u] : g.edges) {
        t(s, u, s, u) += 0.5;
        t(u, s, u, s) += 0.5;
        t(s, u, u, s) += 0.5;
        t(u, s, s, u) += 0.5;
    }
    return t;
}

std::uint64_t tensor_state_index(int m, int i, int j, int k, int l) {
    std::uint64_t idx = 0;
    for (int a : {i, j, k, l}) idx = (idx << m) | (std::uint64_t(1) << (m - 1 - a));
    return idx;
}

VectorXc tensor_amplitudes(const Tensor4& u) {
    if (4 * u.m > 26) throw ResourceError("tensor_amplitudes: too many qubits for a dense vector");
    VectorXc psi = VectorXc::Zero(std::uint64_t(1) << (4 * u.m));
    for (int i = 0; i < u.m; ++i)
        for (int j = 0; j < u.m; ++j)
            for (int k = 0; k < u.m; ++k)
                for (int l = 0; l < u.m; ++l) psi(tensor_state_index(u.m, i, j, k, l)) = u(i, j, k, l);
    return psi;
}

QuantumState tensor_to_state(const Tensor4& t) {
    if (4 * t.m > 26) throw ResourceError("tensor_to_state: too many qubits for a dense vector");
    return QuantumState::raw_pure(4 * t.m, 2, tensor_amplitudes(t.normalized()));
}

Tensor4 random_tensor(int m, Rng& rng) {
    Tensor4 t = Tensor4::zeros(m);
    for (auto& x : t.data) x = complex_normal(rng);
    return t;
}

namespace {

/// Apply the n x m matrix U along mode `mode`.
Tensor4 mode_apply(const Tensor4& t, const MatrixXc& U, int mode) {
    const int m = t.m;
    const int n = static_cast<int>(U.rows());
    std::array<int, 4> dims{m, m, m, m};
    for (int a = 0; a < mode; ++a) dims[a] = n;
    std::array<int, 4> od = dims;
    od[mode] = n;
    std::vector<cplx> out(std::size_t(od[0]) * od[1] * od[2] * od[3], 0.0);
    // t here holds dims with the first `mode` modes already of size n
    for (int i = 0; i < dims[0]; ++i)
        for (int j = 0; j < dims[1]; ++j)
            for (int k = 0; k < dims[2]; ++k)
                for (int l = 0; l < dims[3]; ++l) {
                    cplx x = t.data[((std::size_t(i) * dims[1] + j) * dims[2] + k) * dims[3] + l];
                    if (x == 0.0) continue;
                    std::array<int, 4> id{i, j, k, l};
                    for (int r = 0; r < n; ++r) {
                        std::array<int, 4> o = id;
                        o[mode] = r;
                        out[((std::size_t(o[0]) * od[1] + o[1]) * od[2] + o[2]) * od[3] + o[3]] += U(r, id[mode]) * x;
                    }
                }
    Tensor4 r;
    r.m = t.m;
    r.data = std::move(out);
    return r;
}

/// M_ab = sum T contracted with two fixed vectors on the other modes; `free` picks the free pair.
MatrixXc contract_pair(const Tensor4& t, const VectorXc& p, const VectorXc& q, bool first_pair_free) {
    const int m = t.m;
    MatrixXc M = MatrixXc::Zero(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                for (int l = 0; l < m; ++l) {
                    const cplx x = t(i, j, k, l);
                    if (x == 0.0) continue;
                    if (first_pair_free)
                        M(i, j) += x * p(k) * q(l);
                    else
                        M(k, l) += x * p(i) * q(j);
                }
    return M;
}

SpectralResult als_run(const Tensor4& t, Rng& rng) {
    const int m = t.m;
    SpectralResult r;
    r.x = random_unit_vector(m, rng);
    r.y = random_unit_vector(m, rng);
    r.u = random_unit_vector(m, rng);
    r.v = random_unit_vector(m, rng);
    double prev = -1;
    for (int it = 0; it < 500; ++it) {
        // |x^T M y| is maximized by conj of the top singular vectors
        MatrixXc M = contract_pair(t, r.u, r.v, true);
        Eigen::JacobiSVD<MatrixXc> s1(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
        r.x = s1.matrixU().col(0).conjugate();
        r.y = s1.matrixV().col(0);
        MatrixXc N = contract_pair(t, r.x, r.y, false);
        Eigen::JacobiSVD<MatrixXc> s2(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
        r.u = s2.matrixU().col(0).conjugate();
        r.v = s2.matrixV().col(0);
        r.value = s2.singularValues()(0);
        if (std::abs(r.value - prev) <= 1e-13 * std::max(1.0, r.value)) break;
        prev = r.value;
    }
    return r;
}

} // namespace

Tensor4 random_isometry_embed(const Tensor4& t, int n, std::uint64_t seed) {
    if (n < t.m) throw std::invalid_argument("random_isometry_embed: n must be >= m");
    if (n > 64) throw ResourceError("random_isometry_embed: side exceeds budget");
    Rng rng(seed);
    MatrixXc U = haar_isometry(n, t.m, rng);
    Tensor4 cur = t;
    for (int mode = 0; mode < 4; ++mode) cur = mode_apply(cur, U, mode);
    cur.m = n;
    return cur;
}

SpectralResult spectral_norm_als(const Tensor4& t, int restarts, std::uint64_t seed, int jobs, int max_side) {
    if (t.m > max_side) throw ResourceError("spectral_norm_oracle: side exceeds budget");
    if (restarts <= 0) restarts = 50 * t.m * t.m;
    SpectralResult zero;
    zero.x = zero.y = zero.u = zero.v = VectorXc::Unit(t.m, 0);
    if (t.max_abs() == 0) return zero;
    std::vector<SpectralResult> res(restarts);
    auto work = [&](int begin, int step) {
        for (int r = begin; r < restarts; r += step) {
            std::seed_seq ss{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(r)};
            Rng rng(ss);
            res[r] = als_run(t, rng);
        }
    };
    jobs = std::max(1, std::min(jobs, restarts));
    if (jobs == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> th;
        for (int j = 0; j < jobs; ++j) th.emplace_back(work, j, jobs);
        for (auto& x : th) x.join();
    }
    std::size_t best = 0;
    for (std::size_t r = 1; r < res.size(); ++r)
        if (res[r].value > res[best].value) best = r;
    return res[best];
}

double spectral_norm_oracle(const Tensor4& t, int restarts, std::uint64_t seed, int jobs) {
    return spectral_norm_als(t, restarts, seed, jobs).value;
}

int clique_number_from_norm(double nu) {
    if (!(nu < 1)) throw std::invalid_argument("clique_number_from_norm: norm must be < 1");
    return static_cast<int>(std::lround(1.0 / (1.0 - nu)));
}

double product_overlap_lower_bound(const Tensor4& t, const SpectralResult& s) {
    Tensor4 u = t.normalized();
    cplx inner = 0;
    for (int i = 0; i < t.m; ++i)
        for (int j = 0; j < t.m; ++j)
            for (int k = 0; k < t.m; ++k)
                for (int l = 0; l < t.m; ++l) inner += u(i, j, k, l) * s.x(i) * s.y(j) * s.u(k) * s.v(l);
    double best = 0;
    for (int g = 1; g <= 400; ++g) {
        double c = 0.01 * g;
        double logxi = 0;
        for (const VectorXc* w : {&s.x, &s.y, &s.u, &s.v})
            for (Eigen::Index i = 0; i < w->size(); ++i) logxi -= 0.5 * std::log1p(c * c * std::norm((*w)(i)));
        best = std::max(best, std::exp(logxi) * std::pow(c, 4) * std::abs(inner));
    }
    return best;
}

SandwichReport opt_sandwich_check(const Tensor4& t, double product_opt, double opt_T) {
    Tensor4 u = t.normalized();
    SandwichReport r;
    r.n = t.m;
    r.opt_T = opt_T;
    r.opt_psi = product_opt;
    const double n = t.m;
    r.M = n * n * u.max_abs();
    const double slack_lo = 10.0 * r.M / std::pow(n, 0.2);
    const double slack_hi = 10.0 / std::pow(n, 0.1) + slack_lo;
    r.lower = std::exp(-2.0) * opt_T - slack_lo;
    r.upper = std::exp(-2.0) * opt_T + slack_hi;
    r.lower_ok = r.lower <= product_opt + 1e-12;
    r.upper_ok = product_opt <= r.upper + 1e-12;
    r.informative = slack_hi < 1.0;
    r.regime = r.informative ? "informative" : "non-informative: additive slack exceeds 1 at this n";
    return r;
}

SandwichReport opt_sandwich_check(const Tensor4& t, double product_opt, int restarts, std::uint64_t seed) {
    return opt_sandwich_check(t, product_opt, spectral_norm_oracle(t.normalized(), restarts, seed));
}

} // namespace prodstate
