#include "prodstate/highfid.hpp"

#include <algorithm>
#include <climits>
#include <cmath>

namespace prodstate {

int local_opt_levels(double eps, double C) {
    double cp = std::max(eps, C);
    return std::max(1, static_cast<int>(std::ceil(0.5 * std::log(90.0 / (cp * eps)))));
}

double local_opt_level_delta(double eps, double delta, double C, int lambda) {
    double cp = std::max(eps, C);
    int m = local_opt_levels(eps, C);
    int ell = m + 1 - lambda;
    double denom = std::ceil(5.0 * eps * std::exp(2.0 * m)) + std::ceil(900.0 * ell / cp);
    return delta * std::pow(2.0, -ell) / denom;
}

long long local_opt_iteration_bound(double eps, double C) {
    double cp = std::max(eps, C);
    int m = local_opt_levels(eps, C);
    return static_cast<long long>(std::ceil(5.0 * eps * std::exp(2.0 * m)) + std::ceil(900.0 * m / cp));
}

ProductParams local_optimize(StateOracle& o, const ProductParams& start, const LocalOptConfig& cfg,
                             LocalOptTrace* trace) {
    if (!(cfg.eps > 0 && cfg.eps <= 1.0 / 3.0)) throw std::invalid_argument("local_optimize: eps must be in (0, 1/3]");
    if (!(cfg.delta > 0 && cfg.delta < 1)) throw std::invalid_argument("local_optimize: delta must be in (0,1)");
    // high_fidelity_learn hands over C = 1/3 + eps, so accept up to 1/2.
    if (!(cfg.C >= 0 && cfg.C <= 0.5)) throw std::invalid_argument("local_optimize: C out of range");
    if (o.local_dim() != 2 || start.size() != o.n()) throw std::invalid_argument("local_optimize: dimension mismatch");

    const int m = local_opt_levels(cfg.eps, cfg.C);
    const long long cap = cfg.max_outer_iters > 0 ? cfg.max_outer_iters
                                                  : 10 * local_opt_iteration_bound(cfg.eps, cfg.C);
    const std::uint64_t copies0 = o.copies_consumed();
    if (trace) trace->m = m;

    ProductParams pi = start;
    for (long long iter = 0; iter < cap; ++iter) {
        if (trace) trace->outer_iters = static_cast<int>(iter + 1);
        std::vector<Matrix2c> u = recenter_unitaries(pi);
        bool updated = false;
        for (int lambda = 1; lambda <= m; ++lambda) {
            double dl = local_opt_level_delta(cfg.eps, cfg.delta, cfg.C, lambda);
            double tol = std::exp(-lambda);
            VectorXc a = estimate_z(o, u, std::min(tol, 0.999), dl);
            double na = a.norm();
            if (na >= 2.0 * tol) {
                std::vector<cplx> step(a.data(), a.data() + a.size());
                for (auto& s : step) s /= 10.0;
                std::vector<Matrix2c> ud(u.size());
                for (std::size_t i = 0; i < u.size(); ++i) ud[i] = u[i].adjoint();
                ProductParams next = apply_site_unitaries(ProductParams::clamped(step), ud);
                if (trace) {
                    LocalStep st;
                    st.a_norm = na;
                    st.fidelity_before = fidelity(o.hidden(), pi);
                    st.fidelity_after = fidelity(o.hidden(), next);
                    st.lambda = lambda;
                    trace->steps.push_back(st);
                }
                pi = next;
                updated = true;
                break;
            }
        }
        if (!updated) {
            if (trace) trace->copies = o.copies_consumed() - copies0;
            return pi;
        }
    }
    throw std::runtime_error("local_optimize: iteration cap exceeded (fidelity promise violated?)");
}

ProductParams single_qubit_estimate(StateOracle& o, double delta) {
    if (o.n() != 1 || o.local_dim() != 2) throw std::invalid_argument("single_qubit_estimate: single qubit required");
    const std::uint64_t N = sat_ceil(50.0 * std::log(2.0 / delta));
    const MatrixXc& rho = o.density();
    double r[3] = {2.0 * rho(0, 1).real(), -2.0 * rho(0, 1).imag(), (rho(0, 0) - rho(1, 1)).real()};
    o.consume(sat_mul(3, N));
    if (o.is_exact()) {
        if (o.noise() > 0) {
            VectorXc dir = random_unit_vector(3, o.rng());
            for (int k = 0; k < 3; ++k) r[k] += o.noise() * dir(k).real();
        }
    } else {
        for (double& rk : r) {
            double p = std::clamp((1.0 + rk) / 2.0, 0.0, 1.0);
            std::binomial_distribution<long long> bin(static_cast<long long>(std::min<std::uint64_t>(N, LLONG_MAX)), p);
            rk = 2.0 * double(bin(o.rng())) / double(N) - 1.0;
        }
    }
    double len = std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]);
    if (len == 0.0) return ProductParams::zeros(1);
    double th = std::acos(std::clamp(r[2] / len, -1.0, 1.0));
    double ph = std::atan2(r[1], r[0]);
    cplx alpha = std::cos(th / 2);
    cplx beta = std::polar(std::sin(th / 2), ph);
    return ProductParams({site_param(alpha, beta)});
}

namespace {

ProductParams learn_rec(StateOracle& o, double eps, double delta, HighFidTrace* trace) {
    const int n = o.n();
    ProductParams pi;
    if (n == 1) {
        pi = single_qubit_estimate(o, delta / 2);
    } else {
        const int nl = (n + 1) / 2;
        StateOracle left = o.restrict(0, nl, 1);
        StateOracle right = o.restrict(nl, n - nl, 2);
        ProductParams pl = learn_rec(left, eps, delta / 4, trace);
        ProductParams pr = learn_rec(right, eps, delta / 4, trace);
        // one copy of rho serves both halves
        o.consume(std::max(left.copies_consumed(), right.copies_consumed()));
        pi = pl.append(pr);
    }
    LocalOptConfig cfg;
    cfg.eps = eps;
    cfg.delta = delta / 2;
    cfg.C = 1.0 / 3.0 + eps;
    LocalOptTrace lt;
    ProductParams out = local_optimize(o, pi, cfg, trace ? &lt : nullptr);
    if (trace) trace->steps.insert(trace->steps.end(), lt.steps.begin(), lt.steps.end());
    return out;
}

} // namespace

ProductParams high_fidelity_learn(StateOracle& o, double eps, double delta, HighFidTrace* trace) {
    if (!(eps > 0 && eps <= 1.0 / 6.0)) throw std::invalid_argument("high_fidelity_learn: eps must be in (0, 1/6]");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("high_fidelity_learn: delta must be in (0,1)");
    if (o.local_dim() != 2) throw std::invalid_argument("high_fidelity_learn: qubit oracle required");
    const std::uint64_t c0 = o.copies_consumed();
    ProductParams out = learn_rec(o, eps, delta, trace);
    if (trace) trace->copies = o.copies_consumed() - c0;
    return out;
}

double fidelity_upper_bound(double alpha2, double norm_z, double c) {
    if (!(c > 0)) throw std::invalid_argument("fidelity_upper_bound: c must be > 0");
    return alpha2 + std::min(3.0 * norm_z, norm_z * norm_z / c);
}

} // namespace prodstate
