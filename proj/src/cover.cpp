#include "prodstate/cover.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace prodstate {

namespace {

std::vector<std::vector<int>> subsets_of_size(int n, int k) {
    std::vector<std::vector<int>> out;
    if (k > n || k < 0) return out;
    std::vector<int> s(k);
    std::iota(s.begin(), s.end(), 0);
    for (;;) {
        out.push_back(s);
        int i = k - 1;
        while (i >= 0 && s[i] == n - k + i) --i;
        if (i < 0) break;
        ++s[i];
        for (int j = i + 1; j < k; ++j) s[j] = s[j - 1] + 1;
    }
    return out;
}

double factorial(int k) {
    double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

/// Unnormalized product vector with site factors (1, z_i).
VectorXc monomial_vector(const VectorXc& z) {
    std::vector<VectorXc> sites(z.size(), VectorXc(2));
    for (Eigen::Index i = 0; i < z.size(); ++i) sites[i] << 1.0, z(i);
    return product_of_sites(sites);
}

double sub_dtan2(const VectorXc& v, const VectorXc& a, const std::vector<int>& idx) {
    double s = 0;
    for (int i : idx) {
        cplx num = v(i) - a(i);
        cplx den = 1.0 + std::conj(v(i)) * a(i);
        if (std::abs(num) == 0) continue;
        if (std::abs(den) == 0) return kInf;
        s += std::norm(num / den);
    }
    return s;
}

/// Net filter: nu^2 - |v_Sbar|^2 + |v_Sbar - a_Sbar|^2 >= 1.49 b^2 - dtan(v_S, a_S)^2 for all constraints.
bool passes_filter(const VectorXc& v, double nu, const std::vector<VectorXc>& cons, const std::vector<int>& S,
                   const std::vector<int>& Sbar, double b) {
    for (const auto& a : cons) {
        double lhs = nu * nu;
        for (int i : Sbar) lhs += std::norm(v(i) - a(i)) - std::norm(v(i));
        double d2 = sub_dtan2(v, a, S);
        if (d2 == kInf) continue;
        if (lhs < 1.49 * b * b - d2) return false;
    }
    return true;
}

VectorXc to_vec(const ProductParams& p) {
    VectorXc v(p.size());
    for (int i = 0; i < p.size(); ++i) v(i) = p[i];
    return v;
}

ProductParams to_params(const VectorXc& v) {
    return ProductParams::clamped(std::vector<cplx>(v.data(), v.data() + v.size()));
}

/// Pitch-h grid points of the radius-R ball in R^dim.
template <typename F>
void grid_ball(int dim, double radius, double h, F&& visit) {
    std::vector<double> x(dim, 0.0);
    std::vector<long> t(dim, 0), tmax(dim, 0);
    std::vector<double> rem(dim + 1, 0.0);
    rem[0] = radius * radius;
    auto init = [&](int level) {
        long lim = static_cast<long>(std::floor(std::sqrt(std::max(0.0, rem[level])) / h + 1e-12));
        tmax[level] = lim;
        t[level] = -lim;
    };
    if (dim == 0) {
        visit(x);
        return;
    }
    int k = 0;
    init(0);
    while (k >= 0) {
        if (t[k] > tmax[k]) {
            --k;
            if (k >= 0) ++t[k];
            continue;
        }
        x[k] = t[k] * h;
        double r = rem[k] - x[k] * x[k];
        if (k + 1 == dim) {
            visit(x);
            ++t[k];
            continue;
        }
        rem[k + 1] = std::max(0.0, r);
        ++k;
        init(k);
    }
}

double ball_count(int dim, double radius, double h) {
    if (dim == 0) return 1.0;
    double r = radius + h * std::sqrt(double(dim)) / 2.0;
    return std::exp(0.5 * dim * std::log(M_PI) + dim * std::log(r) - std::lgamma(0.5 * dim + 1.0) - dim * std::log(h));
}

/// Polynomial in z_Sbar (scaled by s) with coefficients from the truncation estimate and fixed z_S = v_S.
PolySystem objective_system(const MatrixXc& trunc, int m, const std::vector<int>& S, const std::vector<int>& Sbar,
                            const VectorXc& v, double nu, double s) {
    const int nb = static_cast<int>(Sbar.size());
    double pref = std::exp(-nu * nu);
    for (int i : S) pref /= 1.0 + std::norm(v(i));
    const std::uint64_t dim = ipow(2, m);
    // sigma keyed by (X bitmask over Sbar, Y bitmask over Sbar)
    const std::uint64_t sub = ipow(2, nb);
    MatrixXc sigma = MatrixXc::Zero(sub, sub);
    std::vector<cplx> wS(dim);
    std::vector<std::uint64_t> key(dim);
    for (std::uint64_t x = 0; x < dim; ++x) {
        cplx w = 1.0;
        for (int i : S)
            if ((x >> (m - 1 - i)) & 1) w *= v(i);
        wS[x] = w;
        std::uint64_t k = 0;
        for (int j = 0; j < nb; ++j)
            if ((x >> (m - 1 - Sbar[j])) & 1) k |= std::uint64_t(1) << j;
        key[x] = k;
    }
    for (std::uint64_t x = 0; x < dim; ++x)
        for (std::uint64_t y = 0; y < dim; ++y) {
            cplx r = trunc(x, y);
            if (r == 0.0) continue;
            sigma(key[x], key[y]) += pref * r * std::conj(wS[x]) * wS[y];
        }
    PolySystem sys;
    sys.n = nb;
    std::map<std::pair<int, int>, std::size_t> slot;
    for (std::uint64_t X = 0; X < sub; ++X)
        for (std::uint64_t Y = 0; Y < sub; ++Y) {
            cplx c = sigma(X, Y);
            if (c == 0.0) continue;
            int a = popcount(X), b = popcount(Y);
            c *= std::pow(s, a + b);
            if (a == 0 && b == 0) {
                sys.t0 += c;
                continue;
            }
            auto it = slot.find({a, b});
            if (it == slot.end()) {
                PolyTerm t;
                t.a = a;
                t.b = b;
                t.t.assign(ipow(nb, a + b), 0.0);
                sys.terms.push_back(std::move(t));
                it = slot.emplace(std::make_pair(a, b), sys.terms.size() - 1).first;
            }
            PolyTerm& t = sys.terms[it->second];
            std::vector<int> xi, yi;
            for (int j = 0; j < nb; ++j) {
                if ((X >> j) & 1) xi.push_back(j);
                if ((Y >> j) & 1) yi.push_back(j);
            }
            cplx val = c / (factorial(a) * factorial(b));
            std::vector<int> px = xi;
            do {
                std::vector<int> py = yi;
                do {
                    std::uint64_t idx = 0;
                    for (int j : px) idx = idx * nb + j;
                    for (int j : py) idx = idx * nb + j;
                    t.t[idx] += val;
                } while (std::next_permutation(py.begin(), py.end()));
            } while (std::next_permutation(px.begin(), px.end()));
        }
    return sys;
}

struct Cand {
    double value;
    VectorXc z;
};

} // namespace

double CoverParams::mu() const {
    double bb = b();
    return 0.1 * std::min({bb, 1.0 / bb, std::sqrt(eps_tilde()) / B_root()});
}

int CoverParams::degree(int m) const {
    double B = B_root();
    int d = static_cast<int>(std::ceil(10.0 * B * B + std::log(2.0 / eps_tilde())));
    if (degree_cap > 0) d = std::min(d, degree_cap);
    return std::min(d, m);
}

double CoverParams::tol(int m) const {
    double u = mu();
    return std::min({gamma, std::pow(u, 4) / std::sqrt(double(std::max(1, m))), 0.01 * eps});
}

void CoverParams::validate() const {
    if (!(eta > 0 && eta < 1)) throw std::invalid_argument("CoverParams: eta must be in (0,1)");
    if (!(eps > 0 && eps < eta / 3)) throw std::invalid_argument("CoverParams: eps must be in (0, eta/3)");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("CoverParams: delta must be in (0,1)");
    if (!(gamma > 0 && gamma <= 1)) throw std::invalid_argument("CoverParams: gamma must be in (0,1]");
    if (net_budget == 0) throw std::invalid_argument("CoverParams: net budget must be positive");
}

double cover_objective(const MatrixXc& trunc, int m, const std::vector<int>& S, const VectorXc& z, double nu) {
    if (z.size() != m || trunc.rows() != static_cast<Eigen::Index>(ipow(2, m)))
        throw std::invalid_argument("cover_objective: dimension mismatch");
    double pref = std::exp(-nu * nu);
    for (int i : S) pref /= 1.0 + std::norm(z(i));
    VectorXc w = monomial_vector(z);
    return pref * w.dot(trunc * w).real();
}

double cover_objective(const MatrixXc& trunc, int m, const std::vector<int>& S, const VectorXc& z) {
    std::vector<char> in(m, 0);
    for (int i : S) in[i] = 1;
    double nu2 = 0;
    for (int i = 0; i < m; ++i)
        if (!in[i]) nu2 += std::norm(z(i));
    return cover_objective(trunc, m, S, z, std::sqrt(nu2));
}

std::optional<ProductParams> extend_candidate(const MatrixXc& trunc, const std::vector<ProductParams>& constraints,
                                              const ProductParams& root, const CoverParams& params,
                                              ExtendStats* stats) {
    params.validate();
    const int m = root.size();
    if (m < 1 || trunc.rows() != static_cast<Eigen::Index>(ipow(2, m)))
        throw std::invalid_argument("extend_candidate: dimension mismatch");
    const std::vector<Matrix2c> U = recenter_unitaries(root);
    std::vector<Matrix2c> Ud(U.size());
    for (std::size_t i = 0; i < U.size(); ++i) Ud[i] = U[i].adjoint();
    std::vector<VectorXc> cons;
    for (const auto& a : constraints) {
        if (a.size() != m) throw std::invalid_argument("extend_candidate: constraint size mismatch");
        cons.push_back(to_vec(apply_site_unitaries(a, U)));
    }
    const double b = params.b();
    const double B = params.B_root();
    const double mu = params.mu();
    const double tol = params.tol(m);
    const double h = params.pitch(m);
    const double R = params.radius();
    int max_s = params.max_support >= 0 ? params.max_support
                                        : static_cast<int>(std::min<double>(m, std::floor(B * B / (mu * mu))));
    max_s = std::min(max_s, m);
    const int min_s = std::clamp(params.min_support, 0, m);

    std::vector<Cand> cands;
    std::uint64_t points = 0;
    std::uint64_t nsub = 0;
    std::vector<int> all(m);
    std::iota(all.begin(), all.end(), 0);

    for (int s = min_s; s <= max_s; ++s) {
        for (const auto& S : subsets_of_size(m, s)) {
            ++nsub;
            std::vector<int> Sbar;
            for (int i = 0; i < m; ++i)
                if (!std::binary_search(S.begin(), S.end(), i)) Sbar.push_back(i);
            MatrixXc M(m, cons.size() + S.size());
            for (std::size_t j = 0; j < cons.size(); ++j) M.col(j) = cons[j];
            for (std::size_t j = 0; j < S.size(); ++j) M.col(cons.size() + j) = VectorXc::Unit(m, S[j]);
            MatrixXc Q = orthonormal_span(M, 1e-9);
            const int q = static_cast<int>(Q.cols());
            double nu_max = Sbar.empty() ? 0.0 : B;
            double est = ball_count(2 * q, R, h) * (std::floor(nu_max / h) + 1);
            if (double(points) + est > 4.0 * double(params.net_budget))
                throw ResourceError("extend_candidate: net over F_S exceeds budget");
            MatrixXc QSbar(Sbar.size(), q);
            for (std::size_t j = 0; j < Sbar.size(); ++j) QSbar.row(j) = Q.row(Sbar[j]);

            grid_ball(2 * q, R, h, [&](const std::vector<double>& r) {
                VectorXc c(q);
                for (int j = 0; j < q; ++j) c(j) = cplx(r[2 * j], r[2 * j + 1]);
                VectorXc v = Q * c;
                if (v.norm() > B) return;
                double vS2 = 0;
                for (int i : S) vS2 += std::norm(v(i));
                for (double nu = 0; nu <= nu_max + 1e-12; nu += h) {
                    if (++points > params.net_budget) throw ResourceError("extend_candidate: net over F_S exceeds budget");
                    if (vS2 + nu * nu > B * B) break;
                    if (!passes_filter(v, nu, cons, S, Sbar, b)) continue;
                    if (Sbar.empty()) {
                        cands.push_back({cover_objective(trunc, m, S, v, 0.0), v});
                        continue;
                    }
                    VectorXc vSbar(Sbar.size());
                    for (std::size_t j = 0; j < Sbar.size(); ++j) vSbar(j) = v(Sbar[j]);
                    VectorXc target = QSbar.adjoint() * vSbar;
                    VectorXc z = v;
                    if (nu <= tol) {
                        if (target.norm() > tol) continue;
                        for (int i : Sbar) z(i) = 0.0;
                        cands.push_back({cover_objective(trunc, m, S, z, nu), z});
                        continue;
                    }
                    const double sc = std::max(1.0, nu);
                    PolySystem sys = objective_system(trunc, m, S, Sbar, v, nu, sc);
                    double norm = sys.norm_sum();
                    double scale = 1.0 / std::max(1.0, norm);
                    sys.t0 *= scale;
                    for (auto& t : sys.terms)
                        for (auto& x : t.t) x *= scale;
                    OptDomain dom;
                    dom.A = QSbar.adjoint();
                    dom.v = target / sc;
                    dom.nu = nu / sc;
                    dom.mu = mu / sc;
                    dom.gamma = std::min(tol / sc, dom.nu);
                    SolveOptions so;
                    so.net_budget = params.net_budget;
                    so.polish = params.polish;
                    so.pitch = h / sc;
                    so.jobs = params.jobs;
                    SolveResult res = solve_constrained(sys, dom, std::clamp(params.eps_tilde() * scale, 1e-6, 1.0), so);
                    points += res.net_points;
                    if (!res.x) continue;
                    for (std::size_t j = 0; j < Sbar.size(); ++j) z(Sbar[j]) = sc * (*res.x)(j);
                    cands.push_back({cover_objective(trunc, m, S, z, nu), z});
                }
            });
        }
    }

    std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.value > y.value; });
    if (params.polish && !cands.empty()) {
        const int top = std::min<int>(8, cands.size());
        for (int ci = 0; ci < top; ++ci) {
            Cand c = cands[ci];
            double val = cover_objective(trunc, m, all, c.z, 0.0);
            double step = h;
            for (int it = 0; it < 4000 && step >= h / 512; ++it) {
                bool improved = false;
                for (int dir = 0; dir < 2 * m && !improved; ++dir)
                    for (double sg : {1.0, -1.0}) {
                        VectorXc z2 = c.z;
                        z2(dir / 2) += dir % 2 == 0 ? cplx(sg * step, 0) : cplx(0, sg * step);
                        if (z2.norm() > B) continue;
                        if (!passes_filter(z2, 0.0, cons, all, {}, b)) continue;
                        double v2 = cover_objective(trunc, m, all, z2, 0.0);
                        if (v2 > val + 1e-15) {
                            val = v2;
                            c.z = z2;
                            improved = true;
                            break;
                        }
                    }
                if (!improved) step /= 2;
            }
            if (val > cands[ci].value) cands[ci] = {val, c.z};
        }
        std::stable_sort(cands.begin(), cands.end(), [](const Cand& x, const Cand& y) { return x.value > y.value; });
    }
    if (stats) {
        stats->net_points += points;
        stats->subsets += nsub;
        stats->candidates += cands.size();
        stats->best_value = cands.empty() ? 0.0 : cands.front().value;
    }
    for (const auto& c : cands) {
        if (c.value < params.eta - params.eps / 2) break;
        ProductParams zr = to_params(c.z);
        bool far = true;
        for (const auto& a : cons)
            if (tangent_distance(zr, to_params(a)) < b) far = false;
        if (!far) continue;
        return apply_site_unitaries(zr, Ud);
    }
    return std::nullopt;
}

std::vector<ProductParams> qubit_net() {
    const double r = 1.0;
    return {ProductParams({0.0}),           ProductParams::clamped({Z_MAX}), ProductParams({r}),
            ProductParams({-r}),            ProductParams({cplx(0, r)}),     ProductParams({cplx(0, -r)})};
}

Cover build_cover(StateOracle& o, const CoverParams& params, CoverTrace* trace) {
    params.validate();
    if (o.local_dim() != 2) throw std::invalid_argument("build_cover: qubit oracle required");
    const int n = o.n();
    const std::uint64_t c0 = o.copies_consumed();
    const auto net = qubit_net();
    const double max_cover = 6.0 / params.eta;
    const double roots_bound = std::ceil(max_cover) * net.size();
    const double delta_call = params.delta / (n * roots_bound);

    std::vector<ProductParams> prev{ProductParams::zeros(0)};
    Cover out;
    out.params = params;
    for (int k = 1; k <= n; ++k) {
        std::vector<ProductParams> roots;
        for (const auto& c : prev)
            for (const auto& s : net) roots.push_back(c.append(s));
        const int d = params.degree(k);
        std::vector<std::optional<MatrixXc>> cache(roots.size());
        std::vector<ProductParams> cur;
        const int max_passes = static_cast<int>(std::ceil(max_cover)) + 2;
        for (int pass = 0; pass < max_passes; ++pass) {
            bool added = false;
            for (std::size_t r = 0; r < roots.size(); ++r) {
                if (!cache[r]) {
                    cache[r] = subspace_tomography(o, k, d, params.eps_tilde(), delta_call, recenter_unitaries(roots[r]));
                    if (trace) ++trace->tomography_calls;
                }
                auto res = extend_candidate(*cache[r], cur, roots[r], params);
                if (trace) ++trace->extend_calls;
                if (!res) continue;
                bool sep = true;
                for (const auto& c : cur)
                    if (tangent_distance(*res, c) < params.b()) sep = false;
                if (!sep) continue;
                cur.push_back(*res);
                added = true;
            }
            if (!added) break;
        }
        if (trace) trace->prefixes.push_back(cur);
        prev = cur;
        out.m = k;
        if (prev.empty()) {
            out.m = n;
            break;
        }
    }
    out.members = prev;
    if (trace) trace->copies = o.copies_consumed() - c0;
    return out;
}

OptEstimate estimate_opt(StateOracle& o, double eps, double delta, const CoverParams& base) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("estimate_opt: eps must be in (0,1)");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("estimate_opt: delta must be in (0,1)");
    OptEstimate out;
    double lo = 0.0, hi = 1.0;
    double eta = 0.5;
    const int max_builds = static_cast<int>(std::ceil(std::log2(1.0 / eps))) + 2;
    const double delta_build = delta / (max_builds + 1);
    std::vector<ProductParams> best_members;
    while (hi - lo > eps && out.builds < max_builds) {
        if (eta < eps) break;
        CoverParams p = base;
        p.eta = eta;
        p.eps = std::min(eps, eta / 4);
        p.delta = delta_build;
        Cover c = build_cover(o, p);
        ++out.builds;
        out.history.emplace_back(eta, c.members.size());
        if (!c.members.empty()) {
            lo = eta;
            best_members = c.members;
        } else {
            hi = eta;
        }
        eta = 0.5 * (lo + hi);
    }
    out.estimate = lo;
    if (!best_members.empty()) {
        double best = -1;
        for (const auto& mbr : best_members) {
            double f = estimate_fidelity(o, o.n(), mbr, std::min(eps, 0.5), delta_build);
            if (f > best) {
                best = f;
                out.witness = mbr;
            }
        }
    }
    return out;
}

CoverReport verify_cover(const QuantumState& rho, const Cover& c, int trials, std::uint64_t seed) {
    CoverReport rep;
    const CoverParams& p = c.params;
    const int m = c.m;
    rep.size_ok = c.members.size() <= 6.0 / p.eta + 1e-9;
    if (m == 0) return rep;
    QuantumState red = rho;
    if (rho.n != m) red = QuantumState::raw_mixed(m, 2, trace_out_suffix(rho.density(), rho.n, 2, m));
    for (const auto& mbr : c.members) {
        double f = fidelity(red, mbr);
        rep.min_member_fidelity = std::min(rep.min_member_fidelity, f);
        if (f < p.eta - p.eps - 1e-9) ++rep.prop1_violations;
    }
    for (std::size_t i = 0; i < c.members.size(); ++i)
        for (std::size_t j = i + 1; j < c.members.size(); ++j) {
            double d = tangent_distance(c.members[i], c.members[j]);
            rep.min_pair_distance = std::min(rep.min_pair_distance, d);
            if (d < p.b() - 1e-9) ++rep.prop2_violations;
        }
    Rng rng(seed);
    std::uniform_int_distribution<int> coin(0, 1), sweeps(1, 4);
    std::uniform_real_distribution<double> ang(0.0, 0.3);
    const MatrixXc dens = red.density();
    for (int t = 0; t < trials; ++t) {
        ProductParams pi = haar_product_params(m, rng);
        if (coin(rng)) {
            pi = product_ascent(dens, pi, sweeps(rng));
            std::vector<Matrix2c> rot(m);
            for (int i = 0; i < m; ++i) {
                VectorXc axis = random_unit_vector(2, rng);
                double th = ang(rng);
                Matrix2c gen = axis * axis.adjoint();
                rot[i] = Matrix2c::Identity() + (std::polar(1.0, th) - 1.0) * gen;
            }
            pi = apply_site_unitaries(pi, rot);
        }
        if (fidelity(red, pi) < p.eta) continue;
        ++rep.witnesses_checked;
        double best = kInf;
        for (const auto& mbr : c.members) best = std::min(best, tangent_distance(pi, mbr));
        if (best > p.B_far() + 1e-9) ++rep.prop3_violations;
    }
    return rep;
}

} // namespace prodstate
