#include "prodstate/polyopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace prodstate {

namespace {

std::uint64_t term_size(int n, const PolyTerm& t) { return ipow(n, t.a + t.b); }

/// Contract the modes of a dense tensor (all sides q): conj(c) on the first a modes, c on the last b.
cplx contract(const std::vector<cplx>& t, int a, int b, const VectorXc& c) {
    const int q = static_cast<int>(c.size());
    std::vector<cplx> cur = t;
    std::size_t len = cur.size();
    for (int mode = 0; mode < a + b; ++mode) {
        bool conj_mode = (a + b - 1 - mode) < a;
        std::size_t outer = len / q;
        for (std::size_t r = 0; r < outer; ++r) {
            cplx s = 0;
            for (int j = 0; j < q; ++j) s += cur[r * q + j] * (conj_mode ? std::conj(c(j)) : c(j));
            cur[r] = s;
        }
        len = outer;
    }
    return len == 1 ? cur[0] : cplx(0);
}

/// Multiply mode `mode` (of R modes, side n) by matrix M (n x q): out[.., p, ..] = sum_i T[.., i, ..] M(i, p).
std::vector<cplx> mode_product(const std::vector<cplx>& t, int R, int mode, const std::vector<int>& dims,
                               const MatrixXc& M) {
    std::size_t before = 1, after = 1;
    for (int i = 0; i < mode; ++i) before *= dims[i];
    for (int i = mode + 1; i < R; ++i) after *= dims[i];
    const int n = dims[mode];
    const int q = static_cast<int>(M.cols());
    std::vector<cplx> out(before * q * after, 0.0);
    for (std::size_t x = 0; x < before; ++x)
        for (int i = 0; i < n; ++i)
            for (int p = 0; p < q; ++p) {
                cplx m = M(i, p);
                if (m == 0.0) continue;
                const cplx* src = &t[(x * n + i) * after];
                cplx* dst = &out[(x * q + p) * after];
                for (std::size_t y = 0; y < after; ++y) dst[y] += src[y] * m;
            }
    return out;
}

double ball_points_estimate(int dim, double radius, double pitch) {
    double r = radius + pitch * std::sqrt(double(dim)) / 2.0;
    double logv = 0.5 * dim * std::log(M_PI) + dim * std::log(r) - std::lgamma(0.5 * dim + 1.0);
    return std::exp(logv - dim * std::log(pitch));
}

std::vector<std::vector<int>> subsets_of(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> s(k);
    for (int i = 0; i < k; ++i) s[i] = i;
    if (k > n) return out;
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

struct Candidate {
    double value = -1.0;
    VectorXc c;
    std::size_t subset = 0;
};

struct SubsetContext {
    MatrixXc B;
    MatrixXc AB;
    PolySystem reduced;
};

bool reduced_member(const OptDomain& dom, const SubsetContext& ctx, const VectorXc& c, double scale) {
    return in_domain(dom, ctx.B * c, scale);
}

VectorXc from_real(const std::vector<double>& r) {
    VectorXc c(r.size() / 2);
    for (std::size_t i = 0; i < r.size() / 2; ++i) c(i) = cplx(r[2 * i], r[2 * i + 1]);
    return c;
}

/// Enumerate pitch-h grid points of the radius-R ball in R^{dim}; callback returns false to stop.
template <typename F>
void enumerate_ball(int dim, double radius, double h, F&& visit) {
    std::vector<double> x(dim, 0.0);
    std::vector<long> t(dim, 0), tmax(dim, 0);
    std::vector<double> rem(dim + 1, 0.0);
    rem[0] = radius * radius;
    int k = 0;
    auto init = [&](int level) {
        long lim = static_cast<long>(std::floor(std::sqrt(std::max(0.0, rem[level])) / h + 1e-12));
        tmax[level] = lim;
        t[level] = -lim;
    };
    init(0);
    while (k >= 0) {
        if (t[k] > tmax[k]) {
            --k;
            if (k >= 0) ++t[k];
            continue;
        }
        x[k] = t[k] * h;
        double r = rem[k] - x[k] * x[k];
        if (r < -1e-12) {
            ++t[k];
            continue;
        }
        if (k + 1 == dim) {
            if (!visit(x)) return;
            ++t[k];
            continue;
        }
        rem[k + 1] = r;
        ++k;
        init(k);
    }
}

} // namespace

PolySystem PolySystem::standard(int n, cplx t0, const std::vector<std::vector<cplx>>& tk) {
    PolySystem s;
    s.n = n;
    s.t0 = t0;
    for (std::size_t k = 0; k < tk.size(); ++k) {
        PolyTerm term;
        term.a = term.b = static_cast<int>(k + 1);
        term.t = tk[k];
        s.terms.push_back(std::move(term));
    }
    s.validate();
    return s;
}

int PolySystem::degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max({d, t.a, t.b});
    return d;
}

double PolySystem::norm_sum() const {
    double s = std::abs(t0);
    for (const auto& t : terms) {
        double f = 0;
        for (const auto& x : t.t) f += std::norm(x);
        s += std::sqrt(f);
    }
    return s;
}

void PolySystem::validate() const {
    if (n < 1) throw std::invalid_argument("PolySystem: n must be >= 1");
    for (const auto& t : terms) {
        if (t.a < 0 || t.b < 0) throw std::invalid_argument("PolySystem: negative degree");
        if (t.t.size() != term_size(n, t)) throw std::invalid_argument("PolySystem: tensor size mismatch");
    }
    if (norm_sum() > 1.0 + 1e-9) throw std::invalid_argument("PolySystem: sum of tensor norms exceeds 1");
}

void OptDomain::validate(int n) const {
    if (A.rows() > 0 && A.cols() != n) throw std::invalid_argument("OptDomain: A has wrong width");
    if (v.size() != A.rows()) throw std::invalid_argument("OptDomain: v has wrong length");
    if (A.rows() > 0 && op_norm(A) > 1.0 + 1e-9) throw std::invalid_argument("OptDomain: |A|_op > 1");
    if (!(nu > 0 && nu <= 1.0 + 1e-12)) throw std::invalid_argument("OptDomain: nu must be in (0, 1]");
    if (!(mu > 0)) throw std::invalid_argument("OptDomain: mu must be > 0");
    if (!(gamma > 0 && gamma <= nu)) throw std::invalid_argument("OptDomain: gamma must be in (0, nu]");
}

double domain_violation(const OptDomain& dom, const VectorXc& x, double scale) {
    const double g = dom.gamma * scale;
    double viol = std::abs(x.norm() - dom.nu) - g;
    if (dom.A.rows() > 0) viol = std::max(viol, (dom.A * x - dom.v).norm() - g);
    if (x.size() > 0) viol = std::max(viol, x.cwiseAbs().maxCoeff() - (dom.mu + g));
    return viol;
}

bool in_domain(const OptDomain& dom, const VectorXc& x, double scale) { return domain_violation(dom, x, scale) <= 0; }

cplx evaluate_poly(const PolySystem& sys, const VectorXc& x) {
    if (x.size() != sys.n) throw std::invalid_argument("evaluate_poly: dimension mismatch");
    cplx f = sys.t0;
    for (const auto& t : sys.terms) f += contract(t.t, t.a, t.b, x);
    return f;
}

MatrixXc effective_subspace(const PolySystem& sys, double eps) {
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("effective_subspace: eps must be in (0, 1]");
    const int n = sys.n;
    const int d = std::max(1, sys.degree());
    const double thr = eps / double((d + 1) * (d + 1));
    std::vector<VectorXc> vecs;
    for (const auto& t : sys.terms) {
        const int R = t.a + t.b;
        if (R == 0) continue;
        for (int mode = 0; mode < R; ++mode) {
            // Gram matrix M M^dagger of the mode flattening
            std::size_t after = ipow(n, R - 1 - mode);
            std::size_t before = ipow(n, mode);
            MatrixXc G = MatrixXc::Zero(n, n);
            for (std::size_t x = 0; x < before; ++x)
                for (std::size_t y = 0; y < after; ++y)
                    for (int i = 0; i < n; ++i) {
                        cplx ti = t.t[(x * n + i) * after + y];
                        if (ti == 0.0) continue;
                        for (int j = 0; j < n; ++j) G(i, j) += ti * std::conj(t.t[(x * n + j) * after + y]);
                    }
            Eigen::SelfAdjointEigenSolver<MatrixXc> es(G);
            for (int k = 0; k < n; ++k) {
                double sv = std::sqrt(std::max(0.0, es.eigenvalues()(k)));
                if (sv >= thr) {
                    vecs.push_back(es.eigenvectors().col(k));
                    vecs.push_back(es.eigenvectors().col(k).conjugate());
                }
            }
        }
    }
    MatrixXc M(n, vecs.size());
    for (std::size_t i = 0; i < vecs.size(); ++i) M.col(i) = vecs[i];
    return orthonormal_span(M, 1e-9);
}

PolySystem reduce_system(const PolySystem& sys, const MatrixXc& B) {
    PolySystem r;
    r.n = static_cast<int>(B.cols());
    r.t0 = sys.t0;
    MatrixXc Bc = B.conjugate();
    for (const auto& t : sys.terms) {
        const int R = t.a + t.b;
        std::vector<int> dims(R, sys.n);
        std::vector<cplx> cur = t.t;
        for (int mode = 0; mode < R; ++mode) {
            cur = mode_product(cur, R, mode, dims, mode < t.a ? Bc : B);
            dims[mode] = r.n;
        }
        r.terms.push_back({t.a, t.b, std::move(cur)});
    }
    return r;
}

int support_size(const OptDomain& dom, int n) {
    double ratio = (dom.nu + dom.gamma) / (dom.mu + dom.gamma);
    double k = std::floor(ratio * ratio) + 1.0;
    return static_cast<int>(std::min<double>(n, k));
}

namespace {

/// Shared net search: f == nullptr means pure feasibility at tolerance `scale`.
SolveResult net_search(const PolySystem* sys, const OptDomain& dom, const MatrixXc& Wp, int n, int k, double scale,
                       const SolveOptions& opts) {
    SolveResult res;
    res.support_size = k;
    res.subspace_dim = static_cast<int>(Wp.cols());
    auto subs = subsets_of(n, k);
    res.subsets = subs.size();

    std::vector<SubsetContext> ctx(subs.size());
    double estimate = 0;
    for (std::size_t s = 0; s < subs.size(); ++s) {
        MatrixXc M(n, Wp.cols() + k);
        M.leftCols(Wp.cols()) = Wp;
        for (int j = 0; j < k; ++j) {
            M.col(Wp.cols() + j).setZero();
            M(subs[s][j], Wp.cols() + j) = 1.0;
        }
        ctx[s].B = orthonormal_span(M, 1e-9);
        if (dom.A.rows() > 0) ctx[s].AB = dom.A * ctx[s].B;
        if (sys) ctx[s].reduced = reduce_system(*sys, ctx[s].B);
        const int q = static_cast<int>(ctx[s].B.cols());
        double h = opts.pitch > 0 ? opts.pitch : dom.gamma / std::sqrt(2.0 * q);
        estimate += ball_points_estimate(2 * q, 1.0 + dom.gamma, h);
    }
    if (estimate > 4.0 * double(opts.net_budget))
        throw ResourceError("solve_constrained: estimated net size exceeds budget");

    std::atomic<std::uint64_t> count{0};
    std::atomic<bool> found_feasible{false};
    const int top = std::max(1, opts.polish_top);
    std::vector<std::vector<Candidate>> best(subs.size());
    std::vector<std::exception_ptr> errs(subs.size());

    auto work = [&](std::size_t s) {
        try {
            const SubsetContext& cx = ctx[s];
            const int q = static_cast<int>(cx.B.cols());
            const double h = opts.pitch > 0 ? opts.pitch : dom.gamma / std::sqrt(2.0 * q);
            const double g = dom.gamma * scale;
            auto& list = best[s];
            std::uint64_t local = 0;
            enumerate_ball(2 * q, 1.0 + dom.gamma, h, [&](const std::vector<double>& r) {
                if (++local % 4096 == 0) {
                    if (count.fetch_add(4096) + 4096 > opts.net_budget)
                        throw ResourceError("solve_constrained: net size exceeds budget");
                    if (!sys && found_feasible.load()) return false;
                }
                VectorXc c = from_real(r);
                double nc = c.norm();
                if (std::abs(nc - dom.nu) > g) return true;
                if (dom.A.rows() > 0 && (cx.AB * c - dom.v).norm() > g) return true;
                VectorXc x = cx.B * c;
                if (x.cwiseAbs().maxCoeff() > dom.mu + g) return true;
                double val = sys ? std::abs(evaluate_poly(cx.reduced, c)) : 0.0;
                if (!sys) {
                    list.push_back({val, c, s});
                    found_feasible.store(true);
                    return false;
                }
                if (static_cast<int>(list.size()) < top || val > list.back().value) {
                    Candidate cand{val, c, s};
                    auto it = std::upper_bound(list.begin(), list.end(), cand,
                                               [](const Candidate& x1, const Candidate& x2) { return x1.value > x2.value; });
                    list.insert(it, std::move(cand));
                    if (static_cast<int>(list.size()) > top) list.pop_back();
                }
                return true;
            });
            count.fetch_add(local % 4096);
        } catch (...) {
            errs[s] = std::current_exception();
        }
    };

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1) {
        for (std::size_t s = 0; s < subs.size(); ++s) {
            work(s);
            if (errs[s]) std::rethrow_exception(errs[s]);
            if (!sys && !best[s].empty()) break;
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (std::size_t s; (s = next.fetch_add(1)) < subs.size();) work(s);
            });
        for (auto& th : pool) th.join();
        for (auto& e : errs)
            if (e) std::rethrow_exception(e);
    }
    res.net_points = count.load();

    // merge in subset order; stable so ties keep the first-found candidate
    std::vector<Candidate> all;
    for (auto& l : best) all.insert(all.end(), l.begin(), l.end());
    std::stable_sort(all.begin(), all.end(), [](const Candidate& x1, const Candidate& x2) { return x1.value > x2.value; });
    if (all.empty()) return res;
    if (!sys) {
        res.x = ctx[all.front().subset].B * all.front().c;
        return res;
    }
    if (static_cast<int>(all.size()) > top) all.resize(top);

    if (opts.polish) {
        for (auto& cand : all) {
            const SubsetContext& cx = ctx[cand.subset];
            const int q = static_cast<int>(cx.B.cols());
            double step = opts.pitch > 0 ? opts.pitch : dom.gamma / std::sqrt(2.0 * q);
            const double min_step = step / 256.0;
            for (int it = 0; it < 2000 && step >= min_step; ++it) {
                bool improved = false;
                for (int dir = 0; dir < 2 * q && !improved; ++dir)
                    for (double sgn : {1.0, -1.0}) {
                        VectorXc c2 = cand.c;
                        if (dir % 2 == 0)
                            c2(dir / 2) += sgn * step;
                        else
                            c2(dir / 2) += cplx(0, sgn * step);
                        if (!reduced_member(dom, cx, c2, 2.0)) continue;
                        double v2 = std::abs(evaluate_poly(cx.reduced, c2));
                        if (v2 > cand.value + 1e-15) {
                            cand.value = v2;
                            cand.c = c2;
                            improved = true;
                            break;
                        }
                    }
                if (!improved) step /= 2.0;
            }
        }
        std::stable_sort(all.begin(), all.end(), [](const Candidate& x1, const Candidate& x2) { return x1.value > x2.value; });
    }
    const Candidate& w = all.front();
    res.x = ctx[w.subset].B * w.c;
    res.value = std::abs(evaluate_poly(*sys, *res.x));
    return res;
}

} // namespace

SolveResult solve_constrained(const PolySystem& sys, const OptDomain& dom, double eps, const SolveOptions& opts) {
    sys.validate();
    dom.validate(sys.n);
    if (!(eps > 0 && eps <= 1)) throw std::invalid_argument("solve_constrained: eps must be in (0, 1]");
    const int n = sys.n;
    // flatness caps the norm at sqrt(n) (mu + 2 gamma)
    if (std::sqrt(double(n)) * (dom.mu + 2 * dom.gamma) < dom.nu - 2 * dom.gamma) {
        SolveResult r;
        r.support_size = support_size(dom, n);
        return r;
    }
    MatrixXc W = effective_subspace(sys, eps / 2);
    MatrixXc Wp = W;
    if (dom.A.rows() > 0) {
        MatrixXc M(n, W.cols() + 2 * dom.A.rows());
        M.leftCols(W.cols()) = W;
        M.middleCols(W.cols(), dom.A.rows()) = dom.A.transpose();
        M.rightCols(dom.A.rows()) = dom.A.adjoint();
        Wp = orthonormal_span(M, 1e-9);
    }
    const int k = support_size(dom, n);
    if (Wp.cols() + k >= n) {
        // the structured span is all of C^n: search it once
        return net_search(&sys, dom, MatrixXc(n, 0), n, n, 2.0, opts);
    }
    return net_search(&sys, dom, Wp, n, k, 2.0, opts);
}

std::optional<VectorXc> sparse_witness_exists(const OptDomain& dom, int n, int k, const SolveOptions& opts) {
    dom.validate(n);
    if (k < 1) throw std::invalid_argument("sparse_witness_exists: k must be >= 1");
    MatrixXc Wp(n, 0);
    if (dom.A.rows() > 0) {
        MatrixXc M(n, 2 * dom.A.rows());
        M.leftCols(dom.A.rows()) = dom.A.transpose();
        M.rightCols(dom.A.rows()) = dom.A.adjoint();
        Wp = orthonormal_span(M, 1e-9);
    }
    k = std::min(k, n);
    SolveResult r = Wp.cols() + k >= n ? net_search(nullptr, dom, MatrixXc(n, 0), n, n, 1.0, opts)
                                       : net_search(nullptr, dom, Wp, n, k, 1.0, opts);
    return r.x;
}

} // namespace prodstate
