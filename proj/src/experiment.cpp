#include "prodstate/experiment.hpp"

#include "prodstate/highfid.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <numeric>
#include <set>

namespace prodstate {

namespace {

void check_params(const Json& p, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!p.is_object()) throw std::invalid_argument(where + ": parameters must be an object");
    for (auto it = p.begin(); it != p.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument(where + ": unknown parameter '" + it.key() + "'");
    }
}

template <typename T>
T get_or(const Json& p, const char* key, T def) {
    return p.contains(key) ? p.at(key).get<T>() : def;
}

void check_unit_interval(double x, const char* name, bool closed_right = false) {
    if (!(x > 0 && (closed_right ? x <= 1 : x < 1)))
        throw std::invalid_argument(std::string(name) + " must be in (0," + (closed_right ? "1]" : "1)"));
}

QuantumState mix_with_identity(const VectorXc& psi, int n, int d, double w) {
    if (w == 1.0) return QuantumState::raw_pure(n, d, psi);
    const auto dim = ipow(d, n);
    MatrixXc rho = w * psi * psi.adjoint() + (1.0 - w) * MatrixXc::Identity(dim, dim) / double(dim);
    return QuantumState::raw_mixed(n, d, rho);
}

std::vector<VectorXc> stabilizer_qubit_states() {
    const double r = 1.0 / std::sqrt(2.0);
    const cplx I(0, 1);
    std::vector<VectorXc> s(6, VectorXc(2));
    s[0] << 1, 0;
    s[1] << 0, 1;
    s[2] << r, r;
    s[3] << r, -r;
    s[4] << r, r * I;
    s[5] << r, -r * I;
    return s;
}

MatrixProductState random_mps(int n, int d, int r, Rng& rng) {
    MatrixProductState m;
    m.n = n;
    m.local_dim = d;
    int left = 1;
    for (int i = 0; i < n; ++i) {
        int right = i == n - 1 ? 1 : r;
        std::vector<MatrixXc> site(d, MatrixXc(left, right));
        for (auto& a : site)
            for (Eigen::Index x = 0; x < a.size(); ++x) a.data()[x] = complex_normal(rng);
        m.tensors.push_back(std::move(site));
        left = right;
    }
    return m;
}

Json state_fields(const QuantumState& s) { return state_to_json(s); }

double exact_fidelity(const QuantumState& s, const VectorXc& phi) { return fidelity(s, phi); }

} // namespace

Json generate(const std::string& kind, const Json& params, std::uint64_t seed) {
    Rng rng(seed);
    Json doc;
    doc["format_version"] = kFormatVersion;
    doc["generator"] = Json{{"kind", kind}, {"params", params}, {"seed", seed}};
    if (kind == "planted-product") {
        check_params(params, {"n", "w"}, "planted-product");
        int n = get_or(params, "n", 4);
        double w = get_or(params, "w", 1.0);
        if (n < 1 || n > 12) throw std::invalid_argument("planted-product: n must be in [1, 12]");
        if (!(w >= 0 && w <= 1)) throw std::invalid_argument("planted-product: w must be in [0, 1]");
        ProductParams p = haar_product_params(n, rng);
        doc["state"] = state_fields(mix_with_identity(product_vector(p), n, 2, w));
        doc["planted"] = Json{{"params", params_to_json(p)}};
        doc["opt"] = w + (1.0 - w) / double(ipow(2, n));
    } else if (kind == "planted-mps") {
        check_params(params, {"n", "r", "w", "d"}, "planted-mps");
        int n = get_or(params, "n", 4);
        int r = get_or(params, "r", 2);
        int d = get_or(params, "d", 2);
        double w = get_or(params, "w", 1.0);
        if (n < 1 || r < 1 || d < 2 || ipow(d, n) > 4096) throw std::invalid_argument("planted-mps: bad size");
        if (!(w >= 0 && w <= 1)) throw std::invalid_argument("planted-mps: w must be in [0, 1]");
        MatrixProductState m = random_mps(n, d, r, rng);
        QuantumState s = mps_to_state(m);
        doc["state"] = state_fields(mix_with_identity(s.psi, n, d, w));
        doc["planted"] = Json{{"mps", mps_to_json(m)}};
        doc["opt"] = w + (1.0 - w) / double(ipow(d, n));
    } else if (kind == "planted-discrete") {
        check_params(params, {"n", "s", "w"}, "planted-discrete");
        int n = get_or(params, "n", 3);
        int s = get_or(params, "s", 4);
        double w = get_or(params, "w", 1.0);
        if (n < 1 || n > 10 || s < 1 || s > 6) throw std::invalid_argument("planted-discrete: need 1 <= n <= 10, 1 <= s <= 6");
        if (!(w >= 0 && w <= 1)) throw std::invalid_argument("planted-discrete: w must be in [0, 1]");
        auto stab = stabilizer_qubit_states();
        std::vector<std::vector<VectorXc>> sites;
        ClassMember planted;
        for (int k = 0; k < n; ++k) {
            std::vector<int> idx(6);
            std::iota(idx.begin(), idx.end(), 0);
            std::shuffle(idx.begin(), idx.end(), rng);
            std::vector<VectorXc> a;
            for (int j = 0; j < s; ++j) a.push_back(stab[idx[j]]);
            sites.push_back(std::move(a));
            planted.push_back(std::uniform_int_distribution<int>(0, s - 1)(rng));
        }
        DiscreteClass cls(sites, 0.5);
        doc["class"] = class_to_json(cls);
        doc["state"] = state_fields(mix_with_identity(product_of_sites(cls.member(planted)), n, 2, w));
        doc["planted"] = Json{{"member", planted}};
        doc["opt"] = w + (1.0 - w) / double(ipow(2, n));
    } else if (kind == "clique") {
        check_params(params, {"graph", "embed"}, "clique");
        Graph g = graph_from_json(params.at("graph"));
        Tensor4 t = clique_tensor(g);
        doc["graph"] = graph_to_json(g);
        if (params.contains("embed")) t = random_isometry_embed(t, params.at("embed").get<int>(), seed);
        doc["tensor"] = tensor_to_json(t);
        if (4 * t.m <= 20) doc["state"] = state_fields(tensor_to_state(t));
    } else if (kind == "random-mixed") {
        check_params(params, {"n", "rank"}, "random-mixed");
        int n = get_or(params, "n", 3);
        int rank = get_or(params, "rank", 2);
        if (n < 1 || n > 10 || rank < 1) throw std::invalid_argument("random-mixed: bad size");
        doc["state"] = state_fields(QuantumState::raw_mixed(n, 2, random_density_matrix(ipow(2, n), rank, rng)));
    } else {
        throw std::invalid_argument("generate: unknown kind '" + kind + "'");
    }
    return doc;
}

QuantumState instance_state(const Json& instance) {
    if (instance.contains("state")) return state_from_json(instance.at("state"));
    return state_from_json(instance);
}

double product_opt_ascent(const QuantumState& s, int starts, std::uint64_t seed) {
    if (s.local_dim != 2) throw std::invalid_argument("product_opt_ascent: qubit states only");
    Rng rng(seed);
    MatrixXc rho = s.density();
    double best = 0;
    for (int k = 0; k < starts; ++k) {
        ProductParams p = product_ascent(rho, haar_product_params(s.n, rng), 50);
        best = std::max(best, fidelity(s, p));
    }
    return best;
}

void ExperimentConfig::validate() const {
    static const std::set<std::string> algs{"highfid", "cover", "estimate-opt", "discrete", "mps", "polyopt", "hardness"};
    if (!algs.count(algorithm)) throw std::invalid_argument("unknown algorithm '" + algorithm + "'");
    if (backend != "exact" && backend != "sampling") throw std::invalid_argument("backend must be exact or sampling");
    if (!(noise >= 0)) throw std::invalid_argument("noise must be >= 0");
    if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

Json run(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const std::time_t started = std::time(nullptr);
    const Json& p = cfg.params;
    Json rep;
    rep["algorithm"] = cfg.algorithm;
    rep["input_digest"] = digest(cfg.instance.dump());
    rep["backend"] = Json{{"kind", cfg.backend}, {"noise", cfg.noise}, {"seed", cfg.seed}};
    rep["jobs"] = cfg.jobs;

    auto make_oracle = [&](const QuantumState& s) {
        return cfg.backend == "exact" ? StateOracle::exact(s, cfg.noise, cfg.seed) : StateOracle::sampling(s, cfg.seed);
    };

    if (cfg.algorithm == "highfid") {
        check_params(p, {"eps", "delta"}, "highfid");
        double eps = get_or(p, "eps", 0.05), delta = get_or(p, "delta", 0.05);
        check_unit_interval(eps, "eps");
        check_unit_interval(delta, "delta");
        QuantumState s = instance_state(cfg.instance);
        StateOracle o = make_oracle(s);
        HighFidTrace tr;
        ProductParams out = high_fidelity_learn(o, eps, delta, &tr);
        double f = fidelity(s, out);
        double opt = cfg.instance.contains("opt") ? cfg.instance.at("opt").get<double>()
                                                  : product_opt_ascent(s, 20, cfg.seed);
        rep["params"] = Json{{"eps", eps}, {"delta", delta}};
        rep["result"] = Json{{"product", params_to_json(out)}, {"local_steps", tr.steps.size()}};
        rep["fidelity"] = f;
        rep["opt_reference"] = opt;
        rep["opt_reference_source"] = cfg.instance.contains("opt") ? "planted" : "multistart ascent";
        rep["fidelity_ge_opt_minus_eps"] = f >= opt - eps;
        rep["copies"] = tr.copies;
    } else if (cfg.algorithm == "cover") {
        Json cp = p;
        int trials = get_or(cp, "verify_trials", 0);
        cp.erase("verify_trials");
        CoverParams params = cover_params_from_json(cp);
        params.jobs = cfg.jobs;
        params.validate();
        QuantumState s = instance_state(cfg.instance);
        StateOracle o = make_oracle(s);
        CoverTrace tr;
        Cover c = build_cover(o, params, &tr);
        Json fids = Json::array();
        for (const auto& m : c.members) fids.push_back(fidelity(s, m));
        rep["params"] = cover_params_to_json(params);
        rep["params"]["verify_trials"] = trials;
        rep["derived"] = Json{{"b", params.b()}, {"B_far", params.B_far()}, {"B_root", params.B_root()},
                              {"mu", params.mu()}, {"degree", params.degree(s.n)}, {"tol", params.tol(s.n)}};
        rep["result"] = Json{{"cover", cover_to_json(c)}, {"extend_calls", tr.extend_calls},
                             {"tomography_calls", tr.tomography_calls}};
        rep["fidelity"] = fids;
        rep["copies"] = tr.copies;
        if (trials > 0) {
            CoverReport r = verify_cover(s, c, trials, cfg.seed);
            rep["verify"] = Json{{"ok", r.ok()},
                                 {"prop1_violations", r.prop1_violations},
                                 {"prop2_violations", r.prop2_violations},
                                 {"prop3_violations", r.prop3_violations},
                                 {"witnesses_checked", r.witnesses_checked},
                                 {"size_ok", r.size_ok}};
        }
    } else if (cfg.algorithm == "estimate-opt") {
        Json cp = p;
        double eps = get_or(cp, "eps", 0.05), delta = get_or(cp, "delta", 0.05);
        cp.erase("eps");
        cp.erase("delta");
        cp.erase("eta");
        check_unit_interval(eps, "eps");
        check_unit_interval(delta, "delta");
        CoverParams base = cover_params_from_json(cp);
        base.jobs = cfg.jobs;
        QuantumState s = instance_state(cfg.instance);
        StateOracle o = make_oracle(s);
        OptEstimate e = estimate_opt(o, eps, delta, base);
        Json hist = Json::array();
        for (auto [eta, size] : e.history) hist.push_back({eta, size});
        rep["params"] = cover_params_to_json(base);
        rep["params"]["eps"] = eps;
        rep["params"]["delta"] = delta;
        rep["result"] = Json{{"estimate", e.estimate}, {"builds", e.builds}, {"history", hist}};
        if (e.witness) {
            rep["result"]["witness"] = params_to_json(*e.witness);
            rep["fidelity"] = fidelity(s, *e.witness);
        }
        rep["copies"] = o.copies_consumed();
    } else if (cfg.algorithm == "discrete") {
        check_params(p, {"eta", "eps", "delta"}, "discrete");
        double eta = get_or(p, "eta", 0.9), eps = get_or(p, "eps", 0.1), delta = get_or(p, "delta", 0.05);
        check_unit_interval(eta, "eta", true);
        check_unit_interval(eps, "eps");
        check_unit_interval(delta, "delta");
        if (!cfg.instance.contains("class")) throw std::invalid_argument("discrete: instance has no class");
        DiscreteClass cls = class_from_json(cfg.instance.at("class"));
        QuantumState s = instance_state(cfg.instance);
        StateOracle o = make_oracle(s);
        DiscreteTrace tr;
        auto S = discrete_learn(o, cls, eta, eps, delta, &tr);
        Json mem = Json::array();
        Json fids = Json::array();
        for (const auto& m : S) {
            mem.push_back(m);
            fids.push_back(class_fidelity(s, cls, m));
        }
        rep["params"] = Json{{"eta", eta}, {"eps", eps}, {"delta", delta}, {"gamma", cls.gamma()},
                             {"size_bound_applies", cls.size_bound_applies()}, {"per_call_delta", tr.per_call_delta},
                             {"survivor_guard", tr.survivor_guard}};
        rep["result"] = Json{{"members", mem}, {"survivors", tr.survivors}};
        rep["fidelity"] = fids;
        rep["copies"] = tr.copies;
        if (cls.size() <= 100000) {
            auto hi = class_fidelity_census(s, cls, eta);
            auto lo = class_fidelity_census(s, cls, eta - eps);
            bool sub1 = std::includes(S.begin(), S.end(), hi.begin(), hi.end());
            bool sub2 = std::includes(lo.begin(), lo.end(), S.begin(), S.end());
            rep["audit"] = Json{{"P_eta_subset_S", sub1}, {"S_subset_P_eta_minus_eps", sub2},
                                {"P_eta_size", hi.size()}};
        }
    } else if (cfg.algorithm == "mps") {
        check_params(p, {"rank", "eps", "delta", "kappa"}, "mps");
        int r = get_or(p, "rank", 2);
        double eps = get_or(p, "eps", 0.2), delta = get_or(p, "delta", 0.05);
        check_unit_interval(eps, "eps");
        check_unit_interval(delta, "delta");
        MpsLearnOptions opts;
        opts.kappa_override = get_or(p, "kappa", 0);
        QuantumState s = instance_state(cfg.instance);
        StateOracle o = make_oracle(s);
        MpsTrace tr;
        MatrixProductState m = mps_learn(o, r, eps, delta, opts, &tr);
        QuantumState out = mps_to_state(m);
        rep["params"] = Json{{"rank", r}, {"eps", eps}, {"delta", delta}, {"kappa", tr.plan.kappa},
                             {"tau", tr.plan.tau}, {"kappa_formula", mps_kappa(s.n, s.local_dim, r, eps)}};
        rep["result"] = Json{{"mps", mps_to_json(m)}, {"max_bond", m.max_bond()}, {"traces", tr.traces},
                             {"subspace_dims", tr.subspace_dims}};
        rep["fidelity"] = exact_fidelity(s, out.psi);
        rep["copies"] = tr.copies;
    } else if (cfg.algorithm == "polyopt") {
        check_params(p, {"eps", "net_budget", "polish", "pitch"}, "polyopt");
        double eps = get_or(p, "eps", 0.1);
        check_unit_interval(eps, "eps", true);
        SolveOptions so;
        so.net_budget = get_or<std::uint64_t>(p, "net_budget", so.net_budget);
        so.polish = get_or(p, "polish", so.polish);
        so.pitch = get_or(p, "pitch", so.pitch);
        so.jobs = cfg.jobs;
        PolySystem sys = poly_from_json(cfg.instance.at("system"));
        OptDomain dom = domain_from_json(cfg.instance.at("domain"));
        SolveResult r = solve_constrained(sys, dom, eps, so);
        rep["params"] = Json{{"eps", eps}, {"net_budget", so.net_budget}, {"polish", so.polish}, {"pitch", so.pitch}};
        rep["result"] = Json{{"feasible", r.x.has_value()}, {"value", r.value}, {"net_points", r.net_points},
                             {"support_size", r.support_size}, {"subspace_dim", r.subspace_dim}};
        if (r.x) {
            rep["result"]["x"] = vector_to_json(*r.x);
            rep["result"]["in_domain_2gamma"] = in_domain(dom, *r.x, 2.0);
        }
    } else if (cfg.algorithm == "hardness") {
        check_params(p, {"restarts", "product_opt"}, "hardness");
        int restarts = get_or(p, "restarts", 0);
        Tensor4 t = tensor_from_json(cfg.instance.contains("tensor") ? cfg.instance.at("tensor") : cfg.instance);
        SpectralResult sr = spectral_norm_als(t.normalized(), restarts, cfg.seed, cfg.jobs);
        double popt = p.contains("product_opt") ? p.at("product_opt").get<double>() : product_overlap_lower_bound(t, sr);
        SandwichReport sw = opt_sandwich_check(t, popt, sr.value);
        rep["params"] = Json{{"restarts", restarts > 0 ? restarts : 50 * t.m * t.m},
                             {"product_opt_source", p.contains("product_opt") ? "given" : "ALS product lower bound"}};
        rep["result"] = Json{{"spectral_norm_normalized", sr.value},
                             {"spectral_norm", sr.value * t.frobenius()},
                             {"frobenius", t.frobenius()},
                             {"sandwich",
                              {{"n", sw.n}, {"opt_T", sw.opt_T}, {"opt_psi", sw.opt_psi}, {"M", sw.M},
                               {"lower", sw.lower}, {"upper", sw.upper}, {"lower_ok", sw.lower_ok},
                               {"upper_ok", sw.upper_ok}, {"informative", sw.informative}, {"regime", sw.regime}}}};
        if (cfg.instance.contains("graph")) {
            rep["result"]["clique_number"] = clique_number_from_norm(sr.value * t.frobenius());
        }
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started));
    rep["timing"] = Json{{"wall_seconds", wall}, {"started_at", buf}};
    return rep;
}

} // namespace prodstate
