#include "prodstate/experiment.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>

using namespace prodstate;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string backend = "exact";
    double noise = 0.0;
    std::string out;
    std::string state;
    int jobs = 1;
};

void add_common(CLI::App* app, Common& c, bool needs_state = true) {
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--backend", c.backend, "exact | sampling")->check(CLI::IsMember({"exact", "sampling"}));
    app->add_option("--noise", c.noise, "Injected operator-norm noise (exact backend)");
    app->add_option("--out", c.out, "Report path (stdout when empty)");
    app->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
    if (needs_state) app->add_option("--state,--instance", c.state, "Instance or state file")->required();
}

void emit(const Json& j, const std::string& out) {
    if (out.empty())
        std::cout << j.dump(2) << "\n";
    else
        write_json_file(out, j);
}

template <typename T>
void put(Json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

} // namespace

int main(int argc, char** argv) {
    spdlog::set_default_logger(spdlog::stderr_color_mt("prodstate"));
    const char* lvl = std::getenv("PRODSTATE_LOG");
    spdlog::set_level(lvl ? spdlog::level::from_str(lvl) : spdlog::level::warn);

    CLI::App app{"Product-state learning toolkit"};
    app.require_subcommand(1);
    Common c;

    // gen
    auto* gen = app.add_subcommand("gen", "Generate an instance");
    std::string kind;
    std::optional<int> n, rank, s, embed, d;
    std::optional<double> w;
    std::string graph_file, edges;
    gen->add_option("kind", kind, "planted-product | planted-mps | planted-discrete | clique | random-mixed")->required();
    gen->add_option("--n", n);
    gen->add_option("--w", w, "Planted weight");
    gen->add_option("--rank,-r", rank, "Bond dimension or density-matrix rank");
    gen->add_option("--s", s, "Class size per site");
    gen->add_option("--d", d, "Local dimension (planted-mps)");
    gen->add_option("--graph", graph_file, "Graph JSON {vertices, edges}");
    gen->add_option("--edges", edges, "Edge list like 0-1,1-2");
    gen->add_option("--embed", embed, "Embed into side n with a Haar isometry");
    add_common(gen, c, false);

    // learners
    std::optional<double> eps, delta, eta, net_pitch, net_radius;
    std::optional<int> degree_cap, min_support, max_support, kappa, verify_trials, restarts;
    std::optional<std::uint64_t> net_budget;
    std::optional<double> product_opt;
    std::string class_file;

    auto* hf = app.add_subcommand("highfid", "High-fidelity product-state learner");
    add_common(hf, c);
    hf->add_option("--eps", eps);
    hf->add_option("--delta", delta);

    auto* cover = app.add_subcommand("cover", "Cover-based agnostic learner");
    cover->require_subcommand(1);
    auto add_cover_opts = [&](CLI::App* a) {
        add_common(a, c);
        a->add_option("--eps", eps);
        a->add_option("--delta", delta);
        a->add_option("--degree-cap", degree_cap);
        a->add_option("--net-budget", net_budget);
        a->add_option("--net-pitch", net_pitch);
        a->add_option("--net-radius", net_radius);
        a->add_option("--min-support", min_support);
        a->add_option("--max-support", max_support);
    };
    auto* cb = cover->add_subcommand("build", "Build an (eta, eps)-good cover");
    add_cover_opts(cb);
    cb->add_option("--eta", eta);
    cb->add_option("--verify-trials", verify_trials);
    auto* ce = cover->add_subcommand("estimate-opt", "Estimate OPT by bisection on eta");
    add_cover_opts(ce);

    auto* disc = app.add_subcommand("discrete", "Discrete-class learner");
    disc->require_subcommand(1);
    auto* dl = disc->add_subcommand("learn", "Learn over a finite product class");
    add_common(dl, c);
    dl->add_option("--class", class_file, "Class JSON (defaults to the instance's class)");
    dl->add_option("--eta", eta);
    dl->add_option("--eps", eps);
    dl->add_option("--delta", delta);

    auto* mps = app.add_subcommand("mps", "Improper MPS learner");
    mps->require_subcommand(1);
    auto* ml = mps->add_subcommand("learn", "Learn an MPS approximation");
    add_common(ml, c);
    ml->add_option("--rank,-r", rank);
    ml->add_option("--eps", eps);
    ml->add_option("--delta", delta);
    ml->add_option("--kappa", kappa, "Desk-scale override of the block size");

    auto* poly = app.add_subcommand("polyopt", "Constrained polynomial optimization");
    poly->require_subcommand(1);
    auto* ps = poly->add_subcommand("solve", "Solve an instance {system, domain}");
    add_common(ps, c);
    ps->add_option("--eps", eps);
    ps->add_option("--net-budget", net_budget);

    auto* hard = app.add_subcommand("hardness", "Clique-tensor benchmark");
    hard->require_subcommand(1);
    auto* hg = hard->add_subcommand("gen", "Generate a clique tensor instance");
    hg->add_option("--graph", graph_file);
    hg->add_option("--edges", edges);
    hg->add_option("--embed", embed);
    add_common(hg, c, false);
    auto* hc = hard->add_subcommand("check", "Spectral norm and OPT sandwich report");
    add_common(hc, c);
    hc->add_option("--restarts", restarts);
    hc->add_option("--product-opt", product_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    auto parse_graph = [&]() {
        if (!graph_file.empty()) return read_json_file(graph_file);
        if (edges.empty()) throw std::invalid_argument("a graph is required (--graph or --edges)");
        Json e = Json::array();
        int maxv = -1;
        std::stringstream ss(edges);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            auto dash = tok.find('-');
            if (dash == std::string::npos) throw std::invalid_argument("bad edge '" + tok + "'");
            int a = std::stoi(tok.substr(0, dash)), b = std::stoi(tok.substr(dash + 1));
            maxv = std::max({maxv, a, b});
            e.push_back({a, b});
        }
        return Json{{"vertices", maxv + 1}, {"edges", e}};
    };

    try {
        if (gen->parsed() || hg->parsed()) {
            Json params = Json::object();
            std::string k = hg->parsed() ? "clique" : kind;
            put(params, "n", n);
            put(params, "w", w);
            put(params, "s", s);
            put(params, "d", d);
            if (rank) params[k == "random-mixed" ? "rank" : "r"] = *rank;
            if (k == "clique") {
                params.erase("n");
                params["graph"] = parse_graph();
                put(params, "embed", embed);
            }
            spdlog::info("generating {} with seed {}", k, c.seed);
            emit(generate(k, params, c.seed), c.out);
            return 0;
        }
        ExperimentConfig cfg;
        cfg.backend = c.backend;
        cfg.noise = c.noise;
        cfg.seed = c.seed;
        cfg.jobs = c.jobs;
        cfg.instance = read_json_file(c.state);
        Json& p = cfg.params;
        put(p, "eps", eps);
        put(p, "delta", delta);
        if (hf->parsed()) {
            cfg.algorithm = "highfid";
        } else if (cb->parsed() || ce->parsed()) {
            cfg.algorithm = cb->parsed() ? "cover" : "estimate-opt";
            put(p, "eta", eta);
            put(p, "degree_cap", degree_cap);
            put(p, "net_budget", net_budget);
            put(p, "net_pitch", net_pitch);
            put(p, "net_radius", net_radius);
            put(p, "min_support", min_support);
            put(p, "max_support", max_support);
            put(p, "verify_trials", verify_trials);
        } else if (dl->parsed()) {
            cfg.algorithm = "discrete";
            put(p, "eta", eta);
            if (!class_file.empty()) {
                if (!cfg.instance.contains("state")) cfg.instance = Json{{"state", cfg.instance}};
                cfg.instance["class"] = read_json_file(class_file);
            }
        } else if (ml->parsed()) {
            cfg.algorithm = "mps";
            put(p, "rank", rank);
            put(p, "kappa", kappa);
        } else if (ps->parsed()) {
            cfg.algorithm = "polyopt";
            put(p, "net_budget", net_budget);
        } else if (hc->parsed()) {
            cfg.algorithm = "hardness";
            p.erase("eps");
            p.erase("delta");
            put(p, "restarts", restarts);
            put(p, "product_opt", product_opt);
        }
        spdlog::info("running {} (backend {}, seed {})", cfg.algorithm, cfg.backend, cfg.seed);
        Json rep = run(cfg);
        spdlog::info("done in {:.3f} s", rep["timing"]["wall_seconds"].get<double>());
        emit(rep, c.out);
        return 0;
    } catch (const ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
