#include "prodstate/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace prodstate {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("deserialize: ") + what);
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed) {
    require(j.is_object(), "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok = ok || it.key() == k;
        if (!ok) throw std::invalid_argument("deserialize: unknown field '" + it.key() + "'");
    }
}

} // namespace

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

cplx complex_from_json(const Json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    require(j.is_array() && j.size() == 2, "complex must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json vector_to_json(const VectorXc& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(complex_to_json(v(i)));
    return a;
}

VectorXc vector_from_json(const Json& j) {
    require(j.is_array(), "vector must be a list");
    VectorXc v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from_json(j[i]);
    return v;
}

Json matrix_to_json(const MatrixXc& m) {
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) a.push_back(vector_to_json(m.row(r).transpose()));
    return a;
}

MatrixXc matrix_from_json(const Json& j) {
    require(j.is_array(), "matrix must be a list of rows");
    if (j.empty()) return MatrixXc(0, 0);
    MatrixXc m(j.size(), j[0].size());
    for (std::size_t r = 0; r < j.size(); ++r) {
        require(j[r].size() == static_cast<std::size_t>(m.cols()), "ragged matrix");
        m.row(r) = vector_from_json(j[r]).transpose();
    }
    return m;
}

Json state_to_json(const QuantumState& s) {
    Json j;
    j["format_version"] = kFormatVersion;
    j["n"] = s.n;
    j["local_dim"] = s.local_dim;
    j["kind"] = s.is_pure() ? "pure" : "mixed";
    j["basis"] = "site1-most-significant";
    Json data = Json::array();
    if (s.is_pure()) {
        data = vector_to_json(s.psi);
    } else {
        for (Eigen::Index r = 0; r < s.rho.rows(); ++r)
            for (Eigen::Index c = 0; c < s.rho.cols(); ++c) data.push_back(complex_to_json(s.rho(r, c)));
    }
    j["data"] = std::move(data);
    return j;
}

QuantumState state_from_json(const Json& j) {
    check_keys(j, {"format_version", "n", "local_dim", "kind", "basis", "data"});
    require(j.at("format_version").get<int>() == kFormatVersion, "unsupported format_version");
    require(j.at("basis").get<std::string>() == "site1-most-significant", "unsupported basis");
    const int n = j.at("n").get<int>();
    const int d = j.at("local_dim").get<int>();
    const std::string kind = j.at("kind").get<std::string>();
    VectorXc flat = vector_from_json(j.at("data"));
    if (kind == "pure") return QuantumState::pure(n, d, flat, 1e-8);
    require(kind == "mixed", "kind must be pure or mixed");
    require(n >= 1 && d >= 2, "bad dimensions");
    const auto dim = static_cast<Eigen::Index>(ipow(d, n));
    require(flat.size() == dim * dim, "data length mismatch");
    MatrixXc rho(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c) rho(r, c) = flat(r * dim + c);
    return QuantumState::mixed(n, d, rho, 1e-8);
}

Json params_to_json(const ProductParams& p) {
    Json a = Json::array();
    for (const auto& z : p.z()) a.push_back(complex_to_json(z));
    return a;
}

ProductParams params_from_json(const Json& j) {
    require(j.is_array(), "product parameters must be a list");
    std::vector<cplx> z;
    for (const auto& x : j) z.push_back(complex_from_json(x));
    return ProductParams(std::move(z));
}

Json cover_params_to_json(const CoverParams& p) {
    return Json{{"eta", p.eta},
                {"eps", p.eps},
                {"delta", p.delta},
                {"degree_cap", p.degree_cap},
                {"net_pitch", p.net_pitch},
                {"net_radius", p.net_radius},
                {"net_budget", p.net_budget},
                {"min_support", p.min_support},
                {"max_support", p.max_support},
                {"polish", p.polish},
                {"gamma", p.gamma},
                {"jobs", p.jobs}};
}

CoverParams cover_params_from_json(const Json& j) {
    check_keys(j, {"eta", "eps", "delta", "degree_cap", "net_pitch", "net_radius", "net_budget", "min_support",
                   "max_support", "polish", "gamma", "jobs"});
    CoverParams p;
    p.eta = j.value("eta", p.eta);
    p.eps = j.value("eps", p.eps);
    p.delta = j.value("delta", p.delta);
    p.degree_cap = j.value("degree_cap", p.degree_cap);
    p.net_pitch = j.value("net_pitch", p.net_pitch);
    p.net_radius = j.value("net_radius", p.net_radius);
    p.net_budget = j.value("net_budget", p.net_budget);
    p.min_support = j.value("min_support", p.min_support);
    p.max_support = j.value("max_support", p.max_support);
    p.polish = j.value("polish", p.polish);
    p.gamma = j.value("gamma", p.gamma);
    p.jobs = j.value("jobs", p.jobs);
    return p;
}

Json cover_to_json(const Cover& c) {
    Json members = Json::array();
    for (const auto& m : c.members) members.push_back(params_to_json(m));
    return Json{{"format_version", kFormatVersion}, {"m", c.m}, {"members", members},
                {"params", cover_params_to_json(c.params)}};
}

Cover cover_from_json(const Json& j) {
    check_keys(j, {"format_version", "m", "members", "params"});
    Cover c;
    c.m = j.at("m").get<int>();
    for (const auto& m : j.at("members")) c.members.push_back(params_from_json(m));
    c.params = cover_params_from_json(j.at("params"));
    return c;
}

Json mps_to_json(const MatrixProductState& m) {
    Json tensors = Json::array();
    for (const auto& site : m.tensors) {
        Json mats = Json::array();
        for (const auto& a : site) mats.push_back(matrix_to_json(a));
        tensors.push_back(Json{{"shape", {site.size(), site[0].rows(), site[0].cols()}}, {"data", mats}});
    }
    return Json{{"format_version", kFormatVersion}, {"n", m.n},          {"local_dim", m.local_dim},
                {"bond_dims", m.bond_dims()},       {"tensors", tensors}};
}

MatrixProductState mps_from_json(const Json& j) {
    check_keys(j, {"format_version", "n", "local_dim", "bond_dims", "tensors"});
    MatrixProductState m;
    m.n = j.at("n").get<int>();
    m.local_dim = j.at("local_dim").get<int>();
    for (const auto& t : j.at("tensors")) {
        std::vector<MatrixXc> site;
        auto shape = t.at("shape").get<std::vector<long>>();
        require(shape.size() == 3, "tensor shape must have three entries");
        for (const auto& a : t.at("data")) {
            MatrixXc mat = matrix_from_json(a);
            if (shape[1] == 0 || shape[2] == 0) mat.resize(shape[1], shape[2]);
            require(mat.rows() == shape[1] && mat.cols() == shape[2], "tensor shape mismatch");
            site.push_back(mat);
        }
        require(static_cast<long>(site.size()) == shape[0], "tensor shape mismatch");
        m.tensors.push_back(std::move(site));
    }
    m.validate();
    return m;
}

Json tensor_to_json(const Tensor4& t) {
    Json data = Json::array();
    for (const auto& x : t.data) data.push_back(complex_to_json(x));
    return Json{{"format_version", kFormatVersion}, {"m", t.m}, {"data", data}};
}

Tensor4 tensor_from_json(const Json& j) {
    check_keys(j, {"format_version", "m", "data"});
    Tensor4 t = Tensor4::zeros(j.at("m").get<int>());
    const Json& d = j.at("data");
    require(d.size() == t.data.size(), "tensor data length mismatch");
    for (std::size_t i = 0; i < d.size(); ++i) t.data[i] = complex_from_json(d[i]);
    return t;
}

Json graph_to_json(const Graph& g) {
    Json e = Json::array();
    for (auto [a, b] : g.edges) e.push_back({a, b});
    return Json{{"vertices", g.vertices}, {"edges", e}};
}

Graph graph_from_json(const Json& j) {
    check_keys(j, {"vertices", "edges"});
    Graph g;
    g.vertices = j.at("vertices").get<int>();
    for (const auto& e : j.at("edges")) {
        require(e.is_array() && e.size() == 2, "edge must be [a, b]");
        g.edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    }
    g.validate();
    return g;
}

Json class_to_json(const DiscreteClass& c) {
    Json sites = Json::array();
    for (const auto& a : c.sites()) {
        Json lst = Json::array();
        for (const auto& v : a) lst.push_back(vector_to_json(v));
        sites.push_back(lst);
    }
    return Json{{"format_version", kFormatVersion}, {"gamma", c.gamma()}, {"sites", sites}};
}

DiscreteClass class_from_json(const Json& j) {
    check_keys(j, {"format_version", "gamma", "sites"});
    std::vector<std::vector<VectorXc>> sites;
    for (const auto& a : j.at("sites")) {
        std::vector<VectorXc> lst;
        for (const auto& v : a) lst.push_back(vector_from_json(v));
        sites.push_back(std::move(lst));
    }
    return DiscreteClass(std::move(sites), j.at("gamma").get<double>());
}

Json poly_to_json(const PolySystem& s) {
    Json terms = Json::array();
    for (const auto& t : s.terms) {
        Json data = Json::array();
        for (const auto& x : t.t) data.push_back(complex_to_json(x));
        terms.push_back(Json{{"a", t.a}, {"b", t.b}, {"t", data}});
    }
    return Json{{"n", s.n}, {"t0", complex_to_json(s.t0)}, {"terms", terms}};
}

PolySystem poly_from_json(const Json& j) {
    check_keys(j, {"n", "t0", "terms"});
    PolySystem s;
    s.n = j.at("n").get<int>();
    s.t0 = complex_from_json(j.at("t0"));
    for (const auto& t : j.at("terms")) {
        check_keys(t, {"a", "b", "t"});
        PolyTerm p;
        p.a = t.at("a").get<int>();
        p.b = t.at("b").get<int>();
        for (const auto& x : t.at("t")) p.t.push_back(complex_from_json(x));
        s.terms.push_back(std::move(p));
    }
    s.validate();
    return s;
}

Json domain_to_json(const OptDomain& d) {
    return Json{{"A", matrix_to_json(d.A)}, {"v", vector_to_json(d.v)}, {"nu", d.nu}, {"mu", d.mu}, {"gamma", d.gamma}};
}

OptDomain domain_from_json(const Json& j) {
    check_keys(j, {"A", "v", "nu", "mu", "gamma"});
    OptDomain d;
    d.A = matrix_from_json(j.at("A"));
    d.v = vector_from_json(j.at("v"));
    d.nu = j.at("nu").get<double>();
    d.mu = j.at("mu").get<double>();
    d.gamma = j.at("gamma").get<double>();
    return d;
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    return Json::parse(in);
}

void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

std::string digest(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace prodstate
