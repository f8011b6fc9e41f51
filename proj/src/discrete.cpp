#include "prodstate/discrete.hpp"

#include <algorithm>
#include <cmath>

namespace prodstate {

DiscreteClass::DiscreteClass(std::vector<std::vector<VectorXc>> sites, double gamma)
    : sites_(std::move(sites)), gamma_(gamma) {
    if (sites_.empty()) throw std::invalid_argument("DiscreteClass: no sites");
    if (!(gamma_ > 0 && gamma_ < 1)) throw std::invalid_argument("DiscreteClass: gamma must be in (0,1)");
    local_dim_ = -1;
    for (const auto& a : sites_) {
        if (a.empty()) throw std::invalid_argument("DiscreteClass: empty site list");
        for (const auto& v : a) {
            if (local_dim_ < 0) local_dim_ = static_cast<int>(v.size());
            if (v.size() != local_dim_ || local_dim_ < 2)
                throw std::invalid_argument("DiscreteClass: inconsistent local dimension");
            if (std::abs(v.norm() - 1.0) > 1e-9) throw std::invalid_argument("DiscreteClass: state not unit norm");
        }
    }
    if (max_overlap() > gamma_ + 1e-12) throw std::invalid_argument("DiscreteClass: pairwise overlap exceeds gamma");
}

int DiscreteClass::s() const {
    std::size_t s = 0;
    for (const auto& a : sites_) s = std::max(s, a.size());
    return static_cast<int>(s);
}

std::uint64_t DiscreteClass::size() const {
    std::uint64_t c = 1;
    for (const auto& a : sites_) c = sat_mul(c, a.size());
    return c;
}

std::vector<VectorXc> DiscreteClass::member(const std::vector<int>& idx) const {
    if (idx.size() > sites_.size()) throw std::invalid_argument("DiscreteClass::member: tuple too long");
    std::vector<VectorXc> out;
    out.reserve(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
        if (idx[k] < 0 || idx[k] >= static_cast<int>(sites_[k].size()))
            throw std::invalid_argument("DiscreteClass::member: index out of range");
        out.push_back(sites_[k][idx[k]]);
    }
    return out;
}

double DiscreteClass::max_overlap() const {
    double m = 0;
    for (const auto& a : sites_)
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = i + 1; j < a.size(); ++j) m = std::max(m, std::norm(a[i].dot(a[j])));
    return m;
}

double discrete_size_bound(int n, int s, double gamma, double eta) {
    if (!(gamma > 0 && gamma < 1) || !(eta > 0)) throw std::invalid_argument("discrete_size_bound: bad parameters");
    return std::pow(10.0 * n * s, std::log(2.0 / eta) / std::log(1.0 / gamma));
}

std::vector<ClassMember> discrete_learn(StateOracle& o, const DiscreteClass& cls, double eta, double eps, double delta,
                                        DiscreteTrace* trace) {
    if (!(eta > 0 && eta <= 1)) throw std::invalid_argument("discrete_learn: eta must be in (0,1]");
    if (!(eps > 0 && eps <= eta / 2)) throw std::invalid_argument("discrete_learn: requires 0 < eps <= eta/2");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("discrete_learn: delta must be in (0,1)");
    if (o.local_dim() != cls.local_dim() || o.n() != cls.n())
        throw std::invalid_argument("discrete_learn: oracle does not match class");
    const int n = cls.n();
    const int s = cls.s();
    const double base = 10.0 * n * s;
    const double lg = std::log(1.0 / cls.gamma());
    const double dcall = delta / std::pow(base, std::log(20.0 / eta) / lg);
    const double guard = 4.0 * std::pow(base, std::log(2.0 / (eta - eps)) / lg);
    const std::uint64_t c0 = o.copies_consumed();
    if (trace) {
        trace->per_call_delta = dcall;
        trace->survivor_guard = guard;
    }

    std::vector<ClassMember> surv{ClassMember{}};
    for (int m = 1; m <= n; ++m) {
        std::vector<ClassMember> next;
        for (const auto& p : surv)
            for (int j = 0; j < static_cast<int>(cls.site(m - 1).size()); ++j) {
                ClassMember c = p;
                c.push_back(j);
                double f = estimate_fidelity(o, m, cls.member(c), eps / 2, dcall);
                if (trace) ++trace->estimates;
                if (f >= eta - eps / 2) next.push_back(std::move(c));
            }
        if (double(next.size()) > guard)
            throw ResourceError("discrete_learn: survivor set exceeds the size bound (estimation failure)");
        surv = std::move(next);
        if (trace) trace->survivors.push_back(surv.size());
        if (surv.empty()) break;
    }
    if (trace) trace->copies = o.copies_consumed() - c0;
    std::sort(surv.begin(), surv.end());
    return surv;
}

double class_fidelity(const QuantumState& rho, const DiscreteClass& cls, const ClassMember& idx) {
    if (rho.local_dim != cls.local_dim() || rho.n != cls.n())
        throw std::invalid_argument("class_fidelity: state does not match class");
    const int m = static_cast<int>(idx.size());
    VectorXc phi = product_of_sites(cls.member(idx));
    if (m == rho.n) return fidelity(rho, phi);
    MatrixXc red = trace_out_suffix(rho.density(), rho.n, rho.local_dim, m);
    return std::max(0.0, phi.dot(red * phi).real());
}

std::vector<ClassMember> class_fidelity_census(const QuantumState& rho, const DiscreteClass& cls, double threshold,
                                               std::uint64_t budget) {
    if (cls.size() > budget) throw ResourceError("class_fidelity_census: class exceeds budget");
    if (rho.local_dim != cls.local_dim() || rho.n != cls.n())
        throw std::invalid_argument("class_fidelity_census: state does not match class");
    std::vector<ClassMember> out;
    ClassMember idx(cls.n(), 0);
    for (;;) {
        if (class_fidelity(rho, cls, idx) >= threshold) out.push_back(idx);
        int k = cls.n() - 1;
        while (k >= 0 && ++idx[k] == static_cast<int>(cls.site(k).size())) idx[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

} // namespace prodstate
