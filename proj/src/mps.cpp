#include "prodstate/mps.hpp"

#include <algorithm>
#include <cmath>

namespace prodstate {

namespace {

bool is_power_of_two(int d) { return d >= 2 && (d & (d - 1)) == 0; }

} // namespace

std::vector<int> MatrixProductState::bond_dims() const {
    std::vector<int> r(n + 1, 1);
    for (int i = 0; i < n; ++i) r[i + 1] = static_cast<int>(tensors[i][0].cols());
    return r;
}

int MatrixProductState::max_bond() const {
    auto r = bond_dims();
    return *std::max_element(r.begin(), r.end());
}

void MatrixProductState::validate() const {
    if (n < 1 || local_dim < 2 || static_cast<int>(tensors.size()) != n)
        throw std::invalid_argument("MatrixProductState: bad shape");
    Eigen::Index left = 1;
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(tensors[i].size()) != local_dim)
            throw std::invalid_argument("MatrixProductState: physical dimension mismatch");
        Eigen::Index cols = tensors[i][0].cols();
        for (const auto& a : tensors[i])
            if (a.rows() != left || a.cols() != cols) throw std::invalid_argument("MatrixProductState: bond mismatch");
        left = cols;
    }
    if (left != 1) throw std::invalid_argument("MatrixProductState: right boundary must be 1");
}

double mps_tau(int n, int r, double eps) { return eps * eps / (9.0 * n * n * std::pow(double(r), 4)); }

int mps_kappa(int n, int d, int r, double eps) {
    double tau = mps_tau(n, r, eps);
    int k = static_cast<int>(std::ceil(std::log(1.0 / tau) / std::log(double(d)) - 1e-12)) + 1;
    return std::min(k, n);
}

MatrixXc disentangling_unitary(const MatrixXc& W, int local_dim) {
    const Eigen::Index D = W.rows();
    if (local_dim < 2 || D % local_dim != 0 || W.cols() != D / local_dim)
        throw std::invalid_argument("disentangling_unitary: W must have dimension d^(kappa-1)");
    MatrixXc g = W.adjoint() * W;
    if ((g - MatrixXc::Identity(W.cols(), W.cols())).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("disentangling_unitary: W not orthonormal");
    Eigen::HouseholderQR<MatrixXc> qr(W);
    MatrixXc Q = qr.householderQ() * MatrixXc::Identity(D, D);
    MatrixXc full(D, D);
    full.leftCols(W.cols()) = W;
    full.rightCols(D - W.cols()) = Q.rightCols(D - W.cols());
    return full.adjoint();
}

std::vector<std::vector<MatrixXc>> decompose_block(const VectorXc& v, int n, int d, int right, double tol) {
    if (static_cast<std::uint64_t>(v.size()) != ipow(d, n) * right)
        throw std::invalid_argument("decompose_block: size mismatch");
    std::vector<std::vector<MatrixXc>> out(n);
    // rest: (left bond * d^(remaining) * right) coefficients, row-major over (left, rest)
    MatrixXc cur = Eigen::Map<const MatrixXc>(v.data(), 1, v.size());
    Eigen::Index left = 1;
    for (int i = 0; i < n - 1; ++i) {
        const Eigen::Index restdim = cur.size() / (left * d);
        // M[(l, s), rest]
        MatrixXc M(left * d, restdim);
        for (Eigen::Index l = 0; l < left; ++l)
            for (int s = 0; s < d; ++s)
                for (Eigen::Index c = 0; c < restdim; ++c) M(l * d + s, c) = cur(l, s * restdim + c);
        Eigen::BDCSVD<MatrixXc> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto& sv = svd.singularValues();
        Eigen::Index k = 0;
        double top = sv.size() ? sv(0) : 0.0;
        while (k < sv.size() && sv(k) > tol * std::max(1.0, top)) ++k;
        k = std::max<Eigen::Index>(k, 1);
        MatrixXc U = svd.matrixU().leftCols(k);
        MatrixXc R = sv.head(k).asDiagonal() * svd.matrixV().leftCols(k).adjoint();
        out[i].assign(d, MatrixXc(left, k));
        for (int s = 0; s < d; ++s)
            for (Eigen::Index l = 0; l < left; ++l) out[i][s].row(l) = U.row(l * d + s);
        cur = R;
        left = k;
    }
    out[n - 1].assign(d, MatrixXc(left, right));
    for (Eigen::Index l = 0; l < left; ++l)
        for (int s = 0; s < d; ++s)
            for (int b = 0; b < right; ++b) out[n - 1][s](l, b) = cur(l, s * right + b);
    return out;
}

MatrixProductState state_to_mps(const QuantumState& s, double tol) {
    if (!s.is_pure()) throw std::invalid_argument("state_to_mps: pure state required");
    MatrixProductState m;
    m.n = s.n;
    m.local_dim = s.local_dim;
    m.tensors = decompose_block(s.psi, s.n, s.local_dim, 1, tol);
    return m;
}

MatrixProductState mps_learn(StateOracle& o, int r, double eps, double delta, const MpsLearnOptions& opts,
                             MpsTrace* trace) {
    if (!(eps > 0 && eps < 1)) throw std::invalid_argument("mps_learn: eps must be in (0,1)");
    if (!(delta > 0 && delta < 1)) throw std::invalid_argument("mps_learn: delta must be in (0,1)");
    if (r < 1) throw std::invalid_argument("mps_learn: r must be >= 1");
    const int n = o.n();
    const int d = o.local_dim();
    if (!is_power_of_two(d)) throw std::invalid_argument("mps_learn: local_dim must be a power of 2");
    const double tau = mps_tau(n, r, eps);
    int kappa = mps_kappa(n, d, r, eps);
    if (opts.kappa_override > 0) {
        if (opts.kappa_override > n || (opts.kappa_override < 2 && n > 1))
            throw std::invalid_argument("mps_learn: kappa override out of range");
        kappa = opts.kappa_override;
    }
    const int L = n - kappa;
    const int sub = static_cast<int>(ipow(d, kappa - 1));
    const double dstep = delta / n;
    const std::uint64_t c0 = o.copies_consumed();

    Frame frame;
    DisentanglerPlan plan;
    plan.kappa = kappa;
    plan.tau = tau;
    for (int i = 1; i <= L; ++i) {
        MatrixXc sigma = subnormalized_tomography(o, frame, i - 1, tau, dstep, kappa);
        Eigen::SelfAdjointEigenSolver<MatrixXc> es(sigma);
        const Eigen::Index D = sigma.rows();
        int wdim = 0;
        for (Eigen::Index j = 0; j < D; ++j)
            if (es.eigenvalues()(j) >= tau) ++wdim;
        // decreasing eigenvalue order; the full eigenbasis already completes W
        MatrixXc W(D, sub);
        for (int j = 0; j < sub; ++j) W.col(j) = es.eigenvectors().col(D - 1 - j);
        MatrixXc U = disentangling_unitary(W, d);
        frame.push_back({i - 1, kappa, U});
        plan.unitaries.push_back(U);
        if (trace) {
            trace->traces.push_back(sigma.trace().real());
            trace->subspace_dims.push_back(wdim);
        }
    }
    MatrixXc rstar = subnormalized_tomography(o, frame, L, tau, dstep, kappa);
    if (trace) trace->traces.push_back(rstar.trace().real());
    VectorXc psi = top_eigenvector(rstar);

    MatrixProductState out;
    out.n = n;
    out.local_dim = d;
    if (L == 0) {
        out.tensors = decompose_block(psi, n, d, 1);
    } else {
        // head block: V_1[(s_0..s_{kappa-1}), (0, t_1)] with t_1 as right bond
        MatrixXc V1 = plan.unitaries[0].adjoint();
        VectorXc head(V1.rows() * sub);
        for (Eigen::Index x = 0; x < V1.rows(); ++x)
            for (int t = 0; t < sub; ++t) head(x * sub + t) = V1(x, t);
        out.tensors = decompose_block(head, kappa, d, sub);
        for (int j = 2; j <= L; ++j) {
            MatrixXc V = plan.unitaries[j - 1].adjoint();
            std::vector<MatrixXc> a(d, MatrixXc(sub, sub));
            for (int l = 0; l < sub; ++l)
                for (int s = 0; s < d; ++s)
                    for (int t = 0; t < sub; ++t) a[s](l, t) = V(l * d + s, t);
            out.tensors.push_back(std::move(a));
        }
        std::vector<MatrixXc> tail(d, MatrixXc(sub, 1));
        for (int l = 0; l < sub; ++l)
            for (int s = 0; s < d; ++s) tail[s](l, 0) = psi(l * d + s);
        out.tensors.push_back(std::move(tail));
    }
    out.validate();
    if (trace) {
        trace->plan = std::move(plan);
        trace->copies = o.copies_consumed() - c0;
    }
    return out;
}

QuantumState mps_to_state(const MatrixProductState& m, std::uint64_t max_dim) {
    m.validate();
    if (ipow(m.local_dim, m.n) > max_dim) throw ResourceError("mps_to_state: dense dimension exceeds budget");
    // rows: physical prefix index, cols: current bond
    MatrixXc cur = MatrixXc::Ones(1, 1);
    for (int i = 0; i < m.n; ++i) {
        const auto& A = m.tensors[i];
        MatrixXc next(cur.rows() * m.local_dim, A[0].cols());
        for (Eigen::Index p = 0; p < cur.rows(); ++p)
            for (int s = 0; s < m.local_dim; ++s) next.row(p * m.local_dim + s) = cur.row(p) * A[s];
        cur = std::move(next);
    }
    VectorXc psi = cur.col(0);
    double nrm = psi.norm();
    if (nrm == 0) throw std::invalid_argument("mps_to_state: zero state");
    return QuantumState::raw_pure(m.n, m.local_dim, psi / nrm);
}

int schmidt_rank(const QuantumState& s, int cut, double tol) {
    if (!s.is_pure()) throw std::invalid_argument("schmidt_rank: pure state required");
    if (cut < 1 || cut >= s.n) throw std::invalid_argument("schmidt_rank: cut out of range");
    const Eigen::Index rows = ipow(s.local_dim, cut);
    const Eigen::Index cols = ipow(s.local_dim, s.n - cut);
    MatrixXc M(rows, cols);
    for (Eigen::Index a = 0; a < rows; ++a)
        for (Eigen::Index b = 0; b < cols; ++b) M(a, b) = s.psi(a * cols + b);
    Eigen::BDCSVD<MatrixXc> svd(M);
    int k = 0;
    for (Eigen::Index j = 0; j < svd.singularValues().size(); ++j)
        if (svd.singularValues()(j) > tol) ++k;
    return k;
}

} // namespace prodstate
