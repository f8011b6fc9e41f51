#include "prodstate/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace prodstate {

MatrixXc haar_isometry(int rows, int cols, Rng& rng) {
    if (rows < cols) throw std::invalid_argument("haar_isometry: rows < cols");
    MatrixXc g(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) g(i, j) = complex_normal(rng);
    Eigen::HouseholderQR<MatrixXc> qr(g);
    MatrixXc q = qr.householderQ() * MatrixXc::Identity(rows, cols);
    MatrixXc r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
    for (int j = 0; j < cols; ++j) {
        cplx rjj = r(j, j);
        double a = std::abs(rjj);
        if (a > 0) q.col(j) *= rjj / a;
    }
    return q;
}

VectorXc random_unit_vector(int dim, Rng& rng) {
    VectorXc v(dim);
    for (int i = 0; i < dim; ++i) v(i) = complex_normal(rng);
    return v / v.norm();
}

MatrixXc random_density_matrix(int dim, int rank, Rng& rng) {
    MatrixXc g(dim, rank);
    for (int j = 0; j < rank; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = complex_normal(rng);
    MatrixXc rho = g * g.adjoint();
    return rho / rho.trace().real();
}

void apply_site_op(VectorXc& psi, int n, int d, int site, const MatrixXc& u) {
    apply_block_op(psi, n, d, site, 1, u);
}

void apply_block_op(VectorXc& psi, int n, int d, int first, int k, const MatrixXc& u) {
    const std::uint64_t inner = ipow(d, n - first - k);
    const std::uint64_t blk = ipow(d, k);
    const std::uint64_t outer = ipow(d, first);
    VectorXc tmp(blk);
    for (std::uint64_t o = 0; o < outer; ++o) {
        for (std::uint64_t in = 0; in < inner; ++in) {
            for (std::uint64_t s = 0; s < blk; ++s) tmp(s) = psi((o * blk + s) * inner + in);
            VectorXc out = u * tmp;
            for (std::uint64_t s = 0; s < blk; ++s) psi((o * blk + s) * inner + in) = out(s);
        }
    }
}

void conjugate_site_op(MatrixXc& rho, int n, int d, int site, const MatrixXc& u) {
    conjugate_block_op(rho, n, d, site, 1, u);
}

void conjugate_block_op(MatrixXc& rho, int n, int d, int first, int k, const MatrixXc& u) {
    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
        VectorXc col = rho.col(c);
        apply_block_op(col, n, d, first, k, u);
        rho.col(c) = col;
    }
    MatrixXc ud = u.conjugate();
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        VectorXc row = rho.row(r).transpose();
        apply_block_op(row, n, d, first, k, ud);
        rho.row(r) = row.transpose();
    }
}

MatrixXc trace_out_suffix(const MatrixXc& rho, int n, int d, int m) {
    return reduced_block(rho, n, d, 0, m);
}

MatrixXc reduced_block(const MatrixXc& rho, int n, int d, int first, int len) {
    const std::uint64_t dl = ipow(d, first);
    const std::uint64_t dm = ipow(d, len);
    const std::uint64_t dr = ipow(d, n - first - len);
    MatrixXc out = MatrixXc::Zero(dm, dm);
    for (std::uint64_t a = 0; a < dl; ++a)
        for (std::uint64_t c = 0; c < dr; ++c)
            for (std::uint64_t i = 0; i < dm; ++i)
                for (std::uint64_t j = 0; j < dm; ++j)
                    out(i, j) += rho((a * dm + i) * dr + c, (a * dm + j) * dr + c);
    return out;
}

MatrixXc kron(const MatrixXc& a, const MatrixXc& b) {
    MatrixXc out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

double op_norm(const MatrixXc& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<MatrixXc> svd(a);
    return svd.singularValues()(0);
}

double trace_norm(const MatrixXc& a) {
    if (a.size() == 0) return 0.0;
    Eigen::JacobiSVD<MatrixXc> svd(a);
    return svd.singularValues().sum();
}

MatrixXc project_psd_subnormalized(const MatrixXc& h) {
    if (h.size() == 0) return h;
    MatrixXc herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(herm);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    double tr = ev.sum();
    if (tr > 1.0) ev /= tr;
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

void fix_phase(VectorXc& v) {
    Eigen::Index best = 0;
    double bm = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double a = std::abs(v(i));
        if (a > bm + 1e-12) {
            bm = a;
            best = i;
        }
    }
    if (bm > 0) v *= std::conj(v(best)) / bm;
}

VectorXc top_eigenvector(const MatrixXc& h) {
    MatrixXc herm = 0.5 * (h + h.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(herm);
    VectorXc v = es.eigenvectors().col(herm.rows() - 1);
    fix_phase(v);
    return v;
}

MatrixXc random_hermitian(int dim, double norm, Rng& rng) {
    MatrixXc g(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int i = 0; i < dim; ++i) g(i, j) = complex_normal(rng);
    MatrixXc h = 0.5 * (g + g.adjoint());
    double s = op_norm(h);
    if (s <= 0) return MatrixXc::Zero(dim, dim);
    return h * (norm / s);
}

MatrixXc orthonormal_span(const MatrixXc& a, double tol) {
    if (a.cols() == 0 || a.rows() == 0) return MatrixXc(a.rows(), 0);
    Eigen::JacobiSVD<MatrixXc> svd(a, Eigen::ComputeThinU);
    int k = 0;
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()(i) > tol) ++k;
    return svd.matrixU().leftCols(k);
}

} // namespace prodstate
