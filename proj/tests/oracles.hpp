#pragma once

#include "prodstate/discrete.hpp"
#include "prodstate/hardness.hpp"
#include "prodstate/polyopt.hpp"

#include <functional>
#include <vector>

/// Independent reference implementations used only by the tests.
namespace oracle {

using prodstate::cplx;
using prodstate::MatrixXc;
using prodstate::ProductParams;
using prodstate::VectorXc;

/// Normalized single-qubit vector (1, z) / sqrt(1 + |z|^2).
VectorXc qubit(cplx z);

/// Product state by explicit Kronecker products.
VectorXc kron_state(const std::vector<VectorXc>& sites);
VectorXc kron_state(const ProductParams& p);

/// Per-site tan of half the Bloch angle: dtan^2 = sum (1 - f_i) / f_i with f_i the site overlap.
double dtan_bloch(const ProductParams& p, const ProductParams& q);

/// Qubit state with Bloch angles (theta, phi).
VectorXc bloch_qubit(double theta, double phi);

/// Pr[|x| = k] by enumerating all strings.
std::vector<double> weight_probs_enum(const std::vector<double>& q);

/// Partial trace over the last n - m qubits by explicit index loops.
MatrixXc partial_trace_suffix(const MatrixXc& rho, int n, int m);

/// Max over product states of w |<pi|pi*>|^2 + (1 - w) / 2^n via per-site Bloch grids (pitch in radians).
double planted_product_opt(const ProductParams& planted, double w, double pitch);

/// Grid search for the best product fidelity of an n-qubit density matrix (lower bound on OPT):
/// coarse joint Bloch grid followed by per-site fine grid sweeps.
double grid_opt(const MatrixXc& rho, int n, int coarse_theta = 8, int fine_theta = 60, int sweeps = 6);

/// Dense grid over C^n (pitch h per real coordinate) of max |f| subject to membership at `scale`.
/// Polynomial evaluated by direct index enumeration. Returns -1 when no grid point is feasible.
double poly_grid_max(const prodstate::PolySystem& sys, const prodstate::OptDomain& dom, double h, double scale);

/// Direct evaluation of f by index enumeration.
cplx poly_eval_direct(const prodstate::PolySystem& sys, const VectorXc& x);

/// Max of |g(s)| over complex s with |s| <= radius and (when has_center) |s - center| <= rad_center, grid pitch h.
double disc_grid_max(const std::function<cplx(cplx)>& g, double radius, bool has_center, cplx center,
                     double rad_center, double h);

/// All class members with fidelity >= threshold, computed by Kronecker products over full strings.
std::vector<std::vector<int>> census(const MatrixXc& rho, const std::vector<std::vector<VectorXc>>& sites,
                                     double threshold);

/// Clique number by subset enumeration.
int clique_number(const prodstate::Graph& g);

/// Number of reduced-state eigenvalues above eig_tol for the cut after `cut` sites.
int schmidt_rank_eig(const VectorXc& psi, int n, int cut, double eig_tol = 1e-12);

/// Dense GHZ and W states.
VectorXc ghz(int n);
VectorXc w_state(int n);

} // namespace oracle
