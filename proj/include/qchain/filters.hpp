#pragma once

#include <array>

#include "qchain/common.hpp"
#include "qchain/hamiltonian.hpp"
#include "qchain/operators.hpp"

namespace qchain {

// Width constant in the default filter choice q = c1 * 2l / gap^2.
inline constexpr double kDefaultC1 = 2.0;

struct FilterParams {
  double q = 1.0;            // Gaussian filter width (time^2)
  int l = 0;                 // overlap length
  double T = 6.0;            // time truncation of the weighted integrals
  int quadrature_nodes = 64; // Gauss-Legendre nodes on [-T, T]
  int ode_steps = 4096;      // product-integral steps per node (refined)
  double refine_threshold = 1e-8;
  int max_refinements = 10;

  // q follows the gap-adapted choice above, with a positive floor at l = 0;
  // T covers the Gaussian mass (6 sqrt(q)) and the ballistic window
  // l / (2 v_hat) for the configured velocity estimate.
  static FilterParams defaults(double gap, int l, double c1 = kDefaultC1,
                               double v_hat = 1.0);
  FilterParams doubled() const;
  void validate() const;
};

// rho^q = sum_k exp(-lambda_k^2 q / 2) P_k, the Gaussian-weighted time
// average of exp(iHt) evaluated in closed form in the eigenbasis. On a
// finite shifted spectrum ||rho^q - rho^0|| equals exp(-lambda'^2 q / 2)
// with lambda' the smallest nonzero eigenvalue.
LocalOperator gaussian_projector(const EigenSystem& eig, double q);

// Gaussian-filtered Heisenberg average: in the eigenbasis the entries are
// damped by exp(-q (lambda_k - lambda_m)^2 / 2). Identity on operators
// commuting with H; never increases the operator norm.
LocalOperator filtered_operator(const EigenSystem& eig,
                                const LocalOperator& a, double q);

// Conditional expectation onto the target support (maximally mixed
// reference on the complement). Idempotent on its image, norm-contractive,
// self-adjointness preserving.
LocalOperator localize(const LocalOperator& a, Interval target);

// Spectral projector of M onto {|lambda| <= tau} on its support block,
// re-embedded. Guarantees ||(O - I) psi0|| <= ||M psi0|| / tau, asserted on
// every call; O is an orthogonal projection (O^2 = O = O^adj).
LocalOperator window_projector(const LocalOperator& m, const DenseState& psi0,
                               double tau);

struct TimeOrderedResult {
  LocalOperator ob_tilde;
  double residual = 0.0;  // change under the last step-halving
  int steps_used = 0;
};

// Gaussian-weighted average of the reverse-ordered exponential generated by
// A(t) = e^{i(M_L+M_R)t} iM_B e^{-i(M_L+M_R)t}, integrated over [-T, T] by
// Gauss-Legendre quadrature. Each node evaluates the ordered product of
// midpoint steps exp(A(t_i) dt), accumulated in the telescoped form
// [e^{iD dt/2} e^{iB dt} e^{iD dt/2}]^N e^{-iDt}; the step count is doubled
// until the result moves less than refine_threshold.
TimeOrderedResult time_ordered_ob(const LocalOperator& m_left,
                                  const LocalOperator& m_bulk,
                                  const LocalOperator& m_right,
                                  const FilterParams& params);

struct GroundProjectorApprox {
  LocalOperator o_left, o_bulk, o_right;
  double error = 0.0;  // ||O_B O_L O_R - rho^0||
  int j = 0;
  int l = 0;
  double q = 0.0;

  // Per-step diagnostics for CSV emission.
  std::array<double, 3> filtered_psi_norms{};  // ||filtered H_X psi0||
  double annihilation_bound = 0.0;  // 3 J^2 / gap * exp(-gap^2 q / 2)
  std::array<double, 3> m_psi_norms{};
  std::array<double, 3> m_norms{};
  std::array<double, 2> taus{};
  std::array<double, 2> window_defects{};  // ||(O_X - I) psi0||
  double ob_residual = 0.0;
};

// The full construction chain: split, filter, localize, window projectors,
// ordered exponential, final localization, positivization of O_B, and the
// exactly computed operator-norm error against the ground projector.
GroundProjectorApprox approximate_ground_projector(const NNISpec& spec,
                                                   const EigenSystem& eig,
                                                   int j, int l,
                                                   const FilterParams& params);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>* nodes,
                    std::vector<double>* weights);

}  // namespace qchain
