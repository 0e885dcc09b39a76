#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qchain/common.hpp"
#include "qchain/entropy.hpp"
#include "qchain/filters.hpp"
#include "qchain/hamiltonian.hpp"
#include "qchain/operators.hpp"
#include "qchain/tensor.hpp"

namespace qchain {

double von_neumann_bits(const VectorXd& probabilities);

// S(rho || sigma) in bits; +inf when the support condition fails.
double quantum_relative_entropy(const MatrixXcd& rho, const MatrixXcd& sigma);

double binary_relative_entropy(double p, double q);

struct MutualInformationRecord {
  Interval region_a, region_b;
  double s_a = 0.0, s_b = 0.0, s_ab = 0.0;
  double mutual_information = 0.0;
};

// Adjacent windows around the cut: A = [j-l-2, j], B = [j+1, j+l+3].
// With clip_to_chain the windows are clipped to [1, d]; otherwise an
// overflowing window raises RangeError.
MutualInformationRecord mutual_information(const DenseState& state, int j,
                                           int l, bool clip_to_chain = false);

// (1-2e) log2[(1-2e)/E_B] + 2e log2[2e/(1-E_B)].
double relent_lower_bound(double epsilon_l, double e_b);

// Two-outcome measurement distribution (tr(rho O_B), tr(rho (I-O_B))).
std::pair<double, double> dephasing_channel(const MatrixXcd& rho,
                                            const LocalOperator& o_b);

// E = <psi, (rho_A (x) rho_B) psi> computed directly and through the
// Schmidt identity sum_k sigma_k^6; the two paths are cross-asserted to
// 1e-12 and the direct value is returned.
double expectation_e(const DenseState& state, int cut);

struct ExpectationRecord {
  int j = 0;
  double e = 0.0;        // tr(rho0 [rho_A (x) rho_B])
  double e_b = 0.0;      // tr(O_B [rho_A (x) rho_B])
  double epsilon_l = 0.0;
};

struct EbBoundResult {
  bool satisfied = false;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
};

// E_B <= (E - sqrt(2 E_B e) + 2e) / (1 - 2e), evaluated with the measured
// E_B on both sides.
EbBoundResult eb_bound_check(const ExpectationRecord& record);

struct SlRecursionRecord {
  int l = 0;
  double s_l = 0.0;
  double s_2l = 0.0;
  double defect = 0.0;  // S_2l - 2 S_l + (1-2e) log2[1/(E+2e)]
  double c5 = 0.0;
  bool satisfied = false;
};

// Window entropy S_w := max over positions of S(rho[j, j+w-1]).
double max_window_entropy(const DenseState& state, int width);

SlRecursionRecord sl_recursion_check(const DenseState& state, int l,
                                     double epsilon_l, double e, double c5);

// Minimal constant making every defect on the grid satisfy the recursion.
double fit_c5(const std::vector<SlRecursionRecord>& records);

enum class TruncationCase {
  kPolynomialInDimension,
  kLogCorrected,
  kExponentialPrefactor,
};

std::string truncation_case_name(TruncationCase c);

struct TruncationRateFit {
  double s_hat = 0.0;
  TruncationCase label = TruncationCase::kPolynomialInDimension;
  double residual = 0.0;
  bool degenerate = false;  // too few nonzero truncation errors to fit
  std::vector<int> ranks;
  std::vector<double> errors;  // operator-norm truncation error per rank
};

// Operator-Schmidt truncation across the bipartite cut: SVD the regrouped
// matricization, truncate (Hilbert-Schmidt-optimal), measure the remainder
// in operator norm, then classify the decay against the three hypothesis
// families (power law diluted by the window, log-corrected, plain power
// law) by penalized least squares.
TruncationRateFit truncation_rate_fit(const MatrixXcd& rho_m, int cut,
                                      const SiteGeometry& g);

struct EntropySweepOptions {
  double saturation_tol = 0.05;  // bits
  int plateau_start = 3;         // cuts at least this far from the boundary
  double plateau_slack = 5e-3;   // bits
  long long dense_threshold = 1024;
  long long dense_cap = 4096;
  bool refuse_degenerate = true;
};

struct EntropySweepPoint {
  int d = 0;
  int j = 0;
  double s_vn = 0.0;
};

struct EntropySweepReport {
  std::string model;
  std::vector<int> d_values;
  std::vector<EntropySweepPoint> points;
  std::map<int, double> s_mid;       // mid-cut entropy per d
  std::map<int, double> s_site_max;  // max single-site entropy per d
  double delta_sat = 0.0;
  bool saturated = false;
  bool plateau_ok = false;
  double gap_smallest = 0.0;
};

// Ground-state entropy profile over a family of chain lengths; uses the
// dense solver up to dense_threshold and the Lanczos path beyond it.
EntropySweepReport entropy_sweep(
    const std::function<NNISpec(int)>& family, const std::vector<int>& d_values,
    const EntropySweepOptions& options = EntropySweepOptions{});

}  // namespace qchain
