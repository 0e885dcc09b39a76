#pragma once

#include <string>
#include <vector>

#include "qchain/common.hpp"
#include "qchain/tensor.hpp"

namespace qchain {

// Non-negative, non-increasing, sums to 1 (within 1e-10).
struct ProbabilitySequence {
  VectorXd values;

  static ProbabilitySequence from_values(VectorXd v);
  // Squared Schmidt values; the reduced-state spectrum of the cut.
  static ProbabilitySequence from_schmidt(const SchmidtSpectrum& s);
  static ProbabilitySequence uniform(int r);

  int support_size() const;  // entries above 1e-15
};

// All entropies are in bits (base-2 logarithms). alpha = 1 selects the
// von Neumann entropy -sum p log2 p with the 0 log 0 = 0 convention.
struct EntropyValue {
  double alpha = 1.0;
  double value_bits = 0.0;
};

EntropyValue renyi_entropy(const ProbabilitySequence& p, double alpha);

// True iff every prefix sum of a dominates that of b (1e-12 slack).
// Shorter sequences are padded with zeros.
bool majorizes(const ProbabilitySequence& a, const ProbabilitySequence& b);

// Two-sided truncation bounds on the Renyi entropy of a cut with
// truncation weight epsilon_sq = eps_j^2(r):
//   alpha in (0,1):  S >= alpha/(1-alpha) log2(eps^2/alpha) + log2((r-1)/(1-alpha))
//   alpha > 1:       S <= alpha/(1-alpha) log2(1-eps^2) + log2(r)
double renyi_lower_bound(double epsilon_sq, int r, double alpha);
double renyi_upper_bound(double epsilon_sq, int r, double alpha);

// Least admissible Schmidt rank given entropy S and an entropy
// approximation defect g, in the base-2 convention: 2^(S-g).
double rank_lower_bound(double S, double g);

struct PowerLawFit {
  double s_hat = 0.0;      // fitted decay rate of sigma_k ~ C k^{-s}
  double log2_c = 0.0;     // fitted log2 prefactor
  double max_residual = 0.0;
  int points = 0;
};

struct FinitenessResult {
  bool finite = false;
  double threshold = 0.0;  // 1/(2 alpha), or s_min when stricter
  PowerLawFit fit;
};

// Log-log regression over the nonzero tail (sigma_k > 1e-12) deciding
// whether the fitted decay rate exceeds 1/(2 alpha). Fewer than 4 usable
// points raises InsufficientDataError. s_min optionally raises the bar.
FinitenessResult finiteness_check(const SchmidtSpectrum& spectrum,
                                  double alpha, double s_min = 0.0);

struct GibbsSpec {
  VectorXd eigenvalues;  // non-decreasing
  double beta = 0.0;
  double partition_value = 0.0;  // Z = sum exp(-beta lambda_k)
};

struct GibbsBound {
  double beta = 0.0;
  double bound_bits = 0.0;  // beta*E*log2(e) + log2(Z)
  GibbsSpec gibbs;
};

// Solves E(beta) = E by bisection on the strictly decreasing finite-spectrum
// energy curve, E(0+) = mean(lambda), E(inf) = lambda_0, then returns the
// maximal-entropy bound at that temperature.
GibbsBound gibbs_entropy_bound(const VectorXd& eigenvalues, double E);

double gibbs_exact_entropy(const GibbsSpec& g);

// Superposition of a product state with a uniformly spread pair-correlated
// component on 2d sites of local dimension 3:
//   sqrt(1-p) phi3^{(2d)} + sqrt(p/2^d) sum_{b in {1,2}^d} phi_b (x) phi_b.
// Best rank-one approximation error is exactly sqrt(p) and the Renyi
// entropy at cut j <= d has the closed form below.
DenseState example_state(int d, double p);

double example_state_renyi_closed_form(int j, double p, double alpha);

// CSV import/export (columns "k,value") for probability sequences, and
// entropy reports as rows "alpha,value_bits".
void save_probability_csv(const ProbabilitySequence& p,
                          const std::string& path);
ProbabilitySequence load_probability_csv(const std::string& path);
void save_entropy_report(const std::vector<EntropyValue>& rows,
                         const std::string& path);

}  // namespace qchain
