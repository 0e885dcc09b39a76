#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "qchain/common.hpp"
#include "qchain/operators.hpp"
#include "qchain/tensor.hpp"

namespace qchain {

// Nearest-neighbor chain H = sum_k B_k with bond terms
//   B_k = H_k (x) I + Phi_{k,k+1}            for k = 1..d-2,
//   B_{d-1} = H_{d-1} (x) I + I (x) H_d + Phi_{d-1,d},
// so every single-site term enters H exactly once. The couplings Phi and
// both boundary commutators are required to be bounded; their norms feed
// the interaction constant J.
struct NNISpec {
  SiteGeometry geometry;
  std::vector<MatrixXcd> site_terms;  // d matrices, n_j x n_j
  std::vector<MatrixXcd> couplings;   // d-1 matrices, (n_j n_{j+1})^2
  std::string model_name = "custom";
  std::vector<std::pair<std::string, double>> parameters;

  // Self-adjointness of every block within 1e-12.
  void validate() const;
};

struct EigenSystem {
  SiteGeometry geometry;
  VectorXd eigenvalues;    // shifted so lambda_0 = 0, non-decreasing
  MatrixXcd eigenvectors;  // orthonormal columns
  double shift = 0.0;      // subtracted constant (original lambda_0)
  double gap = 0.0;        // lambda_1 after the shift
  bool ground_degenerate = false;
  bool excited_degenerate = false;

  VectorXcd ground_state() const { return eigenvectors.col(0); }
  DenseState ground_dense_state() const;

  // Toy systems given directly by their spectrum in the standard basis.
  static EigenSystem from_diagonal(const SiteGeometry& g, VectorXd eigenvalues);
};

// Left/bulk/right decomposition at cut j with overlap l:
//   H_L = sum_{k <= j-l-2} B_k,  H_B = sum_{j-l-1 <= k <= j+l+1} B_k,
//   H_R = sum_{k >= j+l+2} B_k,
// each shifted so <psi_0, H_X psi_0> = 0. Empty bond ranges give the zero
// operator. Supports: H_L on [1, j-l-1], H_B on [j-l-1, j+l+2] (clipped),
// H_R on [j+l+2, d].
struct LBRSplit {
  int j = 0;
  int l = 0;
  LocalOperator h_left, h_bulk, h_right;
  double shift_left = 0.0, shift_bulk = 0.0, shift_right = 0.0;
};

struct InteractionConstants {
  double J = 0.0;
  std::vector<double> coupling_norms;    // ||Phi_{k,k+1}||
  std::vector<double> comm_right_norms;  // ||[Phi_{k,k+1}, H_{k+1}]||
  std::vector<double> comm_left_norms;   // ||[H_k, Phi_{k,k+1}]||
};

struct GroundStateResult {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
  VectorXcd psi0;
  int iterations = 0;
  double residual = 0.0;
};

MatrixXcd assemble(const NNISpec& spec, long long budget = kDenseBudget);

// Full-space bond term k (1-based), used by assemble and lbr_split.
MatrixXcd bond_term(const NNISpec& spec, int k);

EigenSystem diagonalize(const NNISpec& spec, long long dense_cap = 4096);

// Lanczos with full reorthogonalization and thick restarts; matrix-free.
// Returns the two lowest eigenpairs (psi0 and the gap estimate).
GroundStateResult ground_state(const NNISpec& spec, int max_krylov = 260,
                               int max_restarts = 12, double tol = 1e-10,
                               uint64_t seed = 7);

// y = H x without assembling H.
VectorXcd apply_nni(const NNISpec& spec, const VectorXcd& x);

LBRSplit lbr_split(const NNISpec& spec, const EigenSystem& eig, int j, int l);

InteractionConstants interaction_constants(const NNISpec& spec);

// Transverse-field Ising chain: H_j = -h X, Phi = -g Z (x) Z. Gapped for
// |h| > |g| (used as the default experiment family at h = 2, g = 1).
NNISpec tfi_chain(int d, double h, double g = 1.0);

// XXZ chain with spin-1/2 operators S = sigma/2 and no site terms:
// Phi = Sx Sx + Sy Sy + delta_z Sz Sz.
NNISpec xxz_chain(int d, double delta_z);

// Truncated harmonic wells (levels n + 1/2) with a bounded position-position
// coupling, Phi = coupling * x (x) x on the lowest n_levels states.
NNISpec truncated_oscillator_chain(int d, int n_levels, double coupling);

// Structured text config round-trip ("key = value" lines; see README).
void save_nni_config(const NNISpec& spec, const std::string& path);
NNISpec build_model(const std::string& name, int d,
                    const std::map<std::string, double>& params);

}  // namespace qchain
