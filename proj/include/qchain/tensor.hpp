#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qchain/common.hpp"

namespace qchain {

// Chain of d sites with local dimensions n_1..n_d. Site 1 is the slowest
// index of the dense amplitude vector; the matricization at cut j maps
// sites 1..j to rows (lexicographic, site 1 slowest) and the rest to
// columns. This layout is fixed for the whole library.
struct SiteGeometry {
  int d = 0;
  std::vector<int> dims;

  static SiteGeometry uniform(int d, int n);

  long long dense_dim() const;
  long long left_dim(int cut) const;   // product of dims 1..cut
  long long right_dim(int cut) const;  // product of dims cut+1..d
  long long block_dim(const Interval& iv) const;
  void validate(long long budget = kDenseBudget) const;
  bool operator==(const SiteGeometry& o) const {
    return d == o.d && dims == o.dims;
  }
};

// Normalized pure state on the full chain.
struct DenseState {
  SiteGeometry geometry;
  VectorXcd amplitudes;

  DenseState() = default;
  // Validates the geometry, the length and the unit norm (1e-12).
  DenseState(SiteGeometry g, VectorXcd amps, long long budget = kDenseBudget);
  static DenseState normalized(SiteGeometry g, VectorXcd amps,
                               long long budget = kDenseBudget);
};

// Singular values of the bipartite cut j, non-increasing, squares sum to 1.
struct SchmidtSpectrum {
  int cut = 0;
  VectorXd values;

  int rank() const { return static_cast<int>(values.size()); }
  void validate() const;
};

// Tensor train built by left-to-right SVD sweeps. Core k is stored
// left-unfolded as an (r_{k-1} * n_k) x r_k matrix, row index
// alpha_{k-1} * n_k + i_k. Cores 1..d-1 have orthonormal columns.
struct TTState {
  SiteGeometry geometry;
  std::vector<MatrixXcd> cores;

  std::vector<int> ranks() const;  // interior ranks r_1..r_{d-1}
};

// Eigenvalues of the reduced density operator on a contiguous interval.
struct ReducedSpectrum {
  Interval keep;
  VectorXd eigenvalues;

  void validate() const;
};

SchmidtSpectrum schmidt_spectrum(const DenseState& state, int cut);

TTState tt_decompose(const DenseState& state, double tolerance,
                     std::optional<int> max_rank = std::nullopt);

DenseState tt_reconstruct(const TTState& tt, bool renormalize = false,
                          long long budget = kDenseBudget);

// Dense contraction without the unit-norm requirement (truncated trains
// are shorter than 1 before renormalization).
VectorXcd tt_contract(const TTState& tt, long long budget = kDenseBudget);

// epsilon_j(r) = sqrt(sum_{k>r} sigma_k^2); r past the spectrum gives 0.
double truncation_error(const SchmidtSpectrum& spectrum, int r);

ReducedSpectrum reduced_spectrum(const DenseState& state, Interval keep);

// Reduced density matrix on a contiguous interval (partial trace over the
// complement). Shared plumbing for the entropy and area-law layers.
MatrixXcd reduced_density_matrix(const DenseState& state, Interval keep);

double state_fidelity_norm(const DenseState& a, const DenseState& b);

// ---------------------------------------------------------------------------
// Serialization. Binary container: little-endian header
//   magic "QCHN" | u32 version | u32 kind | u64 meta | u32 d | u32 dims[d]
//   | u64 count | count * (f64 re, f64 im)
// kind 0 = dense state, 1 = spectrum (meta = cut, values real),
// kind 2 = square matrix (meta = rows). Documented in README.
// ---------------------------------------------------------------------------

void save_dense_state(const DenseState& state, const std::string& path);
DenseState load_dense_state(const std::string& path,
                            long long budget = kDenseBudget);

void save_spectrum(const SchmidtSpectrum& spectrum, const std::string& path);
SchmidtSpectrum load_spectrum(const std::string& path);

void save_matrix(const MatrixXcd& m, const std::string& path);
MatrixXcd load_matrix(const std::string& path);

// CSV with header "k,sigma", one row per singular value.
void save_spectrum_csv(const SchmidtSpectrum& spectrum,
                       const std::string& path);

}  // namespace qchain
