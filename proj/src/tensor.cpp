#include "qchain/tensor.hpp"

#include <algorithm>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qchain {

namespace {

constexpr double kNormTol = 1e-12;
constexpr double kSumTol = 1e-10;
// Singular values below this fraction of sigma_1 are clamped to zero to
// stabilize rank counting.
constexpr double kClampRel = 1e-14;

using RowMajorXcd =
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

VectorXd clamp_and_trim(VectorXd values) {
  if (values.size() == 0) return values;
  const double clamp = kClampRel * values(0);
  int keep = 0;
  for (int i = 0; i < values.size(); ++i) {
    if (values(i) > clamp)
      ++keep;
    else
      break;  // non-increasing, the rest is clamped too
  }
  keep = std::max(keep, 1);
  return values.head(keep);
}

}  // namespace

SiteGeometry SiteGeometry::uniform(int d, int n) {
  SiteGeometry g;
  g.d = d;
  g.dims.assign(static_cast<size_t>(std::max(d, 0)), n);
  g.validate();
  return g;
}

long long SiteGeometry::dense_dim() const {
  long long p = 1;
  for (int n : dims) {
    if (n <= 0) throw ValidationError("site dimension must be positive");
    if (p > (1LL << 40) / n) throw ResourceError("dense dimension overflow");
    p *= n;
  }
  return p;
}

long long SiteGeometry::left_dim(int cut) const {
  long long p = 1;
  for (int k = 0; k < cut; ++k) p *= dims[static_cast<size_t>(k)];
  return p;
}

long long SiteGeometry::right_dim(int cut) const {
  long long p = 1;
  for (int k = cut; k < d; ++k) p *= dims[static_cast<size_t>(k)];
  return p;
}

long long SiteGeometry::block_dim(const Interval& iv) const {
  long long p = 1;
  for (int k = iv.a; k <= iv.b; ++k) p *= dims[static_cast<size_t>(k - 1)];
  return p;
}

void SiteGeometry::validate(long long budget) const {
  if (d < 1) throw ValidationError("geometry needs at least one site");
  if (static_cast<int>(dims.size()) != d)
    throw ValidationError("geometry dims size does not match d");
  for (int n : dims)
    if (n < 2) throw ValidationError("all site dimensions must be >= 2");
  if (dense_dim() > budget)
    throw ResourceError("dense dimension exceeds the configured budget");
}

DenseState::DenseState(SiteGeometry g, VectorXcd amps, long long budget)
    : geometry(std::move(g)), amplitudes(std::move(amps)) {
  geometry.validate(budget);
  if (amplitudes.size() != geometry.dense_dim())
    throw ValidationError("amplitude length does not match geometry");
  if (std::abs(amplitudes.norm() - 1.0) > kNormTol)
    throw ValidationError("state is not normalized");
}

DenseState DenseState::normalized(SiteGeometry g, VectorXcd amps,
                                  long long budget) {
  double n = amps.norm();
  if (n == 0.0) throw ValidationError("cannot normalize the zero vector");
  return DenseState(std::move(g), amps / n, budget);
}

void SchmidtSpectrum::validate() const {
  if (values.size() == 0) throw ValidationError("empty Schmidt spectrum");
  for (int i = 0; i + 1 < values.size(); ++i)
    if (values(i + 1) > values(i) + 1e-14)
      throw ValidationError("Schmidt values must be non-increasing");
  if (values.minCoeff() < 0.0)
    throw ValidationError("Schmidt values must be non-negative");
  if (std::abs(values.squaredNorm() - 1.0) > kSumTol)
    throw ValidationError("squared Schmidt values must sum to 1");
}

void ReducedSpectrum::validate() const {
  if (eigenvalues.size() == 0) throw ValidationError("empty reduced spectrum");
  for (int i = 0; i + 1 < eigenvalues.size(); ++i)
    if (eigenvalues(i + 1) > eigenvalues(i) + 1e-14)
      throw ValidationError("reduced spectrum must be non-increasing");
  if (eigenvalues.minCoeff() < -1e-14)
    throw ValidationError("reduced spectrum must be non-negative");
  if (std::abs(eigenvalues.sum() - 1.0) > kSumTol)
    throw ValidationError("reduced spectrum must sum to 1");
}

std::vector<int> TTState::ranks() const {
  std::vector<int> r;
  for (size_t k = 0; k + 1 < cores.size(); ++k)
    r.push_back(static_cast<int>(cores[k].cols()));
  return r;
}

SchmidtSpectrum schmidt_spectrum(const DenseState& state, int cut) {
  const auto& g = state.geometry;
  if (cut < 1 || cut > g.d - 1)
    throw RangeError("cut must lie between 1 and d-1");
  Eigen::Map<const RowMajorXcd> m(state.amplitudes.data(), g.left_dim(cut),
                                  g.right_dim(cut));
  Eigen::JacobiSVD<MatrixXcd> svd(m);
  SchmidtSpectrum s;
  s.cut = cut;
  s.values = clamp_and_trim(svd.singularValues());
  s.validate();
  return s;
}

TTState tt_decompose(const DenseState& state, double tolerance,
                     std::optional<int> max_rank) {
  if (!(tolerance >= 0.0) || !std::isfinite(tolerance))
    throw ValidationError("tolerance must be a finite non-negative number");
  if (max_rank && *max_rank < 1)
    throw ValidationError("max_rank must be at least 1");

  const auto& g = state.geometry;
  TTState tt;
  tt.geometry = g;
  tt.cores.reserve(static_cast<size_t>(g.d));

  // Equal split of the error budget across the d-1 cuts.
  const double per_cut =
      g.d > 1 ? tolerance / std::sqrt(static_cast<double>(g.d - 1)) : 0.0;

  // Work matrix starts as the (r_0 * n_1) x (n_2 ... n_d) unfolding.
  RowMajorXcd work = Eigen::Map<const RowMajorXcd>(
      state.amplitudes.data(), g.dims[0], g.dense_dim() / g.dims[0]);

  for (int k = 1; k <= g.d - 1; ++k) {
    Eigen::JacobiSVD<MatrixXcd> svd(
        work, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd& sv = svd.singularValues();
    const double clamp = sv.size() > 0 ? kClampRel * sv(0) : 0.0;

    // Discard the smallest singular values first, within the cut budget.
    int rank = static_cast<int>(sv.size());
    double tail = 0.0;
    while (rank > 1) {
      const double s = sv(rank - 1);
      if (s <= clamp) {
        --rank;
        continue;
      }
      if (std::sqrt(tail + s * s) <= per_cut) {
        tail += s * s;
        --rank;
        continue;
      }
      break;
    }
    if (max_rank) rank = std::min(rank, *max_rank);

    tt.cores.push_back(svd.matrixU().leftCols(rank));
    MatrixXcd rest = sv.head(rank).asDiagonal() *
                     svd.matrixV().leftCols(rank).adjoint();

    if (k == g.d - 1) {
      // rest is rank x n_d; the last core is its transpose-free unfolding
      // (r_{d-1} * n_d) x 1 with row index alpha * n_d + i.
      RowMajorXcd rm = rest;
      tt.cores.push_back(
          Eigen::Map<const VectorXcd>(rm.data(), rm.size()));
      return tt;
    }

    // Refold to (rank * n_{k+1}) x (n_{k+2} ... n_d).
    const int n_next = g.dims[static_cast<size_t>(k)];
    const long long cols_next = rest.cols() / n_next;
    RowMajorXcd rm = rest;  // rank x (n_{k+1} * cols_next), row-major
    work = Eigen::Map<const RowMajorXcd>(rm.data(), rank * n_next, cols_next);
  }

  // Single-site geometry degenerates to one core.
  RowMajorXcd rm = work;
  tt.cores.push_back(Eigen::Map<const VectorXcd>(rm.data(), rm.size()));
  return tt;
}

VectorXcd tt_contract(const TTState& tt, long long budget) {
  const auto& g = tt.geometry;
  if (g.dense_dim() > budget)
    throw ResourceError("dense reconstruction exceeds the memory budget");
  if (tt.cores.size() != static_cast<size_t>(g.d))
    throw ValidationError("core count does not match geometry");

  // psi_k[(x, i_k), beta] = sum_alpha psi_{k-1}[x, alpha] * core_k[(alpha, i_k), beta]
  MatrixXcd psi = tt.cores[0];  // (n_1) x r_1
  for (int k = 1; k < g.d; ++k) {
    const MatrixXcd& core = tt.cores[static_cast<size_t>(k)];
    const int n = g.dims[static_cast<size_t>(k)];
    const long long rows = psi.rows();
    const long long r_prev = psi.cols();
    const long long r_next = core.cols();
    MatrixXcd next(rows * n, r_next);
    for (int i = 0; i < n; ++i) {
      // Slice of the core at physical index i: rows alpha*n + i.
      MatrixXcd slice(r_prev, r_next);
      for (long long a = 0; a < r_prev; ++a)
        slice.row(a) = core.row(a * n + i);
      MatrixXcd t = psi * slice;
      for (long long x = 0; x < rows; ++x) next.row(x * n + i) = t.row(x);
    }
    psi = std::move(next);
  }
  return Eigen::Map<const VectorXcd>(psi.data(), psi.rows());
}

DenseState tt_reconstruct(const TTState& tt, bool renormalize,
                          long long budget) {
  VectorXcd amps = tt_contract(tt, budget);
  if (renormalize) return DenseState::normalized(tt.geometry, amps, budget);
  return DenseState(tt.geometry, std::move(amps), budget);
}

double truncation_error(const SchmidtSpectrum& spectrum, int r) {
  if (r < 0) throw ValidationError("rank must be non-negative");
  if (r >= spectrum.values.size()) return 0.0;
  double tail = spectrum.values.tail(spectrum.values.size() - r).squaredNorm();
  return std::sqrt(std::max(tail, 0.0));
}

MatrixXcd reduced_density_matrix(const DenseState& state, Interval keep) {
  const auto& g = state.geometry;
  if (keep.a < 1 || keep.b > g.d || !keep.valid())
    throw ValidationError("keep interval out of range");
  const long long left = g.left_dim(keep.a - 1);
  const long long mid = g.block_dim(keep);
  const long long right = g.right_dim(keep.b);
  MatrixXcd rho = MatrixXcd::Zero(mid, mid);
  const cdouble* psi = state.amplitudes.data();
  for (long long l = 0; l < left; ++l) {
    for (long long m = 0; m < mid; ++m) {
      const cdouble* row = psi + (l * mid + m) * right;
      for (long long mp = 0; mp <= m; ++mp) {
        const cdouble* col = psi + (l * mid + mp) * right;
        cdouble acc = 0.0;
        for (long long r = 0; r < right; ++r) acc += row[r] * std::conj(col[r]);
        rho(m, mp) += acc;
      }
    }
  }
  // Fill the upper triangle from Hermitian symmetry.
  for (long long m = 0; m < mid; ++m)
    for (long long mp = m + 1; mp < mid; ++mp) rho(m, mp) = std::conj(rho(mp, m));
  return rho;
}

ReducedSpectrum reduced_spectrum(const DenseState& state, Interval keep) {
  MatrixXcd rho = reduced_density_matrix(state, keep);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  VectorXd ev = es.eigenvalues().reverse();
  if (ev.minCoeff() < -1e-12)
    throw NumericError("reduced density operator has a negative eigenvalue");
  ev = ev.cwiseMax(0.0);
  ReducedSpectrum out;
  out.keep = keep;
  out.eigenvalues = clamp_and_trim(std::move(ev));
  out.validate();
  return out;
}

double state_fidelity_norm(const DenseState& a, const DenseState& b) {
  if (!(a.geometry == b.geometry))
    throw ValidationError("states live on different geometries");
  return (a.amplitudes - b.amplitudes).norm();
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'Q', 'C', 'H', 'N'};
constexpr uint32_t kVersion = 1;

struct Header {
  uint32_t kind = 0;
  uint64_t meta = 0;
  std::vector<uint32_t> dims;
  uint64_t count = 0;
};

void write_header(std::ofstream& out, const Header& h) {
  out.write(kMagic, 4);
  auto put32 = [&](uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  auto put64 = [&](uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
  };
  put32(kVersion);
  put32(h.kind);
  put64(h.meta);
  put32(static_cast<uint32_t>(h.dims.size()));
  for (uint32_t n : h.dims) put32(n);
  put64(h.count);
}

Header read_header(std::ifstream& in, uint32_t expected_kind) {
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ValidationError("bad magic in binary file");
  auto get32 = [&]() {
    uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  auto get64 = [&]() {
    uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    return v;
  };
  if (get32() != kVersion) throw ValidationError("unsupported file version");
  Header h;
  h.kind = get32();
  if (h.kind != expected_kind)
    throw ValidationError("binary file holds a different payload kind");
  h.meta = get64();
  uint32_t d = get32();
  h.dims.resize(d);
  for (uint32_t& n : h.dims) n = get32();
  h.count = get64();
  if (!in) throw ValidationError("truncated binary header");
  return h;
}

void write_payload(std::ofstream& out, const cdouble* data, uint64_t count) {
  for (uint64_t i = 0; i < count; ++i) {
    double re = data[i].real(), im = data[i].imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
}

VectorXcd read_payload(std::ifstream& in, uint64_t count) {
  VectorXcd v(static_cast<long long>(count));
  for (uint64_t i = 0; i < count; ++i) {
    double re = 0.0, im = 0.0;
    in.read(reinterpret_cast<char*>(&re), sizeof(re));
    in.read(reinterpret_cast<char*>(&im), sizeof(im));
    v(static_cast<long long>(i)) = cdouble(re, im);
  }
  if (!in) throw ValidationError("truncated binary payload");
  return v;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open for reading: " + path);
  return in;
}

}  // namespace

void save_dense_state(const DenseState& state, const std::string& path) {
  auto out = open_out(path);
  Header h;
  h.kind = 0;
  h.dims.assign(state.geometry.dims.begin(), state.geometry.dims.end());
  h.count = static_cast<uint64_t>(state.amplitudes.size());
  write_header(out, h);
  write_payload(out, state.amplitudes.data(), h.count);
}

DenseState load_dense_state(const std::string& path, long long budget) {
  auto in = open_in(path);
  Header h = read_header(in, 0);
  SiteGeometry g;
  g.d = static_cast<int>(h.dims.size());
  g.dims.assign(h.dims.begin(), h.dims.end());
  VectorXcd amps = read_payload(in, h.count);
  return DenseState(std::move(g), std::move(amps), budget);
}

void save_spectrum(const SchmidtSpectrum& spectrum, const std::string& path) {
  auto out = open_out(path);
  Header h;
  h.kind = 1;
  h.meta = static_cast<uint64_t>(spectrum.cut);
  h.dims = {static_cast<uint32_t>(spectrum.values.size())};
  h.count = static_cast<uint64_t>(spectrum.values.size());
  write_header(out, h);
  VectorXcd tmp = spectrum.values.cast<cdouble>();
  write_payload(out, tmp.data(), h.count);
}

SchmidtSpectrum load_spectrum(const std::string& path) {
  auto in = open_in(path);
  Header h = read_header(in, 1);
  VectorXcd tmp = read_payload(in, h.count);
  SchmidtSpectrum s;
  s.cut = static_cast<int>(h.meta);
  s.values = tmp.real();
  s.validate();
  return s;
}

void save_matrix(const MatrixXcd& m, const std::string& path) {
  if (m.rows() != m.cols())
    throw ValidationError("binary matrix format is for square matrices");
  auto out = open_out(path);
  Header h;
  h.kind = 2;
  h.meta = static_cast<uint64_t>(m.rows());
  h.count = static_cast<uint64_t>(m.size());
  write_header(out, h);
  // Column-major, matching Eigen's storage.
  write_payload(out, m.data(), h.count);
}

MatrixXcd load_matrix(const std::string& path) {
  auto in = open_in(path);
  Header h = read_header(in, 2);
  const long long n = static_cast<long long>(h.meta);
  VectorXcd flat = read_payload(in, h.count);
  if (n * n != flat.size()) throw ValidationError("matrix payload size mismatch");
  return Eigen::Map<const MatrixXcd>(flat.data(), n, n);
}

void save_spectrum_csv(const SchmidtSpectrum& spectrum,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  out << "k,sigma\n";
  for (int k = 0; k < spectrum.values.size(); ++k)
    out << (k + 1) << "," << format_double(spectrum.values(k)) << "\n";
}

}  // namespace qchain
