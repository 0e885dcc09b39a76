#include "qchain/arealaw.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace qchain {

namespace {

constexpr double kDualPathTol = 1e-12;

using RowMajorXcd =
    Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double xlog2x(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

}  // namespace

double von_neumann_bits(const VectorXd& probabilities) {
  double s = 0.0;
  for (int i = 0; i < probabilities.size(); ++i)
    s -= xlog2x(probabilities(i));
  return std::max(s, 0.0);
}

double quantum_relative_entropy(const MatrixXcd& rho, const MatrixXcd& sigma) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> er(rho);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(sigma);
  const VectorXd p = er.eigenvalues().cwiseMax(0.0);
  const VectorXd q = es.eigenvalues().cwiseMax(0.0);

  double s = 0.0;
  for (int i = 0; i < p.size(); ++i) s += xlog2x(p(i));

  // -tr(rho log2 sigma) through the overlap matrix.
  MatrixXcd overlap = er.eigenvectors().adjoint() * es.eigenvectors();
  for (int i = 0; i < p.size(); ++i) {
    if (p(i) <= 0.0) continue;
    for (int j = 0; j < q.size(); ++j) {
      const double w = p(i) * std::norm(overlap(i, j));
      if (w <= 1e-300) continue;
      if (q(j) <= 1e-300) return std::numeric_limits<double>::infinity();
      s -= w * std::log2(q(j));
    }
  }
  return s;
}

double binary_relative_entropy(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw ValidationError("binary distributions need entries in [0,1]");
  double s = 0.0;
  if (p > 0.0) {
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    s += p * std::log2(p / q);
  }
  if (p < 1.0) {
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    s += (1.0 - p) * std::log2((1.0 - p) / (1.0 - q));
  }
  return s;
}

MutualInformationRecord mutual_information(const DenseState& state, int j,
                                           int l, bool clip_to_chain) {
  const int d = state.geometry.d;
  Interval a{j - l - 2, j};
  Interval b{j + 1, j + l + 3};
  if (clip_to_chain) {
    a = a.clipped(1, d);
    b = b.clipped(1, d);
  }
  if (a.a < 1 || b.b > d || !a.valid() || !b.valid())
    throw RangeError("mutual information windows overflow the chain");

  MutualInformationRecord rec;
  rec.region_a = a;
  rec.region_b = b;
  rec.s_a = von_neumann_bits(reduced_spectrum(state, a).eigenvalues);
  rec.s_b = von_neumann_bits(reduced_spectrum(state, b).eigenvalues);
  rec.s_ab =
      von_neumann_bits(reduced_spectrum(state, Interval{a.a, b.b}).eigenvalues);
  rec.mutual_information = rec.s_a + rec.s_b - rec.s_ab;
  if (rec.mutual_information < -1e-9)
    throw NumericError("mutual information came out negative");
  return rec;
}

double relent_lower_bound(double epsilon_l, double e_b) {
  if (!(epsilon_l >= 0.0 && epsilon_l < 0.5))
    throw BoundUndefinedError("bound needs epsilon in [0, 1/2)");
  if (!(e_b > 0.0 && e_b < 1.0))
    throw BoundUndefinedError("bound needs E_B strictly inside (0,1)");
  const double one = 1.0 - 2.0 * epsilon_l;
  double value = one * std::log2(one / e_b);
  if (epsilon_l > 0.0)
    value += 2.0 * epsilon_l * std::log2(2.0 * epsilon_l / (1.0 - e_b));
  return value;
}

std::pair<double, double> dephasing_channel(const MatrixXcd& rho,
                                            const LocalOperator& o_b) {
  if (rho.rows() != rho.cols() || rho.rows() != o_b.matrix.rows())
    throw ValidationError("state and operator dimensions differ");
  if (operator_norm(rho - rho.adjoint()) > 1e-10)
    throw ValidationError("density operator must be self-adjoint");
  if (std::abs(rho.trace().real() - 1.0) > 1e-10)
    throw ValidationError("density operator must have unit trace");
  if (!o_b.self_adjoint)
    throw ValidationError("measurement operator must be self-adjoint");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(o_b.matrix,
                                              Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-10 ||
      es.eigenvalues().maxCoeff() > 1.0 + 1e-10)
    throw ValidationError("measurement operator must satisfy 0 <= O_B <= 1");

  double p = std::real((rho * o_b.matrix).trace());
  p = std::clamp(p, 0.0, 1.0);
  return {p, 1.0 - p};
}

double expectation_e(const DenseState& state, int cut) {
  const auto& g = state.geometry;
  if (cut < 1 || cut > g.d - 1) throw RangeError("cut out of range");

  const MatrixXcd rho_a = reduced_density_matrix(state, Interval{1, cut});
  const MatrixXcd rho_b = reduced_density_matrix(state, Interval{cut + 1, g.d});
  Eigen::Map<const RowMajorXcd> psi(state.amplitudes.data(), g.left_dim(cut),
                                    g.right_dim(cut));
  const MatrixXcd mapped = rho_a * psi * rho_b.transpose();
  const double direct =
      std::real((psi.adjoint() * mapped).trace());

  const SchmidtSpectrum s = schmidt_spectrum(state, cut);
  const double via_schmidt = s.values.array().pow(6).sum();

  if (std::abs(direct - via_schmidt) > kDualPathTol)
    throw NumericError(
        "expectation value paths disagree (partial trace vs Schmidt)");
  return direct;
}

EbBoundResult eb_bound_check(const ExpectationRecord& record) {
  if (!(record.epsilon_l >= 0.0 && record.epsilon_l < 0.5))
    throw BoundUndefinedError("bound needs epsilon in [0, 1/2)");
  const double e = record.epsilon_l;
  EbBoundResult out;
  out.lhs = record.e_b;
  out.rhs = (record.e - std::sqrt(2.0 * record.e_b * e) + 2.0 * e) /
            (1.0 - 2.0 * e);
  out.slack = out.rhs - out.lhs;
  out.satisfied = out.slack >= -1e-12;
  return out;
}

double max_window_entropy(const DenseState& state, int width) {
  const int d = state.geometry.d;
  if (width < 1 || width > d) throw RangeError("window does not fit the chain");
  double best = 0.0;
  for (int j = 1; j + width - 1 <= d; ++j) {
    const Interval w{j, j + width - 1};
    best = std::max(best,
                    von_neumann_bits(reduced_spectrum(state, w).eigenvalues));
  }
  return best;
}

SlRecursionRecord sl_recursion_check(const DenseState& state, int l,
                                     double epsilon_l, double e, double c5) {
  if (l < 1) throw RangeError("window length must be at least 1");
  if (2 * l > state.geometry.d)
    throw RangeError("doubled window does not fit the chain");
  SlRecursionRecord rec;
  rec.l = l;
  rec.s_l = max_window_entropy(state, l);
  rec.s_2l = max_window_entropy(state, 2 * l);
  rec.c5 = c5;
  const double log_term =
      (1.0 - 2.0 * epsilon_l) * std::log2(1.0 / (e + 2.0 * epsilon_l));
  rec.defect = rec.s_2l - 2.0 * rec.s_l + log_term;
  rec.satisfied = rec.defect <= c5 + 1e-9;
  return rec;
}

double fit_c5(const std::vector<SlRecursionRecord>& records) {
  if (records.empty()) throw InsufficientDataError("no recursion records");
  double c5 = 0.0;
  for (const auto& r : records) c5 = std::max(c5, r.defect);
  return c5;
}

std::string truncation_case_name(TruncationCase c) {
  switch (c) {
    case TruncationCase::kPolynomialInDimension:
      return "polynomial-in-dimension";
    case TruncationCase::kLogCorrected:
      return "log-corrected";
    case TruncationCase::kExponentialPrefactor:
      return "exponential-prefactor";
  }
  return "unknown";
}

TruncationRateFit truncation_rate_fit(const MatrixXcd& rho_m, int cut,
                                      const SiteGeometry& g) {
  const long long left = g.left_dim(cut);
  const long long right = g.right_dim(cut);
  if (rho_m.rows() != left * right || rho_m.cols() != rho_m.rows())
    throw ValidationError("density matrix does not match the geometry");
  if (operator_norm(rho_m - rho_m.adjoint()) > 1e-8)
    throw ValidationError("density matrix must be self-adjoint");
  if (std::abs(rho_m.trace().real() - 1.0) > 1e-8)
    throw ValidationError("density matrix must have unit trace");

  // Regroup rho[(a,b),(a',b')] into M[(a,a'),(b,b')].
  MatrixXcd regrouped(left * left, right * right);
  for (long long a = 0; a < left; ++a)
    for (long long ap = 0; ap < left; ++ap)
      for (long long b = 0; b < right; ++b)
        for (long long bp = 0; bp < right; ++bp)
          regrouped(a * left + ap, b * right + bp) =
              rho_m(a * right + b, ap * right + bp);

  Eigen::JacobiSVD<MatrixXcd> svd(
      regrouped, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const VectorXd& sv = svd.singularValues();
  const int full_rank = static_cast<int>(sv.size());

  TruncationRateFit out;
  MatrixXcd recon = MatrixXcd::Zero(rho_m.rows(), rho_m.cols());
  int next_rank = 1;
  for (int r = 1; r <= full_rank; ++r) {
    // Un-regroup the r-th dyad and add it to the running reconstruction.
    const MatrixXcd dyad =
        sv(r - 1) * (svd.matrixU().col(r - 1) * svd.matrixV().col(r - 1).adjoint());
    for (long long a = 0; a < left; ++a)
      for (long long ap = 0; ap < left; ++ap)
        for (long long b = 0; b < right; ++b)
          for (long long bp = 0; bp < right; ++bp)
            recon(a * right + b, ap * right + bp) +=
                dyad(a * left + ap, b * right + bp);
    if (r == next_rank || r == full_rank) {
      const double err = operator_norm(rho_m - recon);
      out.ranks.push_back(r);
      out.errors.push_back(err);
      next_rank = std::max(next_rank + 1, (next_rank * 3) / 2);
      if (err < 1e-12) break;
    }
  }

  // Collect usable points for the log-scale fits.
  std::vector<double> lx, ly;
  for (size_t i = 0; i < out.ranks.size(); ++i)
    if (out.errors[i] > 1e-12) {
      lx.push_back(std::log2(static_cast<double>(out.ranks[i])));
      ly.push_back(std::log2(out.errors[i]));
    }
  if (lx.size() < 3) {
    out.degenerate = true;
    return out;
  }

  const int n = static_cast<int>(lx.size());
  auto fit_design = [&](const std::vector<VectorXd>& columns, VectorXd* coef) {
    MatrixXd a(n, static_cast<int>(columns.size()));
    for (size_t c = 0; c < columns.size(); ++c) a.col(static_cast<int>(c)) = columns[c];
    VectorXd y = Eigen::Map<const VectorXd>(ly.data(), n);
    *coef = a.colPivHouseholderQr().solve(y);
    return (a * *coef - y).squaredNorm();
  };

  VectorXd ones = VectorXd::Ones(n);
  VectorXd xs = Eigen::Map<const VectorXd>(lx.data(), n);
  VectorXd loglog(n);
  for (int i = 0; i < n; ++i)
    loglog(i) = std::log2(std::max(lx[static_cast<size_t>(i)], 1e-9) + 1.0);

  VectorXd coef_pow, coef_log;
  const double rss_pow = fit_design({ones, xs}, &coef_pow);
  const double rss_log = fit_design({ones, xs, loglog}, &coef_log);

  // Akaike-style comparison: n ln(rss/n) + 2k.
  auto aic = [&](double rss, int k) {
    return n * std::log(std::max(rss, 1e-300) / n) + 2.0 * k;
  };
  const double aic_pow = aic(rss_pow, 2);
  const double aic_log = aic(rss_log, 3);

  if (aic_log < aic_pow && coef_log(2) > 0.0) {
    out.label = TruncationCase::kLogCorrected;
    out.s_hat = -coef_log(1);
    out.residual = std::sqrt(rss_log / n);
  } else {
    out.s_hat = -coef_pow(1);
    out.residual = std::sqrt(rss_pow / n);
    // A dimension-diluted exponent s/(2m+6) sits below 1; an undiluted
    // power law does not.
    out.label = out.s_hat < 1.0 ? TruncationCase::kPolynomialInDimension
                                : TruncationCase::kExponentialPrefactor;
  }
  return out;
}

EntropySweepReport entropy_sweep(const std::function<NNISpec(int)>& family,
                                 const std::vector<int>& d_values,
                                 const EntropySweepOptions& options) {
  if (d_values.empty()) throw ValidationError("empty d grid");
  EntropySweepReport report;
  report.d_values = d_values;
  report.gap_smallest = std::numeric_limits<double>::infinity();

  for (int d : d_values) {
    NNISpec spec = family(d);
    report.model = spec.model_name;
    const long long dim = spec.geometry.dense_dim();
    if (dim > options.dense_cap && dim > (1LL << 14))
      throw ResourceError("chain dimension beyond solver caps");

    DenseState psi0 = [&]() {
      if (dim <= options.dense_threshold) {
        EigenSystem eig = diagonalize(spec, options.dense_cap);
        if (options.refuse_degenerate && eig.ground_degenerate)
          throw ValidationError("degenerate ground state refused");
        report.gap_smallest = std::min(report.gap_smallest, eig.gap);
        return eig.ground_dense_state();
      }
      GroundStateResult gs = ground_state(spec);
      const double gap = gs.lambda1 - gs.lambda0;
      if (options.refuse_degenerate && gap <= 1e-12 * std::max(1.0, std::abs(gs.lambda1)))
        throw ValidationError("degenerate ground state refused");
      report.gap_smallest = std::min(report.gap_smallest, gap);
      return DenseState::normalized(spec.geometry, gs.psi0);
    }();

    for (int j = 1; j <= d - 1; ++j) {
      const SchmidtSpectrum s = schmidt_spectrum(psi0, j);
      const double vn = von_neumann_bits(
          ProbabilitySequence::from_schmidt(s).values);
      report.points.push_back(EntropySweepPoint{d, j, vn});
      if (j == d / 2) report.s_mid[d] = vn;
    }
    double site_max = 0.0;
    for (int k = 1; k <= d; ++k)
      site_max = std::max(
          site_max,
          von_neumann_bits(reduced_spectrum(psi0, Interval{k, k}).eigenvalues));
    report.s_site_max[d] = site_max;
  }

  // Saturation of the mid-cut entropy over the two largest lengths.
  if (d_values.size() >= 2) {
    const int d_max = d_values.back();
    const int d_prev = d_values[d_values.size() - 2];
    report.delta_sat =
        std::abs(report.s_mid.at(d_max) - report.s_mid.at(d_prev));
    report.saturated = report.delta_sat < options.saturation_tol;
  }

  // Beyond the correlation plateau the per-distance maxima stop rising.
  const int d_max = d_values.back();
  std::map<int, double> by_distance;
  for (const auto& p : report.points) {
    if (p.d != d_max) continue;
    const int k = std::min(p.j, d_max - p.j);
    auto it = by_distance.find(k);
    if (it == by_distance.end() || p.s_vn > it->second)
      by_distance[k] = p.s_vn;
  }
  report.plateau_ok = true;
  for (auto it = by_distance.begin(); it != by_distance.end(); ++it) {
    auto next = std::next(it);
    if (next == by_distance.end()) break;
    if (it->first >= options.plateau_start &&
        next->second > it->second + options.plateau_slack)
      report.plateau_ok = false;
  }
  return report;
}

}  // namespace qchain
