#include "qchain/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qchain {

namespace {

constexpr double kSumTol = 1e-10;
constexpr double kPrefixSlack = 1e-12;

}  // namespace

ProbabilitySequence ProbabilitySequence::from_values(VectorXd v) {
  if (v.size() == 0) throw ValidationError("empty probability sequence");
  for (int i = 0; i + 1 < v.size(); ++i)
    if (v(i + 1) > v(i) + 1e-14)
      throw ValidationError("probabilities must be non-increasing");
  if (v.minCoeff() < -1e-14)
    throw ValidationError("probabilities must be non-negative");
  if (std::abs(v.sum() - 1.0) > kSumTol)
    throw ValidationError("probabilities must sum to 1");
  ProbabilitySequence p;
  p.values = v.cwiseMax(0.0);
  return p;
}

ProbabilitySequence ProbabilitySequence::from_schmidt(
    const SchmidtSpectrum& s) {
  return from_values(s.values.array().square().matrix());
}

ProbabilitySequence ProbabilitySequence::uniform(int r) {
  if (r < 1) throw ValidationError("support size must be positive");
  return from_values(VectorXd::Constant(r, 1.0 / r));
}

int ProbabilitySequence::support_size() const {
  int n = 0;
  for (int i = 0; i < values.size(); ++i)
    if (values(i) > 1e-15) ++n;
  return n;
}

EntropyValue renyi_entropy(const ProbabilitySequence& p, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("alpha must be positive");
  EntropyValue out;
  out.alpha = alpha;
  if (alpha == 1.0) {
    double s = 0.0;
    for (int i = 0; i < p.values.size(); ++i) {
      double x = p.values(i);
      if (x > 0.0) s -= x * std::log2(x);
    }
    out.value_bits = std::max(s, 0.0);
    return out;
  }
  double acc = 0.0;
  for (int i = 0; i < p.values.size(); ++i) {
    double x = p.values(i);
    if (x > 0.0) acc += std::pow(x, alpha);
  }
  out.value_bits = std::max(std::log2(acc) / (1.0 - alpha), 0.0);
  return out;
}

bool majorizes(const ProbabilitySequence& a, const ProbabilitySequence& b) {
  const long long n = std::max(a.values.size(), b.values.size());
  double pa = 0.0, pb = 0.0;
  for (long long m = 0; m < n; ++m) {
    if (m < a.values.size()) pa += a.values(m);
    if (m < b.values.size()) pb += b.values(m);
    if (pa < pb - kPrefixSlack) return false;
  }
  return true;
}

double renyi_lower_bound(double epsilon_sq, int r, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ValidationError("lower bound requires alpha in (0,1)");
  if (r < 2) throw ValidationError("lower bound requires r >= 2");
  if (epsilon_sq == 0.0)
    throw BoundUndefinedError("zero truncation weight: logarithm of zero");
  if (!(epsilon_sq > 0.0 && epsilon_sq <= 1.0))
    throw ValidationError("epsilon_sq must lie in (0,1]");
  return alpha / (1.0 - alpha) * std::log2(epsilon_sq / alpha) +
         std::log2((r - 1.0) / (1.0 - alpha));
}

double renyi_upper_bound(double epsilon_sq, int r, double alpha) {
  if (!(alpha > 1.0)) throw ValidationError("upper bound requires alpha > 1");
  if (r < 1) throw ValidationError("upper bound requires r >= 1");
  if (!(epsilon_sq >= 0.0 && epsilon_sq < 1.0))
    throw ValidationError("epsilon_sq must lie in [0,1)");
  return alpha / (1.0 - alpha) * std::log2(1.0 - epsilon_sq) +
         std::log2(static_cast<double>(r));
}

double rank_lower_bound(double S, double g) {
  if (S < 0.0 || g < 0.0)
    throw ValidationError("entropy and defect must be non-negative");
  return std::exp2(S - g);
}

FinitenessResult finiteness_check(const SchmidtSpectrum& spectrum,
                                  double alpha, double s_min) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ValidationError("finiteness criterion applies for alpha in (0,1]");
  std::vector<double> xs, ys;
  for (int k = 0; k < spectrum.values.size(); ++k) {
    double s = spectrum.values(k);
    if (s > 1e-12) {
      xs.push_back(std::log2(static_cast<double>(k + 1)));
      ys.push_back(std::log2(s));
    }
  }
  if (xs.size() < 4)
    throw InsufficientDataError(
        "need at least 4 nonzero singular values for the decay fit");

  // Least squares on log2-log2 scale: log2 sigma_k = log2 C - s * log2 k.
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += xs[static_cast<size_t>(i)];
    sy += ys[static_cast<size_t>(i)];
    sxx += xs[static_cast<size_t>(i)] * xs[static_cast<size_t>(i)];
    sxy += xs[static_cast<size_t>(i)] * ys[static_cast<size_t>(i)];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-30)
    throw InsufficientDataError("degenerate abscissae in the decay fit");
  const double slope = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - slope * sx) / n;

  FinitenessResult out;
  out.fit.s_hat = -slope;
  out.fit.log2_c = intercept;
  out.fit.points = n;
  for (int i = 0; i < n; ++i) {
    double resid = std::abs(ys[static_cast<size_t>(i)] -
                            (intercept + slope * xs[static_cast<size_t>(i)]));
    out.fit.max_residual = std::max(out.fit.max_residual, resid);
  }
  out.threshold = std::max(1.0 / (2.0 * alpha), s_min);
  out.finite = out.fit.s_hat > out.threshold;
  return out;
}

namespace {

// E(beta) and log2 Z with the spectrum shifted by lambda_0 for stability.
struct GibbsEval {
  double energy;
  double log2_z;
};

GibbsEval eval_gibbs(const VectorXd& lambda, double beta) {
  const double l0 = lambda(0);
  double z = 0.0, num = 0.0;
  for (int k = 0; k < lambda.size(); ++k) {
    const double w = std::exp(-beta * (lambda(k) - l0));
    z += w;
    num += w * lambda(k);
  }
  GibbsEval out;
  out.energy = num / z;
  out.log2_z = std::log2(z) - beta * l0 * std::log2(std::exp(1.0));
  return out;
}

}  // namespace

GibbsBound gibbs_entropy_bound(const VectorXd& eigenvalues, double E) {
  if (eigenvalues.size() < 2)
    throw ValidationError("need at least two eigenvalues");
  for (int k = 0; k + 1 < eigenvalues.size(); ++k)
    if (eigenvalues(k + 1) < eigenvalues(k) - 1e-14)
      throw ValidationError("eigenvalues must be non-decreasing");
  if (!eigenvalues.allFinite())
    throw ValidationError("eigenvalues must be finite");

  const double lambda0 = eigenvalues(0);
  const double mean = eigenvalues.mean();
  if (!(E > lambda0 && E < mean))
    throw ValidationError(
        "target energy must lie strictly between lambda_0 and the "
        "infinite-temperature mean");

  // E(beta) decreases strictly from the mean (beta -> 0) to lambda_0
  // (beta -> inf) on a non-degenerate finite spectrum.
  double lo = 0.0;  // E(lo) = mean > E
  double hi = 1.0;
  int expand = 0;
  while (eval_gibbs(eigenvalues, hi).energy > E) {
    hi *= 2.0;
    if (++expand > 200)
      throw NumericError("bisection bracket expansion did not converge");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eval_gibbs(eigenvalues, mid).energy > E)
      lo = mid;
    else
      hi = mid;
  }
  const double beta = 0.5 * (lo + hi);
  const GibbsEval ev = eval_gibbs(eigenvalues, beta);

  GibbsBound out;
  out.beta = beta;
  out.bound_bits = beta * E * std::log2(std::exp(1.0)) + ev.log2_z;
  out.gibbs.eigenvalues = eigenvalues;
  out.gibbs.beta = beta;
  out.gibbs.partition_value = std::exp2(ev.log2_z);
  return out;
}

double gibbs_exact_entropy(const GibbsSpec& g) {
  const double l0 = g.eigenvalues(0);
  double z = 0.0;
  for (int k = 0; k < g.eigenvalues.size(); ++k)
    z += std::exp(-g.beta * (g.eigenvalues(k) - l0));
  double s = 0.0;
  for (int k = 0; k < g.eigenvalues.size(); ++k) {
    const double p = std::exp(-g.beta * (g.eigenvalues(k) - l0)) / z;
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

DenseState example_state(int d, double p) {
  if (d < 1) throw ValidationError("d must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0,1]");
  SiteGeometry g = SiteGeometry::uniform(2 * d, 3);
  const long long dim = g.dense_dim();
  VectorXcd amps = VectorXcd::Zero(dim);

  // Trits with site 1 slowest: index = sum_s trit_s * 3^{2d-s}.
  long long all2 = 0;
  for (int s = 0; s < 2 * d; ++s) all2 = all2 * 3 + 2;
  amps(all2) += std::sqrt(1.0 - p);

  const double w = std::sqrt(p / std::pow(2.0, d));
  long long pow3d = 1;
  for (int s = 0; s < d; ++s) pow3d *= 3;
  for (long long bits = 0; bits < (1LL << d); ++bits) {
    long long half = 0;
    for (int s = 0; s < d; ++s) half = half * 3 + ((bits >> (d - 1 - s)) & 1);
    // The second d sites repeat the same trit pattern as the first d.
    amps(half * pow3d + half) += w;
  }
  return DenseState::normalized(std::move(g), std::move(amps));
}

double example_state_renyi_closed_form(int j, double p, double alpha) {
  if (alpha == 1.0) {
    double s = 0.0;
    if (1.0 - p > 0.0) s -= (1.0 - p) * std::log2(1.0 - p);
    if (p > 0.0) s -= p * std::log2(p / std::exp2(j));
    return s;
  }
  const double arg = std::pow(1.0 - p, alpha) +
                     std::exp2((1.0 - alpha) * j) * std::pow(p, alpha);
  return std::log2(arg) / (1.0 - alpha);
}

void save_probability_csv(const ProbabilitySequence& p,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  out << "k,value\n";
  for (int k = 0; k < p.values.size(); ++k)
    out << (k + 1) << "," << format_double(p.values(k)) << "\n";
}

ProbabilitySequence load_probability_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ResourceError("cannot open for reading: " + path);
  std::string line;
  std::vector<double> vals;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    auto comma = line.find(',');
    if (comma == std::string::npos)
      throw ValidationError("malformed CSV row: " + line);
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  VectorXd v = Eigen::Map<const VectorXd>(vals.data(),
                                          static_cast<long long>(vals.size()));
  return ProbabilitySequence::from_values(std::move(v));
}

void save_entropy_report(const std::vector<EntropyValue>& rows,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  out << "alpha,value_bits\n";
  for (const auto& r : rows)
    out << format_double(r.alpha) << "," << format_double(r.value_bits)
        << "\n";
}

}  // namespace qchain
