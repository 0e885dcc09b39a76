#include "qchain/filters.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace qchain {

namespace {

constexpr double kShiftTol = 1e-10;

Interval hull(Interval a, Interval b) {
  return Interval{std::min(a.a, b.a), std::max(a.b, b.b)};
}

MatrixXcd matrix_power(MatrixXcd base, long long n) {
  MatrixXcd result = MatrixXcd::Identity(base.rows(), base.cols());
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

// exp(i s M) from a precomputed eigendecomposition of self-adjoint M.
MatrixXcd unitary_exp(const MatrixXcd& vectors, const VectorXd& values,
                      double s) {
  VectorXcd phases(values.size());
  for (int k = 0; k < values.size(); ++k)
    phases(k) = std::exp(cdouble(0.0, s * values(k)));
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

}  // namespace

FilterParams FilterParams::defaults(double gap, int l, double c1,
                                    double v_hat) {
  if (!(gap > 0.0)) throw ValidationError("defaults need a positive gap");
  if (l < 0) throw ValidationError("overlap length must be non-negative");
  FilterParams p;
  p.l = l;
  p.q = 2.0 * std::max(static_cast<double>(l), 0.5) * c1 / (gap * gap);
  p.T = std::max(6.0 * std::sqrt(p.q), l / (2.0 * v_hat));
  p.validate();
  return p;
}

FilterParams FilterParams::doubled() const {
  FilterParams p = *this;
  p.quadrature_nodes *= 2;
  p.ode_steps *= 2;
  return p;
}

void FilterParams::validate() const {
  if (!(q > 0.0)) throw ValidationError("filter width q must be positive");
  if (l < 0) throw ValidationError("overlap length must be non-negative");
  if (!(T > 0.0)) throw ValidationError("time truncation must be positive");
  if (quadrature_nodes < 8)
    throw ValidationError("need at least 8 quadrature nodes");
  if (ode_steps < 8) throw ValidationError("need at least 8 product steps");
}

void gauss_legendre(int n, std::vector<double>* nodes,
                    std::vector<double>* weights) {
  nodes->assign(static_cast<size_t>(n), 0.0);
  weights->assign(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Chebyshev initial guess, Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    (*nodes)[static_cast<size_t>(i)] = -x;
    (*nodes)[static_cast<size_t>(n - 1 - i)] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    (*weights)[static_cast<size_t>(i)] = w;
    (*weights)[static_cast<size_t>(n - 1 - i)] = w;
  }
}

LocalOperator gaussian_projector(const EigenSystem& eig, double q) {
  if (!(q >= 0.0)) throw ValidationError("q must be non-negative");
  if (std::abs(eig.eigenvalues(0)) > kShiftTol)
    throw ValidationError("spectrum must be shifted so lambda_0 = 0");
  VectorXd weights =
      (-0.5 * q * eig.eigenvalues.array().square()).exp().matrix();
  LocalOperator op;
  op.geometry = eig.geometry;
  op.support = Interval{1, eig.geometry.d};
  op.matrix = eig.eigenvectors * weights.cast<cdouble>().asDiagonal() *
              eig.eigenvectors.adjoint();
  op.norm = weights.maxCoeff();
  op.self_adjoint = true;
  return op;
}

LocalOperator filtered_operator(const EigenSystem& eig, const LocalOperator& a,
                                double q) {
  if (!(q >= 0.0)) throw ValidationError("q must be non-negative");
  const long long dim = eig.eigenvalues.size();
  MatrixXcd in_basis = eig.eigenvectors.adjoint() * a.matrix * eig.eigenvectors;
  for (long long k = 0; k < dim; ++k)
    for (long long m = 0; m < dim; ++m) {
      const double diff = eig.eigenvalues(k) - eig.eigenvalues(m);
      in_basis(k, m) *= std::exp(-0.5 * q * diff * diff);
    }
  LocalOperator out;
  out.geometry = a.geometry;
  out.support = Interval{1, a.geometry.d};  // filtering delocalizes
  out.matrix = eig.eigenvectors * in_basis * eig.eigenvectors.adjoint();
  out.refresh_norm();
  out.refresh_self_adjoint();
  return out;
}

LocalOperator localize(const LocalOperator& a, Interval target) {
  MatrixXcd block = compress_to_interval(a.geometry, a.matrix, target);
  LocalOperator out = LocalOperator::embed(a.geometry, block, target);
  if (a.self_adjoint) {
    // The compression preserves self-adjointness exactly; tighten the flag.
    out.self_adjoint = true;
  }
  return out;
}

LocalOperator window_projector(const LocalOperator& m, const DenseState& psi0,
                               double tau) {
  if (!(tau > 0.0)) throw ValidationError("window threshold must be positive");
  if (!m.self_adjoint)
    throw ValidationError("window projector needs a self-adjoint operator");
  if (!(m.geometry == psi0.geometry))
    throw ValidationError("operator and state geometries differ");

  MatrixXcd block = compress_to_interval(m.geometry, m.matrix, m.support);
  block = 0.5 * (block + block.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(block);
  const long long n = block.rows();
  MatrixXcd proj = MatrixXcd::Zero(n, n);
  int kept = 0;
  for (long long k = 0; k < n; ++k)
    if (std::abs(es.eigenvalues()(k)) <= tau) {
      proj.noalias() +=
          es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
      ++kept;
    }

  LocalOperator out = LocalOperator::embed(m.geometry, proj, m.support);
  out.self_adjoint = true;
  out.norm = kept > 0 ? 1.0 : 0.0;

  const double defect =
      (out.matrix * psi0.amplitudes - psi0.amplitudes).norm();
  const double m_psi = (m.matrix * psi0.amplitudes).norm();
  if (defect > m_psi / tau + 1e-12)
    throw NumericError("window projector guarantee violated");
  return out;
}

TimeOrderedResult time_ordered_ob(const LocalOperator& m_left,
                                  const LocalOperator& m_bulk,
                                  const LocalOperator& m_right,
                                  const FilterParams& params) {
  params.validate();
  for (const LocalOperator* op : {&m_left, &m_bulk, &m_right})
    if (!op->self_adjoint)
      throw ValidationError("ordered exponential needs self-adjoint input");

  const SiteGeometry& g = m_left.geometry;
  const long long dim = g.dense_dim();
  const MatrixXcd d_op = m_left.matrix + m_right.matrix;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es_d(d_op);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es_b(m_bulk.matrix);

  std::vector<double> nodes, weights;
  gauss_legendre(params.quadrature_nodes, &nodes, &weights);

  const double q = params.q;
  const double norm_const = 1.0 / std::sqrt(2.0 * M_PI * q);

  // Ordered product of midpoint steps over [0, t], telescoped as
  // [e^{iD dt/2} e^{iB dt} e^{iD dt/2}]^N e^{-iDt}.
  auto ordered_product = [&](double t, int steps) -> MatrixXcd {
    if (std::abs(t) < 1e-300) return MatrixXcd::Identity(dim, dim);
    const double dt = t / steps;
    MatrixXcd half = unitary_exp(es_d.eigenvectors(), es_d.eigenvalues(),
                                 0.5 * dt);
    MatrixXcd eb = unitary_exp(es_b.eigenvectors(), es_b.eigenvalues(), dt);
    MatrixXcd step = half * eb * half;
    MatrixXcd back = unitary_exp(es_d.eigenvectors(), es_d.eigenvalues(), -t);
    return matrix_power(std::move(step), steps) * back;
  };

  auto integrate = [&](int steps) -> MatrixXcd {
    MatrixXcd acc = MatrixXcd::Zero(dim, dim);
    for (int i = 0; i < params.quadrature_nodes; ++i) {
      const double t = params.T * nodes[static_cast<size_t>(i)];
      const double w = params.T * weights[static_cast<size_t>(i)] *
                       norm_const * std::exp(-t * t / (2.0 * q));
      acc.noalias() += w * ordered_product(t, steps);
    }
    return acc;
  };

  int steps = params.ode_steps;
  MatrixXcd current = integrate(steps);
  double residual = 0.0;
  bool converged = false;
  for (int r = 0; r < params.max_refinements; ++r) {
    MatrixXcd finer = integrate(2 * steps);
    residual = operator_norm(finer - current);
    current = std::move(finer);
    steps *= 2;
    if (residual < params.refine_threshold) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NumericError(
        "ordered exponential did not converge under step refinement");

  TimeOrderedResult out;
  out.ob_tilde.geometry = g;
  out.ob_tilde.support =
      hull(hull(m_left.support, m_bulk.support), m_right.support)
          .clipped(1, g.d);
  out.ob_tilde.matrix = std::move(current);
  out.ob_tilde.refresh_norm();
  out.ob_tilde.refresh_self_adjoint();
  out.residual = residual;
  out.steps_used = steps;
  return out;
}

GroundProjectorApprox approximate_ground_projector(const NNISpec& spec,
                                                   const EigenSystem& eig,
                                                   int j, int l,
                                                   const FilterParams& params) {
  params.validate();
  const SiteGeometry& g = spec.geometry;
  const int d = g.d;
  const double q = params.q;

  LBRSplit split = lbr_split(spec, eig, j, l);
  const VectorXcd psi0 = eig.ground_state();
  const DenseState psi0_state = eig.ground_dense_state();

  GroundProjectorApprox out;
  out.j = j;
  out.l = l;
  out.q = q;

  const InteractionConstants ic = interaction_constants(spec);
  out.annihilation_bound = 3.0 * ic.J * ic.J / eig.gap *
                           std::exp(-0.5 * eig.gap * eig.gap * q);

  std::array<const LocalOperator*, 3> parts = {&split.h_left, &split.h_bulk,
                                               &split.h_right};
  std::array<LocalOperator, 3> filtered;
  for (int x = 0; x < 3; ++x) {
    filtered[static_cast<size_t>(x)] = filtered_operator(eig, *parts[static_cast<size_t>(x)], q);
    out.filtered_psi_norms[static_cast<size_t>(x)] =
        (filtered[static_cast<size_t>(x)].matrix * psi0).norm();
  }

  const Interval target_l = Interval{j - 2 * l - 2, j}.clipped(1, d);
  const Interval target_b = Interval{j - 2 * l - 2, j + 2 * l + 3}.clipped(1, d);
  const Interval target_r = Interval{j + 1, j + 2 * l + 3}.clipped(1, d);
  LocalOperator m_l = localize(filtered[0], target_l);
  LocalOperator m_b = localize(filtered[1], target_b);
  LocalOperator m_r = localize(filtered[2], target_r);

  auto window = [&](const LocalOperator& m, int slot) {
    const double m_psi = (m.matrix * psi0).norm();
    const double tau = std::sqrt(std::max(m_psi, 1e-15) *
                                 std::max(m.norm, 1e-15));
    out.m_psi_norms[static_cast<size_t>(slot == 0 ? 0 : 2)] = m_psi;
    out.taus[static_cast<size_t>(slot)] = tau;
    LocalOperator o = window_projector(m, psi0_state, tau);
    out.window_defects[static_cast<size_t>(slot)] =
        (o.matrix * psi0 - psi0).norm();
    return o;
  };
  out.m_norms = {m_l.norm, m_b.norm, m_r.norm};
  out.m_psi_norms[1] = (m_b.matrix * psi0).norm();
  out.o_left = window(m_l, 0);
  out.o_right = window(m_r, 1);

  TimeOrderedResult tob = time_ordered_ob(m_l, m_b, m_r, params);
  out.ob_residual = tob.residual;

  const Interval target_ob =
      Interval{j - 3 * l - 2, j + 3 * l + 3}.clipped(1, d);
  LocalOperator ob_local = localize(tob.ob_tilde, target_ob);

  // O_B is chosen positive: symmetrize the support block and clamp its
  // spectrum to [0, 1].
  MatrixXcd block =
      compress_to_interval(g, ob_local.matrix, ob_local.support);
  block = 0.5 * (block + block.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(block);
  VectorXd clamped = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  MatrixXcd pos = es.eigenvectors() * clamped.cast<cdouble>().asDiagonal() *
                  es.eigenvectors().adjoint();
  out.o_bulk = LocalOperator::embed(g, pos, ob_local.support);
  out.o_bulk.self_adjoint = true;
  out.o_bulk.norm = clamped.size() > 0 ? clamped.maxCoeff() : 0.0;

  const MatrixXcd rho0 = psi0 * psi0.adjoint();
  out.error = operator_norm(out.o_bulk.matrix * out.o_left.matrix *
                                out.o_right.matrix -
                            rho0);
  return out;
}

}  // namespace qchain
