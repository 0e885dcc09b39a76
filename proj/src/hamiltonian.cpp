#include "qchain/hamiltonian.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

namespace qchain {

namespace {

constexpr double kSelfAdjointTol = 1e-12;

void require_self_adjoint(const MatrixXcd& m, const std::string& what) {
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kSelfAdjointTol * scale)
    throw ValidationError(what + " is not self-adjoint");
}

MatrixXcd embed_block(const SiteGeometry& g, const MatrixXcd& block,
                      Interval where) {
  const long long left = g.left_dim(where.a - 1);
  const long long right = g.right_dim(where.b);
  return kron(kron(MatrixXcd::Identity(left, left), block),
              MatrixXcd::Identity(right, right));
}

}  // namespace

void NNISpec::validate() const {
  geometry.validate();
  if (geometry.d < 2) throw ValidationError("a chain needs at least 2 sites");
  if (site_terms.size() != static_cast<size_t>(geometry.d))
    throw ValidationError("need one site term per site");
  if (couplings.size() != static_cast<size_t>(geometry.d - 1))
    throw ValidationError("need one coupling per bond");
  for (int k = 0; k < geometry.d; ++k) {
    const int n = geometry.dims[static_cast<size_t>(k)];
    const auto& h = site_terms[static_cast<size_t>(k)];
    if (h.rows() != n || h.cols() != n)
      throw ValidationError("site term dimension mismatch");
    require_self_adjoint(h, "site term " + std::to_string(k + 1));
  }
  for (int k = 0; k + 1 < geometry.d; ++k) {
    const long long nn = geometry.dims[static_cast<size_t>(k)] *
                         geometry.dims[static_cast<size_t>(k + 1)];
    const auto& phi = couplings[static_cast<size_t>(k)];
    if (phi.rows() != nn || phi.cols() != nn)
      throw ValidationError("coupling dimension mismatch");
    require_self_adjoint(phi, "coupling " + std::to_string(k + 1));
  }
}

MatrixXcd bond_term(const NNISpec& spec, int k) {
  const auto& g = spec.geometry;
  if (k < 1 || k > g.d - 1) throw RangeError("bond index out of range");
  const int n_k = g.dims[static_cast<size_t>(k - 1)];
  const int n_k1 = g.dims[static_cast<size_t>(k)];
  MatrixXcd block =
      kron(spec.site_terms[static_cast<size_t>(k - 1)],
           MatrixXcd::Identity(n_k1, n_k1)) +
      spec.couplings[static_cast<size_t>(k - 1)];
  if (k == g.d - 1)
    block += kron(MatrixXcd::Identity(n_k, n_k),
                  spec.site_terms[static_cast<size_t>(k)]);
  return embed_block(g, block, Interval{k, k + 1});
}

MatrixXcd assemble(const NNISpec& spec, long long budget) {
  spec.validate();
  const long long dim = spec.geometry.dense_dim();
  if (dim > budget) throw ResourceError("assembled dimension exceeds budget");
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  for (int k = 1; k <= spec.geometry.d - 1; ++k) h += bond_term(spec, k);
  return h;
}

DenseState EigenSystem::ground_dense_state() const {
  return DenseState(geometry, eigenvectors.col(0));
}

EigenSystem EigenSystem::from_diagonal(const SiteGeometry& g,
                                       VectorXd eigenvalues) {
  const long long dim = g.dense_dim();
  if (eigenvalues.size() != dim)
    throw ValidationError("spectrum length does not match geometry");
  for (int k = 0; k + 1 < eigenvalues.size(); ++k)
    if (eigenvalues(k + 1) < eigenvalues(k))
      throw ValidationError("spectrum must be non-decreasing");
  EigenSystem es;
  es.geometry = g;
  es.shift = eigenvalues(0);
  es.eigenvalues = eigenvalues.array() - eigenvalues(0);
  es.eigenvectors = MatrixXcd::Identity(dim, dim);
  es.gap = es.eigenvalues.size() > 1 ? es.eigenvalues(1) : 0.0;
  const double scale = std::max(1.0, std::abs(es.eigenvalues(dim - 1)));
  es.ground_degenerate = es.gap <= 1e-12 * scale;
  es.excited_degenerate =
      dim > 2 && (es.eigenvalues(2) - es.eigenvalues(1)) <= 1e-12 * scale;
  return es;
}

EigenSystem diagonalize(const NNISpec& spec, long long dense_cap) {
  const long long dim = spec.geometry.dense_dim();
  if (dim > dense_cap)
    throw ResourceError(
        "dense eigensolver cap exceeded; use ground_state() instead");
  MatrixXcd h = assemble(spec, dense_cap);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericError("dense eigensolver did not converge");

  EigenSystem es;
  es.geometry = spec.geometry;
  es.shift = solver.eigenvalues()(0);
  es.eigenvalues = solver.eigenvalues().array() - es.shift;
  es.eigenvectors = solver.eigenvectors();
  es.gap = dim > 1 ? es.eigenvalues(1) : 0.0;
  const double scale = std::max(1.0, std::abs(es.eigenvalues(dim - 1)));
  es.ground_degenerate = es.gap <= 1e-12 * scale;
  es.excited_degenerate =
      dim > 2 && (es.eigenvalues(2) - es.eigenvalues(1)) <= 1e-12 * scale;
  return es;
}

VectorXcd apply_nni(const NNISpec& spec, const VectorXcd& x) {
  const auto& g = spec.geometry;
  const long long dim = g.dense_dim();
  if (x.size() != dim) throw ValidationError("vector length mismatch");
  VectorXcd y = VectorXcd::Zero(dim);

  // Site terms: y[(a,i,r)] += H_k(i,i') x[(a,i',r)].
  for (int k = 0; k < g.d; ++k) {
    const int n = g.dims[static_cast<size_t>(k)];
    const long long left = g.left_dim(k);
    const long long right = g.right_dim(k + 1);
    const MatrixXcd& hk = spec.site_terms[static_cast<size_t>(k)];
    if (hk.cwiseAbs().maxCoeff() == 0.0) continue;
    for (long long a = 0; a < left; ++a)
      for (long long r = 0; r < right; ++r) {
        const long long base = a * n * right + r;
        for (int i = 0; i < n; ++i) {
          cdouble acc = 0.0;
          for (int ip = 0; ip < n; ++ip)
            acc += hk(i, ip) * x(base + ip * right);
          y(base + i * right) += acc;
        }
      }
  }

  // Bond couplings on the fused index of sites k, k+1.
  for (int k = 0; k + 1 < g.d; ++k) {
    const int nn = g.dims[static_cast<size_t>(k)] *
                   g.dims[static_cast<size_t>(k + 1)];
    const long long left = g.left_dim(k);
    const long long right = g.right_dim(k + 2);
    const MatrixXcd& phi = spec.couplings[static_cast<size_t>(k)];
    if (phi.cwiseAbs().maxCoeff() == 0.0) continue;
    for (long long a = 0; a < left; ++a)
      for (long long r = 0; r < right; ++r) {
        const long long base = a * nn * right + r;
        for (int i = 0; i < nn; ++i) {
          cdouble acc = 0.0;
          for (int ip = 0; ip < nn; ++ip)
            acc += phi(i, ip) * x(base + ip * right);
          y(base + i * right) += acc;
        }
      }
  }
  return y;
}

GroundStateResult ground_state(const NNISpec& spec, int max_krylov,
                               int max_restarts, double tol, uint64_t seed) {
  spec.validate();
  const long long dim = spec.geometry.dense_dim();
  const int m_max = static_cast<int>(std::min<long long>(max_krylov, dim));

  // Crude spectral scale for the residual test.
  double scale = 0.0;
  for (const auto& h : spec.site_terms) scale += operator_norm(h);
  for (const auto& phi : spec.couplings) scale += operator_norm(phi);
  scale = std::max(scale, 1.0);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  VectorXcd start(dim);
  for (long long i = 0; i < dim; ++i)
    start(i) = cdouble(gauss(rng), gauss(rng));
  start.normalize();

  GroundStateResult out;
  for (int restart = 0; restart < max_restarts; ++restart) {
    std::vector<VectorXcd> basis;
    basis.reserve(static_cast<size_t>(m_max));
    std::vector<double> alpha, beta;
    VectorXcd v = start;
    for (int j = 0; j < m_max; ++j) {
      basis.push_back(v);
      VectorXcd w = apply_nni(spec, v);
      double a = std::real(v.dot(w));
      alpha.push_back(a);
      w -= a * v;
      if (j > 0) w -= beta.back() * basis[static_cast<size_t>(j - 1)];
      // Full reorthogonalization, twice.
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& u : basis) w -= u.dot(w) * u;
      double b = w.norm();
      if (j + 1 < m_max) {
        if (b < 1e-14 * scale) {
          // Invariant subspace found; top it up with a random direction.
          VectorXcd r(dim);
          for (long long i = 0; i < dim; ++i)
            r(i) = cdouble(gauss(rng), gauss(rng));
          for (int pass = 0; pass < 2; ++pass)
            for (const auto& u : basis) r -= u.dot(r) * u;
          b = r.norm();
          if (b < 1e-14) break;
          w = r;
        }
        beta.push_back(b);
        v = w / b;
      }
    }

    const int m = static_cast<int>(alpha.size());
    MatrixXd tri = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      tri(i, i) = alpha[static_cast<size_t>(i)];
      if (i + 1 < m) {
        tri(i, i + 1) = beta[static_cast<size_t>(i)];
        tri(i + 1, i) = beta[static_cast<size_t>(i)];
      }
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> small(tri);

    auto ritz_vector = [&](int which) {
      VectorXcd r = VectorXcd::Zero(dim);
      for (int i = 0; i < m; ++i)
        r += small.eigenvectors()(i, which) * basis[static_cast<size_t>(i)];
      r.normalize();
      return r;
    };

    VectorXcd psi0 = ritz_vector(0);
    const double l0 = small.eigenvalues()(0);
    const double l1 = m > 1 ? small.eigenvalues()(1) : l0;
    const double resid = (apply_nni(spec, psi0) - l0 * psi0).norm();

    out.lambda0 = l0;
    out.lambda1 = l1;
    out.psi0 = psi0;
    out.iterations += m;
    out.residual = resid;
    if (resid <= tol * scale && m > 1) {
      // Also require the first excited Ritz value to be settled.
      VectorXcd psi1 = ritz_vector(1);
      const double resid1 = (apply_nni(spec, psi1) - l1 * psi1).norm();
      if (resid1 <= 100.0 * tol * scale) return out;
    }
    start = psi0;
  }
  throw NumericError("Lanczos did not converge within the restart budget");
}

LBRSplit lbr_split(const NNISpec& spec, const EigenSystem& eig, int j, int l) {
  const int d = spec.geometry.d;
  if (l < 0) throw RangeError("overlap parameter must be non-negative");
  if (!(1 + l <= j && j <= d - 2 - l))
    throw RangeError("(j,l) outside the admissible range 1+l <= j <= d-2-l");

  const long long dim = spec.geometry.dense_dim();
  MatrixXcd sum_l = MatrixXcd::Zero(dim, dim);
  MatrixXcd sum_b = MatrixXcd::Zero(dim, dim);
  MatrixXcd sum_r = MatrixXcd::Zero(dim, dim);
  for (int k = 1; k <= d - 1; ++k) {
    MatrixXcd term = bond_term(spec, k);
    if (k <= j - l - 2)
      sum_l += term;
    else if (k <= j + l + 1)
      sum_b += term;
    else
      sum_r += term;
  }

  const VectorXcd psi0 = eig.ground_state();
  auto make_part = [&](MatrixXcd m, Interval support, double* shift) {
    *shift = std::real(psi0.dot(m * psi0));
    m -= *shift * MatrixXcd::Identity(dim, dim);
    LocalOperator op;
    op.geometry = spec.geometry;
    op.support = support.clipped(1, d);
    if (!op.support.valid()) op.support = Interval{1, 1};
    op.matrix = std::move(m);
    op.refresh_norm();
    op.self_adjoint = true;
    return op;
  };

  LBRSplit split;
  split.j = j;
  split.l = l;
  split.h_left = make_part(std::move(sum_l), Interval{1, j - l - 1},
                           &split.shift_left);
  split.h_bulk = make_part(std::move(sum_b), Interval{j - l - 1, j + l + 2},
                           &split.shift_bulk);
  split.h_right = make_part(std::move(sum_r), Interval{j + l + 2, d},
                            &split.shift_right);
  return split;
}

InteractionConstants interaction_constants(const NNISpec& spec) {
  spec.validate();
  InteractionConstants out;
  const auto& g = spec.geometry;
  for (int k = 0; k + 1 < g.d; ++k) {
    const int n_k = g.dims[static_cast<size_t>(k)];
    const int n_k1 = g.dims[static_cast<size_t>(k + 1)];
    const MatrixXcd& phi = spec.couplings[static_cast<size_t>(k)];
    MatrixXcd hk = kron(spec.site_terms[static_cast<size_t>(k)],
                        MatrixXcd::Identity(n_k1, n_k1));
    MatrixXcd hk1 = kron(MatrixXcd::Identity(n_k, n_k),
                         spec.site_terms[static_cast<size_t>(k + 1)]);
    out.coupling_norms.push_back(operator_norm(phi));
    out.comm_right_norms.push_back(operator_norm(phi * hk1 - hk1 * phi));
    out.comm_left_norms.push_back(operator_norm(hk * phi - phi * hk));
  }
  out.J = 0.0;
  for (double v : out.coupling_norms) out.J = std::max(out.J, v);
  for (double v : out.comm_right_norms) out.J = std::max(out.J, v);
  for (double v : out.comm_left_norms) out.J = std::max(out.J, v);
  return out;
}

NNISpec tfi_chain(int d, double h, double g) {
  if (d < 2) throw ValidationError("chain needs at least 2 sites");
  MatrixXcd x(2, 2), z(2, 2);
  x << 0, 1, 1, 0;
  z << 1, 0, 0, -1;
  NNISpec spec;
  spec.geometry = SiteGeometry::uniform(d, 2);
  spec.site_terms.assign(static_cast<size_t>(d), -h * x);
  spec.couplings.assign(static_cast<size_t>(d - 1), -g * kron(z, z));
  spec.model_name = "tfi";
  spec.parameters = {{"h", h}, {"g", g}};
  spec.validate();
  return spec;
}

NNISpec xxz_chain(int d, double delta_z) {
  if (d < 2) throw ValidationError("chain needs at least 2 sites");
  MatrixXcd sx(2, 2), sy(2, 2), sz(2, 2);
  sx << 0, 0.5, 0.5, 0;
  sy << 0, cdouble(0, -0.5), cdouble(0, 0.5), 0;
  sz << 0.5, 0, 0, -0.5;
  NNISpec spec;
  spec.geometry = SiteGeometry::uniform(d, 2);
  spec.site_terms.assign(static_cast<size_t>(d), MatrixXcd::Zero(2, 2));
  spec.couplings.assign(
      static_cast<size_t>(d - 1),
      kron(sx, sx) + kron(sy, sy) + delta_z * kron(sz, sz));
  spec.model_name = "xxz";
  spec.parameters = {{"delta_z", delta_z}};
  spec.validate();
  return spec;
}

NNISpec truncated_oscillator_chain(int d, int n_levels, double coupling) {
  if (d < 2) throw ValidationError("chain needs at least 2 sites");
  if (n_levels < 2) throw ValidationError("need at least 2 levels per site");
  MatrixXcd h = MatrixXcd::Zero(n_levels, n_levels);
  for (int n = 0; n < n_levels; ++n) h(n, n) = n + 0.5;
  // x = (a + a^dag)/sqrt(2) on the lowest n_levels states.
  MatrixXcd x = MatrixXcd::Zero(n_levels, n_levels);
  for (int n = 0; n + 1 < n_levels; ++n) {
    const double v = std::sqrt((n + 1) / 2.0);
    x(n, n + 1) = v;
    x(n + 1, n) = v;
  }
  NNISpec spec;
  spec.geometry = SiteGeometry::uniform(d, n_levels);
  spec.site_terms.assign(static_cast<size_t>(d), h);
  spec.couplings.assign(static_cast<size_t>(d - 1), coupling * kron(x, x));
  spec.model_name = "oscillator";
  spec.parameters = {{"n_levels", static_cast<double>(n_levels)},
                     {"coupling", coupling}};
  spec.validate();
  return spec;
}

void save_nni_config(const NNISpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ResourceError("cannot open for writing: " + path);
  out << "model = " << spec.model_name << "\n";
  out << "d = " << spec.geometry.d << "\n";
  for (const auto& [key, value] : spec.parameters)
    out << "model." << key << " = " << format_double(value) << "\n";
}

NNISpec build_model(const std::string& name, int d,
                    const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key, double fallback) {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  if (name == "tfi") return tfi_chain(d, get("h", 2.0), get("g", 1.0));
  if (name == "xxz") return xxz_chain(d, get("delta_z", 0.5));
  if (name == "oscillator")
    return truncated_oscillator_chain(
        d, static_cast<int>(get("n_levels", 3.0)), get("coupling", 0.2));
  throw ConfigError("unknown model: " + name);
}

}  // namespace qchain
