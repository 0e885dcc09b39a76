#include "qchain/operators.hpp"

namespace qchain {

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (long long i = 0; i < a.rows(); ++i)
    for (long long j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

LocalOperator LocalOperator::embed(const SiteGeometry& g,
                                   const MatrixXcd& block, Interval support) {
  if (support.a < 1 || support.b > g.d || !support.valid())
    throw ValidationError("support interval out of range");
  const long long left = g.left_dim(support.a - 1);
  const long long mid = g.block_dim(support);
  const long long right = g.right_dim(support.b);
  if (block.rows() != mid || block.cols() != mid)
    throw ValidationError("block size does not match the support interval");
  LocalOperator op;
  op.geometry = g;
  op.support = support;
  op.matrix = kron(kron(MatrixXcd::Identity(left, left), block),
                   MatrixXcd::Identity(right, right));
  op.refresh_norm();
  op.refresh_self_adjoint();
  return op;
}

LocalOperator LocalOperator::zero(const SiteGeometry& g) {
  LocalOperator op;
  op.geometry = g;
  op.support = Interval{1, 1};
  op.matrix = MatrixXcd::Zero(g.dense_dim(), g.dense_dim());
  op.norm = 0.0;
  op.self_adjoint = true;
  return op;
}

LocalOperator LocalOperator::identity(const SiteGeometry& g) {
  LocalOperator op;
  op.geometry = g;
  op.support = Interval{1, 1};
  const long long dim = g.dense_dim();
  op.matrix = MatrixXcd::Identity(dim, dim);
  op.norm = 1.0;
  op.self_adjoint = true;
  return op;
}

MatrixXcd LocalOperator::support_block() const {
  return compress_to_interval(geometry, matrix, support);
}

void LocalOperator::refresh_norm() { norm = operator_norm(matrix); }

void LocalOperator::refresh_self_adjoint(double tol) {
  self_adjoint = operator_norm(matrix - matrix.adjoint()) <=
                 tol * std::max(1.0, norm);
}

MatrixXcd compress_to_interval(const SiteGeometry& g, const MatrixXcd& full,
                               Interval target) {
  if (target.a < 1 || target.b > g.d || !target.valid())
    throw ValidationError("target interval out of range");
  const long long left = g.left_dim(target.a - 1);
  const long long mid = g.block_dim(target);
  const long long right = g.right_dim(target.b);
  if (full.rows() != left * mid * right || full.cols() != full.rows())
    throw ValidationError("operator size does not match geometry");

  MatrixXcd block = MatrixXcd::Zero(mid, mid);
  for (long long l = 0; l < left; ++l)
    for (long long r = 0; r < right; ++r) {
      for (long long m = 0; m < mid; ++m) {
        const long long row = (l * mid + m) * right + r;
        for (long long mp = 0; mp < mid; ++mp) {
          const long long col = (l * mid + mp) * right + r;
          block(m, mp) += full(row, col);
        }
      }
    }
  block /= static_cast<double>(left * right);
  return block;
}

}  // namespace qchain
