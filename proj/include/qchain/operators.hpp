#pragma once

#include "qchain/common.hpp"
#include "qchain/tensor.hpp"

namespace qchain {

// Dense operator on the full chain space together with its declared
// contiguous support. The matrix acts as the identity outside the support.
struct LocalOperator {
  SiteGeometry geometry;
  MatrixXcd matrix;
  Interval support;
  double norm = 0.0;
  bool self_adjoint = false;

  // Embeds a block on [support.a, support.b] as I (x) block (x) I.
  static LocalOperator embed(const SiteGeometry& g, const MatrixXcd& block,
                             Interval support);
  static LocalOperator zero(const SiteGeometry& g);
  static LocalOperator identity(const SiteGeometry& g);

  // The support-block content, recovered by averaging the diagonal blocks
  // over the complement (exact for genuinely local operators).
  MatrixXcd support_block() const;

  void refresh_norm();
  void refresh_self_adjoint(double tol = 1e-10);
};

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);

// Conditional expectation onto operators supported on target: compress the
// complement against the maximally mixed state and re-embed. Contracts the
// operator norm and fixes operators already supported inside target.
MatrixXcd compress_to_interval(const SiteGeometry& g, const MatrixXcd& full,
                               Interval target);

}  // namespace qchain
