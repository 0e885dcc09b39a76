#include "qchain/common.hpp"

#include <cstdio>

#include <Eigen/Eigenvalues>

namespace qchain {

double operator_norm(const MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  // ||m|| = sqrt(lambda_max(m^* m)); the Hermitian path avoids the cost and
  // complex-support quirks of a full SVD.
  MatrixXcd gram = m.adjoint() * m;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram,
                                              Eigen::EigenvaluesOnly);
  double top = es.eigenvalues().maxCoeff();
  return top > 0.0 ? std::sqrt(top) : 0.0;
}

double vector_norm(const VectorXcd& v) { return v.norm(); }

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return std::string(buf);
}

std::string format_interval(const Interval& iv) {
  return "[" + std::to_string(iv.a) + "," + std::to_string(iv.b) + "]";
}

}  // namespace qchain
