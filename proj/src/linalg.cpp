#include "edgeflow/linalg.hpp"

#include <algorithm>
#include <limits>

namespace edgeflow::linalg {

double rank_tolerance(const Eigen::MatrixXd& a, double sigma_max) {
  return static_cast<double>(std::max(a.rows(), a.cols())) * std::numeric_limits<double>::epsilon() *
         sigma_max;
}

int numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double tol = rank_tolerance(a, s(0));
  return static_cast<int>((s.array() > tol).count());
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  if (a.size() == 0) return Eigen::VectorXd::Zero(a.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return Eigen::VectorXd::Zero(a.cols());
  svd.setThreshold(rank_tolerance(a, s(0)) / s(0));
  return svd.solve(b);
}

Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& a, int n) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(a.rows() * n, a.cols() * n);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (Eigen::Index c = 0; c < a.cols(); ++c) {
      if (a(r, c) != 0.0) out.block(r * n, c * n, n, n) = a(r, c) * Eigen::MatrixXd::Identity(n, n);
    }
  }
  return out;
}

}  // namespace edgeflow::linalg
