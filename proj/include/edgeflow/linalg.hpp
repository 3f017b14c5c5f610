#pragma once

#include <Eigen/Dense>

namespace edgeflow::linalg {

// Singular values at or below max(rows, cols) * eps * sigma_max count as zero.
double rank_tolerance(const Eigen::MatrixXd& a, double sigma_max);

int numerical_rank(const Eigen::MatrixXd& a);

// Minimum-norm least-squares solution of a x = b via SVD, with the same
// rank cutoff as numerical_rank.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

// a ⊗ I_n.
Eigen::MatrixXd kron_identity(const Eigen::MatrixXd& a, int n);

}  // namespace edgeflow::linalg
