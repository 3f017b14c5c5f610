#include "edgeflow/constraints.hpp"

#include <string>

#include "edgeflow/error.hpp"
#include "edgeflow/linalg.hpp"

namespace edgeflow {

namespace {

std::string edge_label(int i, int j) {
  return "(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ")";
}

}  // namespace

ProjectedConstraint project_constraint(const EdgeConstraint& c) {
  const Eigen::Index d = c.A.rows();
  const Eigen::Index n = c.A.cols();
  if (d < 1 || n < 1 || d > n) {
    throw Error(ErrorCode::DimensionMismatch,
                "edge " + edge_label(c.i, c.j) + ": A must be d x n with 1 <= d <= n");
  }
  if (c.b.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "edge " + edge_label(c.i, c.j) + ": b length != rows of A");
  }

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.A);
  const auto& sigma = svd.singularValues();
  if (sigma(0) == 0.0 || sigma(d - 1) <= linalg::rank_tolerance(c.A, sigma(0))) {
    throw Error(ErrorCode::RankDeficient, "edge " + edge_label(c.i, c.j) + ": A A' is singular");
  }

  // A' = QR gives A'(AA')⁻¹A = QQ' and A'(AA')⁻¹b = Q R'⁻¹ b without forming
  // the inverse, so P stays idempotent to rounding regardless of cond(A).
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(c.A.transpose());
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, d);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(d, d).triangularView<Eigen::Upper>();
  const Eigen::VectorXd y = r.transpose().triangularView<Eigen::Lower>().solve(c.b);

  ProjectedConstraint out;
  out.P = q * q.transpose();
  out.P = 0.5 * (out.P + out.P.transpose()).eval();
  out.b_bar = q * y;
  return out;
}

EdgeConstraint mirror(const EdgeConstraint& c) { return EdgeConstraint{c.j, c.i, c.A, -c.b}; }

StackedSystem stack(const Graph& g, std::span<const EdgeConstraint> constraints, int n) {
  if (n < 1) throw Error(ErrorCode::DimensionMismatch, "state dimension must be positive");
  if (static_cast<int>(constraints.size()) < g.edge_count()) {
    const auto& e = g.edge(static_cast<int>(constraints.size()));
    throw Error(ErrorCode::MissingEdgeConstraint, "no constraint for edge " + edge_label(e.tail, e.head));
  }
  if (static_cast<int>(constraints.size()) > g.edge_count()) {
    throw Error(ErrorCode::MissingEdgeConstraint, "more constraints than edges");
  }

  StackedSystem s;
  s.graph = g;
  s.n = n;
  const int mbar = g.edge_count();
  s.P_bar = Eigen::MatrixXd::Zero(mbar * n, mbar * n);
  s.b_bar = Eigen::VectorXd::Zero(mbar * n);
  s.blocks.reserve(static_cast<std::size_t>(mbar));
  for (int k = 0; k < mbar; ++k) {
    const auto& e = g.edge(k);
    const auto& c = constraints[static_cast<std::size_t>(k)];
    if (c.i == e.head && c.j == e.tail) {
      throw Error(ErrorCode::OrientationMismatch,
                  "constraint " + edge_label(c.i, c.j) + " listed against edge " + edge_label(e.tail, e.head));
    }
    if (c.i != e.tail || c.j != e.head) {
      throw Error(ErrorCode::MissingEdgeConstraint, "no constraint for edge " + edge_label(e.tail, e.head));
    }
    if (c.dim() != n) {
      throw Error(ErrorCode::DimensionMismatch, "edge " + edge_label(c.i, c.j) + ": A must have n columns");
    }
    auto block = project_constraint(c);
    s.P_bar.block(k * n, k * n, n, n) = block.P;
    s.b_bar.segment(k * n, n) = block.b_bar;
    s.blocks.push_back(std::move(block));
  }
  s.H_bar = linalg::kron_identity(incidence_matrix(g), n);
  return s;
}

Eigen::VectorXd residual(const StackedSystem& s, const Eigen::VectorXd& x) {
  if (x.size() != s.state_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(x.size()) + " entries, expected " +
                                                  std::to_string(s.state_dim()));
  }
  return s.P_bar * (s.H_bar * x - s.b_bar);
}

double agreement_error(std::span<const EdgeConstraint> constraints, const Eigen::VectorXd& x, int n) {
  double total = 0.0;
  for (const auto& c : constraints) {
    if ((c.i + 1) * n > x.size() || (c.j + 1) * n > x.size() || c.dim() != n) {
      throw Error(ErrorCode::DimensionMismatch, "edge " + edge_label(c.i, c.j) + " does not fit the state");
    }
    const Eigen::VectorXd gap = c.A * (x.segment(c.i * n, n) - x.segment(c.j * n, n)) - c.b;
    total += gap.squaredNorm();
  }
  return 0.5 * total;
}

WellConfiguredReport well_configured(const StackedSystem& s) {
  WellConfiguredReport report;
  if (s.edge_count() == 0) {
    report.ok = true;
    return report;
  }
  const Eigen::MatrixXd ph = s.constraint_matrix();
  report.rank_PH = linalg::numerical_rank(ph);
  report.rank_HPH = linalg::numerical_rank(s.H_bar.transpose() * ph);
  report.ok = report.rank_PH == report.rank_HPH;
  return report;
}

FeasibilityResult feasible_point(const StackedSystem& s, double tolerance) {
  FeasibilityResult out;
  if (s.edge_count() == 0) {
    out.x = Eigen::VectorXd::Zero(s.state_dim());
    out.feasible = true;
    return out;
  }
  out.x = linalg::least_squares(s.constraint_matrix(), s.P_bar * s.b_bar);
  out.residual_norm = residual(s, out.x).norm();
  out.feasible = out.residual_norm <= tolerance;
  return out;
}

}  // namespace edgeflow
