#include <doctest.h>

#include <cmath>
#include <random>

#include "edgeflow/error.hpp"
#include "edgeflow/objectives.hpp"
#include "support.hpp"

using namespace edgeflow;
using namespace edgeflow::testing;

namespace {

std::vector<ObjectiveSpec> sample_variants(std::mt19937_64& rng, int n) {
  const Eigen::MatrixXd b = random_matrix(rng, n, n);
  objective::Quadratic q{b * b.transpose(), random_vector(rng, n), 0.7};
  return {objective::Zero{}, objective::SquaredDistance{random_vector(rng, n), 1.5}, q, objective::ExpSum{}};
}

}  // namespace

TEST_CASE("objective values") {
  CHECK(value(objective::SquaredDistance{Eigen::Vector2d(2, 2)}, Eigen::Vector2d(2, 2)) == 0.0);
  CHECK(value(objective::SquaredDistance{Eigen::Vector2d(-3, -3)}, Eigen::Vector2d(0, 0)) == 18.0);
  CHECK(value(objective::Zero{}, Eigen::Vector3d(1, -4, 9)) == 0.0);
  CHECK(value(objective::ExpSum{}, Eigen::Vector2d(0, 0)) == 2.0);
  CHECK(value(objective::Quadratic{Eigen::Matrix2d::Identity(), Eigen::Vector2d(1, 0), 3.0}, Eigen::Vector2d(1, 2)) ==
        9.0);
}

TEST_CASE("objective gradients") {
  CHECK(gradient(objective::SquaredDistance{Eigen::Vector2d::Zero()}, Eigen::Vector2d(1, 2)) == Eigen::Vector2d(2, 4));
  const Eigen::VectorXd g = gradient(objective::ExpSum{}, Eigen::Vector2d(0, 1));
  CHECK(g(0) == 1.0);
  CHECK(g(1) == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
  const Eigen::Vector3d x(0.3, -1.2, 4.0);
  CHECK(gradient(objective::Quadratic{Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), 0.0}, x) == 2.0 * x);
  CHECK(gradient(objective::Zero{}, x) == Eigen::Vector3d::Zero());
}

TEST_CASE("objective hessians") {
  CHECK(hessian(objective::ExpSum{}, Eigen::Vector2d::Zero()) == Eigen::Matrix2d::Identity());
  Eigen::Matrix2d q;
  q << 2, 0.5, 0.5, 1;
  const objective::Quadratic quad{q, Eigen::Vector2d(1, 1), 0.0};
  CHECK(hessian(quad, Eigen::Vector2d(3, -7)) == 2.0 * q);
  CHECK(hessian(quad, Eigen::Vector2d(-1, 0)) == 2.0 * q);
  CHECK(hessian(objective::Zero{}, Eigen::Vector2d(1, 1)) == Eigen::Matrix2d::Zero());
  CHECK(hessian(objective::SquaredDistance{Eigen::Vector2d::Zero(), 3.0}, Eigen::Vector2d(1, 1)) ==
        6.0 * Eigen::Matrix2d::Identity());
}

TEST_CASE("dimension mismatches throw") {
  const objective::SquaredDistance f{Eigen::Vector2d(1, 1)};
  CHECK_THROWS_AS(value(f, Eigen::Vector3d::Zero()), Error);
  CHECK_THROWS_AS(gradient(f, Eigen::Vector3d::Zero()), Error);
  CHECK_THROWS_AS(hessian(objective::Quadratic{Eigen::Matrix2d::Identity(), Eigen::Vector2d::Zero(), 0},
                          Eigen::Vector3d::Zero()),
                  Error);
}

TEST_CASE("validate rejects malformed parameters") {
  Eigen::Matrix2d indefinite;
  indefinite << 1, 0, 0, -1;
  Eigen::Matrix2d asymmetric;
  asymmetric << 1, 2, 0, 1;
  CHECK_THROWS_AS(validate(objective::Quadratic{indefinite, Eigen::Vector2d::Zero(), 0}, 2), Error);
  CHECK_THROWS_AS(validate(objective::Quadratic{asymmetric, Eigen::Vector2d::Zero(), 0}, 2), Error);
  CHECK_THROWS_AS(validate(objective::SquaredDistance{Eigen::Vector2d::Zero(), -1.0}, 2), Error);
  CHECK_THROWS_AS(validate(objective::SquaredDistance{Eigen::Vector3d::Zero(), 1.0}, 2), Error);
  CHECK_NOTHROW(validate(objective::Quadratic{Eigen::Matrix2d::Zero(), Eigen::Vector2d::Zero(), 0}, 2));
  CHECK_NOTHROW(validate(objective::ExpSum{}, 5));
}

TEST_CASE("fd_check") {
  std::mt19937_64 rng(21);
  SUBCASE("all variants at random points") {
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 1 + static_cast<int>(rng() % 4);
      for (const auto& spec : sample_variants(rng, n)) {
        CHECK(fd_check(spec, random_vector(rng, n)) <= 1e-6);
      }
    }
  }
  SUBCASE("zero objective is exact") { CHECK(fd_check(objective::Zero{}, Eigen::Vector3d(1, 2, 3)) == 0.0); }
  SUBCASE("quadratic is exact up to rounding") {
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::MatrixXd b = random_matrix(rng, 3, 3);
      const objective::Quadratic q{b * b.transpose(), random_vector(rng, 3, -1, 1), 0.0};
      CHECK(fd_check(q, random_vector(rng, 3, -1, 1), 1e-4) <= 1e-9);
    }
  }
}

TEST_CASE("convexity spot-check") {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    for (const auto& spec : sample_variants(rng, n)) {
      const Eigen::VectorXd x = random_vector(rng, n);
      const Eigen::VectorXd y = random_vector(rng, n);
      const double a = unit(rng);
      CHECK(value(spec, a * x + (1 - a) * y) <= a * value(spec, x) + (1 - a) * value(spec, y) + 1e-10);
    }
  }
}

TEST_CASE("stacked sum equals agent-wise sum") {
  std::mt19937_64 rng(23);
  const int n = 2;
  const auto specs = sample_variants(rng, n);
  const Eigen::VectorXd x = random_vector(rng, 4 * n);
  double agent_wise = 0.0;
  for (int i = 0; i < 4; ++i) agent_wise += value(specs[static_cast<std::size_t>(i)], x.segment(i * n, n));
  CHECK(total_value(specs, x, n) == agent_wise);
  const Eigen::VectorXd g = stacked_gradient(specs, x, n);
  const Eigen::MatrixXd h = stacked_hessian(specs, x, n);
  for (int i = 0; i < 4; ++i) {
    CHECK(g.segment(i * n, n) == gradient(specs[static_cast<std::size_t>(i)], x.segment(i * n, n)));
    CHECK(h.block(i * n, i * n, n, n) == hessian(specs[static_cast<std::size_t>(i)], x.segment(i * n, n)));
  }
  CHECK_THROWS_AS(total_value(specs, Eigen::VectorXd::Zero(7), n), Error);
}
