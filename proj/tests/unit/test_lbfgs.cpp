#include "tetherplan/lbfgs.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

using namespace tetherplan;
using doctest::Approx;

namespace {

double rosenbrock(const Eigen::VectorXd& x, Eigen::VectorXd& g) {
  double f = 0.0;
  g.setZero(x.size());
  for (Eigen::Index i = 0; i + 1 < x.size(); ++i) {
    const double a = x(i + 1) - x(i) * x(i), b = 1.0 - x(i);
    f += 100.0 * a * a + b * b;
    g(i) += -400.0 * a * x(i) - 2.0 * b;
    g(i + 1) += 200.0 * a;
  }
  return f;
}

}  // namespace

TEST_CASE("minimises a convex quadratic to its closed-form solution") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd M(6, 6);
  for (Eigen::Index i = 0; i < M.size(); ++i) M.data()[i] = n(rng);
  const Eigen::MatrixXd A = M * M.transpose() + Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd b(6);
  for (int i = 0; i < 6; ++i) b(i) = n(rng);
  auto f = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = A * x - b;
    return 0.5 * x.dot(A * x) - b.dot(x);
  };
  LbfgsParams p;
  p.gradient_tolerance = 1e-10;
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(6), p);
  CHECK(r.status == LbfgsStatus::Converged);
  CHECK((r.x - A.ldlt().solve(b)).norm() < 1e-8);
}

TEST_CASE("solves Rosenbrock with monotone accepted steps") {
  std::vector<double> values;
  LbfgsParams p;
  p.gradient_tolerance = 1e-8;
  p.max_iterations = 2000;
  Eigen::VectorXd x0(4);
  x0 << -1.2, 1.0, -1.2, 1.0;
  Eigen::VectorXd g0;
  values.push_back(rosenbrock(x0, g0));
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, p,
                                       [&](int, const Eigen::VectorXd&, double v, double step) {
                                         CHECK(step > 0.0);
                                         values.push_back(v);
                                       });
  CHECK(r.status == LbfgsStatus::Converged);
  CHECK((r.x - Eigen::VectorXd::Ones(4)).norm() < 1e-5);
  for (std::size_t i = 1; i < values.size(); ++i) CHECK(values[i] <= values[i - 1]);
  CHECK(r.iterations == static_cast<int>(values.size()) - 1);
}

TEST_CASE("reports the iteration cap") {
  LbfgsParams p;
  p.max_iterations = 3;
  Eigen::VectorXd x0(2);
  x0 << -1.2, 1.0;
  const LbfgsResult r = minimize_lbfgs(rosenbrock, x0, p);
  CHECK(r.status == LbfgsStatus::MaxIterations);
  CHECK(r.iterations == 3);
  Eigen::VectorXd g;
  CHECK(r.value == Approx(rosenbrock(r.x, g)));
}

TEST_CASE("line search fails cleanly on an inconsistent gradient") {
  // The reported gradient points uphill, so no step can decrease f.
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = -x;
    return x.squaredNorm();
  };
  Eigen::VectorXd x0 = Eigen::VectorXd::Constant(3, 1.0);
  const LbfgsResult r = minimize_lbfgs(f, x0);
  CHECK(r.status == LbfgsStatus::LineSearchFailure);
  CHECK(r.value <= 3.0);
}

TEST_CASE("non-finite values shorten the step") {
  // f is infinite for x > 2; the minimum at 1.5 sits close to the wall.
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(1);
    if (x(0) > 2.0) return std::numeric_limits<double>::infinity();
    g(0) = 2.0 * (x(0) - 1.5);
    return (x(0) - 1.5) * (x(0) - 1.5);
  };
  Eigen::VectorXd x0(1);
  x0 << -50.0;
  const LbfgsResult r = minimize_lbfgs(f, x0);
  CHECK(r.status == LbfgsStatus::Converged);
  CHECK(r.x(0) == Approx(1.5).epsilon(1e-5));
}

TEST_CASE("already stationary start converges immediately") {
  auto f = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * x;
    return x.squaredNorm();
  };
  const LbfgsResult r = minimize_lbfgs(f, Eigen::VectorXd::Zero(5));
  CHECK(r.status == LbfgsStatus::Converged);
  CHECK(r.iterations == 0);
}
