#include "tetherplan/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace tetherplan {
namespace {

constexpr int kBand = 6;

// d^k/dt^k t^j = j! / (j - k)! t^(j - k)
double falling_factorial(int j, int k) {
  double f = 1.0;
  for (int i = 0; i < k; ++i) f *= static_cast<double>(j - i);
  return f;
}

}  // namespace

double wrap_angle(double angle) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double wrapped = std::remainder(angle, two_pi);
  if (wrapped <= -std::numbers::pi) wrapped += two_pi;
  return wrapped;
}

Eigen::Matrix<double, 1, 6> polynomial_basis(double t, int order) {
  Eigen::Matrix<double, 1, 6> row = Eigen::Matrix<double, 1, 6>::Zero();
  for (int j = order; j < 6; ++j) {
    row(j) = falling_factorial(j, order) * std::pow(t, j - order);
  }
  return row;
}

UniformPolyTrajectory UniformPolyTrajectory::construct(const Eigen::Matrix3Xd& waypoints,
                                                       double total_duration,
                                                       const BoundaryState& start,
                                                       const Vec3& goal_position,
                                                       const Vec3& goal_velocity) {
  const int n = static_cast<int>(waypoints.cols()) + 1;
  if (!(total_duration > 0.0) || !std::isfinite(total_duration)) {
    throw Error(ErrorCode::SingularSystem, "trajectory duration must be positive");
  }
  const double dt = total_duration / n;
  if (!(dt > 0.0)) throw Error(ErrorCode::SingularSystem, "segment duration underflow");

  const auto pos = polynomial_basis(dt, 0);
  const auto vel = polynomial_basis(dt, 1);
  const auto acc = polynomial_basis(dt, 2);
  const auto jrk = polynomial_basis(dt, 3);
  const auto snp = polynomial_basis(dt, 4);

  const int dim = 6 * n;
  UniformPolyTrajectory traj;
  traj.segments_ = n;
  traj.segment_duration_ = dt;
  traj.system_ = BandedSystem(dim, kBand, kBand);
  BandedSystem& a = traj.system_;
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(dim, 3);

  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  b.row(0) = start.position.transpose();
  b.row(1) = start.velocity.transpose();
  b.row(2) = start.acceleration.transpose();

  for (int i = 0; i < n - 1; ++i) {
    const int r = 6 * i + 3;
    const int c = 6 * i;
    // Derivative k of the basis vanishes below column k; skipping those keeps
    // every write inside the band.
    for (int k = 0; k < 6; ++k) {
      if (k >= 3) a(r + 0, c + k) = jrk(k);
      if (k >= 4) a(r + 1, c + k) = snp(k);
      a(r + 2, c + k) = pos(k);
      a(r + 3, c + k) = pos(k);
      if (k >= 1) a(r + 4, c + k) = vel(k);
      if (k >= 2) a(r + 5, c + k) = acc(k);
    }
    a(r + 0, c + 9) = -6.0;
    a(r + 1, c + 10) = -24.0;
    a(r + 3, c + 6) = -1.0;
    a(r + 4, c + 7) = -1.0;
    a(r + 5, c + 8) = -2.0;
    b.row(r + 2) = waypoints.col(i).transpose();
  }

  const int r = dim - 3;
  const int c = dim - 6;
  for (int k = 0; k < 6; ++k) {
    a(r + 0, c + k) = pos(k);
    a(r + 1, c + k) = vel(k);
    a(r + 2, c + k) = jrk(k);
  }
  b.row(r + 0) = goal_position.transpose();
  b.row(r + 1) = goal_velocity.transpose();

  a.factorize();
  a.solve(b);
  traj.coefficients_ = std::move(b);
  return traj;
}

UniformPolyTrajectory UniformPolyTrajectory::from_coefficients(const Eigen::MatrixXd& coefficients,
                                                               double segment_duration) {
  if (coefficients.rows() == 0 || coefficients.rows() % 6 != 0 || coefficients.cols() != 3) {
    throw Error(ErrorCode::InvalidArgument, "coefficient matrix must be 6N x 3");
  }
  if (!(segment_duration > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "segment duration must be positive");
  }
  UniformPolyTrajectory traj;
  traj.segments_ = static_cast<int>(coefficients.rows() / 6);
  traj.segment_duration_ = segment_duration;
  traj.coefficients_ = coefficients;
  return traj;
}

Vec3 UniformPolyTrajectory::evaluate_segment(int segment, double local_t, int order) const {
  if (segment < 0 || segment >= segments_) {
    throw Error(ErrorCode::OutOfDomain, "segment index out of range");
  }
  if (order < 0 || order > kMaxOrder) {
    throw Error(ErrorCode::InvalidArgument, "derivative order must lie in [0, 5]");
  }
  return (polynomial_basis(local_t, order) * coefficients_.middleRows<6>(6 * segment)).transpose();
}

Vec3 UniformPolyTrajectory::evaluate(double t, int order) const {
  const double total = total_duration();
  const double tol = 1e-12 * std::max(1.0, total);
  if (segments_ == 0 || t < -tol || t > total + tol) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << total << "]";
    throw Error(ErrorCode::OutOfDomain, os.str());
  }
  t = std::clamp(t, 0.0, total);
  const int seg = std::min(static_cast<int>(t / segment_duration_), segments_ - 1);
  return evaluate_segment(seg, t - seg * segment_duration_, order);
}

UniformPolyTrajectory::Gradient UniformPolyTrajectory::propagate_gradients(
    const Eigen::MatrixXd& dJ_dc, double dJ_dsegment_duration) const {
  if (!system_.factorized()) {
    throw Error(ErrorCode::InvalidArgument,
                "trajectory was not constructed from waypoints; no gradient map available");
  }
  if (dJ_dc.rows() != coefficients_.rows() || dJ_dc.cols() != 3) {
    throw Error(ErrorCode::InvalidArgument, "coefficient gradient has the wrong shape");
  }
  const int n = segments_;
  const double dt = segment_duration_;

  // Adjoint of A c = b: lambda = A^-T dJ/dc gives dJ/db = lambda and
  // dJ/d(dT) = explicit - lambda^T (dA/d(dT)) c.
  Eigen::MatrixXd adj = dJ_dc;
  system_.solve_transposed(adj);

  Gradient grad;
  grad.waypoints.resize(3, n - 1);
  for (int i = 0; i < n - 1; ++i) grad.waypoints.col(i) = adj.row(6 * i + 5).transpose();

  // Each row evaluating derivative k of segment i at dT contributes
  // derivative k + 1 when differentiated with respect to dT.
  double d_dt = dJ_dsegment_duration;
  for (int i = 0; i < n - 1; ++i) {
    const int r = 6 * i + 3;
    const auto ci = coefficients_.middleRows<6>(6 * i);
    const Eigen::RowVector3d vel = polynomial_basis(dt, 1) * ci;
    d_dt -= adj.row(r + 0).dot(polynomial_basis(dt, 4) * ci);
    d_dt -= adj.row(r + 1).dot(polynomial_basis(dt, 5) * ci);
    d_dt -= adj.row(r + 2).dot(vel);
    d_dt -= adj.row(r + 3).dot(vel);
    d_dt -= adj.row(r + 4).dot(polynomial_basis(dt, 2) * ci);
    d_dt -= adj.row(r + 5).dot(polynomial_basis(dt, 3) * ci);
  }
  {
    const int r = 6 * n - 3;
    const auto cl = coefficients_.middleRows<6>(6 * (n - 1));
    d_dt -= adj.row(r + 0).dot(polynomial_basis(dt, 1) * cl);
    d_dt -= adj.row(r + 1).dot(polynomial_basis(dt, 2) * cl);
    d_dt -= adj.row(r + 2).dot(polynomial_basis(dt, 4) * cl);
  }
  grad.total_duration = d_dt / n;
  return grad;
}

}  // namespace tetherplan
