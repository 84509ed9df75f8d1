#include "tetherplan/lbfgs.hpp"

#include "tetherplan/common.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace tetherplan {
namespace {

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd two_loop(const std::deque<Pair>& mem, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = -g;
  std::vector<double> alpha(mem.size());
  for (std::size_t k = mem.size(); k-- > 0;) {
    alpha[k] = mem[k].rho * mem[k].s.dot(q);
    q -= alpha[k] * mem[k].y;
  }
  if (!mem.empty()) {
    const Pair& last = mem.back();
    q *= last.s.dot(last.y) / last.y.squaredNorm();
  }
  for (std::size_t k = 0; k < mem.size(); ++k) {
    const double beta = mem[k].rho * mem[k].y.dot(q);
    q += (alpha[k] - beta) * mem[k].s;
  }
  return q;
}

double scaled_norm(const Eigen::VectorXd& g, const Eigen::VectorXd& x) {
  return g.norm() / std::max(1.0, x.norm());
}

}  // namespace

const char* to_string(LbfgsStatus status) noexcept {
  switch (status) {
    case LbfgsStatus::Converged: return "converged";
    case LbfgsStatus::MaxIterations: return "max_iterations";
    case LbfgsStatus::LineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

LbfgsResult minimize_lbfgs(const Objective& f, Eigen::VectorXd x0, const LbfgsParams& params,
                           const IterationCallback& on_iteration) {
  if (params.memory < 1 || params.max_iterations < 0 || params.max_linesearch < 1) {
    throw Error(ErrorCode::InvalidArgument, "invalid L-BFGS parameters");
  }
  LbfgsResult res;
  res.x = std::move(x0);
  Eigen::VectorXd g(res.x.size());
  res.value = f(res.x, g);
  res.evaluations = 1;
  if (!std::isfinite(res.value) || !g.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "objective is not finite at the initial point");
  }

  std::deque<Pair> mem;
  Eigen::VectorXd x_new(res.x.size());
  Eigen::VectorXd g_new(res.x.size());

  for (int it = 0;; ++it) {
    res.gradient_norm = scaled_norm(g, res.x);
    if (res.gradient_norm < params.gradient_tolerance) {
      res.status = LbfgsStatus::Converged;
      return res;
    }
    if (it >= params.max_iterations) {
      res.status = LbfgsStatus::MaxIterations;
      return res;
    }

    Eigen::VectorXd d = two_loop(mem, g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      mem.clear();
      d = -g;
      slope = -g.squaredNorm();
    }

    // Bracketing search for a step meeting sufficient decrease and the weak
    // curvature condition.
    double step = mem.empty() ? std::min(1.0, 1.0 / d.norm()) : 1.0;
    double lo = 0.0;
    double hi = std::numeric_limits<double>::infinity();
    bool accepted = false;
    double f_new = 0.0;
    for (int ls = 0; ls < params.max_linesearch; ++ls) {
      x_new = res.x + step * d;
      f_new = f(x_new, g_new);
      ++res.evaluations;
      if (!std::isfinite(f_new) || !g_new.allFinite() ||
          f_new > res.value + params.armijo * step * slope) {
        hi = step;
      } else if (g_new.dot(d) < params.curvature * slope) {
        lo = step;
      } else {
        accepted = true;
        break;
      }
      step = std::isinf(hi) ? 2.0 * lo : 0.5 * (lo + hi);
    }
    if (!accepted) {
      res.status = LbfgsStatus::LineSearchFailure;
      return res;
    }

    Pair pair{x_new - res.x, g_new - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (sy > 1e-12 * pair.y.squaredNorm() && sy > 0.0) {
      pair.rho = 1.0 / sy;
      mem.push_back(std::move(pair));
      if (static_cast<int>(mem.size()) > params.memory) mem.pop_front();
    }
    const double previous = res.value;
    res.x = x_new;
    g = g_new;
    res.value = f_new;
    res.iterations = it + 1;
    if (on_iteration) on_iteration(res.iterations, res.x, res.value, step);

    if (params.relative_tolerance > 0.0 &&
        previous - res.value <= params.relative_tolerance * std::max(1.0, std::abs(res.value))) {
      res.gradient_norm = scaled_norm(g, res.x);
      res.status = LbfgsStatus::Converged;
      return res;
    }
  }
}

}  // namespace tetherplan
