#include "tetherplan/banded_system.hpp"

#include "tetherplan/common.hpp"

#include <algorithm>
#include <cmath>

namespace tetherplan {

BandedSystem::BandedSystem(int n, int lower, int upper)
    : n_(n),
      lower_(lower),
      upper_(upper),
      data_(static_cast<std::size_t>(lower + upper + 1) * static_cast<std::size_t>(n), 0.0) {
  if (n <= 0 || lower < 0 || upper < 0) {
    throw Error(ErrorCode::InvalidArgument, "banded system needs positive size");
  }
}

void BandedSystem::factorize() {
  auto& a = *this;
  for (int k = 0; k < n_; ++k) {
    const double pivot = a(k, k);
    if (!std::isfinite(pivot) || pivot == 0.0) {
      throw Error(ErrorCode::SingularSystem, "zero pivot in banded elimination");
    }
    const int i_end = std::min(k + lower_, n_ - 1);
    const int j_end = std::min(k + upper_, n_ - 1);
    for (int i = k + 1; i <= i_end; ++i) {
      if (a(i, k) != 0.0) a(i, k) /= pivot;
    }
    for (int j = k + 1; j <= j_end; ++j) {
      const double akj = a(k, j);
      if (akj == 0.0) continue;
      for (int i = k + 1; i <= i_end; ++i) {
        if (a(i, k) != 0.0) a(i, j) -= a(i, k) * akj;
      }
    }
  }
  factorized_ = true;
}

void BandedSystem::solve(Eigen::MatrixXd& b) const {
  const auto& a = *this;
  for (int j = 0; j < n_; ++j) {
    const int i_end = std::min(j + lower_, n_ - 1);
    for (int i = j + 1; i <= i_end; ++i) {
      if (a(i, j) != 0.0) b.row(i) -= a(i, j) * b.row(j);
    }
  }
  for (int j = n_ - 1; j >= 0; --j) {
    b.row(j) /= a(j, j);
    const int i_begin = std::max(0, j - upper_);
    for (int i = i_begin; i < j; ++i) {
      if (a(i, j) != 0.0) b.row(i) -= a(i, j) * b.row(j);
    }
  }
}

void BandedSystem::solve_transposed(Eigen::MatrixXd& b) const {
  const auto& a = *this;
  // U^T y = b
  for (int j = 0; j < n_; ++j) {
    b.row(j) /= a(j, j);
    const int i_end = std::min(j + upper_, n_ - 1);
    for (int i = j + 1; i <= i_end; ++i) {
      if (a(j, i) != 0.0) b.row(i) -= a(j, i) * b.row(j);
    }
  }
  // L^T x = y (unit diagonal)
  for (int j = n_ - 1; j >= 0; --j) {
    const int i_begin = std::max(0, j - lower_);
    for (int i = i_begin; i < j; ++i) {
      if (a(j, i) != 0.0) b.row(i) -= a(j, i) * b.row(j);
    }
  }
}

}  // namespace tetherplan
