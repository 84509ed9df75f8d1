#pragma once

#include <Eigen/Core>


#include <cassert>
#include <vector>

namespace tetherplan {

/// Square banded matrix with in-place LU factorisation (no pivoting).
///
/// Row ordering of the callers must keep the diagonal pivots away from zero;
/// a vanishing pivot raises SingularSystem. Both solves run in O(n * bw^2).
class BandedSystem {
 public:
  BandedSystem() = default;
  BandedSystem(int n, int lower, int upper);

  int size() const { return n_; }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  void factorize();
  bool factorized() const { return factorized_; }

  /// Solves A X = B in place.
  void solve(Eigen::MatrixXd& b) const;
  /// Solves A^T X = B in place.
  void solve_transposed(Eigen::MatrixXd& b) const;

 private:
  std::size_t index(int i, int j) const {
    assert(i >= 0 && j >= 0 && i < n_ && j < n_ && i - j <= lower_ && j - i <= upper_);
    return static_cast<std::size_t>(i - j + upper_) * static_cast<std::size_t>(n_) +
           static_cast<std::size_t>(j);
  }

  int n_ = 0;
  int lower_ = 0;
  int upper_ = 0;
  bool factorized_ = false;
  std::vector<double> data_;
};

}  // namespace tetherplan
