#pragma once

#include <Eigen/Dense>

#include "cspi/model.hpp"

namespace cspi::fock {

// long double keeps the products of sqrt(n) matrix elements accurate to
// ~1e-13 for entries of size 1e6 (q = 4, n = 30).
using Matrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

/// Truncated single-mode Fock space spanned by |0>..|dim-1>. Products of k
/// ladder operators are exact on states n <= dim - 1 - k.
class FockSpace {
 public:
  explicit FockSpace(int dim);

  int dim() const { return dim_; }
  const Matrix& annihilation() const { return a_; }
  const Matrix& creation() const { return adag_; }
  Matrix identity() const;

  /// a^dag^m a^m
  Matrix normal_power(int m) const;
  /// a^m a^dag^m
  Matrix antinormal_power(int m) const;
  /// Symmetrized product: mean over all C(2m, m) arrangements of m creation
  /// and m annihilation operators.
  Matrix weyl_power(int m) const;

  /// {(a^dag a)^m}_s by triangular inversion of
  /// a^dag^m a^m = sum_p p! C(m,p)^2 ((s-1)/2)^p {(a^dag a)^{m-p}}_s.
  Matrix s_ordered_power(int m, OrderingIndex s) const;

  /// {(a^dag a)^m}_s from the inverse conversion with (1-s)/2, built
  /// directly from normal-ordered powers.
  Matrix s_ordered_power_closed(int m, OrderingIndex s) const;

  /// sum_m h_m {(a^dag a)^m}_s for the symbol's ordering.
  Matrix operator_from_symbol(const PolynomialSymbol& symbol) const;

 private:
  int dim_;
  Matrix a_;
  Matrix adag_;
};

/// Max |M_ij| over the block i, j <= n_max.
long double max_abs_block(const Matrix& m, int n_max);

}  // namespace cspi::fock
