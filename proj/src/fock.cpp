#include "cspi/fock.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "cspi/error.hpp"
#include "cspi/numeric.hpp"

namespace cspi::fock {

FockSpace::FockSpace(int dim) : dim_(dim) {
  if (dim < 1) throw LabError(ErrorKind::InvalidArgument, "Fock dimension must be >= 1");
  a_ = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a_(n - 1, n) = std::sqrt(static_cast<long double>(n));
  adag_ = a_.transpose();
}

Matrix FockSpace::identity() const { return Matrix::Identity(dim_, dim_); }

Matrix FockSpace::normal_power(int m) const {
  Matrix left = identity(), right = identity();
  for (int i = 0; i < m; ++i) {
    left = left * adag_;
    right = right * a_;
  }
  return left * right;
}

Matrix FockSpace::antinormal_power(int m) const {
  Matrix left = identity(), right = identity();
  for (int i = 0; i < m; ++i) {
    left = left * a_;
    right = right * adag_;
  }
  return left * right;
}

Matrix FockSpace::weyl_power(int m) const {
  // Enumerate placements of the m creation operators among 2m slots.
  std::vector<int> slots(2 * m, 0);
  std::fill(slots.begin() + m, slots.end(), 1);
  Matrix sum = Matrix::Zero(dim_, dim_);
  long count = 0;
  do {
    Matrix term = identity();
    for (int op : slots) term = term * (op ? adag_ : a_);
    sum += term;
    ++count;
  } while (std::next_permutation(slots.begin(), slots.end()));
  return sum / static_cast<long double>(count);
}

Matrix FockSpace::s_ordered_power(int m, OrderingIndex s) const {
  if (m < 0) throw LabError(ErrorKind::InvalidArgument, "negative power");
  std::vector<Matrix> ordered;
  ordered.reserve(m + 1);
  const long double t = s.shift();
  for (int k = 0; k <= m; ++k) {
    Matrix value = normal_power(k);
    long double tp = t;
    for (int p = 1; p <= k; ++p) {
      const long double w =
          static_cast<long double>(factorial(p) * binomial(k, p) * binomial(k, p)) * tp;
      value -= w * ordered[k - p];
      tp *= t;
    }
    ordered.push_back(std::move(value));
  }
  return ordered.back();
}

Matrix FockSpace::s_ordered_power_closed(int m, OrderingIndex s) const {
  Matrix value = Matrix::Zero(dim_, dim_);
  const long double t = s.lead_weight();
  long double tk = 1.0L;
  for (int k = 0; k <= m; ++k) {
    const long double w =
        static_cast<long double>(factorial(k) * binomial(m, k) * binomial(m, k)) * tk;
    value += w * normal_power(m - k);
    tk *= t;
  }
  return value;
}

Matrix FockSpace::operator_from_symbol(const PolynomialSymbol& symbol) const {
  Matrix value = Matrix::Zero(dim_, dim_);
  for (int m = 0; m < static_cast<int>(symbol.coefficients.size()); ++m) {
    if (symbol.coefficients[m] == 0.0) continue;
    value += static_cast<long double>(symbol.coefficients[m]) *
             s_ordered_power(m, symbol.ordering);
  }
  return value;
}

long double max_abs_block(const Matrix& m, int n_max) {
  const int k = std::min<int>(n_max + 1, static_cast<int>(m.rows()));
  return m.topLeftCorner(k, k).cwiseAbs().maxCoeff();
}

}  // namespace cspi::fock
