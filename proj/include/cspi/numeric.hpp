#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace cspi {

/// Neumaier's variant of compensated summation. Also tracks the sum of
/// magnitudes so callers can measure how much cancellation happened.
template <class Real>
class CompensatedSum {
 public:
  void add(const Real& term) {
    using std::abs;
    Real t = sum_ + term;
    if (abs(sum_) >= abs(term)) {
      comp_ += (sum_ - t) + term;
    } else {
      comp_ += (term - t) + sum_;
    }
    sum_ = t;
    magnitude_ += abs(term);
  }

  Real value() const { return sum_ + comp_; }
  Real magnitude() const { return magnitude_; }

 private:
  Real sum_{0};
  Real comp_{0};
  Real magnitude_{0};
};

template <class Real>
class CompensatedComplexSum {
 public:
  void add(const std::complex<Real>& z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  std::complex<Real> value() const { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum<Real> re_;
  CompensatedSum<Real> im_;
};

double binomial(int n, int k);
double factorial(int n);

/// Median of log2(e_i / e_{i+1}) over consecutive pairs: the empirical
/// convergence order of a sequence of errors at successively doubled N.
double median_pairwise_order(std::span<const double> errors);

/// log2(e_i / e_{i+1}) for each consecutive pair.
std::vector<double> pairwise_orders(std::span<const double> errors);

}  // namespace cspi
