#pragma once

#include <map>
#include <optional>
#include <string_view>
#include <vector>

namespace cspi {

/// Normal-ordered single-mode Hamiltonian H = sum_q g_q a^dag^q a^q.
///
/// Only number-conserving (diagonal) terms are representable. Zero
/// coefficients are dropped on construction so degree() is the highest q
/// carrying a nonzero g_q.
class NormalHamiltonian {
 public:
  NormalHamiltonian() = default;
  explicit NormalHamiltonian(std::map<int, double> coefficients);

  /// g_1 = -mu, g_2 = U/2.
  static NormalHamiltonian bose_hubbard(double mu, double u);

  double coefficient(int q) const;
  const std::map<int, double>& coefficients() const { return g_; }

  /// -1 for the zero Hamiltonian.
  int degree() const;

  double mu() const { return -coefficient(1); }
  double u() const { return 2.0 * coefficient(2); }

  /// Eigenvalue on the Fock state |n>: sum_q g_q n!/(n-q)!.
  double energy(long n) const;

 private:
  std::map<int, double> g_;
};

/// Imaginary-time slicing. epsilon is always derived from beta and N.
class TimeGrid {
 public:
  TimeGrid(double beta, int n_slices);

  double beta() const { return beta_; }
  int n_slices() const { return n_; }
  double epsilon() const { return beta_ / n_; }

 private:
  double beta_;
  int n_;
};

/// Cahill-Glauber ordering index: s = 1 normal, 0 Weyl, -1 anti-normal.
class OrderingIndex {
 public:
  explicit OrderingIndex(double s);

  static OrderingIndex normal() { return OrderingIndex(1.0); }
  static OrderingIndex weyl() { return OrderingIndex(0.0); }
  static OrderingIndex anti_normal() { return OrderingIndex(-1.0); }

  double value() const { return s_; }
  /// (1+s)/2: weight of psi_{k-1} in psi_{k_s}.
  double lag_weight() const { return 0.5 * (1.0 + s_); }
  /// (1-s)/2: weight of psi_k in psi_{k_s}.
  double lead_weight() const { return 0.5 * (1.0 - s_); }
  /// (s-1)/2, the expansion parameter of the normal -> s conversion.
  double shift() const { return 0.5 * (s_ - 1.0); }

 private:
  double s_;
};

/// Polynomial in x = psi* psi_s, coefficients in ascending powers.
struct PolynomialSymbol {
  std::vector<double> coefficients;
  OrderingIndex ordering = OrderingIndex::normal();

  int degree() const;
  double operator()(double x) const;
};

struct TruncationPolicy {
  int n_max = 64;
  double tol = 1e-12;
  /// Largest tolerated relative error of a transfer eigenvalue t_n caused by
  /// cancellation in its alternating sum, for terms that still matter.
  double cancellation_limit = 1e-8;
  /// Evaluate transfer eigenvalues in 50-digit software floating point.
  bool high_precision = false;

  void validate() const;
};

enum class Method { Spectral, Transfer, HsSeries, HsMc, Quadrature };

std::string_view to_string(Method method);

struct PartitionEstimate {
  double value = 0.0;
  Method method = Method::Spectral;
  int n_used = 0;
  double tail_bound = 0.0;
  std::optional<double> stat_error;
  /// Imaginary part left over by complex-valued evaluations.
  double imag_residue = 0.0;
};

}  // namespace cspi
