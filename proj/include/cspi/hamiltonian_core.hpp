#pragma once

#include <vector>

#include "cspi/model.hpp"

namespace cspi {

/// Spectral partition sum Tr exp(-beta H) over Fock states.
///
/// Stops once the remaining tail, bounded geometrically from the current
/// level spacing, is below policy.tol. Throws DivergentSum when the spectrum
/// is not bounded below by a growing function of n (zero Hamiltonian,
/// U = 0 with mu >= 0, negative leading coefficient) and PolicyExhausted if
/// the tolerance is not met by policy.n_max.
PartitionEstimate exact_partition(const NormalHamiltonian& h, double beta,
                                  const TruncationPolicy& policy = {});

/// Symbol H_s(x) obtained by rewriting every (psi*_k psi_{k-1})^q in terms
/// of psi_{k_s}: sum_q g_q sum_p p! C(q,p)^2 ((s-1)/2)^p x^{q-p}.
PolynomialSymbol s_symbol(const NormalHamiltonian& h, OrderingIndex s);

/// Inverse of s_symbol: recovers the normal-ordered coefficients g_q from a
/// symbol of any ordering (uses the (1-s)/2 form of the conversion).
NormalHamiltonian normal_from_symbol(const PolynomialSymbol& symbol);

/// Max residual of a^dag^q a^q - sum_p p! C(q,p)^2 ((s-1)/2)^p {(a^dag a)^{q-p}}_s
/// on Fock states n <= n_max, with the s-ordered powers defined by
/// triangular inversion. Throws TruncationTooSmall if n_max < q.
double verify_ordering_identity(int q, OrderingIndex s, int n_max);

/// Taylor coefficients of exp(P(x)) for a polynomial exponent P, from
/// (q+1) c_{q+1} = sum_j (j+1) p_{j+1} c_{q-j}.
std::vector<double> exponential_series_coefficients(
    const std::vector<double>& exponent, int q_max);

/// Fock-diagonal of the normal-ordered transfer operator :exp(-eps H_1):.
struct TransferSpectrum {
  std::vector<double> t;  // t_n, n = 0..t.size()-1
  std::vector<double> c;  // Taylor coefficients of exp(-eps H_1(x))
  /// u * sum|terms| / |t_n| per level: relative error from cancellation.
  std::vector<double> cancellation_error;
  TruncationPolicy truncation;
};

/// t_n = sum_{q<=n} c_q n!/(n-q)! for n = 0..policy.n_max.
TransferSpectrum transfer_spectrum(const NormalHamiltonian& h,
                                   const TimeGrid& grid,
                                   const TruncationPolicy& policy = {});

/// Standard (normal-ordered) discretized CSPI evaluated as sum_n t_n^N.
///
/// For U > 0 the sum is asymptotic: terms fall far below tol and only grow
/// again for n of order 1/(eps U). Summation stops once three consecutive
/// terms are below tol relative to the partial sum; SeriesNotDecaying is
/// raised when terms grow without ever getting small (small N), and
/// PrecisionLoss when cancellation inside a relevant t_n exceeds
/// policy.cancellation_limit.
PartitionEstimate transfer_partition(const NormalHamiltonian& h,
                                     const TimeGrid& grid,
                                     const TruncationPolicy& policy = {});

}  // namespace cspi
