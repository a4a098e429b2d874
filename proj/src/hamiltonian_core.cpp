#include "cspi/hamiltonian_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "cspi/error.hpp"
#include "cspi/fock.hpp"
#include "cspi/numeric.hpp"

namespace cspi {
namespace {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

// The spectrum must grow without bound for Tr exp(-beta H) to exist.
void require_bounded_spectrum(const NormalHamiltonian& h) {
  const int deg = h.degree();
  if (deg < 1) throw LabError(ErrorKind::DivergentSum, "zero or constant Hamiltonian: every level contributes");
  if (h.coefficient(deg) <= 0.0) {
    std::ostringstream msg;
    if (deg == 1)
      msg << "free boson with mu = " << h.mu() << " >= 0 has a divergent geometric sum";
    else
      msg << "leading coefficient g_" << deg << " <= 0: spectrum unbounded below";
    throw LabError(ErrorKind::DivergentSum, msg.str());
  }
}

double integer_power(double x, int n) {
  double result = 1.0;
  while (n > 0) {
    if (n & 1) result *= x;
    x *= x;
    n >>= 1;
  }
  return result;
}

template <class Real>
TransferSpectrum build_spectrum(const NormalHamiltonian& h, double epsilon,
                                const TruncationPolicy& policy) {
  const int q_max = policy.n_max;
  // exponent -eps H_1(x)
  std::vector<Real> exponent(h.degree() + 1, Real(0));
  for (const auto& [q, g] : h.coefficients()) exponent[q] = -Real(epsilon) * Real(g);

  std::vector<Real> c(q_max + 1, Real(0));
  using std::exp;
  c[0] = exp(exponent[0]);
  const int deg = static_cast<int>(exponent.size()) - 1;
  for (int q = 0; q < q_max; ++q) {
    Real acc(0);
    for (int j = 0; j < deg && j <= q; ++j) acc += Real(j + 1) * exponent[j + 1] * c[q - j];
    c[q + 1] = acc / Real(q + 1);
  }

  const Real unit = std::numeric_limits<Real>::epsilon();
  TransferSpectrum out;
  out.truncation = policy;
  out.c.reserve(c.size());
  for (const auto& v : c) out.c.push_back(static_cast<double>(v));
  for (int n = 0; n <= policy.n_max; ++n) {
    CompensatedSum<Real> sum;
    Real falling(1);  // n!/(n-q)!
    for (int q = 0; q <= n; ++q) {
      if (q > 0) falling *= Real(n - q + 1);
      sum.add(c[q] * falling);
    }
    using std::abs;
    const Real t = sum.value();
    out.t.push_back(static_cast<double>(t));
    const Real mag = sum.magnitude();
    double cancel = 0.0;
    if (t != Real(0))
      cancel = static_cast<double>(unit * mag / abs(t));
    else if (mag != Real(0))
      cancel = std::numeric_limits<double>::infinity();
    out.cancellation_error.push_back(cancel);
  }
  return out;
}

}  // namespace

PartitionEstimate exact_partition(const NormalHamiltonian& h, double beta,
                                  const TruncationPolicy& policy) {
  policy.validate();
  if (!(beta > 0.0)) throw LabError(ErrorKind::InvalidArgument, "beta must be positive");
  require_bounded_spectrum(h);

  CompensatedSum<double> sum;
  for (int n = 0; n <= policy.n_max; ++n) {
    sum.add(std::exp(-beta * h.energy(n)));
    // Past the minimum of a convex spectrum the terms after n fall at least
    // geometrically with ratio exp(-beta (E_{n+2} - E_{n+1})).
    const double e1 = h.energy(n + 1), e2 = h.energy(n + 2), e3 = h.energy(n + 3);
    const double gap = e2 - e1;
    if (gap <= 0.0 || e3 - e2 < gap) continue;
    const double ratio = std::exp(-beta * gap);
    const double tail = std::exp(-beta * e1) / (1.0 - ratio);
    if (tail < policy.tol) {
      PartitionEstimate est;
      est.value = sum.value();
      est.method = Method::Spectral;
      est.n_used = n;
      est.tail_bound = tail;
      return est;
    }
  }
  std::ostringstream msg;
  msg << "spectral tail still above tol = " << policy.tol << " at n_max = " << policy.n_max;
  throw LabError(ErrorKind::PolicyExhausted, msg.str());
}

PolynomialSymbol s_symbol(const NormalHamiltonian& h, OrderingIndex s) {
  PolynomialSymbol out;
  out.ordering = s;
  out.coefficients.assign(std::max(h.degree(), 0) + 1, 0.0);
  const double t = s.shift();
  for (const auto& [q, g] : h.coefficients()) {
    double tp = 1.0;
    for (int p = 0; p <= q; ++p) {
      out.coefficients[q - p] += g * factorial(p) * binomial(q, p) * binomial(q, p) * tp;
      tp *= t;
    }
  }
  return out;
}

NormalHamiltonian normal_from_symbol(const PolynomialSymbol& symbol) {
  std::map<int, double> g;
  const double t = symbol.ordering.lead_weight();
  for (int m = 0; m < static_cast<int>(symbol.coefficients.size()); ++m) {
    const double hm = symbol.coefficients[m];
    if (hm == 0.0) continue;
    double tk = 1.0;
    for (int k = 0; k <= m; ++k) {
      g[m - k] += hm * factorial(k) * binomial(m, k) * binomial(m, k) * tk;
      tk *= t;
    }
  }
  return NormalHamiltonian(g);
}

double verify_ordering_identity(int q, OrderingIndex s, int n_max) {
  if (q < 0) throw LabError(ErrorKind::InvalidArgument, "q must be >= 0");
  if (n_max < q) {
    std::ostringstream msg;
    msg << "n_max = " << n_max << " < q = " << q;
    throw LabError(ErrorKind::TruncationTooSmall, msg.str());
  }
  const fock::FockSpace space(n_max + q + 1);
  fock::Matrix rhs = fock::Matrix::Zero(space.dim(), space.dim());
  long double tp = 1.0L;
  for (int p = 0; p <= q; ++p) {
    const long double weight =
        static_cast<long double>(factorial(p) * binomial(q, p) * binomial(q, p)) * tp;
    rhs += weight * space.s_ordered_power(q - p, s);
    tp *= static_cast<long double>(s.shift());
  }
  return static_cast<double>(fock::max_abs_block(space.normal_power(q) - rhs, n_max));
}

std::vector<double> exponential_series_coefficients(const std::vector<double>& exponent,
                                                    int q_max) {
  std::vector<double> c(q_max + 1, 0.0);
  if (exponent.empty()) {
    c[0] = 1.0;
    return c;
  }
  c[0] = std::exp(exponent[0]);
  const int deg = static_cast<int>(exponent.size()) - 1;
  for (int q = 0; q < q_max; ++q) {
    double acc = 0.0;
    for (int j = 0; j < deg && j <= q; ++j) acc += (j + 1) * exponent[j + 1] * c[q - j];
    c[q + 1] = acc / (q + 1);
  }
  return c;
}

TransferSpectrum transfer_spectrum(const NormalHamiltonian& h, const TimeGrid& grid,
                                   const TruncationPolicy& policy) {
  policy.validate();
  if (h.degree() < 0) {
    TransferSpectrum out;
    out.truncation = policy;
    out.c.assign(policy.n_max + 1, 0.0);
    out.c[0] = 1.0;
    out.t.assign(policy.n_max + 1, 1.0);
    out.cancellation_error.assign(policy.n_max + 1, 0.0);
    return out;
  }
  return policy.high_precision ? build_spectrum<HighPrecision>(h, grid.epsilon(), policy)
                               : build_spectrum<double>(h, grid.epsilon(), policy);
}

PartitionEstimate transfer_partition(const NormalHamiltonian& h, const TimeGrid& grid,
                                     const TruncationPolicy& policy) {
  require_bounded_spectrum(h);
  const TransferSpectrum spectrum = transfer_spectrum(h, grid, policy);
  const int n_slices = grid.n_slices();

  CompensatedSum<double> sum;
  int small_run = 0;
  double min_term = std::numeric_limits<double>::infinity();
  double previous = 0.0;
  for (int n = 0; n <= policy.n_max; ++n) {
    const double term = integer_power(spectrum.t[n], n_slices);
    const double mag = std::abs(term);
    if (!std::isfinite(term)) {
      std::ostringstream msg;
      msg << "t_" << n << "^N is not finite (N = " << n_slices << ")";
      throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
    }
    if (mag >= policy.tol && spectrum.cancellation_error[n] > policy.cancellation_limit) {
      std::ostringstream msg;
      msg << "t_" << n << " lost digits to cancellation (relative error ~"
          << spectrum.cancellation_error[n] << " > " << policy.cancellation_limit
          << "); try the high-precision mode";
      throw LabError(ErrorKind::PrecisionLoss, msg.str());
    }
    sum.add(term);
    const double scale = std::max(1.0, std::abs(sum.value()));
    if (mag > scale / policy.tol) {
      std::ostringstream msg;
      msg << "term n = " << n << " of size " << mag << " dwarfs the partial sum (N = "
          << n_slices << ", eps = " << grid.epsilon() << ")";
      throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
    }
    small_run = mag < policy.tol * scale ? small_run + 1 : 0;
    min_term = std::min(min_term, mag);
    if (small_run == 3) {
      const double value = sum.value();
      if (!(value > 0.0))
        throw LabError(ErrorKind::SeriesNotDecaying, "truncated transfer sum is not positive");
      const double ratio = previous > 0.0 ? mag / previous : 1.0;
      PartitionEstimate est;
      est.value = value;
      est.method = Method::Transfer;
      est.n_used = n;
      est.tail_bound = ratio < 1.0 ? mag * ratio / (1.0 - ratio) : mag;
      return est;
    }
    previous = mag;
  }
  if (previous > 10.0 * min_term) {
    std::ostringstream msg;
    msg << "terms grow again before reaching tol (N = " << n_slices
        << "); the Fock sum is only asymptotic here";
    throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
  }
  std::ostringstream msg;
  msg << "transfer sum not within tol = " << policy.tol << " at n_max = " << policy.n_max;
  throw LabError(ErrorKind::PolicyExhausted, msg.str());
}

}  // namespace cspi
