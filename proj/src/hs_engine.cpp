#include "cspi/hs_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>

#include "cspi/error.hpp"
#include "cspi/numeric.hpp"
#include "cspi/quadrature_rules.hpp"

namespace cspi {
namespace {

constexpr int kMaxHermiteNodes = 2048;

const GaussRule& hermite_rule(int nodes) {
  static std::mutex guard;
  static std::map<int, GaussRule> cache;
  std::lock_guard lock(guard);
  auto it = cache.find(nodes);
  if (it == cache.end()) it = cache.emplace(nodes, gauss_hermite_normal(nodes)).first;
  return it->second;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Complex complex_power(Complex z, int n) {
  Complex result = 1.0;
  while (n > 0) {
    if (n & 1) result *= z;
    z *= z;
    n >>= 1;
  }
  return result;
}

void require_contour(double mu, const HsOptions& options) {
  if (mu > 0.0 && !options.allow_positive_mu) {
    std::ostringstream msg;
    msg << "mu = " << mu << " > 0 needs a deformed contour for the HS field";
    throw LabError(ErrorKind::ContourDeformationRequired, msg.str());
  }
}

struct McAccumulator {
  Complex sum = 0.0;
  double sq_re = 0.0;
  double sq_im = 0.0;
  long count = 0;
  double min_abs_det = std::numeric_limits<double>::infinity();

  McAccumulator& operator+=(const McAccumulator& o) {
    sum += o.sum;
    sq_re += o.sq_re;
    sq_im += o.sq_im;
    count += o.count;
    min_abs_det = std::min(min_abs_det, o.min_abs_det);
    return *this;
  }
};

}  // namespace

NoiseModel NoiseModel::for_grid(double u, const TimeGrid& grid) {
  if (!(u >= 0.0)) throw LabError(ErrorKind::InvalidArgument, "HS noise needs U >= 0");
  return {u / grid.epsilon(), grid.n_slices()};
}

double NoiseModel::stddev() const { return std::sqrt(variance_per_slice); }

std::string_view to_string(SliceFactorScheme scheme) {
  switch (scheme) {
    case SliceFactorScheme::ExactProduct: return "exact-product";
    case SliceFactorScheme::NaiveExponential: return "naive-exponential";
    case SliceFactorScheme::ItoCorrected: return "ito-corrected";
  }
  return "?";
}

SliceFactorScheme parse_scheme(std::string_view name) {
  if (name == "exact-product" || name == "exact") return SliceFactorScheme::ExactProduct;
  if (name == "naive-exponential" || name == "naive") return SliceFactorScheme::NaiveExponential;
  if (name == "ito-corrected" || name == "ito") return SliceFactorScheme::ItoCorrected;
  throw LabError(ErrorKind::InvalidArgument, "unknown slice-factor scheme '" + std::string(name) + "'");
}

DecoupledSymbol hs_decouple(const NormalHamiltonian& h, OrderingIndex s) {
  if (h.degree() < 1 || h.degree() > 2 || h.coefficient(2) < 0.0) {
    std::ostringstream msg;
    msg << "HS decoupling needs a quadratic symbol with U >= 0 (degree " << h.degree() << ")";
    throw LabError(ErrorKind::UnsupportedDegree, msg.str());
  }
  const double g1 = h.coefficient(1), g2 = h.coefficient(2);
  const double t = s.shift();
  return {-(g1 + 4.0 * g2 * t), h.coefficient(0) + g1 * t + 2.0 * g2 * t * t, g2};
}

SliceFactors slice_factors(SliceFactorScheme scheme, OrderingIndex s, double mu_eff,
                           double u, double epsilon, double rho) {
  const double a = s.lag_weight(), b = s.lead_weight();
  const Complex gamma(mu_eff, rho);
  switch (scheme) {
    case SliceFactorScheme::ExactProduct:
      return {1.0 - b * epsilon * gamma, 1.0 + a * epsilon * gamma};
    case SliceFactorScheme::NaiveExponential:
      return {std::exp(-b * epsilon * gamma), std::exp(a * epsilon * gamma)};
    case SliceFactorScheme::ItoCorrected:
      return {std::exp(-b * epsilon * gamma + 0.5 * b * b * epsilon * u),
              std::exp(a * epsilon * gamma + 0.5 * a * a * epsilon * u)};
  }
  throw LabError(ErrorKind::InvalidArgument, "bad scheme");
}

double contour_drift(SliceFactorScheme scheme, OrderingIndex s, double mu_eff, double u) {
  if (scheme == SliceFactorScheme::NaiveExponential) return mu_eff;
  return mu_eff + 0.5 * u * s.value();
}

Complex slice_factor_closed(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                            double mu_eff, double epsilon, OrderingIndex s) {
  if (n < 0) throw LabError(ErrorKind::InvalidArgument, "n must be >= 0");
  const double u = noise.variance_per_slice * epsilon;
  if (scheme == SliceFactorScheme::ExactProduct) {
    if (s.value() != 1.0)
      throw LabError(ErrorKind::InvalidArgument, "no closed form for the exact product at s != 1");
    // E[(c + i eps rho)^n] from the Gaussian moments E[rho^2k] = var^k (2k-1)!!
    const double c = 1.0 + epsilon * mu_eff;
    CompensatedSum<double> sum;
    double moment = 1.0;  // (-eps U)^k (2k-1)!!
    for (int k = 0; 2 * k <= n; ++k) {
      sum.add(binomial(n, 2 * k) * std::pow(c, n - 2 * k) * moment);
      moment *= -epsilon * u * (2 * k + 1);
    }
    return sum.value();
  }
  const double a = s.lag_weight(), b = s.lead_weight();
  const double m = n + b;
  double exponent = epsilon * mu_eff * m - 0.5 * epsilon * u * m * m;
  if (scheme == SliceFactorScheme::ItoCorrected)
    exponent += 0.5 * epsilon * u * (n * a * a - (n + 1) * b * b);
  return std::exp(exponent);
}

namespace {

struct QuadratureValue {
  Complex value;
  double magnitude;  // sum of |w_i f(x_i)|, the scale of rounding in value
};

QuadratureValue hermite_expectation(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                                    double mu_eff, double epsilon, OrderingIndex s, int nodes) {
  if (n < 0) throw LabError(ErrorKind::InvalidArgument, "n must be >= 0");
  if (nodes < 1 || nodes > kMaxHermiteNodes)
    throw LabError(ErrorKind::InvalidArgument, "Gauss-Hermite node count out of range");
  const double u = noise.variance_per_slice * epsilon;
  const double sigma = noise.stddev();
  const GaussRule& rule = hermite_rule(nodes);
  CompensatedComplexSum<double> sum;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const auto f = slice_factors(scheme, s, mu_eff, u, epsilon, sigma * rule.nodes[i]);
    const Complex term = rule.weights[i] * complex_power(f.q, n) / complex_power(f.p, n + 1);
    sum.add(term);
    magnitude += std::abs(term);
  }
  return {sum.value(), magnitude};
}

}  // namespace

Complex slice_factor_quadrature(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                                double mu_eff, double epsilon, OrderingIndex s, int nodes) {
  return hermite_expectation(n, scheme, noise, mu_eff, epsilon, s, nodes).value;
}

Complex slice_factor(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                     double mu_eff, double epsilon, OrderingIndex s, int nodes) {
  const double b = s.lead_weight();
  if (scheme == SliceFactorScheme::ExactProduct && b != 0.0 &&
      std::abs(1.0 - b * epsilon * mu_eff) < 1e-14) {
    throw LabError(ErrorKind::DenominatorPole, "1 - b eps mu_eff vanishes: P has a real zero");
  }
  if (scheme != SliceFactorScheme::ExactProduct || s.value() == 1.0)
    return slice_factor_closed(n, scheme, noise, mu_eff, epsilon, s);
  // Relative 1e-10, with two floors. The rounding floor of the sum matters
  // when the integrand oscillates and E(n) sits far below it. The absolute
  // 1e-14 covers s < 1, where 1/P^(n+1) has a pole off the real axis and
  // convergence is only algebraic: tiny E(n) for large n cannot reach 1e-10
  // relative, and do not need to.
  Complex coarse = slice_factor_quadrature(n, scheme, noise, mu_eff, epsilon, s, nodes);
  for (int m = 2 * nodes; m <= kMaxHermiteNodes; m *= 2) {
    const auto fine = hermite_expectation(n, scheme, noise, mu_eff, epsilon, s, m);
    const double floor = 64.0 * std::numeric_limits<double>::epsilon() * fine.magnitude;
    if (std::abs(fine.value - coarse) <= std::max({1e-10 * std::abs(fine.value), floor, 1e-14}))
      return fine.value;
    coarse = fine.value;
  }
  std::ostringstream msg;
  msg << "Gauss-Hermite slice factor n = " << n << " not stable up to " << kMaxHermiteNodes
      << " nodes";
  throw LabError(ErrorKind::QuadratureNotConverged, msg.str());
}

CyclicBidiagonalSystem slice_system(SliceFactorScheme scheme, OrderingIndex s,
                                    double mu_eff, double u, double epsilon,
                                    std::span<const double> rho) {
  std::vector<Complex> diag, sub;
  diag.reserve(rho.size());
  sub.reserve(rho.size());
  for (double r : rho) {
    const auto f = slice_factors(scheme, s, mu_eff, u, epsilon, r);
    diag.push_back(f.p);
    sub.push_back(-f.q);
  }
  return CyclicBidiagonalSystem(std::move(diag), std::move(sub));
}

TruncationPolicy hs_series_policy() {
  TruncationPolicy p;
  p.n_max = 256;
  return p;
}

PartitionEstimate hs_partition_series(const NormalHamiltonian& h, const TimeGrid& grid,
                                      OrderingIndex s, SliceFactorScheme scheme,
                                      const TruncationPolicy& policy,
                                      const HsOptions& options) {
  policy.validate();
  const DecoupledSymbol sym = hs_decouple(h, s);
  require_contour(h.mu(), options);
  const NoiseModel noise = NoiseModel::for_grid(h.u(), grid);
  const double eps = grid.epsilon();
  const int n_slices = grid.n_slices();

  CompensatedComplexSum<double> sum;
  int small_run = 0;
  double previous = 0.0, min_term = std::numeric_limits<double>::infinity();
  for (int n = 0; n <= policy.n_max; ++n) {
    const Complex e =
        options.force_quadrature && scheme != SliceFactorScheme::ExactProduct
            ? slice_factor_quadrature(n, scheme, noise, sym.mu_eff, eps, s, options.nodes)
            : slice_factor(n, scheme, noise, sym.mu_eff, eps, s, options.nodes);
    const Complex term = complex_power(e, n_slices);
    const double mag = std::abs(term);
    if (!std::isfinite(mag)) {
      std::ostringstream msg;
      msg << "E(" << n << ")^N is not finite (N = " << n_slices << ")";
      throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
    }
    sum.add(term);
    const double scale = std::max(1.0, std::abs(sum.value()));
    if (mag > scale / policy.tol) {
      std::ostringstream msg;
      msg << "term n = " << n << " of size " << mag << " dwarfs the partial sum (N = "
          << n_slices << ", scheme " << to_string(scheme) << ")";
      throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
    }
    small_run = mag < policy.tol * scale ? small_run + 1 : 0;
    min_term = std::min(min_term, mag);
    if (small_run == 3) {
      const double shift = std::exp(-grid.beta() * sym.const_shift);
      const double ratio = previous > 0.0 ? mag / previous : 1.0;
      PartitionEstimate est;
      est.value = shift * sum.value().real();
      est.method = Method::HsSeries;
      est.n_used = n;
      est.tail_bound = shift * (ratio < 1.0 ? mag * ratio / (1.0 - ratio) : mag);
      est.imag_residue = shift * std::abs(sum.value().imag());
      return est;
    }
    previous = mag;
  }
  if (previous > 10.0 * min_term) {
    std::ostringstream msg;
    msg << "HS series terms grow again before reaching tol (N = " << n_slices << ", scheme "
        << to_string(scheme) << ")";
    throw LabError(ErrorKind::SeriesNotDecaying, msg.str());
  }
  std::ostringstream msg;
  msg << "HS series not within tol = " << policy.tol << " at n_max = " << policy.n_max;
  throw LabError(ErrorKind::PolicyExhausted, msg.str());
}

PartitionEstimate hs_partition_mc(const NormalHamiltonian& h, const TimeGrid& grid,
                                  OrderingIndex s, SliceFactorScheme scheme, long samples,
                                  std::uint64_t seed, const HsOptions& options) {
  if (samples < 1000) throw LabError(ErrorKind::InvalidArgument, "Monte Carlo needs >= 1000 samples");
  const DecoupledSymbol sym = hs_decouple(h, s);
  const double u = h.u();
  const double drift = contour_drift(scheme, s, sym.mu_eff, u);
  if (drift >= 0.0 && !options.allow_positive_mu) {
    std::ostringstream msg;
    msg << "contour drift " << drift << " >= 0 for scheme " << to_string(scheme)
        << ": 1/det has poles near the real noise axis and the sample mean is biased";
    throw LabError(ErrorKind::ContourDeformationRequired, msg.str());
  }
  const NoiseModel noise = NoiseModel::for_grid(u, grid);
  const double eps = grid.epsilon();
  const int n_slices = grid.n_slices();
  const double sigma = noise.stddev();

  auto sample = [&](std::size_t i) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(i))));
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> rho(n_slices);
    for (auto& r : rho) r = normal(rng);
    const Complex det = det_cyclic_closed(slice_system(scheme, s, sym.mu_eff, u, eps, rho));
    const double abs_det = std::abs(det);
    if (abs_det < 1e-12) {
      std::ostringstream msg;
      msg << "sample " << i << " has |det| = " << abs_det;
      throw LabError(ErrorKind::NearPoleSample, msg.str());
    }
    const Complex v = 1.0 / det;
    McAccumulator acc;
    acc.sum = v;
    acc.sq_re = v.real() * v.real();
    acc.sq_im = v.imag() * v.imag();
    acc.count = 1;
    acc.min_abs_det = abs_det;
    return acc;
  };
  const auto acc = kernels::chunked_reduce<McAccumulator>(
      options.execution, static_cast<std::size_t>(samples), sample);

  const double n = static_cast<double>(acc.count);
  const Complex mean = acc.sum / n;
  const double var_re = std::max(0.0, acc.sq_re / n - mean.real() * mean.real()) * n / (n - 1.0);
  const double shift = std::exp(-grid.beta() * sym.const_shift);
  PartitionEstimate est;
  est.value = shift * mean.real();
  est.method = Method::HsMc;
  est.n_used = static_cast<int>(std::min<long>(samples, std::numeric_limits<int>::max()));
  est.stat_error = shift * std::sqrt(var_re / n);
  est.imag_residue = shift * std::abs(mean.imag());
  return est;
}

PartitionEstimate hs_expectation_quadrature(const NormalHamiltonian& h, const TimeGrid& grid,
                                            OrderingIndex s, SliceFactorScheme scheme,
                                            double tol, const HsOptions& options) {
  const int n_slices = grid.n_slices();
  if (n_slices > 3) throw LabError(ErrorKind::InvalidArgument, "tensor HS quadrature needs N <= 3");
  if (options.nodes < 2) throw LabError(ErrorKind::InvalidArgument, "need at least 2 nodes");
  const DecoupledSymbol sym = hs_decouple(h, s);
  require_contour(h.mu(), options);
  const double u = h.u();
  const NoiseModel noise = NoiseModel::for_grid(u, grid);
  const double eps = grid.epsilon();

  auto evaluate = [&](int nodes) {
    const GaussRule& rule = hermite_rule(nodes);
    std::vector<SliceFactors> factors;
    for (double z : rule.nodes)
      factors.push_back(slice_factors(scheme, s, sym.mu_eff, u, eps, noise.stddev() * z));
    std::size_t count = 1;
    for (int k = 0; k < n_slices; ++k) count *= static_cast<std::size_t>(nodes);
    auto point = [&](std::size_t index) -> Complex {
      Complex prod_p = 1.0, prod_q = 1.0;
      double weight = 1.0;
      for (int k = 0; k < n_slices; ++k) {
        const std::size_t j = index % nodes;
        index /= nodes;
        prod_p *= factors[j].p;
        prod_q *= factors[j].q;
        weight *= rule.weights[j];
      }
      return weight / (prod_p - prod_q);
    };
    return kernels::chunked_reduce<Complex>(options.execution, count, point);
  };

  const double max_points = std::ldexp(1.0, 24);
  int nodes = options.nodes;
  Complex coarse = evaluate(nodes);
  while (true) {
    const int next = 2 * nodes;
    if (next > kMaxHermiteNodes || std::pow(static_cast<double>(next), n_slices) > max_points) {
      std::ostringstream msg;
      msg << "E[1/det] not stable to " << tol << " at " << nodes << " nodes per slice";
      throw LabError(ErrorKind::QuadratureNotConverged, msg.str());
    }
    const Complex fine = evaluate(next);
    nodes = next;
    if (std::isfinite(std::abs(fine)) && std::abs(fine - coarse) <= tol * std::abs(fine)) {
      const double shift = std::exp(-grid.beta() * sym.const_shift);
      PartitionEstimate est;
      est.value = shift * fine.real();
      est.method = Method::Quadrature;
      est.n_used = nodes;
      est.tail_bound = shift * std::abs(fine - coarse);
      est.imag_residue = shift * std::abs(fine.imag());
      return est;
    }
    coarse = fine;
  }
}

DeterminantCheck generalized_determinant_check(OrderingIndex s, SmoothField omega, double mu,
                                               const TimeGrid& grid) {
  const double a = s.lag_weight(), b = s.lead_weight();
  const double gamma = mu + omega.omega;
  const double beta = grid.beta(), eps = grid.epsilon();
  const double closed = std::exp(-b * beta * gamma) - std::exp(a * beta * gamma);
  std::vector<Complex> diag(grid.n_slices(), 1.0 - b * eps * gamma);
  std::vector<Complex> sub(grid.n_slices(), -(1.0 + a * eps * gamma));
  const double numeric = det_lu(CyclicBidiagonalSystem(diag, sub).densify()).value.real();
  return {closed, numeric, std::abs(closed - numeric)};
}

}  // namespace cspi
