#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string_view>

#include "cspi/gaussian_oracle.hpp"
#include "cspi/kernels.hpp"
#include "cspi/model.hpp"

namespace cspi {

/// Discrete HS field: rho_k i.i.d. N(0, U / eps).
struct NoiseModel {
  double variance_per_slice;
  int n_slices;

  static NoiseModel for_grid(double u, const TimeGrid& grid);
  double stddev() const;
};

/// How the per-slice factors of the boson determinant are formed, with
/// gamma_k = mu_eff + i rho_k, a = (1+s)/2 and b = (1-s)/2:
///   ExactProduct      Q_k = 1 + a eps gamma_k, P_k = 1 - b eps gamma_k
///   NaiveExponential  Q_k = exp(a eps gamma_k), P_k = exp(-b eps gamma_k)
///   ItoCorrected      Q_k = exp(a eps gamma_k + a^2 eps U/2),
///                     P_k = exp(-b eps gamma_k + b^2 eps U/2)
/// and det = prod P_k - prod Q_k. At s = 1 these are (1 + eps mu + i eps rho),
/// exp(eps mu + i eps rho) and exp(eps mu + eps U/2 + i eps rho).
enum class SliceFactorScheme { ExactProduct, NaiveExponential, ItoCorrected };

std::string_view to_string(SliceFactorScheme scheme);
SliceFactorScheme parse_scheme(std::string_view name);

/// H_s(x) = quad_coeff x^2 - mu_eff x + const_shift.
struct DecoupledSymbol {
  double mu_eff;
  double const_shift;
  double quad_coeff;
};

/// Throws UnsupportedDegree unless H has degree 1 or 2 with g_2 >= 0.
DecoupledSymbol hs_decouple(const NormalHamiltonian& h, OrderingIndex s);

struct SmoothField {
  double omega;
};

struct HsOptions {
  /// Gauss-Hermite nodes; each quadrature is repeated with twice as many
  /// nodes to confirm convergence.
  int nodes = 128;
  /// Use quadrature even where a closed form exists.
  bool force_quadrature = false;
  /// Accept mu > 0 (or a non-negative contour drift for Monte Carlo).
  bool allow_positive_mu = false;
  kernels::Execution execution = kernels::Execution::Parallel;
};

/// Per-slice HS factors for one noise value rho.
struct SliceFactors {
  Complex p;
  Complex q;
};

SliceFactors slice_factors(SliceFactorScheme scheme, OrderingIndex s,
                           double mu_eff, double u, double epsilon, double rho);

/// Real part of log|Q/P| per unit time, averaged over the noise. The
/// geometric expansion of 1/det is dominated (and 1/det has no poles on the
/// real rho axis) only when this drift is negative.
double contour_drift(SliceFactorScheme scheme, OrderingIndex s, double mu_eff,
                     double u);

/// E(n) = E_rho[Q^n / P^{n+1}], with closed forms where available:
/// Gaussian moments for ExactProduct at s = 1 and the characteristic function
/// for the exponential schemes. Otherwise Gauss-Hermite quadrature with a
/// node-doubling check (QuadratureNotConverged). Throws DenominatorPole if
/// Re(1 - b eps mu_eff) = 0.
Complex slice_factor(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                     double mu_eff, double epsilon, OrderingIndex s, int nodes = 128);

/// The closed-form route only (throws InvalidArgument where none exists).
Complex slice_factor_closed(int n, SliceFactorScheme scheme, const NoiseModel& noise,
                            double mu_eff, double epsilon, OrderingIndex s);

/// Gauss-Hermite route with a fixed node count and no convergence check.
Complex slice_factor_quadrature(int n, SliceFactorScheme scheme,
                                const NoiseModel& noise, double mu_eff,
                                double epsilon, OrderingIndex s, int nodes);

/// Boson determinant system for one noise realization:
/// d_k = P_k, o_k = -Q_k.
CyclicBidiagonalSystem slice_system(SliceFactorScheme scheme, OrderingIndex s,
                                    double mu_eff, double u, double epsilon,
                                    std::span<const double> rho);

/// Default truncation for the HS series: cap n at 256.
TruncationPolicy hs_series_policy();

/// exp(-beta c_s) sum_n E(n)^N.
///
/// Stops when |E(n)^N| < tol |partial sum| for three consecutive n. Throws
/// ContourDeformationRequired for mu > 0 (unless overridden), SeriesNotDecaying
/// when the terms blow up (non-finite or beyond partial/tol) or are growing
/// again at the cap, PolicyExhausted when they are still decaying at the cap.
PartitionEstimate hs_partition_series(const NormalHamiltonian& h, const TimeGrid& grid,
                                      OrderingIndex s, SliceFactorScheme scheme,
                                      const TruncationPolicy& policy = hs_series_policy(),
                                      const HsOptions& options = {});

/// Monte Carlo estimate of exp(-beta c_s) E_rho[1 / det].
///
/// Sample i draws its noise vector from its own generator seeded by
/// (seed, i), so results do not depend on scheduling. Requires
/// samples >= 1000 and a negative contour drift (ContourDeformationRequired
/// otherwise, unless overridden). Throws NearPoleSample if |det| < 1e-12.
PartitionEstimate hs_partition_mc(const NormalHamiltonian& h, const TimeGrid& grid,
                                  OrderingIndex s, SliceFactorScheme scheme,
                                  long samples, std::uint64_t seed,
                                  const HsOptions& options = {});

/// exp(-beta c_s) E_rho[1/det] by tensor Gauss-Hermite over rho_1..rho_N,
/// N <= 3. Nodes are doubled from options.nodes until the result is stable
/// to tol (QuadratureNotConverged past 2^24 grid points).
PartitionEstimate hs_expectation_quadrature(const NormalHamiltonian& h,
                                            const TimeGrid& grid, OrderingIndex s,
                                            SliceFactorScheme scheme, double tol = 1e-8,
                                            const HsOptions& options = {});

struct DeterminantCheck {
  double closed;
  double numeric;
  double residual;
};

/// Continuum Det_s = exp(-b beta (mu+Omega)) - exp(a beta (mu+Omega)) against
/// the s-discretized cyclic determinant at the grid's N.
DeterminantCheck generalized_determinant_check(OrderingIndex s, SmoothField omega,
                                               double mu, const TimeGrid& grid);

}  // namespace cspi
