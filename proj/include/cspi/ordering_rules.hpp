#pragma once

#include <span>
#include <vector>

#include "cspi/gaussian_oracle.hpp"
#include "cspi/model.hpp"

namespace cspi {

/// Source configuration of the generating function
///   S_f(x, y) = sum_k (1 + delta_kl x) psi*_k (psi_k - psi_{k-1})
///             + (eps a + delta_kl y) psi*_k psi_{k_s}.
struct GeneratingProbe {
  int n = 8;
  double epsilon = 0.125;
  double a = 1.0;
  OrderingIndex s = OrderingIndex::normal();
  double x = 0.0;
  double y = 0.0;
  /// Probed slice, 1-based; 0 selects N/2 (at least 1).
  int l = 0;

  /// Requires N >= 1, eps > 0, a > 0, a*eps < 1 and 1 <= l <= N.
  void validate() const;
  int probed_slice() const;
};

struct ClosedFormABC {
  double a;
  double b;
  double c;
};

ClosedFormABC closed_form_abc(const GeneratingProbe& probe);

/// 1 / (A + B x + C y). Throws PoleHit when the denominator vanishes.
double f_closed(const GeneratingProbe& probe);

/// The N x N bilinear form of S_f, including the source insertions on row l.
ComplexMatrix generating_matrix(const GeneratingProbe& probe);

/// 1 / det of generating_matrix via LU. Throws SingularMatrix.
double f_numeric(const GeneratingProbe& probe);

/// <(psi*_l Dpsi_l)^p (psi*_l psi_{l_s})^{q-p}> = q! B^p C^{q-p} / A^q.
double correlator_closed(const GeneratingProbe& probe, int p, int q);

/// Same correlator from (-1)^q / f(0,0) d^q f / dx^p dy^{q-p}, with the
/// derivatives taken by central finite differences of f_numeric. A step
/// h <= 0 picks max(1e-5, eps_mach^(1/(q+2))).
double correlator_source_derivative(const GeneratingProbe& probe, int p, int q,
                                    double h = 0.0);

/// A = 1/f(0,0), B = -A^2 df/dx, C = -A^2 df/dy from f_numeric.
ClosedFormABC abc_from_source_derivatives(const GeneratingProbe& probe,
                                          double h = 1e-5);

struct ReplacementRow {
  int n;
  double ratio;
  double deviation;
};

/// For each N (at fixed beta = N eps) the ratio
/// correlator(p, q) / correlator(0, q-p) and its distance to q!/(q-p)!.
std::vector<ReplacementRow> replacement_limit_check(int p, int q, OrderingIndex s,
                                                    std::span<const int> n_values,
                                                    double beta = 1.0,
                                                    double a = 1.0);

}  // namespace cspi
