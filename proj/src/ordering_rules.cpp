#include "cspi/ordering_rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cspi/error.hpp"
#include "cspi/numeric.hpp"

namespace cspi {

void GeneratingProbe::validate() const {
  if (n < 1) throw LabError(ErrorKind::InvalidArgument, "probe needs N >= 1");
  if (!(epsilon > 0.0)) throw LabError(ErrorKind::InvalidArgument, "probe needs eps > 0");
  if (!(a > 0.0)) throw LabError(ErrorKind::InvalidArgument, "probe needs a > 0");
  if (!(a * epsilon < 1.0))
    throw LabError(ErrorKind::InvalidArgument, "probe needs a * eps < 1");
  if (l < 0 || l > n) throw LabError(ErrorKind::InvalidArgument, "probed slice out of range");
}

int GeneratingProbe::probed_slice() const { return l > 0 ? l : std::max(1, n / 2); }

namespace {

// Row k of the bilinear form: diagonal d_k and lag coefficient o_k.
CyclicBidiagonalSystem probe_system(const GeneratingProbe& probe) {
  const double lead = probe.s.lead_weight(), lag = probe.s.lag_weight();
  std::vector<Complex> diag(probe.n), sub(probe.n);
  const int l = probe.probed_slice() - 1;
  for (int k = 0; k < probe.n; ++k) {
    const double kin = 1.0 + (k == l ? probe.x : 0.0);
    const double pot = probe.a * probe.epsilon + (k == l ? probe.y : 0.0);
    diag[k] = kin + pot * lead;
    sub[k] = -kin + pot * lag;
  }
  return CyclicBidiagonalSystem(std::move(diag), std::move(sub));
}

}  // namespace

ClosedFormABC closed_form_abc(const GeneratingProbe& probe) {
  probe.validate();
  const double lead = probe.s.lead_weight(), lag = probe.s.lag_weight();
  const double d = 1.0 + probe.a * probe.epsilon * lead;
  const double o = 1.0 - probe.a * probe.epsilon * lag;
  const double dn1 = std::pow(d, probe.n - 1), on1 = std::pow(o, probe.n - 1);
  return {dn1 * d - on1 * o, dn1 - on1, lead * dn1 + lag * on1};
}

double f_closed(const GeneratingProbe& probe) {
  const auto abc = closed_form_abc(probe);
  const double den = abc.a + abc.b * probe.x + abc.c * probe.y;
  const double scale = std::abs(abc.a) + std::abs(abc.b * probe.x) + std::abs(abc.c * probe.y);
  if (std::abs(den) <= 64.0 * std::numeric_limits<double>::epsilon() * scale) {
    std::ostringstream msg;
    msg << "A + Bx + Cy vanishes at x = " << probe.x << ", y = " << probe.y;
    throw LabError(ErrorKind::PoleHit, msg.str());
  }
  return 1.0 / den;
}

ComplexMatrix generating_matrix(const GeneratingProbe& probe) {
  probe.validate();
  return probe_system(probe).densify();
}

double f_numeric(const GeneratingProbe& probe) {
  const auto det = det_lu(generating_matrix(probe));
  if (det.singular_to_working_precision || det.value == 0.0)
    throw LabError(ErrorKind::SingularMatrix, "generating matrix is singular");
  return 1.0 / det.value.real();
}

double correlator_closed(const GeneratingProbe& probe, int p, int q) {
  if (p < 0 || q < p) throw LabError(ErrorKind::InvalidArgument, "need 0 <= p <= q");
  const auto abc = closed_form_abc(probe);
  return factorial(q) * std::pow(abc.b, p) * std::pow(abc.c, q - p) / std::pow(abc.a, q);
}

double correlator_source_derivative(const GeneratingProbe& probe, int p, int q, double h) {
  if (p < 0 || q < p) throw LabError(ErrorKind::InvalidArgument, "need 0 <= p <= q");
  if (h <= 0.0)
    h = std::max(1e-5, std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (q + 2)));
  const int r = q - p;
  GeneratingProbe at = probe;
  at.x = at.y = 0.0;
  const double f0 = f_numeric(at);
  // Tensor product of central differences: exact for polynomials of degree
  // q + 1 in each direction, error O(h^2) otherwise.
  double acc = 0.0;
  for (int i = 0; i <= p; ++i) {
    for (int j = 0; j <= r; ++j) {
      at.x = (0.5 * p - i) * h;
      at.y = (0.5 * r - j) * h;
      const double sign = (i + j) % 2 ? -1.0 : 1.0;
      acc += sign * binomial(p, i) * binomial(r, j) * f_numeric(at);
    }
  }
  const double derivative = acc / std::pow(h, q);
  return (q % 2 ? -1.0 : 1.0) * derivative / f0;
}

ClosedFormABC abc_from_source_derivatives(const GeneratingProbe& probe, double h) {
  if (!(h > 0.0)) throw LabError(ErrorKind::InvalidArgument, "step must be positive");
  GeneratingProbe at = probe;
  at.x = at.y = 0.0;
  const double a = 1.0 / f_numeric(at);
  auto shifted = [&](double dx, double dy) {
    GeneratingProbe p = at;
    p.x = dx;
    p.y = dy;
    return f_numeric(p);
  };
  // Five-point central stencil: the x and y directions can be far steeper
  // than A when a*eps is small, and the O(h^2) stencil then loses ~6 digits.
  auto derivative = [&](double ux, double uy) {
    return (-shifted(2 * h * ux, 2 * h * uy) + 8.0 * shifted(h * ux, h * uy) -
            8.0 * shifted(-h * ux, -h * uy) + shifted(-2 * h * ux, -2 * h * uy)) /
           (12.0 * h);
  };
  const double dfdx = derivative(1.0, 0.0);
  const double dfdy = derivative(0.0, 1.0);
  return {a, -a * a * dfdx, -a * a * dfdy};
}

std::vector<ReplacementRow> replacement_limit_check(int p, int q, OrderingIndex s,
                                                    std::span<const int> n_values,
                                                    double beta, double a) {
  if (p < 0 || q < p) throw LabError(ErrorKind::InvalidArgument, "need 0 <= p <= q");
  if (!(beta > 0.0)) throw LabError(ErrorKind::InvalidArgument, "beta must be positive");
  const double target = factorial(q) / factorial(q - p);
  std::vector<ReplacementRow> rows;
  for (int n : n_values) {
    GeneratingProbe probe;
    probe.n = n;
    probe.epsilon = beta / n;
    probe.a = a;
    probe.s = s;
    const double ratio = correlator_closed(probe, p, q) / correlator_closed(probe, 0, q - p);
    rows.push_back({n, ratio, std::abs(ratio - target)});
  }
  return rows;
}

}  // namespace cspi
