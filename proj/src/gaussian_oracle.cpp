#include "cspi/gaussian_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/LU>

#include "cspi/error.hpp"
#include "cspi/quadrature_rules.hpp"

namespace cspi {

LuDeterminant det_lu(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw LabError(ErrorKind::InvalidArgument, "det_lu needs a square matrix");
  if (m.rows() > 2048) throw LabError(ErrorKind::InvalidArgument, "det_lu is limited to N <= 2048");
  if (!m.allFinite()) throw LabError(ErrorKind::InvalidArgument, "matrix has non-finite entries");
  LuDeterminant out;
  if (m.rows() == 0) {
    out.value = 1.0;
    return out;
  }
  const Eigen::PartialPivLU<ComplexMatrix> lu(m);
  out.value = lu.determinant();
  const Eigen::VectorXd pivots = lu.matrixLU().diagonal().cwiseAbs();
  const double largest = pivots.maxCoeff();
  out.pivot_ratio = largest > 0.0 ? pivots.minCoeff() / largest : 0.0;
  out.singular_to_working_precision =
      out.pivot_ratio < static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon();
  return out;
}

CyclicBidiagonalSystem::CyclicBidiagonalSystem(std::vector<Complex> diag,
                                               std::vector<Complex> sub)
    : diag_(std::move(diag)), sub_(std::move(sub)) {
  if (diag_.empty() || diag_.size() != sub_.size())
    throw LabError(ErrorKind::InvalidArgument, "cyclic system needs matching non-empty bands");
}

ComplexMatrix CyclicBidiagonalSystem::densify() const {
  const int n = this->n();
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    m(k, k) += diag_[k];
    m(k, (k + n - 1) % n) += sub_[k];
  }
  return m;
}

Complex det_cyclic_closed(const CyclicBidiagonalSystem& system) {
  Complex diag_product = 1.0, sub_product = 1.0;
  for (int k = 0; k < system.n(); ++k) {
    diag_product *= system.diag()[k];
    sub_product *= -system.sub()[k];
  }
  return diag_product - sub_product;
}

Complex wick_correlator(const ComplexMatrix& m, std::span<const WickPair> pairs) {
  if (pairs.empty()) return 1.0;
  if (pairs.size() > 10)
    throw LabError(ErrorKind::InvalidArgument, "Wick sums limited to 10 pairs");
  for (const auto& p : pairs)
    if (p.i < 0 || p.j < 0 || p.i >= m.rows() || p.j >= m.cols())
      throw LabError(ErrorKind::InvalidArgument, "Wick pair index out of range");
  const auto det = det_lu(m);
  if (det.singular_to_working_precision || std::abs(det.value) == 0.0)
    throw LabError(ErrorKind::SingularMatrix, "Gaussian kernel is not invertible");
  const ComplexMatrix inverse = Eigen::PartialPivLU<ComplexMatrix>(m).inverse();

  std::vector<int> perm(pairs.size());
  std::iota(perm.begin(), perm.end(), 0);
  Complex total = 0.0;
  do {
    Complex term = 1.0;
    for (std::size_t a = 0; a < pairs.size(); ++a) term *= inverse(pairs[a].i, pairs[perm[a]].j);
    total += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

namespace {

Complex symbol_value(const NormalHamiltonian& h, Complex x) {
  Complex acc = 0.0;
  for (int q = h.degree(); q >= 0; --q) acc = acc * x + h.coefficient(q);
  return acc;
}

void require_quartic_confinement(const NormalHamiltonian& h) {
  if (h.degree() < 2 || h.coefficient(h.degree()) <= 0.0)
    throw LabError(ErrorKind::DivergentSum,
                   "direct integration needs degree >= 2 with a positive leading coefficient");
}

// Default cutoff on r = |psi|^2: the integrand decays like exp(-eps U r^2 / 2).
double default_radial_cutoff(const NormalHamiltonian& h, double epsilon) {
  const double u = 2.0 * h.coefficient(2);
  double r = u > 0.0 ? 8.0 / std::sqrt(epsilon * u) : 8.0;
  while (epsilon * h.energy(0) + epsilon * symbol_value(h, r).real() < 40.0) r *= 1.5;
  return r;
}

double radial_integral(const NormalHamiltonian& h, double epsilon, double cutoff, int nodes) {
  constexpr int panels = 16;
  double total = 0.0;
  const double width = cutoff / panels;
  for (int p = 0; p < panels; ++p) {
    const GaussRule rule = gauss_legendre(nodes, p * width, (p + 1) * width);
    for (std::size_t i = 0; i < rule.size(); ++i)
      total += rule.weights[i] * std::exp(-epsilon * symbol_value(h, rule.nodes[i]).real());
  }
  return total;
}

// Tensor Gauss-Legendre over the 2N real coordinates of psi_1..psi_N on
// [-cutoff, cutoff], each complex variable rotated by exp(i phase).
Complex tensor_integral(const NormalHamiltonian& h, const TimeGrid& grid, double cutoff,
                        int nodes, double phase, kernels::Execution exec) {
  const int n = grid.n_slices();
  const int dims = 2 * n;
  const double epsilon = grid.epsilon();
  const GaussRule rule = gauss_legendre(nodes, -cutoff, cutoff);
  const Complex rotation = std::polar(1.0, phase);
  std::size_t count = 1;
  for (int d = 0; d < dims; ++d) count *= static_cast<std::size_t>(nodes);
  const double measure = std::pow(std::numbers::pi, -n);

  auto point = [&](std::size_t index) -> Complex {
    Complex psi[4];
    double weight = measure;
    std::size_t rest = index;
    double coord[8];
    for (int d = 0; d < dims; ++d) {
      const std::size_t digit = rest % nodes;
      rest /= nodes;
      coord[d] = rule.nodes[digit];
      weight *= rule.weights[digit];
    }
    for (int k = 0; k < n; ++k) psi[k] = rotation * Complex(coord[2 * k], coord[2 * k + 1]);
    Complex action = 0.0;
    for (int k = 0; k < n; ++k) {
      const Complex& cur = psi[k];
      const Complex& prev = psi[(k + n - 1) % n];
      action += std::conj(cur) * (cur - prev) + epsilon * symbol_value(h, std::conj(cur) * prev);
    }
    return weight * std::exp(-action);
  };
  return kernels::chunked_reduce<Complex>(exec, count, point);
}

}  // namespace

PartitionEstimate quadrature_partition_small_n(const NormalHamiltonian& h,
                                               const TimeGrid& grid,
                                               const QuadratureSpec& spec) {
  const int n = grid.n_slices();
  if (n > 2) throw LabError(ErrorKind::InvalidArgument, "direct quadrature supports N <= 2 only");
  if (spec.nodes < 2) throw LabError(ErrorKind::InvalidArgument, "need at least 2 nodes");
  require_quartic_confinement(h);
  const double epsilon = grid.epsilon();
  const double r_cut =
      spec.radial_cutoff > 0.0 ? spec.radial_cutoff : default_radial_cutoff(h, epsilon);

  QuadratureScheme scheme = spec.scheme;
  if (scheme == QuadratureScheme::Auto)
    scheme = n == 1 ? QuadratureScheme::RadialReduced : QuadratureScheme::TensorGrid;
  if (scheme == QuadratureScheme::RadialReduced && n != 1)
    throw LabError(ErrorKind::InvalidArgument, "radial reduction only applies to N = 1");

  auto evaluate = [&](double cutoff, int nodes) -> Complex {
    if (scheme == QuadratureScheme::RadialReduced)
      return radial_integral(h, epsilon, cutoff, nodes);
    // For the tensor grid the cutoff applies to each real coordinate.
    const int per_dim = n == 1 ? 8 * nodes : nodes;
    return tensor_integral(h, grid, std::sqrt(cutoff), per_dim, spec.phase, spec.execution);
  };

  const Complex base = evaluate(r_cut, spec.nodes);
  const Complex wider = evaluate(2.0 * r_cut, spec.nodes);
  const double scale = std::abs(base);
  if (!std::isfinite(std::abs(wider)) || !std::isfinite(scale) ||
      std::abs(wider - base) > spec.tol * scale) {
    std::ostringstream msg;
    msg << "doubling the cutoff (" << r_cut << " -> " << 2.0 * r_cut
        << ") changed the integral from " << base << " to " << wider
        << "; the integrand is not confined (N = " << n << ")";
    throw LabError(ErrorKind::CutoffTooSmall, msg.str());
  }
  const Complex finer = evaluate(r_cut, 2 * spec.nodes);
  if (!std::isfinite(std::abs(finer)) || std::abs(finer - base) > spec.tol * scale) {
    std::ostringstream msg;
    msg << "doubling the nodes changed the integral from " << base << " to " << finer;
    throw LabError(ErrorKind::NonConvergent, msg.str());
  }
  PartitionEstimate est;
  est.value = finer.real();
  est.method = Method::Quadrature;
  est.n_used = 2 * spec.nodes;
  est.tail_bound = std::abs(wider - base);
  est.imag_residue = std::abs(finer.imag());
  return est;
}

}  // namespace cspi
