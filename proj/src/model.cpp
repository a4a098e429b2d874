#include "cspi/model.hpp"

#include <cmath>
#include <string>

#include "cspi/error.hpp"

namespace cspi {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DivergentSum: return "DivergentSum";
    case ErrorKind::PolicyExhausted: return "PolicyExhausted";
    case ErrorKind::PrecisionLoss: return "PrecisionLoss";
    case ErrorKind::TruncationTooSmall: return "TruncationTooSmall";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::PoleHit: return "PoleHit";
    case ErrorKind::CutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::UnsupportedDegree: return "UnsupportedDegree";
    case ErrorKind::QuadratureNotConverged: return "QuadratureNotConverged";
    case ErrorKind::DenominatorPole: return "DenominatorPole";
    case ErrorKind::SeriesNotDecaying: return "SeriesNotDecaying";
    case ErrorKind::NearPoleSample: return "NearPoleSample";
    case ErrorKind::ContourDeformationRequired: return "ContourDeformationRequired";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

LabError::LabError(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::Spectral: return "spectral";
    case Method::Transfer: return "transfer";
    case Method::HsSeries: return "hs-series";
    case Method::HsMc: return "hs-mc";
    case Method::Quadrature: return "quadrature";
  }
  return "unknown";
}

NormalHamiltonian::NormalHamiltonian(std::map<int, double> coefficients) {
  for (const auto& [q, g] : coefficients) {
    if (q < 0) throw LabError(ErrorKind::InvalidArgument, "negative power q in Hamiltonian");
    if (!std::isfinite(g)) throw LabError(ErrorKind::InvalidArgument, "non-finite g_q");
    if (g != 0.0) g_[q] = g;
  }
}

NormalHamiltonian NormalHamiltonian::bose_hubbard(double mu, double u) {
  return NormalHamiltonian({{1, -mu}, {2, 0.5 * u}});
}

double NormalHamiltonian::coefficient(int q) const {
  auto it = g_.find(q);
  return it == g_.end() ? 0.0 : it->second;
}

int NormalHamiltonian::degree() const { return g_.empty() ? -1 : g_.rbegin()->first; }

double NormalHamiltonian::energy(long n) const {
  double e = 0.0;
  for (const auto& [q, g] : g_) {
    if (q > n) break;
    double falling = 1.0;
    for (int j = 0; j < q; ++j) falling *= static_cast<double>(n - j);
    e += g * falling;
  }
  return e;
}

TimeGrid::TimeGrid(double beta, int n_slices) : beta_(beta), n_(n_slices) {
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw LabError(ErrorKind::InvalidArgument, "beta must be positive");
  if (n_slices < 1) throw LabError(ErrorKind::InvalidArgument, "N must be >= 1");
}

OrderingIndex::OrderingIndex(double s) : s_(s) {
  if (!(s >= -1.0 && s <= 1.0))
    throw LabError(ErrorKind::InvalidArgument, "ordering index s must lie in [-1, 1]");
}

int PolynomialSymbol::degree() const {
  for (int i = static_cast<int>(coefficients.size()) - 1; i >= 0; --i)
    if (coefficients[i] != 0.0) return i;
  return -1;
}

double PolynomialSymbol::operator()(double x) const {
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * x + *it;
  return acc;
}

void TruncationPolicy::validate() const {
  if (n_max < 1) throw LabError(ErrorKind::InvalidArgument, "truncation n_max must be >= 1");
  if (!(tol > 0.0)) throw LabError(ErrorKind::InvalidArgument, "truncation tol must be > 0");
  if (!(cancellation_limit > 0.0))
    throw LabError(ErrorKind::InvalidArgument, "cancellation_limit must be > 0");
}

}  // namespace cspi
