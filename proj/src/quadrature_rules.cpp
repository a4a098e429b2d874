#include "cspi/quadrature_rules.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "cspi/error.hpp"

namespace cspi {
namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights are
// mu0 times the squared first components of its normalized eigenvectors.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                       double mu0) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  const Eigen::Index n = diag.size();
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * v0 * v0;
  }
  // Both weight functions used here are even: impose the exact mirror
  // symmetry so odd integrands cancel to rounding.
  for (Eigen::Index i = 0; i < n / 2; ++i) {
    const Eigen::Index j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace

GaussRule gauss_hermite_normal(int n) {
  if (n < 1) throw LabError(ErrorKind::InvalidArgument, "Gauss-Hermite needs n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  GaussRule rule = golub_welsch(diag, off, 1.0);  // mu0 = sqrt(pi), divided out
  for (auto& x : rule.nodes) x *= std::numbers::sqrt2;
  return rule;
}

GaussRule gauss_legendre(int n, double lo, double hi) {
  if (n < 1) throw LabError(ErrorKind::InvalidArgument, "Gauss-Legendre needs n >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  GaussRule rule = golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

}  // namespace cspi
