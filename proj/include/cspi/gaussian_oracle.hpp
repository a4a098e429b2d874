#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "cspi/kernels.hpp"
#include "cspi/model.hpp"

namespace cspi {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;

struct LuDeterminant {
  Complex value;
  /// min |U_kk| / max |U_kk| of the pivoted factorization.
  double pivot_ratio = 1.0;
  /// Set when the pivots carry no significant digits (ratio below N * eps).
  /// The value is still returned: det ~ 0 is a legitimate answer.
  bool singular_to_working_precision = false;
};

/// Determinant via partial-pivoting LU. Limited to N <= 2048.
LuDeterminant det_lu(const ComplexMatrix& m);

/// N x N matrix with diagonal d_k and one periodic subdiagonal: row k holds
/// o_k in column k-1, and row 0 wraps to column N-1.
class CyclicBidiagonalSystem {
 public:
  CyclicBidiagonalSystem(std::vector<Complex> diag, std::vector<Complex> sub);

  int n() const { return static_cast<int>(diag_.size()); }
  const std::vector<Complex>& diag() const { return diag_; }
  const std::vector<Complex>& sub() const { return sub_; }

  ComplexMatrix densify() const;

 private:
  std::vector<Complex> diag_;
  std::vector<Complex> sub_;
};

/// prod_k d_k - prod_k (-o_k). With d_k = 1 and o_k = -(1 + eps mu) this is
/// 1 - (1 + eps mu)^N.
Complex det_cyclic_closed(const CyclicBidiagonalSystem& system);

/// Pairing psi_i psi*_j in a Gaussian expectation.
struct WickPair {
  int i;
  int j;
};

/// Bosonic Wick sum <prod_a psi_{i_a} psi*_{j_a}> = permanent of the
/// submatrix (M^-1)_{i_a, j_b} for the measure exp(-psi^dag M psi).
/// Throws SingularMatrix when M cannot be inverted.
Complex wick_correlator(const ComplexMatrix& m, std::span<const WickPair> pairs);

enum class QuadratureScheme { Auto, TensorGrid, RadialReduced };

struct QuadratureSpec {
  /// Cutoff on |psi|^2 for the radial scheme and on each real coordinate of
  /// psi for the tensor grid. Zero selects the default from eps*U.
  double radial_cutoff = 0.0;
  /// Gauss-Legendre nodes per dimension (radial: per panel, 16 panels).
  int nodes = 24;
  QuadratureScheme scheme = QuadratureScheme::Auto;
  /// Relative tolerance for the cutoff-doubling and node-doubling checks.
  double tol = 1e-8;
  /// Global phase applied to every integration variable of the tensor grid.
  double phase = 0.0;
  kernels::Execution execution = kernels::Execution::Parallel;
};

/// Direct integration of exp(-S_1) over the N complex slice variables,
/// measure prod d^2 psi_k / pi, for N in {1, 2}.
///
/// N = 1 reduces to int_0^inf dr exp(-eps H_1(r)) with the radial scheme.
/// Throws DivergentSum unless the Hamiltonian has degree >= 2 with a positive
/// leading coefficient, CutoffTooSmall if doubling the cutoff changes the
/// result by more than tol (or produces non-finite values), NonConvergent if
/// doubling the nodes does.
PartitionEstimate quadrature_partition_small_n(const NormalHamiltonian& h,
                                               const TimeGrid& grid,
                                               const QuadratureSpec& spec = {});

}  // namespace cspi
