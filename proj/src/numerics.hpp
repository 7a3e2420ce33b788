#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace charfun {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

enum class ErrorCode {
  NonSquare,
  NonHermitian,
  NoConvergence,
  NotPSD,
  DimensionMismatch,
  NotCoisometric,
  NoVectorState,
  EigenvectorMismatch,
  Inconclusive,
  GenerationFailed,
  NotErgodic,
  FrameMembership,
  NotStarStable,
  NotIsometric,
  NotUnitary,
  FrameMismatch,
  NotComparable,
  BudgetExceeded,
  ParseError,
  UnknownName,
  InvalidArgument,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

struct HermitianEig {
  RealVector values;  // ascending
  Matrix vectors;     // orthonormal columns, deterministic phase
};

/// Eigendecomposition of a Hermitian matrix. The input is symmetrized first;
/// a Hermiticity defect above tol * ||M|| is an error. Eigenvector phases are
/// fixed so the first significant entry of each column is real positive.
HermitianEig hermitian_eig(const Matrix& M, double tol = 1e-10);

/// Hermitian PSD square root. Eigenvalues in [-tol, 0) are clipped to zero,
/// anything below -tol raises NotPSD.
Matrix psd_sqrt(const Matrix& M, double tol = 1e-10);

/// Orthonormal basis of the column space (singular values > tol * sigma_max
/// kept). Deterministic: SVD order, leading entry of each column made real
/// positive. A zero matrix yields zero columns.
Matrix orthonormal_range(const Matrix& M, double tol = 1e-12);

/// Orthonormal basis of the kernel, via singular-value thresholding.
Matrix nullspace(const Matrix& M, double tol = 1e-10);

double spectral_radius(const Matrix& M);

double operator_norm(const Matrix& M);

double hermiticity_defect(const Matrix& M);

bool all_finite(const Matrix& M);

/// Makes the first entry with |v_k| > eps * max|v| real positive.
void fix_phase(Eigen::Ref<Vector> v, double eps = 1e-8);

}  // namespace charfun
