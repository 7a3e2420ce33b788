#include "numerics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace charfun {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::NonHermitian: return "NonHermitian";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotCoisometric: return "NotCoisometric";
    case ErrorCode::NoVectorState: return "NoVectorState";
    case ErrorCode::EigenvectorMismatch: return "EigenvectorMismatch";
    case ErrorCode::Inconclusive: return "Inconclusive";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::NotErgodic: return "NotErgodic";
    case ErrorCode::FrameMembership: return "FrameMembership";
    case ErrorCode::NotStarStable: return "NotStarStable";
    case ErrorCode::NotIsometric: return "NotIsometric";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::FrameMismatch: return "FrameMismatch";
    case ErrorCode::NotComparable: return "NotComparable";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownName: return "UnknownName";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

bool all_finite(const Matrix& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j)
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      const Complex& z = M(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

double hermiticity_defect(const Matrix& M) {
  return operator_norm(M - M.adjoint());
}

void fix_phase(Eigen::Ref<Vector> v, double eps) {
  double maxabs = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) maxabs = std::max(maxabs, std::abs(v(i)));
  if (maxabs == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double a = std::abs(v(i));
    if (a > eps * maxabs) {
      Complex phase = v(i) / a;
      v *= std::conj(phase);
      v(i) = Complex(std::abs(v(i)), 0.0);  // kill roundoff in the pivot entry
      return;
    }
  }
}

HermitianEig hermitian_eig(const Matrix& M, double tol) {
  if (M.rows() != M.cols())
    throw Error(ErrorCode::NonSquare, "hermitian_eig: matrix is not square");
  if (!all_finite(M))
    throw Error(ErrorCode::InvalidArgument, "hermitian_eig: non-finite entries");
  const double scale = operator_norm(M);
  const double defect = hermiticity_defect(M);
  if (defect > tol * std::max(scale, 1.0))
    throw Error(ErrorCode::NonHermitian,
                "hermitian_eig: Hermiticity defect " + std::to_string(defect));
  Matrix H = 0.5 * (M + M.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(H);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "hermitian_eig: solver did not converge");
  HermitianEig result;
  result.values = solver.eigenvalues();
  result.vectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < result.vectors.cols(); ++j)
    fix_phase(result.vectors.col(j));
  return result;
}

Matrix psd_sqrt(const Matrix& M, double tol) {
  HermitianEig eig = hermitian_eig(M, tol);
  RealVector roots(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    double lambda = eig.values(k);
    if (lambda < -tol)
      throw Error(ErrorCode::NotPSD,
                  "psd_sqrt: eigenvalue " + std::to_string(lambda) + " below -tol");
    roots(k) = lambda > 0.0 ? std::sqrt(lambda) : 0.0;
  }
  return eig.vectors * roots.asDiagonal() * eig.vectors.adjoint();
}

Matrix orthonormal_range(const Matrix& M, double tol) {
  if (M.size() == 0) return Matrix(M.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU);
  const auto& sigma = svd.singularValues();
  double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > tol * smax && sigma(k) > 0.0) ++rank;
  Matrix B = svd.matrixU().leftCols(rank);
  for (Eigen::Index j = 0; j < B.cols(); ++j) fix_phase(B.col(j));
  return B;
}

Matrix nullspace(const Matrix& M, double tol) {
  if (M.cols() == 0) return Matrix(0, 0);
  Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  double smax = sigma.size() > 0 ? sigma(0) : 0.0;
  double cut = tol * std::max(smax, 1.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > cut) ++rank;
  Matrix K = svd.matrixV().rightCols(M.cols() - rank);
  for (Eigen::Index j = 0; j < K.cols(); ++j) fix_phase(K.col(j));
  return K;
}

double operator_norm(const Matrix& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(M);
  return svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
}

double spectral_radius(const Matrix& M) {
  if (M.rows() != M.cols())
    throw Error(ErrorCode::NonSquare, "spectral radius needs a square matrix");
  if (M.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> solver(M, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::NoConvergence, "eigenvalue iteration did not converge");
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace charfun
