#include "equivalence.hpp"

#include <cmath>
#include <limits>
#include <set>

#include <unsupported/Eigen/KroneckerProduct>

namespace charfun {

namespace {

// Stacks the coefficient family over a given word set into one tall matrix.
Matrix stack_symbol(const MultiAnalyticSymbol& sym, const std::set<std::size_t>& words) {
  Matrix stacked(static_cast<Eigen::Index>(words.size()) * sym.target_dim,
                 sym.source_dim);
  Eigen::Index row = 0;
  for (std::size_t widx : words) {
    stacked.middleRows(row, sym.target_dim) = sym.coeff(widx);
    row += sym.target_dim;
  }
  return stacked;
}

}  // namespace

EquivalenceReport symbols_equivalent(const MultiAnalyticSymbol& theta_A,
                                     const MultiAnalyticSymbol& theta_B,
                                     double accept_tol) {
  if (theta_A.d != theta_B.d || theta_A.depth != theta_B.depth ||
      theta_A.target_dim != theta_B.target_dim)
    throw Error(ErrorCode::FrameMismatch, "symbols live over different alphabets or depths");
  if ((theta_A.target_frame - theta_B.target_frame).norm() > 1e-8)
    throw Error(ErrorCode::FrameMismatch,
                "symbols target different omega-defect frames (different omega)");
  EquivalenceReport report;
  report.depth = theta_A.depth;
  report.threshold = accept_tol;
  if (theta_A.source_dim != theta_B.source_dim) {
    report.residual = std::numeric_limits<double>::infinity();
    return report;
  }
  std::set<std::size_t> words;
  for (const auto& [w, c] : theta_A.coeffs) words.insert(w);
  for (const auto& [w, c] : theta_B.coeffs) words.insert(w);
  Matrix SA = stack_symbol(theta_A, words);
  Matrix SB = stack_symbol(theta_B, words);
  Eigen::JacobiSVD<Matrix> svd_B(SB);
  if (svd_B.singularValues().size() == 0 ||
      svd_B.singularValues().minCoeff() < 0.1)
    throw Error(ErrorCode::Inconclusive, "stacked symbol is rank-deficient");
  Matrix cross = SB.adjoint() * SA;
  Eigen::JacobiSVD<Matrix> polar(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
  report.V = polar.matrixU() * polar.matrixV().adjoint();
  report.has_V = true;
  report.residual = operator_norm(SA - SB * report.V);
  report.unitarity_defect = operator_norm(
      report.V.adjoint() * report.V -
      Matrix::Identity(report.V.cols(), report.V.cols()));
  report.equivalent =
      report.residual <= accept_tol && report.unitarity_defect <= accept_tol;
  return report;
}

std::optional<Matrix> tuples_unitarily_equivalent(const RowContraction& A,
                                                  const RowContraction& B,
                                                  double tol) {
  check_shapes(A);
  check_shapes(B);
  if (A.d != B.d || A.n != B.n) return std::nullopt;
  const int d = A.d, n = A.n;
  Matrix id = Matrix::Identity(n, n);
  Matrix system(2 * d * n * n, n * n);
  for (int i = 0; i < d; ++i) {
    // vec(U A_i - B_i U) and vec(U A_i^* - B_i^* U)
    system.middleRows(2 * i * n * n, n * n) =
        Eigen::kroneckerProduct(A.A[i].transpose(), id).eval() -
        Eigen::kroneckerProduct(id, B.A[i]).eval();
    system.middleRows((2 * i + 1) * n * n, n * n) =
        Eigen::kroneckerProduct(A.A[i].conjugate(), id).eval() -
        Eigen::kroneckerProduct(id, B.A[i].adjoint()).eval();
  }
  Matrix null = nullspace(system, 1e-8);
  double accept = std::max(tol, 1e-8);
  for (Eigen::Index c = 0; c < null.cols(); ++c) {
    Matrix U = Eigen::Map<const Matrix>(null.col(c).data(), n, n);
    double scale = std::sqrt((U.adjoint() * U).trace().real() / n);
    if (scale < 1e-12) continue;
    U /= scale;
    if ((U.adjoint() * U - id).norm() <= accept) return U;
  }
  return std::nullopt;
}

Theorem61Report theorem61_crosscheck(const RowContraction& A, const RowContraction& B,
                                     const TruncationParams& params) {
  auto [profile_A, erg_A] = require_ergodic_profile(A, params.tol);
  auto [profile_B, erg_B] = require_ergodic_profile(B, params.tol);
  if (A.d != B.d ||
      (profile_A.omega - profile_B.omega).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorCode::NotComparable,
                "Theorem 6.1 needs tuples with the same eigenvalue tuple");

  DefectData defects_A = compute_defects(A, profile_A, params.tol);
  DefectData defects_B = compute_defects(B, profile_B, params.tol);
  MultiAnalyticSymbol theta_A = extended_charfun(A, profile_A, defects_A, params);
  MultiAnalyticSymbol theta_B = extended_charfun(B, profile_B, defects_B, params);

  Theorem61Report report;
  report.symbol_report =
      symbols_equivalent(theta_A, theta_B, std::max(1e-6, 10.0 * params.tol));
  report.symbols_yes = report.symbol_report.equivalent;

  auto U = tuples_unitarily_equivalent(A, B, params.tol);
  report.intertwiner_yes = U.has_value();
  if (U) {
    report.has_U = true;
    report.U = *U;
    Vector image = report.U * profile_A.Omega;
    Complex overlap = profile_B.Omega.dot(image);
    Complex phase = std::abs(overlap) > 1e-12 ? overlap / std::abs(overlap) : Complex(1.0);
    report.omega_map_residual = (image - phase * profile_B.Omega).norm();
  }
  report.consistent = (report.symbols_yes == report.intertwiner_yes);
  return report;
}

MixedTuple mixing_transform(const RowContraction& A, const Vector& omega,
                            const Matrix& u, double tol) {
  check_shapes(A);
  if (u.rows() != A.d || u.cols() != A.d)
    throw Error(ErrorCode::DimensionMismatch, "mixing matrix must be d x d");
  if ((u.adjoint() * u - Matrix::Identity(A.d, A.d)).norm() > std::max(tol, 1e-8))
    throw Error(ErrorCode::NotUnitary, "mixing matrix is not unitary");
  MixedTuple out;
  out.tuple.d = A.d;
  out.tuple.n = A.n;
  for (int i = 0; i < A.d; ++i) {
    Matrix Ai = Matrix::Zero(A.n, A.n);
    for (int j = 0; j < A.d; ++j) Ai += u(i, j) * A.A[j];
    out.tuple.A.push_back(std::move(Ai));
  }
  out.omega = u * omega;
  return out;
}

Matrix aligning_unitary(const Vector& a, const Vector& b) {
  const Eigen::Index d = a.size();
  auto complete = [d](const Vector& first) {
    Matrix basis(d, d);
    basis.col(0) = first / first.norm();
    Eigen::Index have = 1;
    for (Eigen::Index k = 0; k < d && have < d; ++k) {
      Vector v = Vector::Unit(d, k);
      for (Eigen::Index c = 0; c < have; ++c) v -= basis.col(c).dot(v) * basis.col(c);
      double nrm = v.norm();
      if (nrm < 1e-8) continue;
      basis.col(have++) = v / nrm;
    }
    if (have < d)
      throw Error(ErrorCode::GenerationFailed, "could not complete unitary basis");
    return basis;
  };
  return complete(a) * complete(b).adjoint();
}

ConjugacyWitness cp_conjugacy_witness(const RowContraction& A, const RowContraction& B,
                                      double tol) {
  check_shapes(A);
  check_shapes(B);
  ConjugacyWitness witness;
  if (A.d != B.d || A.n != B.n) return witness;
  const int n = A.n, d = A.d;
  const Eigen::Index N = static_cast<Eigen::Index>(n) * n;
  const double accept = std::max(tol, 1e-6);

  auto vec_of = [](const Matrix& M) {
    return Vector(Eigen::Map<const Vector>(M.data(), M.size()));
  };

  auto verify = [&](const Matrix& U) -> bool {
    Matrix M(N, d);
    for (int j = 0; j < d; ++j) M.col(j) = vec_of(U * A.A[j]);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(M);
    Matrix v(d, d);
    double res = 0.0;
    for (int i = 0; i < d; ++i) {
      Vector b = vec_of(B.A[i] * U);
      Vector vi = cod.solve(b);
      v.row(i) = vi.transpose();
      res = std::max(res, (M * vi - b).norm());
    }
    double u_defect = (U.adjoint() * U - Matrix::Identity(n, n)).norm();
    double v_defect = (v.adjoint() * v - Matrix::Identity(d, d)).norm();
    if (res <= accept && u_defect <= accept && v_defect <= accept) {
      witness.found = true;
      witness.U = U;
      witness.mixing = v;
      witness.residual = res;
      return true;
    }
    return false;
  };

  std::vector<Matrix> adj_A, adj_B;
  for (const Matrix& M : A.A) adj_A.push_back(M.adjoint());
  for (const Matrix& M : B.A) adj_B.push_back(M.adjoint());
  Matrix ZA = kraus_map_matrix(A.A, adj_A), ZB = kraus_map_matrix(B.A, adj_B);

  // equal Kraus maps are conjugate via the identity (pure mixing)
  if ((ZA - ZB).norm() <= accept && verify(Matrix::Identity(n, n))) return witness;

  // Solve the linear system on S = conj(U) (x) U: S intertwines the Kraus map
  // and its Heisenberg dual, fixes vec(1), and maps the invariant state of A
  // to that of B. The last two constraints remove the ever-present rank-one
  // solution |rho_B><rho_A| and make the system (generically) determined.
  Matrix ZAd = kraus_map_matrix(adj_A, A.A), ZBd = kraus_map_matrix(adj_B, B.A);
  auto [Omega_A, omega_A] = find_invariant_vector_state(A, tol);
  auto [Omega_B, omega_B] = find_invariant_vector_state(B, tol);
  Vector one = vec_of(Matrix::Identity(n, n));
  Vector rho_A = vec_of(Omega_A * Omega_A.adjoint());
  Vector rho_B = vec_of(Omega_B * Omega_B.adjoint());

  Matrix I_N = Matrix::Identity(N, N);
  Matrix G(2 * N * N + 2 * N, N * N);
  Vector g = Vector::Zero(G.rows());
  G.topRows(N * N) = Eigen::kroneckerProduct(I_N, ZB).eval() -
                     Eigen::kroneckerProduct(ZA.transpose(), I_N).eval();
  G.middleRows(N * N, N * N) = Eigen::kroneckerProduct(I_N, ZBd).eval() -
                               Eigen::kroneckerProduct(ZAd.transpose(), I_N).eval();
  G.middleRows(2 * N * N, N) =
      Eigen::kroneckerProduct(one.transpose(), I_N).eval();
  g.segment(2 * N * N, N) = one;
  G.middleRows(2 * N * N + N, N) =
      Eigen::kroneckerProduct(rho_A.transpose(), I_N).eval();
  g.segment(2 * N * N + N, N) = rho_B;

  Vector svec = G.completeOrthogonalDecomposition().solve(g);
  if ((G * svec - g).norm() > 1e-6 * g.norm()) return witness;  // no intertwiner
  Matrix S = Eigen::Map<const Matrix>(svec.data(), N, N);

  // Kronecker structure: the (a,b) <-> (r,c) realignment of conj(U) (x) U is
  // the rank-one outer product of the two flattened factors.
  Matrix K(N, N);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) K(a * n + b, r * n + c) = S(a * n + r, b * n + c);
  Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector y = svd.matrixV().col(0).conjugate();
  Matrix U(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) U(r, c) = y(r * n + c);
  Eigen::JacobiSVD<Matrix> polar(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
  verify(polar.matrixU() * polar.matrixV().adjoint());
  return witness;
}

Corollary63Report corollary63_check(const RowContraction& A, const RowContraction& B,
                                    const TruncationParams& params) {
  if (A.d != B.d)
    throw Error(ErrorCode::NotComparable, "CP maps with different Kraus rank");
  auto [profile_A, erg_A] = require_ergodic_profile(A, params.tol);
  auto [profile_B, erg_B] = require_ergodic_profile(B, params.tol);
  Matrix u = aligning_unitary(profile_A.omega, profile_B.omega);
  MixedTuple aligned = mixing_transform(B, profile_B.omega, u, params.tol);
  Corollary63Report report;
  report.inner = theorem61_crosscheck(A, aligned.tuple, params);
  // A missing componentwise intertwiner after omega alignment is not the end:
  // the aligned tuples may still differ by a mixing that fixes omega, so the
  // verdict falls back to the direct CP-map witness search.
  report.witness = cp_conjugacy_witness(A, B, params.tol);
  report.conjugate = report.inner.intertwiner_yes || report.witness.found;
  report.consistent = report.inner.consistent;
  return report;
}

}  // namespace charfun
