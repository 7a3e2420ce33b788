#include "tuple.hpp"

#include <cmath>
#include <random>

namespace charfun {

void check_shapes(const RowContraction& A) {
  if (A.d < 2)
    throw Error(ErrorCode::InvalidArgument, "row contraction needs d >= 2");
  if (A.n < 1)
    throw Error(ErrorCode::InvalidArgument, "row contraction needs n >= 1");
  if (static_cast<int>(A.A.size()) != A.d)
    throw Error(ErrorCode::DimensionMismatch, "expected d matrices");
  for (const Matrix& M : A.A) {
    if (M.rows() != A.n || M.cols() != A.n)
      throw Error(ErrorCode::DimensionMismatch, "matrices must be n x n");
    if (!all_finite(M))
      throw Error(ErrorCode::InvalidArgument, "non-finite matrix entries");
  }
}

Matrix kraus_map_matrix(const std::vector<Matrix>& left, const std::vector<Matrix>& right) {
  const Eigen::Index n = left.at(0).rows();
  Matrix M = Matrix::Zero(n * n, n * n);
  for (std::size_t k = 0; k < left.size(); ++k) {
    // vec(A X B) = (B^T kron A) vec(X)
    const Matrix& A = left[k];
    const Matrix Bt = right[k].transpose();
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        M.block(i * n, j * n, n, n) += Bt(i, j) * A;
  }
  return M;
}

ValidationReport validate(const RowContraction& A, double tol) {
  check_shapes(A);
  Matrix S = Matrix::Zero(A.n, A.n);
  for (const Matrix& M : A.A) S += M * M.adjoint();
  ValidationReport report;
  report.contraction_norm = operator_norm(S);
  report.coisometry_defect = operator_norm(S - Matrix::Identity(A.n, A.n));
  report.contraction = report.contraction_norm <= 1.0 + tol;
  report.coisometric = report.coisometry_defect <= tol;
  return report;
}

std::pair<Vector, Vector> find_invariant_vector_state(const RowContraction& A, double tol) {
  ValidationReport report = validate(A, tol);
  if (!report.coisometric)
    throw Error(ErrorCode::NotCoisometric,
                "coisometry defect " + std::to_string(report.coisometry_defect));
  std::vector<Matrix> adj;
  adj.reserve(A.d);
  for (const Matrix& M : A.A) adj.push_back(M.adjoint());
  // fixed points of the predual map rho -> sum A_i^* rho A_i
  Matrix T = kraus_map_matrix(adj, A.A);
  Matrix fixed = nullspace(T - Matrix::Identity(T.rows(), T.cols()), 1e-8);
  if (fixed.cols() == 0)
    throw Error(ErrorCode::NoVectorState, "predual map has no fixed point");
  if (fixed.cols() > 1)
    throw Error(ErrorCode::NoVectorState,
                "fixed-point space has dimension " + std::to_string(fixed.cols()) +
                    "; tuple is not ergodic");
  Matrix rho = Eigen::Map<const Matrix>(fixed.col(0).data(), A.n, A.n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  Complex tr = rho.trace();
  if (std::abs(tr) < tol)
    throw Error(ErrorCode::NoVectorState, "fixed point has vanishing trace");
  rho /= tr;
  HermitianEig eig = hermitian_eig(rho, 1e-8);
  // rank-one PSD check: one eigenvalue 1, the rest negligible
  double spur = 0.0;
  for (Eigen::Index k = 0; k + 1 < eig.values.size(); ++k)
    spur = std::max(spur, std::abs(eig.values(k)));
  if (spur > 1e-8 || std::abs(eig.values(eig.values.size() - 1) - 1.0) > 1e-8)
    throw Error(ErrorCode::NoVectorState, "fixed point is not rank one");
  Vector Omega = eig.vectors.col(eig.vectors.cols() - 1);
  fix_phase(Omega);
  Vector omega(A.d);
  for (int i = 0; i < A.d; ++i) omega(i) = Omega.dot(A.A[i] * Omega);
  for (int i = 0; i < A.d; ++i) {
    double defect = (A.A[i].adjoint() * Omega - std::conj(omega(i)) * Omega).norm();
    if (defect > 1e-8)
      throw Error(ErrorCode::NoVectorState,
                  "extracted vector is not a joint eigenvector of the adjoints");
  }
  return {Omega, omega};
}

ErgodicProfile block_decompose(const RowContraction& A, const Vector& Omega,
                               const Vector& omega, double tol) {
  check_shapes(A);
  if (Omega.size() != A.n || omega.size() != A.d)
    throw Error(ErrorCode::DimensionMismatch, "block_decompose: bad Omega/omega sizes");
  for (int i = 0; i < A.d; ++i) {
    double defect = (A.A[i].adjoint() * Omega - std::conj(omega(i)) * Omega).norm();
    if (defect > std::max(tol, 1e-8))
      throw Error(ErrorCode::EigenvectorMismatch,
                  "A_i^* Omega != conj(omega_i) Omega, defect " + std::to_string(defect));
  }
  ErgodicProfile profile;
  profile.Omega = Omega;
  profile.omega = omega;
  profile.Q = Matrix::Identity(A.n, A.n) - Omega * Omega.adjoint();
  profile.ell.reserve(A.d);
  profile.Aring.reserve(A.d);
  for (int i = 0; i < A.d; ++i) {
    profile.ell.push_back(A.A[i] * Omega - omega(i) * Omega);
    profile.Aring.push_back(profile.Q * A.A[i] * profile.Q);
  }
  // project standard basis vectors through Q, orthonormalize in index order
  Matrix basis(A.n, A.n - 1);
  int kept = 0;
  for (int k = 0; k < A.n && kept < A.n - 1; ++k) {
    Vector v = profile.Q.col(k);
    for (int j = 0; j < kept; ++j) v -= basis.col(j).dot(v) * basis.col(j);
    double norm = v.norm();
    if (norm < 1e-8) continue;
    basis.col(kept++) = v / norm;
  }
  profile.ring_basis = basis.leftCols(kept);
  return profile;
}

std::vector<Matrix> star_stability_iterates(const ErgodicProfile& profile, int n_max) {
  std::vector<Matrix> out;
  out.reserve(n_max);
  Matrix M = profile.Q;
  const int d = static_cast<int>(profile.Aring.size());
  for (int m = 1; m <= n_max; ++m) {
    Matrix next = Matrix::Zero(M.rows(), M.cols());
    for (int i = 0; i < d; ++i)
      next += profile.Aring[i] * M * profile.Aring[i].adjoint();
    M = next;
    out.push_back(M);
  }
  return out;
}

std::vector<double> star_stability_norms(const ErgodicProfile& profile, int n_max) {
  std::vector<double> s;
  s.reserve(n_max);
  for (const Matrix& M : star_stability_iterates(profile, n_max))
    s.push_back(operator_norm(M));
  return s;
}

ErgodicityReport is_ergodic(const RowContraction& A, const ErgodicProfile& profile,
                            const ErgodicityParams& params) {
  ErgodicityReport report;
  report.s = star_stability_norms(profile, params.n_max);
  // s_n = ||Zring^n(q)|| -> 0 iff the ring Kraus map has spectral radius < 1:
  // every PSD x on the corner is dominated by a multiple of q, so decay of the
  // q-orbit is decay of the whole map.
  std::vector<Matrix> ring_adj;
  for (const Matrix& M : profile.Aring) ring_adj.push_back(M.adjoint());
  report.decay_ratio = spectral_radius(kraus_map_matrix(profile.Aring, ring_adj));
  report.decay_ok = report.decay_ratio < 1.0 - 1e-9;
  std::vector<Matrix> adj;
  for (const Matrix& M : A.A) adj.push_back(M.adjoint());
  Matrix Z = kraus_map_matrix(A.A, adj);
  Matrix fixed = nullspace(Z - Matrix::Identity(Z.rows(), Z.cols()), 1e-8);
  report.fixed_point_dim = static_cast<int>(fixed.cols());
  bool fixed_ok = report.fixed_point_dim == 1;
  report.tests_agree = (report.decay_ok == fixed_ok);
  report.ergodic = report.decay_ok && fixed_ok;
  return report;
}

std::vector<double> omega_p_power_decay(const RowContraction& A,
                                        const ErgodicProfile& profile, int n_max) {
  Matrix P = Matrix::Zero(A.n, A.n);
  for (int i = 0; i < A.d; ++i) P += std::conj(profile.omega(i)) * A.A[i];
  Matrix Padj = P.adjoint();
  Matrix target = profile.Omega * profile.Omega.adjoint();
  std::vector<double> r;
  r.reserve(n_max + 1);
  Matrix X = Matrix::Identity(A.n, A.n);
  r.push_back(operator_norm(X - target));
  for (int m = 1; m <= n_max; ++m) {
    X = Padj * X;
    r.push_back(operator_norm(X - target));
  }
  return r;
}

namespace {

Vector random_unit_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v(k) = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

GeneratedTuple generate(int d, int n, uint64_t seed, std::optional<Vector> fixed_omega,
                        int max_retries, const ErgodicityParams& params) {
  if (d < 2 || n < 1)
    throw Error(ErrorCode::InvalidArgument, "generator needs d >= 2, n >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Vector omega = fixed_omega ? *fixed_omega : random_unit_vector(rng, d);
    // column isometry A^*: C^n -> (+)^d C^n; the Omega = e_1 column is pinned
    // to (conj(omega_1) Omega, ..., conj(omega_d) Omega)
    Matrix iso(d * n, n);
    for (int i = 0; i < d; ++i) {
      iso.col(0).segment(i * n, n).setZero();
      iso(i * n, 0) = std::conj(omega(i));
    }
    for (int c = 1; c < n; ++c) {
      double norm = 0.0;
      Vector v(d * n);
      do {
        for (int k = 0; k < d * n; ++k) v(k) = Complex(gauss(rng), gauss(rng));
        for (int j = 0; j < c; ++j) v -= iso.col(j).dot(v) * iso.col(j);
        norm = v.norm();
      } while (norm < 1e-8);
      iso.col(c) = v / norm;
    }
    RowContraction tuple;
    tuple.d = d;
    tuple.n = n;
    for (int i = 0; i < d; ++i)
      tuple.A.push_back(iso.block(i * n, 0, n, n).adjoint());
    try {
      auto [Omega, omega_found] = find_invariant_vector_state(tuple, params.tol);
      ErgodicProfile profile = block_decompose(tuple, Omega, omega_found, params.tol);
      ErgodicityReport report = is_ergodic(tuple, profile, params);
      if (report.ergodic) return {std::move(tuple), std::move(profile), attempt};
    } catch (const Error&) {
      // redraw
    }
  }
  throw Error(ErrorCode::GenerationFailed,
              "no ergodic tuple within " + std::to_string(max_retries) + " retries");
}

}  // namespace

GeneratedTuple random_ergodic_tuple(int d, int n, uint64_t seed, int max_retries,
                                    const ErgodicityParams& params) {
  return generate(d, n, seed, std::nullopt, max_retries, params);
}

GeneratedTuple random_ergodic_tuple_with_omega(int d, int n, uint64_t seed,
                                               const Vector& omega, int max_retries,
                                               const ErgodicityParams& params) {
  if (omega.size() != d || std::abs(omega.norm() - 1.0) > 1e-10)
    throw Error(ErrorCode::InvalidArgument, "omega must be a unit vector in C^d");
  return generate(d, n, seed, omega, max_retries, params);
}

std::pair<ErgodicProfile, ErgodicityReport> require_ergodic_profile(
    const RowContraction& A, double tol, const ErgodicityParams& params) {
  auto [Omega, omega] = find_invariant_vector_state(A, tol);
  ErgodicProfile profile = block_decompose(A, Omega, omega, tol);
  ErgodicityReport report = is_ergodic(A, profile, params);
  if (!report.ergodic) {
    if (!report.tests_agree)
      throw Error(ErrorCode::Inconclusive,
                  "ergodicity tests disagree: decay=" + std::to_string(report.decay_ok) +
                      " fixed_point_dim=" + std::to_string(report.fixed_point_dim));
    throw Error(ErrorCode::NotErgodic, "tuple is not ergodic");
  }
  return {std::move(profile), std::move(report)};
}

}  // namespace charfun
