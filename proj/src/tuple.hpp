#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "numerics.hpp"

namespace charfun {

// A d-tuple of n x n matrices A_i, viewed as one row operator from the
// d-fold direct sum of C^n to C^n.
struct RowContraction {
  int d = 0;
  int n = 0;
  std::vector<Matrix> A;
};

struct ValidationReport {
  double contraction_norm = 0.0;   // ||sum A_i A_i^*||
  double coisometry_defect = 0.0;  // ||sum A_i A_i^* - 1||
  bool contraction = false;
  bool coisometric = false;
};

// Block data of equation-2.1 form with respect to C.Omega (+) ring(H):
// A_i = [[omega_i, 0], [|ell_i>, Aring_i]]. Aring_i is kept in ambient n x n
// coordinates (Q A_i Q); ring_basis gives the (n-1)-dimensional view.
struct ErgodicProfile {
  Vector Omega;               // unit vector in C^n
  Vector omega;               // d entries, sum |omega_i|^2 = 1
  Matrix Q;                   // projection onto Omega-perp
  std::vector<Vector> ell;    // d vectors, ell_i = A_i Omega - omega_i Omega
  std::vector<Matrix> Aring;  // d matrices Q A_i Q
  Matrix ring_basis;          // n x (n-1), orthonormal basis of Omega-perp
};

struct ErgodicityReport {
  std::vector<double> s;       // star-stability norms s_1..s_nmax
  bool decay_ok = false;       // ring Kraus map has spectral radius < 1
  double decay_ratio = 0.0;    // that spectral radius (asymptotic s-ratio)
  int fixed_point_dim = 0;     // dim of the eigenvalue-1 space of Z
  bool ergodic = false;
  bool tests_agree = false;
};

struct ErgodicityParams {
  int n_max = 40;
  double threshold = 1e-8;
  double tol = 1e-10;
};

void check_shapes(const RowContraction& A);

ValidationReport validate(const RowContraction& A, double tol = 1e-10);

/// Finds the unit vector Omega with A_i^* Omega = conj(omega_i) Omega by
/// solving for fixed points of the predual map rho -> sum A_i^* rho A_i.
/// Requires a coisometric tuple and a one-dimensional fixed-point space.
std::pair<Vector, Vector> find_invariant_vector_state(const RowContraction& A,
                                                      double tol = 1e-10);

ErgodicProfile block_decompose(const RowContraction& A, const Vector& Omega,
                               const Vector& omega, double tol = 1e-10);

/// s_m = ||sum_{|alpha|=m} Aring_alpha Aring_alpha^*||, computed by the
/// recursion M_{m+1} = sum_i Aring_i M_m Aring_i^* starting from Q.
std::vector<double> star_stability_norms(const ErgodicProfile& profile, int n_max);

/// Returns the iterates M_m themselves (used by tests and the decay table).
std::vector<Matrix> star_stability_iterates(const ErgodicProfile& profile, int n_max);

ErgodicityReport is_ergodic(const RowContraction& A, const ErgodicProfile& profile,
                            const ErgodicityParams& params = {});

/// r_m = ||(A_OmegaP^*)^m - |Omega><Omega||| for m = 0..n_max, where
/// A_OmegaP = sum_i conj(omega_i) A_i.
std::vector<double> omega_p_power_decay(const RowContraction& A,
                                        const ErgodicProfile& profile, int n_max);

struct GeneratedTuple {
  RowContraction tuple;
  ErgodicProfile profile;
  int retries = 0;
};

GeneratedTuple random_ergodic_tuple(int d, int n, uint64_t seed, int max_retries = 8,
                                    const ErgodicityParams& params = {});

/// Same generator with the eigenvalue tuple omega fixed in advance.
GeneratedTuple random_ergodic_tuple_with_omega(int d, int n, uint64_t seed,
                                               const Vector& omega, int max_retries = 8,
                                               const ErgodicityParams& params = {});

/// Convenience: validate + invariant state + block decomposition + ergodicity,
/// throwing on any failure. Used by everything downstream of the tuple module.
std::pair<ErgodicProfile, ErgodicityReport> require_ergodic_profile(
    const RowContraction& A, double tol = 1e-10, const ErgodicityParams& params = {});

/// vec(X) -> vec(sum_i A_i X B_i) as an n^2 x n^2 matrix (column-major vec).
Matrix kraus_map_matrix(const std::vector<Matrix>& left, const std::vector<Matrix>& right);

}  // namespace charfun
