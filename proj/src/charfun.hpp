#pragma once

#include "fock.hpp"
#include "tuple.hpp"

namespace charfun {

// Defect data of a coisometric tuple: the dn x dn projection
// D = (delta_ij 1 - A_i^* A_j), an orthonormal basis of its range D_A, and a
// basis of the omega-defect subspace D_omega = Omega_P-perp inside C^d, where
// Omega_P = (conj(omega_1), ..., conj(omega_d))^T.
struct DefectData {
  Matrix D;                   // dn x dn
  Matrix basis_DA;            // dn x r, r = dn - n for coisometric input
  Vector Omega_P;             // d
  Matrix omega_defect_frame;  // d x (d-1), orthonormal columns
};

// Defects of the *-stable corner Aring, in ring coordinates (n' = n-1):
// Dring = (1 - Aring^* Aring)^{1/2} on the d-fold sum, Dring_star on ring(H).
struct RingDefectData {
  std::vector<Matrix> Aring_rc;  // d matrices n' x n'
  std::vector<Vector> ell_rc;    // d vectors in C^{n'}
  Matrix Dring;                  // dn' x dn'
  Matrix Dring_star;             // n' x n'
  Matrix Dring_star_ambient;     // n x n view, supported on ring(H)
  Matrix basis_Dring;            // dn' x rank
  Matrix basis_Dring_star;       // n' x rank*
};

/// Deterministic orthonormal basis of D_omega = Omega_P-perp in C^d.
Matrix omega_frame(const Vector& omega);

DefectData compute_defects(const RowContraction& A, const ErgodicProfile& profile,
                           double tol = 1e-10);

RingDefectData compute_ring_defects(const ErgodicProfile& profile, double tol = 1e-10);

/// The d x n matrix of Dstar_hat: row i equals <ell_i|, so
/// Dstar_hat h = sum_i <ell_i, h> eps_i. Maps ring(H) into D_omega.
Matrix dstar_hat(const ErgodicProfile& profile);

/// Coefficient family of the Poisson-type embedding C_hat on ring(H):
/// c_alpha = Dstar_hat (Aring_alpha)^*, stored in D_omega frame coordinates
/// with source dimension n (ambient). On all of H, C_hat Omega = 1 (+) 0.
MultiAnalyticSymbol poisson_hat(const ErgodicProfile& profile,
                                const TruncationParams& params = {});

/// Case I of the extended characteristic function: the coefficient family of
/// theta_hat d^i_Omega, as ambient C^d vectors per word.
std::map<std::size_t, Vector> charfun_case1(const ErgodicProfile& profile, int i,
                                            const TruncationParams& params = {});

/// Case II: coefficient family of theta_hat d^i_h for h in ring(H), as
/// ambient C^d vectors per word. Target words (j, alpha) with |alpha| = depth
/// are dropped, consistent with depth-N symbols.
std::map<std::size_t, Vector> charfun_case2(const ErgodicProfile& profile, int i,
                                            const Vector& h,
                                            const TruncationParams& params = {});

/// The extended characteristic function theta_hat as a truncated symbol:
/// source = the orthonormal basis of D_A, target = D_omega in frame
/// coordinates. Every coefficient is checked for D_omega membership.
MultiAnalyticSymbol extended_charfun(const RowContraction& A,
                                     const ErgodicProfile& profile,
                                     const DefectData& defects,
                                     const TruncationParams& params = {});

/// Popescu's characteristic function of the *-stable corner: source = basis
/// of Range Dring, target = Range Dring_star in basis coordinates.
MultiAnalyticSymbol popescu_charfun(const ErgodicProfile& profile,
                                    const RingDefectData& ring,
                                    const TruncationParams& params = {});

/// The isometry gamma with gamma (Dring_star h) = Dstar_hat h, as a
/// (d-1) x rank* matrix from Dring_star-basis coordinates to the D_omega
/// frame. Verified to satisfy gamma^* gamma = 1.
Matrix gamma_isometry(const ErgodicProfile& profile, const RingDefectData& ring,
                      const DefectData& defects, double tol = 1e-8);

struct Theorem52Report {
  double symbol_residual = 0.0;   // max ||(1 (x) gamma) theta_ring d^i_h - theta_hat d^i_h||
  double poisson_residual = 0.0;  // max ||(1 (x) gamma) C_ring h - C_hat h||
};

Theorem52Report theorem52_check(const RowContraction& A, const ErgodicProfile& profile,
                                const DefectData& defects, const RingDefectData& ring,
                                const TruncationParams& params = {});

}  // namespace charfun
