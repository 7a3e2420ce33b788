#pragma once

#include "charfun.hpp"

namespace charfun {

struct EquivalenceReport {
  bool equivalent = false;
  bool has_V = false;
  Matrix V;                       // source-basis of A -> source-basis of B
  double residual = 0.0;          // ||Theta_A - Theta_B V|| over stacked coefficients
  double unitarity_defect = 0.0;  // ||V^* V - 1||
  double threshold = 0.0;
  int depth = 0;
};

/// Finds V with theta_A = theta_B V by stacking coefficients: V is the
/// unitary polar factor of Theta_B^* Theta_A. For genuinely equivalent
/// symbols the relation holds word by word at any truncation depth, so the
/// polar projection cancels the truncation-tail shrinkage of Theta_B^*
/// Theta_B and the residual is at roundoff level; a tight constant threshold
/// then separates the two verdicts cleanly.
EquivalenceReport symbols_equivalent(const MultiAnalyticSymbol& theta_A,
                                     const MultiAnalyticSymbol& theta_B,
                                     double accept_tol = 1e-6);

/// Solves the joint system {U A_i = B_i U, U A_i^* = B_i^* U} and returns a
/// unitary solution if one exists. Absent value = not unitarily equivalent.
std::optional<Matrix> tuples_unitarily_equivalent(const RowContraction& A,
                                                  const RowContraction& B,
                                                  double tol = 1e-8);

struct Theorem61Report {
  bool symbols_yes = false;
  bool intertwiner_yes = false;
  bool consistent = false;
  EquivalenceReport symbol_report;
  bool has_U = false;
  Matrix U;
  double omega_map_residual = 0.0;  // min over phases of ||c U Omega_A - Omega_B||
};

/// Runs both sides of Theorem 6.1 on tuples with the same eigenvalue tuple.
Theorem61Report theorem61_crosscheck(const RowContraction& A, const RowContraction& B,
                                     const TruncationParams& params = {});

struct MixedTuple {
  RowContraction tuple;
  Vector omega;  // new eigenvalue tuple, omega'_i = sum_j u_ij omega_j
};

/// A'_i = sum_j u_ij A_j for a unitary mixing u; the CP map is unchanged.
MixedTuple mixing_transform(const RowContraction& A, const Vector& omega,
                            const Matrix& u, double tol = 1e-10);

/// Deterministic d x d unitary with u b = a for unit vectors a, b.
Matrix aligning_unitary(const Vector& a, const Vector& b);

struct ConjugacyWitness {
  bool found = false;
  Matrix U;                // unitary with Z_B = Ad_U Z_A Ad_U^*
  Matrix mixing;           // unitary v with B_i U = sum_j v_ij U A_j
  double residual = 0.0;
};

/// Searches for a unitary U conjugating the two CP maps by solving the linear
/// intertwining system on the n^2 x n^2 level (with the invariant-state and
/// unitality constraints pinning the solution) and then verifying the Kraus
/// mixing relation B_i U = sum_j v_ij U A_j with a unitary v.
ConjugacyWitness cp_conjugacy_witness(const RowContraction& A, const RowContraction& B,
                                      double tol = 1e-8);

struct Corollary63Report {
  bool conjugate = false;
  bool consistent = false;
  Theorem61Report inner;      // on (A, B mixed to share omega with A)
  ConjugacyWitness witness;   // direct CP-map conjugacy evidence
};

/// Decides conjugacy of the CP maps: aligns the eigenvalue tuples with a
/// mixing transform and runs the Theorem 6.1 cross-check; a missing
/// componentwise intertwiner is not conclusive (the aligned tuples may still
/// differ by a mixing that fixes omega), so the direct witness search above
/// settles the verdict.
Corollary63Report corollary63_check(const RowContraction& A, const RowContraction& B,
                                    const TruncationParams& params = {});

}  // namespace charfun
