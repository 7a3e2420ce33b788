#pragma once

#include "charfun.hpp"

namespace charfun {

// Truncated Popescu dilation of a row contraction on H (+) (Gamma_N (x) D).
// The isometries V_i map the depth-N space into the depth-(N+1) space, which
// keeps every checked identity exact instead of truncation-polluted. Layout
// of a depth-N vector: n entries for H, then r defect coordinates per word in
// canonical order.
class PopescuDilation {
 public:
  PopescuDilation(RowContraction A, Matrix defect_basis);

  int d() const { return A_.d; }
  int n() const { return A_.n; }
  int r() const { return static_cast<int>(basis_.cols()); }
  const Matrix& defect_basis() const { return basis_; }

  std::size_t dim(int depth) const;

  Vector embed_h(const Vector& h, int depth) const;

  /// V_i : Space(depth) -> Space(depth + 1).
  Vector apply(int letter, int depth, const Vector& x) const;

  /// V_i^* : Space(depth + 1) -> Space(depth).
  Vector apply_adjoint(int letter, int depth, const Vector& y) const;

  /// V_alpha = V_{alpha_1} ... V_{alpha_m} : Space(depth) -> Space(depth + m).
  Vector apply_word(const Word& alpha, int depth, const Vector& x) const;

  /// V_alpha^* : Space(depth) -> Space(depth - m); requires depth >= m.
  Vector apply_word_adjoint(const Word& alpha, int depth, const Vector& y) const;

 private:
  RowContraction A_;
  Matrix basis_;            // dn x r, orthonormal basis of Range D
  std::vector<Matrix> E_;   // E_i = basis^* D(:, block i): r x n, D_i h in coords
};

/// max over |alpha|, |beta| <= max_len of
/// |<Omega, V_alpha V_beta^* Omega> - omega_alpha conj(omega_beta)|.
double cuntz_state_check(const PopescuDilation& dilation, const Vector& Omega,
                         const Vector& omega, int max_len);

/// max over |alpha| <= max_len and H basis h of ||p_H V_alpha h - A_alpha h||.
double dilation_compression_check(const PopescuDilation& dilation,
                                  const RowContraction& A, int max_len);

// Tensor-coefficient state of the coupling iteration: after m steps the
// coefficient at the length-m word beta is A_beta^* h with
// A_beta^* = A_{beta_m}^* ... A_{beta_1}^* (step k writes tensor leg k).
struct CouplingState {
  int step = 0;
  std::map<Word, Vector> coeffs;
};

CouplingState coupling_start(const Vector& h);

CouplingState coupling_step(const CouplingState& state, const RowContraction& A,
                            std::size_t budget = 1000000, double prune = 1e-14);

double coupling_norm_sq(const CouplingState& state);

/// sum over |beta| = step of ||Q A_beta^* h||^2 (unresolved mass).
double coupling_residual_mass(const CouplingState& state, const ErgodicProfile& profile);

struct IntertwinerCoefficients {
  Complex scalar = 0.0;                     // vacuum amplitude of the C part
  std::map<std::size_t, Vector> coeffs;     // word -> D_omega frame coords, |alpha| < steps
  std::vector<double> residual_mass;        // per step
};

/// Runs the coupling iteration and reads off the C_hat coefficients through
/// the prefix identification eps_alpha (x) k (x) Omega_P-tail -> e_alpha (x) k.
/// Independent oracle for poisson_hat.
IntertwinerCoefficients product_intertwiner_coefficients(const RowContraction& A,
                                                         const ErgodicProfile& profile,
                                                         const Vector& h, int steps,
                                                         std::size_t budget = 1000000);

struct IntertwiningReport {
  double max_residual = 0.0;
  int depth = 0;
};

/// Assembles W from C_hat and the shifted symbol and reports
/// max ||W V_i x - Vtilde_i W x|| over letters and a spanning set of
/// depth-(N-1) vectors.
IntertwiningReport intertwining_check(const RowContraction& A,
                                      const ErgodicProfile& profile,
                                      const DefectData& defects,
                                      const MultiAnalyticSymbol& theta,
                                      const MultiAnalyticSymbol& poisson,
                                      const TruncationParams& params = {});

/// W at a given depth, exposed for tests: maps Space(depth) of the A-dilation
/// to the tilde space C (+) (Gamma_depth (x) D_omega) with the same layout
/// convention (scalar head, then (d-1) coords per word).
Vector apply_W(const DefectData& defects, const MultiAnalyticSymbol& theta,
               const MultiAnalyticSymbol& poisson, const ErgodicProfile& profile,
               int depth, const Vector& x);

}  // namespace charfun
