#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "numerics.hpp"

namespace charfun {

// A word over the alphabet {1..d}; the empty word is the vacuum index 0.
using Word = std::vector<uint8_t>;

struct TruncationParams {
  int depth = 6;
  double tol = 1e-10;
  std::size_t word_budget = 1000000;
};

/// Number of words of length <= N over d letters: sum_{k<=N} d^k.
std::size_t words_count(int d, int N);

/// Canonical index in graded (by length) then lexicographic order.
std::size_t word_index(int d, const Word& w);

Word word_at(int d, std::size_t index);

/// All words up to length N in canonical order. Throws BudgetExceeded when
/// the count exceeds the budget.
std::vector<Word> words_up_to(int d, int N, std::size_t budget = 1000000);

// Finitely truncated coefficient family {theta_alpha} of a multi-analytic
// operator. Coefficients are stored in the coordinates of target_frame
// (orthonormal columns inside the ambient target space); missing words are
// implicitly zero.
struct MultiAnalyticSymbol {
  int d = 0;
  int depth = 0;
  int source_dim = 0;
  int target_dim = 0;
  Matrix target_frame;                  // ambient_dim x target_dim
  std::map<std::size_t, Matrix> coeffs; // word index -> target_dim x source_dim
  bool truncation_flag = false;

  Matrix coeff(std::size_t widx) const {
    auto it = coeffs.find(widx);
    if (it != coeffs.end()) return it->second;
    return Matrix::Zero(target_dim, source_dim);
  }
};

/// Evaluates the symbol on x: a Fock coordinate vector of length
/// words_count(d, depth) * target_dim, block at word alpha equal to
/// theta_alpha * x.
Vector apply_symbol(const MultiAnalyticSymbol& sym, const Vector& x);

struct IsometryDefect {
  double defect = 0.0;   // ||1 - sum theta_alpha^* theta_alpha||
  double min_eig = 0.0;  // signed minimum eigenvalue of the gap
};

IsometryDefect isometry_defect(const MultiAnalyticSymbol& sym);

/// Coefficient family of (L_i (x) 1) composed with the symbol: every word is
/// prepended with the letter i. Words pushed beyond the depth are dropped and
/// the truncation flag is set.
MultiAnalyticSymbol shift_compose(const MultiAnalyticSymbol& sym, int letter);

}  // namespace charfun
