#include "fock.hpp"

#include <stdexcept>

namespace charfun {

std::size_t words_count(int d, int N) {
  std::size_t total = 0;
  std::size_t block = 1;
  for (int k = 0; k <= N; ++k) {
    total += block;
    block *= static_cast<std::size_t>(d);
  }
  return total;
}

std::size_t word_index(int d, const Word& w) {
  // offset of the length block, then base-d position inside it
  std::size_t idx = words_count(d, static_cast<int>(w.size()) - 1);
  std::size_t pos = 0;
  for (uint8_t letter : w) {
    if (letter < 1 || letter > d)
      throw Error(ErrorCode::InvalidArgument, "word_index: letter out of range");
    pos = pos * static_cast<std::size_t>(d) + (letter - 1);
  }
  return idx + pos;
}

Word word_at(int d, std::size_t index) {
  int len = 0;
  std::size_t block = 1;
  while (index >= block) {
    index -= block;
    block *= static_cast<std::size_t>(d);
    ++len;
  }
  Word w(len);
  for (int k = len - 1; k >= 0; --k) {
    w[k] = static_cast<uint8_t>(index % d + 1);
    index /= static_cast<std::size_t>(d);
  }
  return w;
}

std::vector<Word> words_up_to(int d, int N, std::size_t budget) {
  if (d < 1 || N < 0)
    throw Error(ErrorCode::InvalidArgument, "words_up_to: need d >= 1, N >= 0");
  std::size_t count = words_count(d, N);
  if (count > budget)
    throw Error(ErrorCode::BudgetExceeded,
                "words_up_to: " + std::to_string(count) + " words exceed budget");
  std::vector<Word> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) out.push_back(word_at(d, k));
  return out;
}

Vector apply_symbol(const MultiAnalyticSymbol& sym, const Vector& x) {
  if (x.size() != sym.source_dim)
    throw Error(ErrorCode::DimensionMismatch, "apply_symbol: wrong source dimension");
  std::size_t nwords = words_count(sym.d, sym.depth);
  Vector out = Vector::Zero(static_cast<Eigen::Index>(nwords) * sym.target_dim);
  for (const auto& [widx, theta] : sym.coeffs)
    out.segment(static_cast<Eigen::Index>(widx) * sym.target_dim, sym.target_dim) =
        theta * x;
  return out;
}

IsometryDefect isometry_defect(const MultiAnalyticSymbol& sym) {
  Matrix gram = Matrix::Zero(sym.source_dim, sym.source_dim);
  for (const auto& [widx, theta] : sym.coeffs) gram += theta.adjoint() * theta;
  Matrix gap = Matrix::Identity(sym.source_dim, sym.source_dim) - gram;
  IsometryDefect result;
  result.defect = operator_norm(gap);
  if (sym.source_dim > 0) {
    HermitianEig eig = hermitian_eig(gap, 1e-8);
    result.min_eig = eig.values(0);
  }
  return result;
}

MultiAnalyticSymbol shift_compose(const MultiAnalyticSymbol& sym, int letter) {
  if (letter < 1 || letter > sym.d)
    throw Error(ErrorCode::InvalidArgument, "shift_compose: letter out of range");
  MultiAnalyticSymbol out = sym;
  out.coeffs.clear();
  for (const auto& [widx, theta] : sym.coeffs) {
    Word w = word_at(sym.d, widx);
    if (static_cast<int>(w.size()) + 1 > sym.depth) {
      out.truncation_flag = true;
      continue;
    }
    w.insert(w.begin(), static_cast<uint8_t>(letter));
    out.coeffs[word_index(sym.d, w)] = theta;
  }
  return out;
}

}  // namespace charfun
