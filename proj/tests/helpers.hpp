#pragma once

#include <cmath>
#include <map>
#include <random>
#include <vector>

#include "charfun.hpp"

namespace testing {

using namespace charfun;

inline RowContraction section7_tuple() {
  const double s = 1.0 / std::sqrt(2.0);
  RowContraction A;
  A.d = 2;
  A.n = 3;
  Matrix A1 = Matrix::Zero(3, 3), A2 = Matrix::Zero(3, 3);
  A1(1, 0) = s;
  A1(2, 1) = s;
  A1(2, 2) = s;
  A2(0, 0) = s;
  A2(0, 1) = s;
  A2(1, 2) = s;
  A.A = {A1, A2};
  return A;
}

inline RowContraction scalar_tuple(int d) {
  RowContraction A;
  A.d = d;
  A.n = 1;
  const double w = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) A.A.push_back(Matrix::Constant(1, 1, Complex(w, 0.0)));
  return A;
}

inline Matrix random_unitary(int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) M(r, c) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, n);
  // pin the phases so the factor is deterministic
  Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < n; ++c) {
    Complex r = R(c, c);
    if (std::abs(r) > 1e-14) Q.col(c) *= r / std::abs(r);
  }
  return Q;
}

inline RowContraction conjugate_tuple(const RowContraction& A, const Matrix& U) {
  RowContraction B;
  B.d = A.d;
  B.n = A.n;
  for (const Matrix& M : A.A) B.A.push_back(U * M * U.adjoint());
  return B;
}

/// sum over |alpha| = n of Aring_alpha Aring_alpha^* by direct word products.
inline Matrix ring_power_sum_by_words(const ErgodicProfile& profile, int n) {
  const int d = static_cast<int>(profile.Aring.size());
  const Eigen::Index dim = profile.Q.rows();
  Matrix sum = Matrix::Zero(dim, dim);
  std::vector<int> word(n, 0);
  while (true) {
    Matrix prod = profile.Q;
    for (int k = 0; k < n; ++k) prod = profile.Aring[word[k]] * prod;
    sum += prod * prod.adjoint();
    int pos = n - 1;
    while (pos >= 0 && ++word[pos] == d) word[pos--] = 0;
    if (pos < 0) break;
  }
  return sum;
}

/// sum over |alpha| = n of ||Aring_alpha^* h||^2 by direct word products.
inline double ring_adjoint_mass_by_words(const ErgodicProfile& profile, const Vector& h,
                                         int n) {
  const int d = static_cast<int>(profile.Aring.size());
  double total = 0.0;
  std::vector<int> word(n, 0);
  while (true) {
    Vector v = h;
    for (int k = 0; k < n; ++k) v = profile.Aring[word[k]].adjoint() * v;
    total += v.squaredNorm();
    int pos = n - 1;
    while (pos >= 0 && ++word[pos] == d) word[pos--] = 0;
    if (pos < 0) break;
  }
  return total;
}

/// All words of length 1..N whose adjacent letters differ.
inline std::vector<Word> alternating_words(int d, int N) {
  std::vector<Word> out;
  std::vector<Word> frontier;
  for (int i = 1; i <= d; ++i) frontier.push_back({static_cast<uint8_t>(i)});
  for (int len = 1; len <= N; ++len) {
    out.insert(out.end(), frontier.begin(), frontier.end());
    std::vector<Word> next;
    for (const Word& w : frontier)
      for (int i = 1; i <= d; ++i)
        if (w.back() != i) {
          Word ext = w;
          ext.push_back(static_cast<uint8_t>(i));
          next.push_back(std::move(ext));
        }
    frontier = std::move(next);
  }
  return out;
}

inline Vector pattern2(double scale) {
  Vector v(2);
  v << -scale, scale;
  return v;
}

// worked-example coefficient families of theta-hat d^i_h for the section7
// tuple, h = (k1, k2, -(k1+k2))
inline std::map<std::size_t, Vector> section7_case2_d1(double k1, double k2,
                                                       int depth) {
  const double r6 = std::sqrt(6.0), r12 = 2.0 * std::sqrt(3.0);
  std::map<std::size_t, Vector> out;
  out[0] = pattern2(-k1 / r12);
  out[word_index(2, {1})] = pattern2((k1 + k2) / r6);
  for (const Word& alpha : alternating_words(2, depth - 1)) {
    double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
    Word full = {1};
    full.insert(full.end(), alpha.begin(), alpha.end());
    if (alpha.front() == 1)
      out[word_index(2, full)] = pattern2(w * (k1 + 2.0 * k2) / r6);
    else
      out[word_index(2, full)] = pattern2(-w * k2 / r6);
  }
  for (const Word& alpha : alternating_words(2, depth))
    if (alpha.front() == 2) {
      double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
      out[word_index(2, alpha)] = pattern2(w * k1 / r12);
    }
  return out;
}

inline std::map<std::size_t, Vector> section7_case2_d2(double k1, double k2,
                                                       int depth) {
  const double r6 = std::sqrt(6.0), r12 = 2.0 * std::sqrt(3.0);
  std::map<std::size_t, Vector> out;
  out[0] = pattern2(-(k1 + k2) / r12);
  for (const Word& alpha : alternating_words(2, depth))
    if (alpha.front() == 1) {
      double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
      out[word_index(2, alpha)] = pattern2(w * (k1 + k2) / r12);
    }
  out[word_index(2, {2})] = pattern2(k1 / r6);
  for (const Word& alpha : alternating_words(2, depth - 1)) {
    double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
    Word full = {2};
    full.insert(full.end(), alpha.begin(), alpha.end());
    if (alpha.front() == 1)
      out[word_index(2, full)] = pattern2(w * k2 / r6);
    else
      out[word_index(2, full)] = pattern2(w * (k1 - k2) / r6);
  }
  return out;
}

inline double map_max_diff(const std::map<std::size_t, Vector>& a,
                           const std::map<std::size_t, Vector>& b) {
  double m = 0.0;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    m = std::max(m, it == b.end() ? v.norm() : (v - it->second).norm());
  }
  for (const auto& [k, v] : b)
    if (!a.count(k)) m = std::max(m, v.norm());
  return m;
}

}  // namespace testing
