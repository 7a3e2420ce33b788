#include "dilation.hpp"

#include <cmath>

namespace charfun {

namespace {
constexpr double kPrune = 1e-14;
}

PopescuDilation::PopescuDilation(RowContraction A, Matrix defect_basis)
    : A_(std::move(A)), basis_(std::move(defect_basis)) {
  check_shapes(A_);
  const int d = A_.d, n = A_.n;
  if (basis_.rows() != d * n)
    throw Error(ErrorCode::DimensionMismatch, "defect basis must live on the d-fold sum");
  Matrix D = Matrix::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix block = -(A_.A[i].adjoint() * A_.A[j]);
      if (i == j) block += Matrix::Identity(n, n);
      D.block(i * n, j * n, n, n) = block;
    }
  for (int i = 0; i < d; ++i)
    E_.push_back(basis_.adjoint() * D.middleCols(i * n, n));
}

std::size_t PopescuDilation::dim(int depth) const {
  return static_cast<std::size_t>(A_.n) + words_count(A_.d, depth) * r();
}

Vector PopescuDilation::embed_h(const Vector& h, int depth) const {
  Vector x = Vector::Zero(static_cast<Eigen::Index>(dim(depth)));
  x.head(A_.n) = h;
  return x;
}

Vector PopescuDilation::apply(int letter, int depth, const Vector& x) const {
  const int d = A_.d, n = A_.n, rr = r();
  if (letter < 1 || letter > d)
    throw Error(ErrorCode::InvalidArgument, "dilation letter out of range");
  if (x.size() != static_cast<Eigen::Index>(dim(depth)))
    throw Error(ErrorCode::DimensionMismatch, "dilation apply: wrong input dimension");
  Vector y = Vector::Zero(static_cast<Eigen::Index>(dim(depth + 1)));
  Vector h = x.head(n);
  y.head(n) = A_.A[letter - 1] * h;
  if (rr > 0) {
    y.segment(n, rr) = E_[letter - 1] * h;  // e_0 (x) D_i h
    std::size_t nwords = words_count(d, depth);
    for (std::size_t k = 0; k < nwords; ++k) {
      Vector xi = x.segment(n + static_cast<Eigen::Index>(k) * rr, rr);
      if (xi.norm() < kPrune) continue;
      Word w = word_at(d, k);
      w.insert(w.begin(), static_cast<uint8_t>(letter));
      y.segment(n + static_cast<Eigen::Index>(word_index(d, w)) * rr, rr) = xi;
    }
  }
  return y;
}

Vector PopescuDilation::apply_adjoint(int letter, int depth, const Vector& y) const {
  const int d = A_.d, n = A_.n, rr = r();
  if (letter < 1 || letter > d)
    throw Error(ErrorCode::InvalidArgument, "dilation letter out of range");
  if (y.size() != static_cast<Eigen::Index>(dim(depth + 1)))
    throw Error(ErrorCode::DimensionMismatch, "dilation adjoint: wrong input dimension");
  Vector x = Vector::Zero(static_cast<Eigen::Index>(dim(depth)));
  x.head(n) = A_.A[letter - 1].adjoint() * y.head(n);
  if (rr > 0) {
    x.head(n) += E_[letter - 1].adjoint() * y.segment(n, rr);
    std::size_t nwords = words_count(d, depth);
    for (std::size_t k = 0; k < nwords; ++k) {
      Word w = word_at(d, k);
      w.insert(w.begin(), static_cast<uint8_t>(letter));
      x.segment(n + static_cast<Eigen::Index>(k) * rr, rr) =
          y.segment(n + static_cast<Eigen::Index>(word_index(d, w)) * rr, rr);
    }
  }
  return x;
}

Vector PopescuDilation::apply_word(const Word& alpha, int depth, const Vector& x) const {
  Vector v = x;
  int level = depth;
  for (auto it = alpha.rbegin(); it != alpha.rend(); ++it) {
    v = apply(*it, level, v);
    ++level;
  }
  return v;
}

Vector PopescuDilation::apply_word_adjoint(const Word& alpha, int depth,
                                           const Vector& y) const {
  if (depth < static_cast<int>(alpha.size()))
    throw Error(ErrorCode::InvalidArgument, "adjoint word deeper than the space");
  Vector v = y;
  int level = depth;
  for (uint8_t letter : alpha) {
    v = apply_adjoint(letter, level - 1, v);
    --level;
  }
  return v;
}

double cuntz_state_check(const PopescuDilation& dilation, const Vector& Omega,
                         const Vector& omega, int max_len) {
  const int d = dilation.d();
  const int n = dilation.n();
  auto words = words_up_to(d, max_len);
  auto omega_word = [&](const Word& w) {
    Complex p = 1.0;
    for (uint8_t letter : w) p *= omega(letter - 1);
    return p;
  };
  double max_dev = 0.0;
  Vector base = dilation.embed_h(Omega, max_len);
  for (const Word& beta : words) {
    Vector y = dilation.apply_word_adjoint(beta, max_len, base);
    int level = max_len - static_cast<int>(beta.size());
    for (const Word& alpha : words) {
      Vector z = dilation.apply_word(alpha, level, y);
      Complex value = Omega.head(n).dot(z.head(n));
      Complex expected = omega_word(alpha) * std::conj(omega_word(beta));
      max_dev = std::max(max_dev, std::abs(value - expected));
    }
  }
  return max_dev;
}

double dilation_compression_check(const PopescuDilation& dilation,
                                  const RowContraction& A, int max_len) {
  const int n = A.n;
  double max_dev = 0.0;
  for (const Word& alpha : words_up_to(A.d, max_len)) {
    Matrix A_alpha = Matrix::Identity(n, n);
    for (uint8_t letter : alpha) A_alpha = A_alpha * A.A[letter - 1];
    for (int k = 0; k < n; ++k) {
      Vector h = Vector::Zero(n);
      h(k) = 1.0;
      Vector lifted = dilation.apply_word(alpha, 0, dilation.embed_h(h, 0));
      max_dev = std::max(max_dev, (lifted.head(n) - A_alpha * h).norm());
    }
  }
  return max_dev;
}

CouplingState coupling_start(const Vector& h) {
  CouplingState state;
  state.coeffs[Word{}] = h;
  return state;
}

CouplingState coupling_step(const CouplingState& state, const RowContraction& A,
                            std::size_t budget, double prune) {
  check_shapes(A);
  std::size_t next_size = state.coeffs.size() * static_cast<std::size_t>(A.d);
  if (next_size > budget)
    throw Error(ErrorCode::BudgetExceeded, "coupling step exceeds word budget");
  CouplingState next;
  next.step = state.step + 1;
  for (const auto& [beta, h] : state.coeffs) {
    for (int i = 0; i < A.d; ++i) {
      Vector child = A.A[i].adjoint() * h;
      if (child.norm() < prune) continue;
      Word w = beta;
      w.push_back(static_cast<uint8_t>(i + 1));
      next.coeffs.emplace(std::move(w), std::move(child));
    }
  }
  return next;
}

double coupling_norm_sq(const CouplingState& state) {
  double total = 0.0;
  for (const auto& [beta, h] : state.coeffs) total += h.squaredNorm();
  return total;
}

double coupling_residual_mass(const CouplingState& state, const ErgodicProfile& profile) {
  double total = 0.0;
  for (const auto& [beta, h] : state.coeffs) total += (profile.Q * h).squaredNorm();
  return total;
}

IntertwinerCoefficients product_intertwiner_coefficients(const RowContraction& A,
                                                         const ErgodicProfile& profile,
                                                         const Vector& h, int steps,
                                                         std::size_t budget) {
  const int d = A.d;
  Matrix frame = omega_frame(profile.omega);
  IntertwinerCoefficients out;
  CouplingState state = coupling_start(h);
  out.residual_mass.push_back(coupling_residual_mass(state, profile));
  for (int m = 0; m < steps; ++m) {
    state = coupling_step(state, A, budget);
    out.residual_mass.push_back(coupling_residual_mass(state, profile));
  }
  std::map<std::size_t, Vector> coeffs;
  for (const auto& [beta, hb] : state.coeffs) {
    Complex amp = profile.Omega.dot(hb);
    if (std::abs(amp) < 1e-16) continue;
    const int m = static_cast<int>(beta.size());
    // suffix products of <Omega_P, eps_j> = omega_j
    std::vector<Complex> suffix(m + 1, Complex(1.0));
    for (int k = m - 1; k >= 0; --k)
      suffix[k] = suffix[k + 1] * profile.omega(beta[k] - 1);
    out.scalar += amp * suffix[0];
    Word prefix;
    for (int p = 0; p < m; ++p) {
      // prefix = beta[0..p), D_omega leg at position p, Omega_P tail beyond
      std::size_t widx = word_index(d, prefix);
      auto it = coeffs.find(widx);
      if (it == coeffs.end()) it = coeffs.emplace(widx, Vector::Zero(d - 1)).first;
      for (int q = 0; q < d - 1; ++q)
        it->second(q) += amp * std::conj(frame(beta[p] - 1, q)) * suffix[p + 1];
      prefix.push_back(beta[p]);
    }
  }
  for (auto& [widx, v] : coeffs)
    if (v.norm() > 1e-15) out.coeffs.emplace(widx, std::move(v));
  return out;
}

Vector apply_W(const DefectData& defects, const MultiAnalyticSymbol& theta,
               const MultiAnalyticSymbol& poisson, const ErgodicProfile& profile,
               int depth, const Vector& x) {
  const int d = theta.d;
  const int rr = theta.source_dim;
  const int fd = d - 1;
  const Eigen::Index n = profile.Omega.size();
  const std::size_t nwords = words_count(d, depth);
  if (x.size() != n + static_cast<Eigen::Index>(nwords) * rr)
    throw Error(ErrorCode::DimensionMismatch, "apply_W: wrong input dimension");
  Vector out = Vector::Zero(1 + static_cast<Eigen::Index>(nwords) * fd);

  Vector h = x.head(n);
  if (h.norm() > kPrune) {
    out(0) = profile.Omega.dot(h);
    for (const auto& [widx, c] : poisson.coeffs)
      if (word_at(d, widx).size() <= static_cast<std::size_t>(depth))
        out.segment(1 + static_cast<Eigen::Index>(widx) * fd, fd) += c * h;
  }
  for (std::size_t k = 0; k < nwords; ++k) {
    Vector xi = x.segment(n + static_cast<Eigen::Index>(k) * rr, rr);
    if (xi.norm() < kPrune) continue;
    Word w = word_at(d, k);
    for (const auto& [bidx, c] : theta.coeffs) {
      Word beta = word_at(d, bidx);
      if (w.size() + beta.size() > static_cast<std::size_t>(depth)) continue;
      Word full = w;
      full.insert(full.end(), beta.begin(), beta.end());
      out.segment(1 + static_cast<Eigen::Index>(word_index(d, full)) * fd, fd) += c * xi;
    }
  }
  return out;
}

IntertwiningReport intertwining_check(const RowContraction& A,
                                      const ErgodicProfile& profile,
                                      const DefectData& defects,
                                      const MultiAnalyticSymbol& theta,
                                      const MultiAnalyticSymbol& poisson,
                                      const TruncationParams& params) {
  const int d = A.d, n = A.n;
  const int N = params.depth;
  const int rr = static_cast<int>(defects.basis_DA.cols());
  const int fd = d - 1;
  PopescuDilation dilation(A, defects.basis_DA);

  RowContraction scalar_tuple;
  scalar_tuple.d = d;
  scalar_tuple.n = 1;
  for (int i = 0; i < d; ++i) {
    Matrix m(1, 1);
    m(0, 0) = profile.omega(i);
    scalar_tuple.A.push_back(m);
  }
  PopescuDilation tilde(scalar_tuple, defects.omega_defect_frame);

  // truncating both sides to words of length <= N makes the identity exact
  const Eigen::Index keep = 1 + static_cast<Eigen::Index>(words_count(d, N)) * fd;
  ErgodicProfile scalar_profile;
  scalar_profile.Omega = Vector::Ones(1);

  IntertwiningReport report;
  report.depth = N;
  std::vector<Vector> spanning;
  for (int k = 0; k < n; ++k) {
    Vector h = Vector::Zero(n);
    h(k) = 1.0;
    spanning.push_back(dilation.embed_h(h, N));
  }
  std::size_t base_words = words_count(d, N - 1);
  for (std::size_t k = 0; k < base_words; ++k)
    for (int j = 0; j < rr; ++j) {
      Vector x = Vector::Zero(static_cast<Eigen::Index>(dilation.dim(N)));
      x(n + static_cast<Eigen::Index>(k) * rr + j) = 1.0;
      spanning.push_back(std::move(x));
    }

  for (const Vector& x : spanning) {
    Vector wx = apply_W(defects, theta, poisson, profile, N, x);
    for (int i = 1; i <= d; ++i) {
      Vector lhs = apply_W(defects, theta, poisson, profile, N + 1,
                           dilation.apply(i, N, x));
      Vector rhs = tilde.apply(i, N, wx);
      double res = (lhs.head(keep) - rhs.head(keep)).norm();
      report.max_residual = std::max(report.max_residual, res);
    }
  }
  return report;
}

}  // namespace charfun
