#include "charfun.hpp"

#include <cmath>
#include <functional>

namespace charfun {

namespace {

constexpr double kCoeffCut = 1e-14;

void check_word_budget(int d, const TruncationParams& params) {
  if (words_count(d, params.depth) > params.word_budget)
    throw Error(ErrorCode::BudgetExceeded, "word enumeration exceeds budget");
}

}  // namespace

Matrix omega_frame(const Vector& omega) {
  // Householder frame: deterministic and continuous in omega, so tuples with
  // (numerically) equal omega always land in the same target coordinates.
  const Eigen::Index d = omega.size();
  Vector Omega_P = omega.conjugate();
  Omega_P /= Omega_P.norm();
  Complex head = Omega_P(0);
  Complex phase = std::abs(head) > 1e-14 ? head / std::abs(head) : Complex(1.0);
  Vector w = Omega_P;
  w(0) += phase;
  w /= w.norm();
  Matrix H = Matrix::Identity(d, d) - 2.0 * (w * w.adjoint());
  // H e_0 is proportional to Omega_P, so the remaining columns span its
  // orthocomplement.
  return H.rightCols(d - 1);
}

DefectData compute_defects(const RowContraction& A, const ErgodicProfile& profile,
                           double tol) {
  check_shapes(A);
  const int d = A.d, n = A.n;
  DefectData data;
  data.D = Matrix::Zero(d * n, d * n);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix block = -(A.A[i].adjoint() * A.A[j]);
      if (i == j) block += Matrix::Identity(n, n);
      data.D.block(i * n, j * n, n, n) = block;
    }
  double proj_defect = operator_norm(data.D * data.D - data.D);
  if (proj_defect > std::max(tol, 1e-8))
    throw Error(ErrorCode::NotCoisometric,
                "defect operator is not a projection (defect " +
                    std::to_string(proj_defect) + ")");
  data.basis_DA = orthonormal_range(data.D, 1e-8);
  data.Omega_P = profile.omega.conjugate();
  data.omega_defect_frame = omega_frame(profile.omega);
  if (data.omega_defect_frame.cols() != d - 1)
    throw Error(ErrorCode::InvalidArgument, "omega defect space must have dimension d-1");
  return data;
}

RingDefectData compute_ring_defects(const ErgodicProfile& profile, double tol) {
  const int d = static_cast<int>(profile.Aring.size());
  const Matrix& B = profile.ring_basis;
  const Eigen::Index np = B.cols();
  RingDefectData ring;
  for (int i = 0; i < d; ++i) {
    ring.Aring_rc.push_back(B.adjoint() * profile.Aring[i] * B);
    ring.ell_rc.push_back(B.adjoint() * profile.ell[i]);
  }
  Matrix gram = Matrix::Zero(d * np, d * np);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Matrix block = -(ring.Aring_rc[i].adjoint() * ring.Aring_rc[j]);
      if (i == j) block += Matrix::Identity(np, np);
      gram.block(i * np, j * np, np, np) = block;
    }
  ring.Dring = psd_sqrt(gram, std::max(tol, 1e-9));
  Matrix star2 = Matrix::Zero(np, np);
  for (int i = 0; i < d; ++i) star2 += ring.ell_rc[i] * ring.ell_rc[i].adjoint();
  ring.Dring_star = psd_sqrt(star2, std::max(tol, 1e-9));
  Matrix star2_ambient = Matrix::Zero(B.rows(), B.rows());
  for (int i = 0; i < d; ++i)
    star2_ambient += profile.ell[i] * profile.ell[i].adjoint();
  ring.Dring_star_ambient = psd_sqrt(star2_ambient, std::max(tol, 1e-9));
  ring.basis_Dring = orthonormal_range(ring.Dring, 1e-7);
  ring.basis_Dring_star = orthonormal_range(ring.Dring_star, 1e-7);
  return ring;
}

Matrix dstar_hat(const ErgodicProfile& profile) {
  const int d = static_cast<int>(profile.ell.size());
  const Eigen::Index n = profile.Omega.size();
  Matrix L(d, n);
  for (int i = 0; i < d; ++i) L.row(i) = profile.ell[i].adjoint();
  return L;
}

MultiAnalyticSymbol poisson_hat(const ErgodicProfile& profile,
                                const TruncationParams& params) {
  const int d = static_cast<int>(profile.Aring.size());
  check_word_budget(d, params);
  const Eigen::Index n = profile.Omega.size();
  Matrix L = dstar_hat(profile);
  Matrix frame = omega_frame(profile.omega);
  Matrix FL = frame.adjoint() * L;  // (d-1) x n

  MultiAnalyticSymbol sym;
  sym.d = d;
  sym.depth = params.depth;
  sym.source_dim = static_cast<int>(n);
  sym.target_dim = d - 1;
  sym.target_frame = frame;

  std::vector<Matrix> Aadj;
  for (const Matrix& M : profile.Aring) Aadj.push_back(M.adjoint());

  // DFS over words, one matrix product per word: P = (Aring_alpha)^*
  std::function<void(Word&, const Matrix&)> walk = [&](Word& w, const Matrix& P) {
    Matrix c = FL * P;
    if (c.norm() > kCoeffCut) sym.coeffs[word_index(d, w)] = c;
    if (static_cast<int>(w.size()) == params.depth) return;
    if (P.norm() < kCoeffCut) return;
    for (int i = 1; i <= d; ++i) {
      w.push_back(static_cast<uint8_t>(i));
      walk(w, Matrix(Aadj[i - 1] * P));
      w.pop_back();
    }
  };
  Word w;
  walk(w, Matrix::Identity(n, n));
  return sym;
}

std::map<std::size_t, Vector> charfun_case1(const ErgodicProfile& profile, int i,
                                            const TruncationParams& params) {
  const int d = static_cast<int>(profile.ell.size());
  check_word_budget(d, params);
  if (i < 1 || i > d)
    throw Error(ErrorCode::InvalidArgument, "charfun_case1: letter out of range");
  std::map<std::size_t, Vector> coeffs;

  // vacuum: eps_i - sum_j <A_j Omega, A_i Omega> eps_j, with
  // <A_j Omega, A_i Omega> = conj(omega_j) omega_i + <ell_j, ell_i>
  Vector c0 = Vector::Zero(d);
  c0(i - 1) = 1.0;
  for (int j = 0; j < d; ++j)
    c0(j) -= std::conj(profile.omega(j)) * profile.omega(i - 1) +
             profile.ell[j].dot(profile.ell[i - 1]);
  if (c0.norm() > kCoeffCut) coeffs[0] = c0;

  // |alpha| >= 1: entry j is -<Aring_alpha ell_j, ell_i>; the DFS prepends
  // letters, keeping the d vectors Aring_alpha ell_j
  std::function<void(Word&, const std::vector<Vector>&)> walk =
      [&](Word& w, const std::vector<Vector>& v) {
        if (!w.empty()) {
          Vector c(d);
          double mass = 0.0;
          for (int j = 0; j < d; ++j) {
            c(j) = -v[j].dot(profile.ell[i - 1]);
            mass += v[j].norm();
          }
          if (c.norm() > kCoeffCut) coeffs[word_index(d, w)] = c;
          if (mass < kCoeffCut) return;
        }
        if (static_cast<int>(w.size()) == params.depth) return;
        for (int k = 1; k <= d; ++k) {
          std::vector<Vector> next(d);
          for (int j = 0; j < d; ++j) next[j] = profile.Aring[k - 1] * v[j];
          w.insert(w.begin(), static_cast<uint8_t>(k));
          walk(w, next);
          w.erase(w.begin());
        }
      };
  Word w;
  walk(w, profile.ell);
  return coeffs;
}

std::map<std::size_t, Vector> charfun_case2(const ErgodicProfile& profile, int i,
                                            const Vector& h,
                                            const TruncationParams& params) {
  const int d = static_cast<int>(profile.ell.size());
  check_word_budget(d, params);
  if (i < 1 || i > d)
    throw Error(ErrorCode::InvalidArgument, "charfun_case2: letter out of range");
  Vector hr = profile.Q * h;  // restrict to ring(H)
  Matrix L = dstar_hat(profile);
  std::map<std::size_t, Vector> coeffs;

  Vector c0 = -(L * (profile.Aring[i - 1] * hr));
  if (c0.norm() > kCoeffCut) coeffs[0] = c0;

  // g_j = (delta_ji 1 - Aring_j^* Aring_i) h
  std::vector<Vector> g(d);
  Vector Ai_h = profile.Aring[i - 1] * hr;
  for (int j = 0; j < d; ++j) {
    g[j] = -(profile.Aring[j].adjoint() * Ai_h);
    if (j == i - 1) g[j] += hr;
  }

  // coefficient at word (j, alpha) is Dstar_hat Aring_alpha^* g_j; the DFS
  // appends letters, keeping the d vectors Aring_alpha^* g_j
  std::function<void(Word&, const std::vector<Vector>&)> walk =
      [&](Word& w, const std::vector<Vector>& v) {
        double mass = 0.0;
        for (int j = 0; j < d; ++j) {
          Vector c = L * v[j];
          mass += v[j].norm();
          if (c.norm() > kCoeffCut) {
            Word full = w;
            full.insert(full.begin(), static_cast<uint8_t>(j + 1));
            std::size_t idx = word_index(d, full);
            auto it = coeffs.find(idx);
            if (it == coeffs.end())
              coeffs[idx] = c;
            else
              it->second += c;
          }
        }
        if (mass < kCoeffCut) return;
        if (static_cast<int>(w.size()) + 1 == params.depth) return;
        for (int k = 1; k <= d; ++k) {
          std::vector<Vector> next(d);
          for (int j = 0; j < d; ++j) next[j] = profile.Aring[k - 1].adjoint() * v[j];
          w.push_back(static_cast<uint8_t>(k));
          walk(w, next);
          w.pop_back();
        }
      };
  Word w;
  walk(w, g);
  return coeffs;
}

MultiAnalyticSymbol extended_charfun(const RowContraction& A,
                                     const ErgodicProfile& profile,
                                     const DefectData& defects,
                                     const TruncationParams& params) {
  const int d = A.d, n = A.n;
  check_word_budget(d, params);
  const int r = static_cast<int>(defects.basis_DA.cols());
  MultiAnalyticSymbol sym;
  sym.d = d;
  sym.depth = params.depth;
  sym.source_dim = r;
  sym.target_dim = d - 1;
  sym.target_frame = defects.omega_defect_frame;

  std::vector<std::map<std::size_t, Vector>> case1(d);
  for (int i = 1; i <= d; ++i) case1[i - 1] = charfun_case1(profile, i, params);

  std::map<std::size_t, Matrix> ambient;  // word -> d x r
  auto accumulate = [&](const std::map<std::size_t, Vector>& family, Complex scale,
                        int col) {
    for (const auto& [widx, v] : family) {
      auto it = ambient.find(widx);
      if (it == ambient.end())
        it = ambient.emplace(widx, Matrix::Zero(d, r)).first;
      it->second.col(col) += scale * v;
    }
  };

  for (int col = 0; col < r; ++col) {
    Vector xi = defects.basis_DA.col(col);
    for (int i = 0; i < d; ++i) {
      Vector xi_i = xi.segment(i * n, n);
      Complex ci = profile.Omega.dot(xi_i);
      Vector ring_part = xi_i - ci * profile.Omega;
      if (std::abs(ci) > kCoeffCut) accumulate(case1[i], ci, col);
      if (ring_part.norm() > kCoeffCut)
        accumulate(charfun_case2(profile, i + 1, ring_part, params), 1.0, col);
    }
  }

  // store in frame coordinates after verifying D_omega membership
  const Matrix Fadj = defects.omega_defect_frame.adjoint();
  double max_membership = 0.0;
  for (const auto& [widx, M] : ambient) {
    for (int col = 0; col < r; ++col) {
      double res = std::abs(defects.Omega_P.dot(M.col(col)));
      max_membership = std::max(max_membership, res);
    }
    Matrix c = Fadj * M;
    if (c.norm() > kCoeffCut) sym.coeffs[widx] = c;
  }
  if (max_membership > std::max(params.tol, 1e-9))
    throw Error(ErrorCode::FrameMembership,
                "coefficient outside D_omega, residual " +
                    std::to_string(max_membership));
  return sym;
}

MultiAnalyticSymbol popescu_charfun(const ErgodicProfile& profile,
                                    const RingDefectData& ring,
                                    const TruncationParams& params) {
  const int d = static_cast<int>(ring.Aring_rc.size());
  check_word_budget(d, params);
  const Eigen::Index np = ring.Dring_star.rows();
  const int src = static_cast<int>(ring.basis_Dring.cols());
  const int tgt = static_cast<int>(ring.basis_Dring_star.cols());
  MultiAnalyticSymbol sym;
  sym.d = d;
  sym.depth = params.depth;
  sym.source_dim = src;
  sym.target_dim = tgt;
  sym.target_frame = ring.basis_Dring_star;

  const Matrix Sadj = ring.basis_Dring_star.adjoint();
  std::map<std::size_t, Matrix> store;
  auto put = [&](std::size_t widx, int col, const Vector& u) {
    Vector coords = Sadj * u;
    double res = (u - ring.basis_Dring_star * coords).norm();
    if (res > std::max(params.tol * 100, 1e-8))
      throw Error(ErrorCode::NotStarStable,
                  "coefficient escapes Range Dring_star, residual " +
                      std::to_string(res));
    if (coords.norm() <= kCoeffCut) return;
    auto it = store.find(widx);
    if (it == store.end()) it = store.emplace(widx, Matrix::Zero(tgt, src)).first;
    it->second.col(col) += coords;
  };

  for (int col = 0; col < src; ++col) {
    Vector f = ring.basis_Dring.col(col);
    Vector u0 = Vector::Zero(np);
    for (int j = 0; j < d; ++j) u0 -= ring.Aring_rc[j] * f.segment(j * np, np);
    put(0, col, u0);

    Vector g = ring.Dring * f;
    std::vector<Vector> v(d);
    for (int j = 0; j < d; ++j) v[j] = g.segment(j * np, np);

    std::function<void(Word&, const std::vector<Vector>&)> walk =
        [&](Word& w, const std::vector<Vector>& vv) {
          double mass = 0.0;
          for (int j = 0; j < d; ++j) {
            mass += vv[j].norm();
            Vector u = ring.Dring_star * vv[j];
            if (u.norm() > kCoeffCut) {
              Word full = w;
              full.insert(full.begin(), static_cast<uint8_t>(j + 1));
              put(word_index(d, full), col, u);
            }
          }
          if (mass < kCoeffCut) return;
          if (static_cast<int>(w.size()) + 1 == params.depth) return;
          for (int k = 1; k <= d; ++k) {
            std::vector<Vector> next(d);
            for (int j = 0; j < d; ++j) next[j] = ring.Aring_rc[k - 1].adjoint() * vv[j];
            w.push_back(static_cast<uint8_t>(k));
            walk(w, next);
            w.pop_back();
          }
        };
    Word w;
    walk(w, v);
  }
  sym.coeffs = std::move(store);
  return sym;
}

Matrix gamma_isometry(const ErgodicProfile& profile, const RingDefectData& ring,
                      const DefectData& defects, double tol) {
  const Eigen::Index np = ring.Dring_star.rows();
  const int tgt = static_cast<int>(ring.basis_Dring_star.cols());
  if (np == 0 || tgt == 0)
    return Matrix(defects.omega_defect_frame.cols(), tgt);
  // gamma solves gamma * (Dring_star coords) = Dstar_hat coords on ring(H)
  Matrix S = ring.basis_Dring_star.adjoint() * ring.Dring_star;          // tgt x np
  Matrix R = defects.omega_defect_frame.adjoint() * dstar_hat(profile) *
             profile.ring_basis;                                          // (d-1) x np
  Matrix gamma_adj = S.adjoint()
                         .jacobiSvd(Eigen::ComputeThinU | Eigen::ComputeThinV)
                         .solve(R.adjoint());
  Matrix gamma = gamma_adj.adjoint();
  double residual = operator_norm(gamma * S - R);
  double unitary_defect =
      operator_norm(gamma.adjoint() * gamma - Matrix::Identity(tgt, tgt));
  if (residual > std::max(tol, 1e-8) || unitary_defect > std::max(tol, 1e-8))
    throw Error(ErrorCode::NotIsometric,
                "gamma residual " + std::to_string(residual) + ", isometry defect " +
                    std::to_string(unitary_defect));
  return gamma;
}

Theorem52Report theorem52_check(const RowContraction& A, const ErgodicProfile& profile,
                                const DefectData& defects, const RingDefectData& ring,
                                const TruncationParams& params) {
  const int d = A.d;
  Theorem52Report report;
  if (profile.ring_basis.cols() == 0) return report;  // scalar case, vacuously 0

  Matrix gamma = gamma_isometry(profile, ring, defects);
  MultiAnalyticSymbol theta_ring = popescu_charfun(profile, ring, params);
  MultiAnalyticSymbol poisson = poisson_hat(profile, params);

  auto max_diff = [](const std::map<std::size_t, Vector>& a,
                     const std::map<std::size_t, Vector>& b) {
    double m = 0.0;
    for (const auto& [k, v] : a) {
      auto it = b.find(k);
      m = std::max(m, it == b.end() ? v.norm() : (v - it->second).norm());
    }
    for (const auto& [k, v] : b)
      if (!a.count(k)) m = std::max(m, v.norm());
    return m;
  };

  const Eigen::Index np = profile.ring_basis.cols();
  const Matrix Fadj = defects.omega_defect_frame.adjoint();
  for (Eigen::Index k = 0; k < np; ++k) {
    Vector h = profile.ring_basis.col(k);
    Vector hrc = profile.ring_basis.adjoint() * h;

    // Poisson part: (1 (x) gamma) C_ring h vs C_hat h
    std::map<std::size_t, Vector> lhs, rhs;
    {
      std::function<void(Word&, const Vector&)> ring_walk = [&](Word& w, const Vector& v) {
        Vector coeff = gamma * (ring.basis_Dring_star.adjoint() * (ring.Dring_star * v));
        if (coeff.norm() > kCoeffCut) lhs[word_index(d, w)] = coeff;
        if (v.norm() < kCoeffCut) return;
        if (static_cast<int>(w.size()) == params.depth) return;
        for (int i = 1; i <= d; ++i) {
          w.push_back(static_cast<uint8_t>(i));
          ring_walk(w, Vector(ring.Aring_rc[i - 1].adjoint() * v));
          w.pop_back();
        }
      };
      Word w;
      ring_walk(w, hrc);
      for (const auto& [widx, c] : poisson.coeffs) {
        Vector val = c * h;
        if (val.norm() > kCoeffCut) rhs[widx] = val;
      }
    }
    report.poisson_residual = std::max(report.poisson_residual, max_diff(lhs, rhs));

    // Symbol part: (1 (x) gamma) theta_ring d^i_h vs theta_hat d^i_h
    for (int i = 1; i <= d; ++i) {
      Vector embed = Vector::Zero(d * np);
      embed.segment((i - 1) * np, np) = hrc;
      Vector dvec = ring.Dring * embed;
      Vector coords = ring.basis_Dring.adjoint() * dvec;
      std::map<std::size_t, Vector> left, right;
      for (const auto& [widx, c] : theta_ring.coeffs) {
        Vector val = gamma * (c * coords);
        if (val.norm() > kCoeffCut) left[widx] = val;
      }
      for (const auto& [widx, v] : charfun_case2(profile, i, h, params)) {
        Vector val = Fadj * v;
        if (val.norm() > kCoeffCut) right[widx] = val;
      }
      report.symbol_residual = std::max(report.symbol_residual, max_diff(left, right));
    }
  }
  return report;
}

}  // namespace charfun
