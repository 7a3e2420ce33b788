#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace charfun;
using namespace testing;

namespace {

struct Section7 {
  RowContraction A;
  ErgodicProfile profile;
  DefectData defects;
};

Section7 make_section7() {
  Section7 s;
  s.A = section7_tuple();
  auto [profile, report] = require_ergodic_profile(s.A);
  s.profile = profile;
  s.defects = compute_defects(s.A, s.profile);
  return s;
}

Vector pattern(double scale) {
  Vector v(2);
  v << -scale, scale;
  return v;
}

// the section7 theta-hat-d^1_h coefficient family from the worked example
std::map<std::size_t, Vector> expected_case2_d1(double k1, double k2, int depth) {
  const double r6 = std::sqrt(6.0), r12 = 2.0 * std::sqrt(3.0);
  std::map<std::size_t, Vector> out;
  out[0] = pattern(-k1 / r12);
  out[word_index(2, {1})] = pattern((k1 + k2) / r6);
  for (const Word& alpha : alternating_words(2, depth - 1)) {
    double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
    Word full = {1};
    full.insert(full.end(), alpha.begin(), alpha.end());
    if (alpha.front() == 1)
      out[word_index(2, full)] = pattern(w * (k1 + 2.0 * k2) / r6);
    else
      out[word_index(2, full)] = pattern(-w * k2 / r6);
  }
  for (const Word& alpha : alternating_words(2, depth))
    if (alpha.front() == 2) {
      double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
      out[word_index(2, alpha)] = pattern(w * k1 / r12);
    }
  return out;
}

std::map<std::size_t, Vector> expected_case2_d2(double k1, double k2, int depth) {
  const double r6 = std::sqrt(6.0), r12 = 2.0 * std::sqrt(3.0);
  std::map<std::size_t, Vector> out;
  out[0] = pattern(-(k1 + k2) / r12);
  for (const Word& alpha : alternating_words(2, depth))
    if (alpha.front() == 1) {
      double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
      out[word_index(2, alpha)] = pattern(w * (k1 + k2) / r12);
    }
  out[word_index(2, {2})] = pattern(k1 / r6);
  for (const Word& alpha : alternating_words(2, depth - 1)) {
    double w = std::pow(1.0 / std::sqrt(2.0), alpha.size());
    Word full = {2};
    full.insert(full.end(), alpha.begin(), alpha.end());
    if (alpha.front() == 1)
      out[word_index(2, full)] = pattern(w * k2 / r6);
    else
      out[word_index(2, full)] = pattern(w * (k1 - k2) / r6);
  }
  return out;
}

Vector ring_vector(double k1, double k2) {
  Vector h(3);
  h << k1, k2, -(k1 + k2);
  return h;
}

}  // namespace

TEST_CASE("defect operator of section7 is a projection of rank dn - n") {
  Section7 s = make_section7();
  CHECK((s.defects.D * s.defects.D - s.defects.D).norm() < 1e-12);
  CHECK(s.defects.basis_DA.cols() == 3);
  CHECK((s.defects.basis_DA.adjoint() * s.defects.basis_DA - Matrix::Identity(3, 3))
            .norm() < 1e-12);
  Vector OmegaP(2);
  OmegaP << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  CHECK((s.defects.Omega_P - OmegaP).norm() < 1e-12);
  REQUIRE(s.defects.omega_defect_frame.cols() == 1);
  CHECK(std::abs(s.defects.Omega_P.dot(s.defects.omega_defect_frame.col(0))) < 1e-12);
}

TEST_CASE("dstar_hat acts as ((2k1 + k2)/sqrt6)(-1,1) on ring vectors") {
  Section7 s = make_section7();
  Matrix L = dstar_hat(s.profile);
  for (auto [k1, k2] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {2.0, -3.0}}) {
    Vector expected = pattern((2.0 * k1 + k2) / std::sqrt(6.0));
    CHECK((L * ring_vector(k1, k2) - expected).norm() < 1e-10);
  }
}

TEST_CASE("ring defect of section7: Dring_star = (1/sqrt6) M7") {
  Section7 s = make_section7();
  RingDefectData ring = compute_ring_defects(s.profile);
  Matrix M7(3, 3);
  M7 << 1, 0, -1, 0, 0, 0, -1, 0, 1;
  CHECK((ring.Dring_star_ambient - M7 / std::sqrt(6.0)).cwiseAbs().maxCoeff() < 1e-10);
  // Dring^2 = 1 - Aring^* Aring blockwise
  Matrix gram(4, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Matrix blk = -(ring.Aring_rc[i].adjoint() * ring.Aring_rc[j]);
      if (i == j) blk += Matrix::Identity(2, 2);
      gram.block(i * 2, j * 2, 2, 2) = blk;
    }
  CHECK((ring.Dring * ring.Dring - gram).norm() < 1e-10);
}

TEST_CASE("gamma maps (1,0,-1)/sqrt2 to (-1,1)/sqrt2") {
  Section7 s = make_section7();
  RingDefectData ring = compute_ring_defects(s.profile);
  Matrix gamma = gamma_isometry(s.profile, ring, s.defects);
  CHECK((gamma.adjoint() * gamma - Matrix::Identity(gamma.cols(), gamma.cols()))
            .norm() < 1e-10);
  Vector x(3);
  x << 1, 0, -1;
  x /= std::sqrt(2.0);
  Vector coords = ring.basis_Dring_star.adjoint() * (s.profile.ring_basis.adjoint() * x);
  Vector image = s.defects.omega_defect_frame * (gamma * coords);
  Vector expected(2);
  expected << -1, 1;
  expected /= std::sqrt(2.0);
  CHECK((image - expected).norm() < 1e-10);
}

TEST_CASE("poisson embedding reproduces the worked C-hat values") {
  Section7 s = make_section7();
  TruncationParams params;
  params.depth = 6;
  MultiAnalyticSymbol sym = poisson_hat(s.profile, params);
  Vector f = s.defects.omega_defect_frame.col(0);
  for (auto [k1, k2] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}) {
    Vector h = ring_vector(k1, k2);
    for (const Word& w : words_up_to(2, 6)) {
      Vector got = sym.coeff(word_index(2, w)) * h;
      Vector expected_amb = Vector::Zero(2);
      if (w.empty()) {
        expected_amb = pattern((2.0 * k1 + k2) / std::sqrt(6.0));
      } else {
        bool alternating = true;
        for (std::size_t p = 0; p + 1 < w.size(); ++p)
          if (w[p] == w[p + 1]) alternating = false;
        if (alternating) {
          double scale = std::pow(1.0 / std::sqrt(2.0), w.size());
          double coeff = w.front() == 1 ? (k1 + 2.0 * k2) : (k1 - k2);
          expected_amb = pattern(scale * coeff / std::sqrt(6.0));
        }
      }
      Complex expected_coord = f.dot(expected_amb);
      REQUIRE(got.size() == 1);
      CHECK(std::abs(got(0) - expected_coord) < 1e-10);
    }
  }
}

TEST_CASE("poisson coefficients match direct word products on a random tuple") {
  GeneratedTuple gen = random_ergodic_tuple(2, 4, 21);
  TruncationParams params;
  params.depth = 4;
  MultiAnalyticSymbol sym = poisson_hat(gen.profile, params);
  Matrix F = omega_frame(gen.profile.omega);
  Matrix L = dstar_hat(gen.profile);
  for (const Word& w : words_up_to(2, 4)) {
    // Aring_alpha^* = Aring_am^* ... Aring_a1^*
    Matrix prod = Matrix::Identity(4, 4);
    for (uint8_t letter : w) prod = gen.profile.Aring[letter - 1].adjoint() * prod;
    Matrix direct = F.adjoint() * L * prod;
    CHECK((sym.coeff(word_index(2, w)) - direct).norm() < 1e-11);
  }
}

TEST_CASE("case I family matches the section7 pattern") {
  Section7 s = make_section7();
  TruncationParams params;
  params.depth = 6;
  auto family1 = charfun_case1(s.profile, 1, params);
  auto family2 = charfun_case1(s.profile, 2, params);

  std::map<std::size_t, Vector> expected;
  expected[0] = -pattern(1.0 / 6.0);  // e0: (1/6)(1,-1)
  for (const Word& alpha : alternating_words(2, 6))
    expected[word_index(2, alpha)] =
        pattern(std::pow(1.0 / std::sqrt(2.0), alpha.size()) / 6.0);
  CHECK(map_max_diff(family1, expected) < 1e-10);

  // theta-hat d^2_Omega = -theta-hat d^1_Omega
  std::map<std::size_t, Vector> negated;
  for (const auto& [w, v] : family1) negated[w] = -v;
  CHECK(map_max_diff(family2, negated) < 1e-12);
}

TEST_CASE("case II families match the section7 displays") {
  Section7 s = make_section7();
  TruncationParams params;
  params.depth = 6;
  for (auto [k1, k2] : {std::pair{1.0, 0.0}, {0.0, 1.0}, {1.0, 1.0}}) {
    Vector h = ring_vector(k1, k2);
    CHECK(map_max_diff(charfun_case2(s.profile, 1, h, params),
                       expected_case2_d1(k1, k2, params.depth)) < 1e-10);
    CHECK(map_max_diff(charfun_case2(s.profile, 2, h, params),
                       expected_case2_d2(k1, k2, params.depth)) < 1e-10);
  }
}

TEST_CASE("extended charfun is a near-isometry with tail-sized defect") {
  Section7 s = make_section7();
  TruncationParams params;
  params.depth = 6;
  MultiAnalyticSymbol theta = extended_charfun(s.A, s.profile, s.defects, params);
  IsometryDefect defect = isometry_defect(theta);
  // missing mass is bounded by the star-stability tail sum_{n>6} s_n = 2 s_7
  CHECK(defect.defect < 2.5 * std::pow(2.0, -6.0));
  CHECK(defect.min_eig > -1e-10);
}

TEST_CASE("scalar tuple charfun is a single unitary vacuum coefficient") {
  RowContraction A = scalar_tuple(3);
  auto [profile, report] = require_ergodic_profile(A);
  DefectData defects = compute_defects(A, profile);
  TruncationParams params;
  params.depth = 4;
  MultiAnalyticSymbol theta = extended_charfun(A, profile, defects, params);
  CHECK(theta.coeffs.size() == 1);
  REQUIRE(theta.coeffs.count(0) == 1);
  Matrix c0 = theta.coeffs.at(0);
  CHECK(c0.rows() == 2);
  CHECK(c0.cols() == 2);
  CHECK((c0.adjoint() * c0 - Matrix::Identity(2, 2)).norm() < 1e-12);
  CHECK(isometry_defect(theta).defect < 1e-12);
}

TEST_CASE("truncation identity against word enumeration") {
  Section7 s = make_section7();
  GeneratedTuple gen = random_ergodic_tuple(3, 3, 31);
  for (const ErgodicProfile* profile : {&s.profile, &gen.profile}) {
    const int N = 4;
    TruncationParams params;
    params.depth = N;
    MultiAnalyticSymbol sym = poisson_hat(*profile, params);
    const Eigen::Index n = profile->Omega.size();
    const int d = static_cast<int>(profile->Aring.size());
    for (int trial = 0; trial < 3; ++trial) {
      Vector h = Vector::Zero(n);
      h(trial % n) = 1.0;
      h = profile->Q * h;
      double captured = 0.0;
      for (std::size_t widx = 0; widx < words_count(d, N); ++widx)
        captured += (sym.coeff(widx) * h).squaredNorm();
      double tail = ring_adjoint_mass_by_words(*profile, h, N + 1);
      CHECK(std::abs(h.squaredNorm() - captured - tail) < 1e-10);
    }
  }
}

TEST_CASE("theorem 5.2 restriction identities hold at depth 6") {
  Section7 s = make_section7();
  TruncationParams params;
  params.depth = 6;
  RingDefectData ring = compute_ring_defects(s.profile);
  Theorem52Report report = theorem52_check(s.A, s.profile, s.defects, ring, params);
  CHECK(report.symbol_residual < 1e-9);
  CHECK(report.poisson_residual < 1e-9);

  for (uint64_t seed : {41ull, 42ull}) {
    GeneratedTuple gen = random_ergodic_tuple(2, 3, seed);
    DefectData defects = compute_defects(gen.tuple, gen.profile);
    RingDefectData rring = compute_ring_defects(gen.profile);
    Theorem52Report r = theorem52_check(gen.tuple, gen.profile, defects, rring, params);
    CHECK(r.symbol_residual < 1e-9);
    CHECK(r.poisson_residual < 1e-9);
  }
}
