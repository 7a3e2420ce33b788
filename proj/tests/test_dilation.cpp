#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dilation.hpp"
#include "helpers.hpp"

using namespace charfun;
using namespace testing;

namespace {

struct Setup {
  RowContraction A;
  ErgodicProfile profile;
  DefectData defects;
  PopescuDilation dilation;
};

Setup make_setup(const RowContraction& A) {
  auto [profile, report] = require_ergodic_profile(A);
  DefectData defects = compute_defects(A, profile);
  PopescuDilation dilation(A, defects.basis_DA);
  return {A, profile, defects, std::move(dilation)};
}

}  // namespace

TEST_CASE("dilation isometries: V_i^* V_j = delta_ij on random vectors") {
  Setup s = make_setup(section7_tuple());
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int depth = 3;
  Vector x(static_cast<Eigen::Index>(s.dilation.dim(depth)));
  for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = Complex(gauss(rng), gauss(rng));
  for (int i = 1; i <= 2; ++i) {
    Vector vi = s.dilation.apply(i, depth, x);
    CHECK(std::abs(vi.norm() - x.norm()) < 1e-12);
    for (int j = 1; j <= 2; ++j) {
      Vector back = s.dilation.apply_adjoint(j, depth, vi);
      if (i == j)
        CHECK((back - x).norm() < 1e-12);
      else
        CHECK(back.norm() < 1e-12);
    }
  }
  // sum_i V_i V_i^* = identity on the defect part, and on H up to the vacuum
  Vector y = s.dilation.apply(1, depth, x);
  Vector sum = Vector::Zero(y.size());
  Vector big(static_cast<Eigen::Index>(s.dilation.dim(depth + 1)));
  for (Eigen::Index k = 0; k < big.size(); ++k) big(k) = Complex(gauss(rng), gauss(rng));
  for (int i = 1; i <= 2; ++i)
    sum += s.dilation.apply(i, depth, s.dilation.apply_adjoint(i, depth, big));
  // whatever sum_i V_i V_i^* misses is orthogonal to every V_i range
  Vector gap = big - sum;
  CHECK(s.dilation.apply_adjoint(1, depth, gap).norm() < 1e-12);
  CHECK(s.dilation.apply_adjoint(2, depth, gap).norm() < 1e-12);
}

TEST_CASE("compression of V_alpha to H is A_alpha") {
  for (const RowContraction& A :
       {section7_tuple(), random_ergodic_tuple(2, 3, 13).tuple}) {
    Setup s = make_setup(A);
    CHECK(dilation_compression_check(s.dilation, s.A, 4) < 1e-12);
  }
}

TEST_CASE("Omega is a Cuntz-type eigenstate of the dilation") {
  Setup s = make_setup(section7_tuple());
  CHECK(cuntz_state_check(s.dilation, s.profile.Omega, s.profile.omega, 3) < 1e-12);
  Setup r = make_setup(random_ergodic_tuple(3, 2, 17).tuple);
  CHECK(cuntz_state_check(r.dilation, r.profile.Omega, r.profile.omega, 2) < 1e-12);
}

TEST_CASE("coupling iteration tracks A_beta^* coefficients and budget") {
  Setup s = make_setup(section7_tuple());
  Vector h = Vector::Zero(3);
  h(0) = 1.0;
  CouplingState state = coupling_start(h);
  for (int m = 0; m < 3; ++m) state = coupling_step(state, s.A);
  CHECK(state.step == 3);
  // total mass is preserved by coisometry
  CHECK(coupling_norm_sq(state) == doctest::Approx(1.0));
  Word beta{2, 1, 2};
  Vector expected = s.A.A[1].adjoint() * (s.A.A[0].adjoint() * (s.A.A[1].adjoint() * h));
  auto it = state.coeffs.find(beta);
  REQUIRE(it != state.coeffs.end());
  CHECK((it->second - expected).norm() < 1e-13);

  CHECK_THROWS_AS(coupling_step(state, s.A, /*budget=*/4), Error);
}

TEST_CASE("coupling residual mass decays like the star-stability norms") {
  Setup s = make_setup(section7_tuple());
  Vector h = Vector::Zero(3);
  h(1) = 1.0;
  CouplingState state = coupling_start(h);
  double prev = coupling_residual_mass(state, s.profile);
  for (int m = 0; m < 8; ++m) {
    state = coupling_step(state, s.A);
    double mass = coupling_residual_mass(state, s.profile);
    CHECK(mass <= prev + 1e-12);
    prev = mass;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("coupling oracle reproduces the closed-form C-hat coefficients") {
  // section7 at 8 steps
  Setup s = make_setup(section7_tuple());
  TruncationParams params;
  params.depth = 7;
  MultiAnalyticSymbol closed = poisson_hat(s.profile, params);
  for (int k = 0; k < 3; ++k) {
    Vector h = Vector::Zero(3);
    h(k) = 1.0;
    IntertwinerCoefficients oracle =
        product_intertwiner_coefficients(s.A, s.profile, h, 8);
    CHECK(std::abs(oracle.scalar - s.profile.Omega.dot(h)) < 1e-10);
    for (std::size_t widx = 0; widx < words_count(2, 7); ++widx) {
      Vector expect = closed.coeff(widx).col(k);
      auto it = oracle.coeffs.find(widx);
      Vector got = it != oracle.coeffs.end() ? it->second
                                             : Vector(Vector::Zero(expect.size()));
      CHECK((got - expect).norm() < 1e-10);
    }
  }
  // random tuple at 6 steps
  Setup r = make_setup(random_ergodic_tuple(2, 4, 23).tuple);
  TruncationParams rparams;
  rparams.depth = 5;
  MultiAnalyticSymbol rclosed = poisson_hat(r.profile, rparams);
  Vector h = Vector::Zero(4);
  h(2) = 1.0;
  IntertwinerCoefficients oracle =
      product_intertwiner_coefficients(r.A, r.profile, h, 6);
  for (std::size_t widx = 0; widx < words_count(2, 5); ++widx) {
    Vector expect = rclosed.coeff(widx).col(2);
    auto it = oracle.coeffs.find(widx);
    Vector got = it != oracle.coeffs.end() ? it->second
                                           : Vector(Vector::Zero(expect.size()));
    CHECK((got - expect).norm() < 1e-10);
  }
}

TEST_CASE("W intertwines the dilation with the scalar model") {
  Setup s = make_setup(section7_tuple());
  TruncationParams params;
  params.depth = 6;
  MultiAnalyticSymbol theta = extended_charfun(s.A, s.profile, s.defects, params);
  MultiAnalyticSymbol poisson = poisson_hat(s.profile, params);
  IntertwiningReport report =
      intertwining_check(s.A, s.profile, s.defects, theta, poisson, params);
  CHECK(report.max_residual < 1e-10);

  Setup r = make_setup(random_ergodic_tuple(2, 3, 29).tuple);
  TruncationParams rparams;
  rparams.depth = 4;
  MultiAnalyticSymbol rtheta = extended_charfun(r.A, r.profile, r.defects, rparams);
  MultiAnalyticSymbol rpoisson = poisson_hat(r.profile, rparams);
  IntertwiningReport rreport =
      intertwining_check(r.A, r.profile, r.defects, rtheta, rpoisson, rparams);
  double s_tail = star_stability_norms(r.profile, rparams.depth + 1).back();
  CHECK(rreport.max_residual <= 10.0 * std::sqrt(s_tail));
}

TEST_CASE("W maps the embedded Omega to the scalar vacuum") {
  Setup s = make_setup(section7_tuple());
  TruncationParams params;
  params.depth = 4;
  MultiAnalyticSymbol theta = extended_charfun(s.A, s.profile, s.defects, params);
  MultiAnalyticSymbol poisson = poisson_hat(s.profile, params);
  Vector x = s.dilation.embed_h(s.profile.Omega, params.depth);
  Vector wx = apply_W(s.defects, theta, poisson, s.profile, params.depth, x);
  CHECK(std::abs(wx(0) - Complex(1.0, 0.0)) < 1e-12);
  CHECK(wx.tail(wx.size() - 1).norm() < 1e-12);
  // W is isometric on H up to the truncation tail
  Vector h = Vector::Zero(3);
  h(0) = 1.0;
  Vector wh = apply_W(s.defects, theta, poisson, s.profile, params.depth,
                      s.dilation.embed_h(h, params.depth));
  double tail = star_stability_norms(s.profile, params.depth + 1).back();
  CHECK(std::abs(wh.squaredNorm() - 1.0) <= 2.5 * tail);
}
