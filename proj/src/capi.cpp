#include "charfun/charfun_kit.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>

#include <json.hpp>

#include "dilation.hpp"
#include "equivalence.hpp"
#include "io.hpp"
#include "json_support.hpp"

using nlohmann::json;
using namespace charfun;

struct cfk_tuple {
  TupleFile file;
};

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

cfk_status status_of(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ParseError:
    case ErrorCode::UnknownName:
    case ErrorCode::InvalidArgument:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonSquare:
    case ErrorCode::NotComparable:
      return CFK_PARSE;
    case ErrorCode::BudgetExceeded:
      return CFK_BUDGET;
    default:
      return CFK_MATH;
  }
}

template <typename Fn>
cfk_status run(char** out_json, Fn&& fn) {
  if (out_json == nullptr) {
    g_last_error = "null output pointer";
    return CFK_PARSE;
  }
  *out_json = nullptr;
  try {
    json report = fn();
    *out_json = dup_string(report.dump(2));
    g_last_error.clear();
    return CFK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CFK_MATH;
  }
}

json validation_json(const ValidationReport& vr) {
  return json{{"contraction_norm", vr.contraction_norm},
              {"coisometry_defect", vr.coisometry_defect},
              {"contraction", vr.contraction},
              {"coisometric", vr.coisometric}};
}

json ergodicity_json(const ErgodicityReport& er) {
  return json{{"s", er.s},
              {"decay_ok", er.decay_ok},
              {"decay_ratio", er.decay_ratio},
              {"fixed_point_dim", er.fixed_point_dim},
              {"ergodic", er.ergodic},
              {"tests_agree", er.tests_agree}};
}

}  // namespace

extern "C" {

const char* cfk_last_error(void) { return g_last_error.c_str(); }

cfk_status cfk_tuple_parse(const char* json_text, cfk_tuple** out) {
  if (json_text == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return CFK_PARSE;
  }
  *out = nullptr;
  try {
    auto handle = new cfk_tuple{parse_tuple_json(json_text)};
    *out = handle;
    g_last_error.clear();
    return CFK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CFK_PARSE;
  }
}

cfk_status cfk_tuple_builtin(const char* name, cfk_tuple** out) {
  if (name == nullptr || out == nullptr) {
    g_last_error = "null argument";
    return CFK_PARSE;
  }
  *out = nullptr;
  try {
    auto handle = new cfk_tuple{builtin_tuple(name)};
    *out = handle;
    g_last_error.clear();
    return CFK_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return status_of(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CFK_MATH;
  }
}

cfk_status cfk_tuple_to_json(const cfk_tuple* tuple, char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    return json::parse(tuple_to_json(tuple->file));
  });
}

void cfk_tuple_free(cfk_tuple* tuple) { delete tuple; }

void cfk_string_free(char* s) { std::free(s); }

cfk_status cfk_validate(const cfk_tuple* tuple, double tol, char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    ValidationReport vr = validate(tuple->file.tuple, tol);
    json report = validation_json(vr);
    report["pass"] = vr.coisometric && vr.contraction;
    return report;
  });
}

cfk_status cfk_analyze(const cfk_tuple* tuple, double tol, char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    const RowContraction& A = tuple->file.tuple;
    ValidationReport vr = validate(A, tol);
    json report;
    report["validate"] = validation_json(vr);
    if (!vr.coisometric) {
      report["pass"] = false;
      return report;
    }
    auto [Omega, omega] = find_invariant_vector_state(A, tol);
    ErgodicProfile profile = block_decompose(A, Omega, omega, tol);
    ErgodicityReport er = is_ergodic(A, profile);
    report["Omega"] = jsonio::dump_vector(profile.Omega);
    report["omega"] = jsonio::dump_vector(profile.omega);
    json ells = json::array();
    for (const Vector& ell : profile.ell) ells.push_back(jsonio::dump_vector(ell));
    report["ell"] = std::move(ells);
    json rings = json::array();
    for (const Matrix& m : profile.Aring) rings.push_back(jsonio::dump_matrix(m));
    report["Aring"] = std::move(rings);
    report["ergodicity"] = ergodicity_json(er);
    report["r"] = omega_p_power_decay(A, profile, 20);
    report["pass"] = vr.contraction && er.ergodic;
    return report;
  });
}

cfk_status cfk_charfun(const cfk_tuple* tuple, int depth, double tol, int popescu,
                       char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    if (depth < 0) throw Error(ErrorCode::InvalidArgument, "depth must be >= 0");
    const RowContraction& A = tuple->file.tuple;
    TruncationParams params;
    params.depth = depth;
    params.tol = tol;
    auto [profile, er] = require_ergodic_profile(A, tol);
    DefectData defects = compute_defects(A, profile, tol);
    MultiAnalyticSymbol theta = extended_charfun(A, profile, defects, params);
    IsometryDefect iso = isometry_defect(theta);
    double s_tail = star_stability_norms(profile, depth + 1).back();

    json report;
    report["symbol"] = json::parse(
        symbol_to_json(theta, profile.omega, defects.omega_defect_frame,
                       defects.basis_DA));
    report["diagnostics"] = json{{"isometry_defect", iso.defect},
                                 {"isometry_min_eig", iso.min_eig},
                                 {"s_tail", s_tail},
                                 {"truncation_flag", theta.truncation_flag}};
    if (popescu != 0 && A.n > 1) {
      RingDefectData ring = compute_ring_defects(profile, tol);
      MultiAnalyticSymbol pop = popescu_charfun(profile, ring, params);
      Matrix gamma = gamma_isometry(profile, ring, defects);
      Theorem52Report t52 = theorem52_check(A, profile, defects, ring, params);
      report["popescu_symbol"] = json::parse(
          symbol_to_json(pop, profile.omega, defects.omega_defect_frame,
                         ring.basis_Dring));
      report["gamma"] = jsonio::dump_matrix(gamma);
      report["theorem52"] = json{{"symbol_residual", t52.symbol_residual},
                                 {"poisson_residual", t52.poisson_residual}};
    }
    report["pass"] = true;
    return report;
  });
}

cfk_status cfk_compare(const cfk_tuple* a, const cfk_tuple* b, int depth, double tol,
                       char** out_json) {
  return run(out_json, [&] {
    if (a == nullptr || b == nullptr)
      throw Error(ErrorCode::InvalidArgument, "null tuple");
    const RowContraction& A = a->file.tuple;
    const RowContraction& B = b->file.tuple;
    if (A.d != B.d)
      throw Error(ErrorCode::NotComparable, "tuples have different d");
    TruncationParams params;
    params.depth = depth;
    params.tol = tol;
    auto [profile_A, er_A] = require_ergodic_profile(A, tol);
    auto [profile_B, er_B] = require_ergodic_profile(B, tol);
    bool same_omega =
        A.n == B.n &&
        (profile_A.omega - profile_B.omega).cwiseAbs().maxCoeff() <= 1e-8;

    json report;
    const Theorem61Report* t61 = nullptr;
    Theorem61Report direct;
    Corollary63Report c63;
    if (same_omega) {
      direct = theorem61_crosscheck(A, B, params);
      report["mode"] = "theorem61";
      t61 = &direct;
    } else {
      c63 = corollary63_check(A, B, params);
      report["mode"] = "corollary63";
      report["conjugate"] = c63.conjugate;
      t61 = &c63.inner;
    }
    report["symbols_equivalent"] = t61->symbols_yes;
    report["intertwiner_found"] = t61->intertwiner_yes;
    report["consistent"] = t61->consistent;
    report["residual"] = t61->symbol_report.residual;
    report["unitarity_defect"] = t61->symbol_report.unitarity_defect;
    report["threshold"] = t61->symbol_report.threshold;
    if (t61->has_U) {
      report["U"] = jsonio::dump_matrix(t61->U);
      report["omega_map_residual"] = t61->omega_map_residual;
    }
    report["pass"] = t61->consistent;
    return report;
  });
}

cfk_status cfk_dilation_check(const cfk_tuple* tuple, int depth, double tol,
                              char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    if (depth < 1) throw Error(ErrorCode::InvalidArgument, "depth must be >= 1");
    const RowContraction& A = tuple->file.tuple;
    TruncationParams params;
    params.depth = depth;
    params.tol = tol;
    auto [profile, er] = require_ergodic_profile(A, tol);
    DefectData defects = compute_defects(A, profile, tol);
    MultiAnalyticSymbol theta = extended_charfun(A, profile, defects, params);
    MultiAnalyticSymbol poisson = poisson_hat(profile, params);
    PopescuDilation dilation(A, defects.basis_DA);

    double compression = dilation_compression_check(dilation, A, std::min(depth, 6));
    double cuntz = cuntz_state_check(dilation, profile.Omega, profile.omega,
                                     std::min(depth, 3));
    IntertwiningReport inter = intertwining_check(A, profile, defects, theta,
                                                  poisson, params);
    double s_tail = star_stability_norms(profile, depth + 1).back();
    double bound = 10.0 * std::sqrt(s_tail);

    json report;
    report["compression_deviation"] = compression;
    report["cuntz_state_deviation"] = cuntz;
    report["intertwining_residual"] = inter.max_residual;
    report["intertwining_bound"] = bound;
    report["depth"] = depth;
    double exact_tol = std::max(tol, 1e-12);
    report["pass"] = compression <= exact_tol && cuntz <= exact_tol &&
                     inter.max_residual <= bound;
    return report;
  });
}

cfk_status cfk_coupling_check(const cfk_tuple* tuple, int steps, double tol,
                              char** out_json) {
  return run(out_json, [&] {
    if (tuple == nullptr) throw Error(ErrorCode::InvalidArgument, "null tuple");
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
    const RowContraction& A = tuple->file.tuple;
    auto [profile, er] = require_ergodic_profile(A, tol);
    TruncationParams params;
    params.depth = steps - 1;
    params.tol = tol;
    MultiAnalyticSymbol poisson = poisson_hat(profile, params);

    double max_coeff_dev = 0.0, max_scalar_dev = 0.0;
    std::vector<double> mass(static_cast<std::size_t>(steps) + 1, 0.0);
    std::size_t nwords = words_count(A.d, steps - 1);
    for (int k = 0; k < A.n; ++k) {
      Vector h = Vector::Zero(A.n);
      h(k) = 1.0;
      IntertwinerCoefficients oracle =
          product_intertwiner_coefficients(A, profile, h, steps);
      max_scalar_dev = std::max(max_scalar_dev,
                                std::abs(oracle.scalar - profile.Omega.dot(h)));
      for (std::size_t widx = 0; widx < nwords; ++widx) {
        Vector closed = poisson.coeff(widx).col(k);
        auto it = oracle.coeffs.find(widx);
        Vector got = it != oracle.coeffs.end()
                         ? it->second
                         : Vector(Vector::Zero(closed.size()));
        max_coeff_dev = std::max(max_coeff_dev, (got - closed).norm());
      }
      for (std::size_t m = 0; m < oracle.residual_mass.size() && m < mass.size(); ++m)
        mass[m] = std::max(mass[m], oracle.residual_mass[m]);
    }

    json report;
    report["steps"] = steps;
    report["max_coefficient_deviation"] = max_coeff_dev;
    report["scalar_deviation"] = max_scalar_dev;
    report["residual_mass"] = mass;
    report["pass"] = max_coeff_dev <= std::max(tol, 1e-10) &&
                     max_scalar_dev <= std::max(tol, 1e-10);
    return report;
  });
}

}  // extern "C"
