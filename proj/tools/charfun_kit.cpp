// Command-line front end; all computation goes through the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "charfun/charfun_kit.h"

namespace {

using nlohmann::json;

struct CommonOpts {
  int depth = 6;
  double tol = 1e-10;
  bool json_out = false;
  std::string out_path;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--depth", opts.depth, "truncation depth N");
  cmd->add_option("--tol", opts.tol, "numerical tolerance");
  cmd->add_flag("--json", opts.json_out, "machine-readable output");
  cmd->add_option("--out", opts.out_path, "write the report to a file");
}

int fail(cfk_status status) {
  std::cerr << "error: " << cfk_last_error() << "\n";
  return static_cast<int>(status);
}

// Accepts a path or "builtin:<name>".
int load_tuple(const std::string& ref, cfk_tuple** out) {
  if (ref.rfind("builtin:", 0) == 0) {
    cfk_status st = cfk_tuple_builtin(ref.substr(8).c_str(), out);
    if (st != CFK_OK) return fail(st);
    return 0;
  }
  std::ifstream in(ref);
  if (!in) {
    std::cerr << "error: cannot open '" << ref << "'\n";
    return 2;
  }
  std::ostringstream text;
  text << in.rdbuf();
  cfk_status st = cfk_tuple_parse(text.str().c_str(), out);
  if (st != CFK_OK) return fail(st);
  return 0;
}

int emit(const std::string& text, const CommonOpts& opts) {
  if (!opts.out_path.empty()) {
    std::ofstream out(opts.out_path);
    if (!out) {
      std::cerr << "error: cannot write '" << opts.out_path << "'\n";
      return 2;
    }
    out << text << "\n";
    return 0;
  }
  std::cout << text << "\n";
  return 0;
}

void print_scalars(const json& report, const std::vector<std::string>& keys) {
  for (const std::string& key : keys)
    if (report.contains(key)) std::cout << "  " << key << ": " << report[key] << "\n";
}

int render(const char* report_text, const CommonOpts& opts, const std::string& title,
           const std::vector<std::string>& keys) {
  json report = json::parse(report_text);
  bool pass = report.value("pass", false);
  if (opts.json_out || !opts.out_path.empty()) {
    int rc = emit(report.dump(2), opts);
    if (rc != 0) return rc;
  }
  if (!opts.json_out && opts.out_path.empty()) {
    std::cout << title << ": " << (pass ? "PASS" : "FAIL") << "\n";
    print_scalars(report, keys);
  }
  return pass ? 0 : 1;
}

template <typename Fn>
int run_single(const std::string& ref, const CommonOpts& opts, const std::string& title,
               const std::vector<std::string>& keys, Fn&& call) {
  cfk_tuple* tuple = nullptr;
  int rc = load_tuple(ref, &tuple);
  if (rc != 0) return rc;
  char* report = nullptr;
  cfk_status st = call(tuple, &report);
  cfk_tuple_free(tuple);
  if (st != CFK_OK) return fail(st);
  rc = render(report, opts, title, keys);
  cfk_string_free(report);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"characteristic functions of ergodic coisometric row contractions"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string file_a, file_b, builtin_name;
  bool popescu = false;
  int steps = 6;

  auto* validate = app.add_subcommand("validate", "coisometry / contraction check");
  validate->add_option("file", file_a, "tuple file or builtin:<name>")->required();
  add_common(validate, opts);

  auto* analyze = app.add_subcommand("analyze", "invariant state and ergodicity");
  analyze->add_option("file", file_a)->required();
  add_common(analyze, opts);

  auto* charfun_cmd = app.add_subcommand("charfun", "extended characteristic function");
  charfun_cmd->add_option("file", file_a)->required();
  charfun_cmd->add_flag("--popescu", popescu, "include the *-stable corner symbol");
  add_common(charfun_cmd, opts);

  auto* compare = app.add_subcommand("compare", "equivalence of two tuples");
  compare->add_option("fileA", file_a)->required();
  compare->add_option("fileB", file_b)->required();
  add_common(compare, opts);

  auto* dilation = app.add_subcommand("dilation-check", "truncated dilation identities");
  dilation->add_option("file", file_a)->required();
  add_common(dilation, opts);

  auto* coupling = app.add_subcommand("coupling-check", "coupling-iteration oracle");
  coupling->add_option("file", file_a)->required();
  coupling->add_option("--steps", steps, "iteration steps");
  add_common(coupling, opts);

  auto* builtin = app.add_subcommand("builtin", "emit a canonical tuple file");
  builtin->add_option("name", builtin_name, "section7 | scalar(d) | random(d,n,seed)")
      ->required();
  add_common(builtin, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (validate->parsed())
    return run_single(file_a, opts, "validate",
                      {"contraction_norm", "coisometry_defect"},
                      [&](cfk_tuple* t, char** out) {
                        return cfk_validate(t, opts.tol, out);
                      });
  if (analyze->parsed())
    return run_single(file_a, opts, "analyze", {"omega", "Omega"},
                      [&](cfk_tuple* t, char** out) {
                        return cfk_analyze(t, opts.tol, out);
                      });
  if (charfun_cmd->parsed())
    return run_single(file_a, opts, "charfun", {"diagnostics"},
                      [&](cfk_tuple* t, char** out) {
                        return cfk_charfun(t, opts.depth, opts.tol,
                                           popescu ? 1 : 0, out);
                      });
  if (dilation->parsed())
    return run_single(file_a, opts, "dilation-check",
                      {"compression_deviation", "cuntz_state_deviation",
                       "intertwining_residual", "intertwining_bound"},
                      [&](cfk_tuple* t, char** out) {
                        return cfk_dilation_check(t, opts.depth, opts.tol, out);
                      });
  if (coupling->parsed())
    return run_single(file_a, opts, "coupling-check",
                      {"max_coefficient_deviation", "scalar_deviation",
                       "residual_mass"},
                      [&](cfk_tuple* t, char** out) {
                        return cfk_coupling_check(t, steps, opts.tol, out);
                      });
  if (compare->parsed()) {
    cfk_tuple* a = nullptr;
    cfk_tuple* b = nullptr;
    int rc = load_tuple(file_a, &a);
    if (rc != 0) return rc;
    rc = load_tuple(file_b, &b);
    if (rc != 0) {
      cfk_tuple_free(a);
      return rc;
    }
    char* report = nullptr;
    cfk_status st = cfk_compare(a, b, opts.depth, opts.tol, &report);
    cfk_tuple_free(a);
    cfk_tuple_free(b);
    if (st != CFK_OK) return fail(st);
    rc = render(report, opts,
                "compare", {"mode", "symbols_equivalent", "intertwiner_found",
                            "consistent", "residual", "threshold"});
    cfk_string_free(report);
    return rc;
  }
  if (builtin->parsed()) {
    cfk_tuple* tuple = nullptr;
    cfk_status st = cfk_tuple_builtin(builtin_name.c_str(), &tuple);
    if (st != CFK_OK) return fail(st);
    char* text = nullptr;
    st = cfk_tuple_to_json(tuple, &text);
    cfk_tuple_free(tuple);
    if (st != CFK_OK) return fail(st);
    int rc = emit(text, opts);
    cfk_string_free(text);
    return rc;
  }
  return 2;
}
