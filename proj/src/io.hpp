#pragma once

#include <optional>
#include <string>

#include "charfun.hpp"

namespace charfun {

// On-disk description of a tuple: the matrices plus optional hints that let a
// file pin down the invariant state it expects.
struct TupleFile {
  RowContraction tuple;
  std::optional<Vector> omega_hint;
  std::optional<Vector> Omega_hint;
  std::string label;
};

TupleFile parse_tuple_json(const std::string& text);

std::string tuple_to_json(const TupleFile& file, int indent = 2);

/// Serializes a symbol with its frames; words in canonical order, complex
/// entries as [re, im].
std::string symbol_to_json(const MultiAnalyticSymbol& sym, const Vector& omega,
                           const Matrix& omega_defect_frame, const Matrix& defect_basis,
                           int indent = 2);

/// Builtin instances: "section7", "scalar(d)", "random(d,n,seed)".
TupleFile builtin_tuple(const std::string& name);

}  // namespace charfun
