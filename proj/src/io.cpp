#include "io.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "json_support.hpp"

namespace charfun {

namespace {

using nlohmann::json;
using jsonio::dump_complex;
using jsonio::dump_matrix;
using jsonio::dump_vector;

Complex parse_complex(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw Error(ErrorCode::ParseError, where + ": expected a number or [re, im] pair");
}

Matrix parse_matrix(const json& j, Eigen::Index rows, Eigen::Index cols,
                    const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw Error(ErrorCode::ParseError,
                where + ": expected " + std::to_string(rows) + " rows");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw Error(ErrorCode::ParseError, where + ", row " + std::to_string(r) +
                                             ": expected " + std::to_string(cols) +
                                             " entries");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                              where + "[" + std::to_string(r) + "][" +
                                  std::to_string(c) + "]");
  }
  return m;
}

Vector parse_vector(const json& j, Eigen::Index size, const std::string& where) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != size)
    throw Error(ErrorCode::ParseError,
                where + ": expected " + std::to_string(size) + " entries");
  Vector v(size);
  for (Eigen::Index k = 0; k < size; ++k)
    v(k) = parse_complex(j[static_cast<std::size_t>(k)],
                         where + "[" + std::to_string(k) + "]");
  return v;
}

}  // namespace

TupleFile parse_tuple_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::ParseError, "top level must be an object");
  if (!j.contains("d") || !j.contains("n") || !j.contains("matrices"))
    throw Error(ErrorCode::ParseError, "missing required field d, n, or matrices");
  if (!j["d"].is_number_integer() || !j["n"].is_number_integer())
    throw Error(ErrorCode::ParseError, "d and n must be integers");
  TupleFile file;
  file.tuple.d = j["d"].get<int>();
  file.tuple.n = j["n"].get<int>();
  if (file.tuple.d < 2)
    throw Error(ErrorCode::ParseError, "d must be at least 2");
  if (file.tuple.n < 1)
    throw Error(ErrorCode::ParseError, "n must be positive");
  const json& mats = j["matrices"];
  if (!mats.is_array() || static_cast<int>(mats.size()) != file.tuple.d)
    throw Error(ErrorCode::ParseError, "matrices: expected d entries");
  for (int i = 0; i < file.tuple.d; ++i)
    file.tuple.A.push_back(parse_matrix(mats[static_cast<std::size_t>(i)],
                                        file.tuple.n, file.tuple.n,
                                        "matrices[" + std::to_string(i) + "]"));
  if (j.contains("omega_hint"))
    file.omega_hint = parse_vector(j["omega_hint"], file.tuple.d, "omega_hint");
  if (j.contains("Omega_hint"))
    file.Omega_hint = parse_vector(j["Omega_hint"], file.tuple.n, "Omega_hint");
  if (j.contains("label")) {
    if (!j["label"].is_string())
      throw Error(ErrorCode::ParseError, "label must be a string");
    file.label = j["label"].get<std::string>();
  }
  return file;
}

std::string tuple_to_json(const TupleFile& file, int indent) {
  json j;
  j["d"] = file.tuple.d;
  j["n"] = file.tuple.n;
  json mats = json::array();
  for (const Matrix& m : file.tuple.A) mats.push_back(dump_matrix(m));
  j["matrices"] = std::move(mats);
  if (file.omega_hint) j["omega_hint"] = dump_vector(*file.omega_hint);
  if (file.Omega_hint) j["Omega_hint"] = dump_vector(*file.Omega_hint);
  if (!file.label.empty()) j["label"] = file.label;
  return j.dump(indent);
}

std::string symbol_to_json(const MultiAnalyticSymbol& sym, const Vector& omega,
                           const Matrix& omega_defect_frame, const Matrix& defect_basis,
                           int indent) {
  json j;
  j["d"] = sym.d;
  j["depth"] = sym.depth;
  j["omega"] = dump_vector(omega);
  // rows of the serialized frame are the frame vectors in C^d
  j["omega_defect_frame"] = dump_matrix(omega_defect_frame.transpose());
  j["defect_basis"] = dump_matrix(defect_basis);
  json coeffs = json::array();
  for (const auto& [widx, c] : sym.coeffs) {
    json entry;
    json word = json::array();
    for (uint8_t letter : word_at(sym.d, widx)) word.push_back(static_cast<int>(letter));
    entry["word"] = std::move(word);
    entry["matrix"] = dump_matrix(c);
    coeffs.push_back(std::move(entry));
  }
  j["coefficients"] = std::move(coeffs);
  return j.dump(indent);
}

TupleFile builtin_tuple(const std::string& name) {
  if (name == "section7") {
    const double s = 1.0 / std::sqrt(2.0);
    TupleFile file;
    file.tuple.d = 2;
    file.tuple.n = 3;
    Matrix A1 = Matrix::Zero(3, 3), A2 = Matrix::Zero(3, 3);
    A1(1, 0) = s;
    A1(2, 1) = s;
    A1(2, 2) = s;
    A2(0, 0) = s;
    A2(0, 1) = s;
    A2(1, 2) = s;
    file.tuple.A = {A1, A2};
    const double t = 1.0 / std::sqrt(3.0);
    file.Omega_hint = Vector::Constant(3, Complex(t, 0.0));
    file.omega_hint = Vector::Constant(2, Complex(s, 0.0));
    file.label = "section7";
    return file;
  }
  int d = 0, n = 0;
  unsigned long long seed = 0;
  if (std::sscanf(name.c_str(), "scalar(%d)", &d) == 1 && d >= 2) {
    TupleFile file;
    file.tuple.d = d;
    file.tuple.n = 1;
    const double w = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i)
      file.tuple.A.push_back(Matrix::Constant(1, 1, Complex(w, 0.0)));
    file.omega_hint = Vector::Constant(d, Complex(w, 0.0));
    file.Omega_hint = Vector::Ones(1);
    file.label = name;
    return file;
  }
  if (std::sscanf(name.c_str(), "random(%d,%d,%llu)", &d, &n, &seed) == 3 && d >= 2 &&
      n >= 1) {
    GeneratedTuple gen = random_ergodic_tuple(d, n, static_cast<uint64_t>(seed));
    TupleFile file;
    file.tuple = gen.tuple;
    file.omega_hint = gen.profile.omega;
    file.Omega_hint = gen.profile.Omega;
    file.label = name;
    return file;
  }
  throw Error(ErrorCode::UnknownName,
              "unknown builtin '" + name +
                  "' (expected section7, scalar(d), or random(d,n,seed))");
}

}  // namespace charfun
