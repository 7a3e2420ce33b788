#pragma once

#include <json.hpp>

#include "numerics.hpp"

namespace charfun::jsonio {

inline nlohmann::json dump_complex(Complex z) {
  return nlohmann::json::array({z.real(), z.imag()});
}

inline nlohmann::json dump_vector(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(dump_complex(v(k)));
  return out;
}

inline nlohmann::json dump_matrix(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(dump_complex(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace charfun::jsonio
