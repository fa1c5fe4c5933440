// Copyright 2026 The qfid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "qfid/complex_matrix.hpp"
#include "qfid/errors.hpp"
#include "qfid/states.hpp"
#include "qfid/tolerances.hpp"

namespace qfid {

/// Shortest decimal string that round-trips to the same double. Infinities
/// are rendered as "inf" / "-inf".
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

/// State file schema:
///   {"dim": d, "matrix": [[[re, im], ...], ...]}
/// with "matrix" a d x d row-major array of [re, im] pairs.
inline DensityMatrix state_from_json(const nlohmann::json& j,
                                     const Tolerances& tol = {}) {
  if (!j.is_object()) throw ParseError("state file root must be an object");
  if (!j.contains("dim")) throw ParseError("state file missing \"dim\"");
  if (!j.contains("matrix")) throw ParseError("state file missing \"matrix\"");
  const auto& jd = j.at("dim");
  if (!jd.is_number_integer() || jd.get<long long>() < 1) {
    throw ParseError("\"dim\" must be a positive integer");
  }
  const std::size_t d = jd.get<std::size_t>();
  const auto& jm = j.at("matrix");
  if (!jm.is_array() || jm.size() != d) {
    throw ParseError("\"matrix\" must be an array of dim rows");
  }
  ComplexMatrix m(d);
  for (std::size_t r = 0; r < d; ++r) {
    const auto& row = jm.at(r);
    if (!row.is_array() || row.size() != d) {
      throw ParseError("matrix row " + std::to_string(r) +
                       " must have dim entries");
    }
    for (std::size_t c = 0; c < d; ++c) {
      const auto& e = row.at(c);
      if (!e.is_array() || e.size() != 2 || !e.at(0).is_number() ||
          !e.at(1).is_number()) {
        throw ParseError("matrix entry (" + std::to_string(r) + ", " +
                         std::to_string(c) + ") must be an [re, im] pair");
      }
      m(r, c) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
    }
  }
  return DensityMatrix::from_matrix(std::move(m), tol);
}

inline nlohmann::json state_to_json(const DensityMatrix& rho) {
  nlohmann::json jm = nlohmann::json::array();
  for (std::size_t r = 0; r < rho.dim(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t c = 0; c < rho.dim(); ++c) {
      const cplx v = rho.mat()(r, c);
      row.push_back({v.real(), v.imag()});
    }
    jm.push_back(std::move(row));
  }
  return nlohmann::json{{"dim", rho.dim()}, {"matrix", std::move(jm)}};
}

inline DensityMatrix load_state(const std::string& path,
                                const Tolerances& tol = {}) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open state file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("invalid JSON in " + path + ": " + e.what());
  }
  return state_from_json(j, tol);
}

inline void save_state(const std::string& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open output file: " + path);
  out << state_to_json(rho).dump(2) << "\n";
}

}  // namespace qfid
