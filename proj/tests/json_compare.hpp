#pragma once

#include <cmath>
#include <string>

#include "cmseq/io.hpp"

namespace cmseq::testing {

/// Structural equality with floating-point leaves compared to a relative
/// tolerance (absolute below 1). Returns the path of the first mismatch, or
/// an empty string.
inline std::string json_mismatch(const io::Json& got, const io::Json& want, double tol,
                                 const std::string& path = "$") {
  if (got.is_number() && want.is_number()) {
    const double a = got.get<double>();
    const double b = want.get<double>();
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)) ? "" : path;
  }
  if (got.type() != want.type()) return path;
  if (got.is_object()) {
    if (got.size() != want.size()) return path;
    for (auto it = want.begin(); it != want.end(); ++it) {
      if (!got.contains(it.key())) return path + "." + it.key();
      const std::string m = json_mismatch(got.at(it.key()), it.value(), tol, path + "." + it.key());
      if (!m.empty()) return m;
    }
    return "";
  }
  if (got.is_array()) {
    if (got.size() != want.size()) return path;
    for (std::size_t i = 0; i < want.size(); ++i) {
      const std::string m = json_mismatch(got[i], want[i], tol, path + "[" + std::to_string(i) + "]");
      if (!m.empty()) return m;
    }
    return "";
  }
  return got == want ? "" : path;
}

}  // namespace cmseq::testing
