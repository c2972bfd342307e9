#pragma once

// File formats used by the command-line tool.
//
// Law, model and report files are JSON objects carrying schema_version "1".
// Matrices are row-major nested arrays; per-time parameters are objects keyed
// by the decimal time index. Doubles are written in the shortest form that
// parses back to the same value.

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "cmseq/classify.hpp"
#include "cmseq/core.hpp"
#include "cmseq/models.hpp"
#include "cmseq/simulate.hpp"

namespace cmseq::io {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

/// Malformed or schema-invalid input; the message names the failing field.
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j, const std::string& field, Eigen::Index rows,
                        Eigen::Index cols);

Json law_to_json(const SequenceLaw& law);
/// Throws SchemaError, or NotSymmetric / NotPositiveDefinite for bad numbers.
SequenceLaw law_from_json(const Json& j);

struct LoadedModel {
  Direction direction = Direction::Forward;
  CmcModel model;

  ForwardCmcModel forward() const { return {model}; }
  BackwardCmcModel backward() const { return {model}; }
};

Json model_to_json(const CmcModel& model, Direction direction);
/// Throws SchemaError for shape/field problems, NotPositiveDefinite for noise
/// covariances that are not SPD.
LoadedModel model_from_json(const Json& j);

Json report_to_json(const ClassificationReport& report);

/// CSV with header "replicate,k,x_1,...,x_d" and one row per (replicate, k);
/// values carry 17 significant digits.
std::string batch_to_csv(const SampleBatch& batch);
Json batch_to_json(const SampleBatch& batch);

/// Parses a JSON file, mapping I/O and syntax errors to SchemaError.
Json read_json_file(const std::filesystem::path& path);
/// Two-space indented JSON followed by a newline.
std::string dump(const Json& j);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::string format_double(double value);

}  // namespace cmseq::io
