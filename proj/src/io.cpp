#include "cmseq/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <sstream>

namespace cmseq::io {

namespace {

const Json& field(const Json& j, const std::string& name) {
  if (!j.is_object() || !j.contains(name)) throw SchemaError("missing field '" + name + "'");
  return j.at(name);
}

std::size_t count_field(const Json& j, const std::string& name, std::size_t min_value) {
  const Json& v = field(j, name);
  if (!v.is_number_integer() || v.get<long long>() < static_cast<long long>(min_value)) {
    throw SchemaError("field '" + name + "' must be an integer >= " + std::to_string(min_value));
  }
  return v.get<std::size_t>();
}

std::string string_field(const Json& j, const std::string& name) {
  const Json& v = field(j, name);
  if (!v.is_string()) throw SchemaError("field '" + name + "' must be a string");
  return v.get<std::string>();
}

void check_schema_version(const Json& j) {
  if (string_field(j, "schema_version") != kSchemaVersion) {
    throw SchemaError("field 'schema_version' must be \"" + std::string(kSchemaVersion) + "\"");
  }
}

ConditioningSide parse_side(const Json& j) {
  const std::string s = string_field(j, "c");
  if (s == "first") return ConditioningSide::First;
  if (s == "last") return ConditioningSide::Last;
  throw SchemaError("field 'c' must be \"first\" or \"last\"");
}

BoundaryCondition parse_bc(const Json& j) {
  const std::string s = string_field(j, "bc");
  if (s == "bc1") return BoundaryCondition::BC1;
  if (s == "bc2") return BoundaryCondition::BC2;
  throw SchemaError("field 'bc' must be \"bc1\" or \"bc2\"");
}

Json witness_to_json(const PatternWitness& w) {
  Json out;
  out["conforms"] = w.conforms;
  out["worst_block"] = w.worst_block ? Json::array({w.worst_block->first, w.worst_block->second})
                                     : Json(nullptr);
  out["worst_ratio"] = w.worst_ratio;
  return out;
}

Json verdict_to_json(const ClassVerdict& v) {
  Json out;
  out["holds"] = v.holds;
  out["witness"] = witness_to_json(v.witness);
  return out;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto result =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), result.ptr);
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& name, Eigen::Index rows,
                        Eigen::Index cols) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw SchemaError("field '" + name + "' must have " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SchemaError("field '" + name + "' row " + std::to_string(i) + " must have " +
                        std::to_string(cols) + " entries");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw SchemaError("field '" + name + "' holds a non-numeric entry");
      m(i, c) = v.get<double>();
    }
  }
  return m;
}

Json law_to_json(const SequenceLaw& law) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["N"] = law.last_index();
  out["d"] = law.dim();
  out["covariance"] = matrix_to_json(law.covariance().dense());
  return out;
}

SequenceLaw law_from_json(const Json& j) {
  check_schema_version(j);
  const std::size_t n = count_field(j, "N", 1);
  const std::size_t d = count_field(j, "d", 1);
  const auto size = static_cast<Eigen::Index>((n + 1) * d);
  Matrix c = matrix_from_json(field(j, "covariance"), "covariance", size, size);
  return SequenceLaw::from_covariance(BlockMatrix(std::move(c), d));
}

Json model_to_json(const CmcModel& model, Direction direction) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["kind"] = to_string(direction);
  out["N"] = model.last_index;
  out["d"] = model.dim;
  out["c"] = to_string(model.side);
  out["bc"] = to_string(model.bc);
  Json trans = Json::object();
  Json cond = Json::object();
  for (std::size_t k : recursion_indices(direction, model.last_index, model.side)) {
    trans[std::to_string(k)] = matrix_to_json(model.trans[k]);
    cond[std::to_string(k)] = matrix_to_json(model.cond[k]);
  }
  Json noise = Json::object();
  for (std::size_t k = 0; k <= model.last_index; ++k) {
    noise[std::to_string(k)] = matrix_to_json(model.noise[k]);
  }
  out["transition_gains"] = std::move(trans);
  out["conditioning_gains"] = std::move(cond);
  out["noise_covariances"] = std::move(noise);
  out["boundary_gain"] = model.boundary_gain ? matrix_to_json(*model.boundary_gain) : Json(nullptr);
  return out;
}

LoadedModel model_from_json(const Json& j) {
  check_schema_version(j);
  LoadedModel loaded;
  const std::string kind = string_field(j, "kind");
  if (kind == "forward") {
    loaded.direction = Direction::Forward;
  } else if (kind == "backward") {
    loaded.direction = Direction::Backward;
  } else {
    throw SchemaError("field 'kind' must be \"forward\" or \"backward\"");
  }

  CmcModel& m = loaded.model;
  m.last_index = count_field(j, "N", 2);
  m.dim = count_field(j, "d", 1);
  m.side = parse_side(j);
  m.bc = parse_bc(j);
  if (!is_valid_variant(loaded.direction, m.side, m.bc)) {
    throw SchemaError("fields 'c'/'bc': no such " + kind + " model variant");
  }
  const auto d = static_cast<Eigen::Index>(m.dim);
  const std::size_t n = m.last_index;
  m.trans.assign(n + 1, Matrix(0, 0));
  m.cond.assign(n + 1, Matrix(0, 0));
  m.noise.assign(n + 1, Matrix(0, 0));

  auto per_time = [&](const std::string& name, std::size_t k) -> const Json& {
    const Json& group = field(j, name);
    const std::string key = std::to_string(k);
    if (!group.is_object() || !group.contains(key)) {
      throw SchemaError("field '" + name + "' lacks time index " + key);
    }
    return group.at(key);
  };
  const auto indices = recursion_indices(loaded.direction, n, m.side);
  for (std::size_t k : indices) {
    m.trans[k] = matrix_from_json(per_time("transition_gains", k), "transition_gains", d, d);
    m.cond[k] = matrix_from_json(per_time("conditioning_gains", k), "conditioning_gains", d, d);
  }
  for (const char* name : {"transition_gains", "conditioning_gains"}) {
    if (field(j, name).size() != indices.size()) {
      throw SchemaError(std::string("field '") + name + "' has entries outside the recursion");
    }
  }
  for (std::size_t k = 0; k <= n; ++k) {
    m.noise[k] = matrix_from_json(per_time("noise_covariances", k), "noise_covariances", d, d);
  }
  const Json& gain = field(j, "boundary_gain");
  if (!gain.is_null()) m.boundary_gain = matrix_from_json(gain, "boundary_gain", d, d);

  try {
    for (auto& g : m.noise) g = symmetrized(g);
  } catch (const NotSymmetric&) {
    throw SchemaError("field 'noise_covariances' holds a non-symmetric matrix");
  }
  try {
    validate(m, loaded.direction);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(e.what());
  }
  return loaded;
}

Json report_to_json(const ClassificationReport& report) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["N"] = report.last_index;
  out["d"] = report.dim;
  out["markov"] = verdict_to_json(report.markov);
  Json reciprocal;
  reciprocal["holds"] = report.reciprocal.holds;
  reciprocal["witness"] = witness_to_json(report.reciprocal.witness);
  reciprocal["cm_l_and_cm_f"] = report.reciprocal.cm_l_and_cm_f;
  reciprocal["routes_agree"] = report.reciprocal.routes_agree;
  out["reciprocal"] = std::move(reciprocal);
  out["cm_l"] = verdict_to_json(report.cm_l);
  out["cm_f"] = verdict_to_json(report.cm_f);
  Json intervals = Json::array();
  for (const auto& iv : report.interval_cm) {
    Json entry;
    entry["lo"] = iv.interval.lo;
    entry["hi"] = iv.interval.hi;
    entry["c"] = to_string(iv.side);
    entry["holds"] = iv.verdict.holds;
    entry["witness"] = witness_to_json(iv.verdict.witness);
    intervals.push_back(std::move(entry));
  }
  out["interval_cm"] = std::move(intervals);
  out["consistency"] = report.consistency;
  return out;
}

std::string batch_to_csv(const SampleBatch& batch) {
  std::string out = "replicate,k";
  for (std::size_t i = 1; i <= batch.dim; ++i) out += ",x_" + std::to_string(i);
  out += '\n';
  for (std::size_t m = 0; m < batch.replicates; ++m) {
    for (std::size_t k = 0; k <= batch.last_index; ++k) {
      out += std::to_string(m);
      out += ',';
      out += std::to_string(k);
      const auto x = batch.state(m, k);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        out += ',';
        out += format_double(x(i));
      }
      out += '\n';
    }
  }
  return out;
}

Json batch_to_json(const SampleBatch& batch) {
  Json out;
  out["schema_version"] = kSchemaVersion;
  out["N"] = batch.last_index;
  out["d"] = batch.dim;
  out["M"] = batch.replicates;
  out["seed"] = batch.seed;
  Json trajectories = Json::array();
  for (std::size_t m = 0; m < batch.replicates; ++m) {
    Json states = Json::array();
    for (std::size_t k = 0; k <= batch.last_index; ++k) {
      const auto x = batch.state(m, k);
      states.push_back(Json(std::vector<double>(x.data(), x.data() + x.size())));
    }
    trajectories.push_back(std::move(states));
  }
  out["trajectories"] = std::move(trajectories);
  return out;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError("malformed JSON in '" + path.string() + "': " + e.what());
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

}  // namespace cmseq::io
