#include "cli_app.hpp"

#include <algorithm>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "cmseq/classify.hpp"
#include "cmseq/io.hpp"
#include "cmseq/models.hpp"
#include "cmseq/simulate.hpp"
#include "cmseq/structure.hpp"

namespace cmseq::cli {

namespace {

using io::Json;

const char* yes_no(bool b) { return b ? "true" : "false"; }

ConditioningSide parse_side(const std::string& s) {
  return s == "first" ? ConditioningSide::First : ConditioningSide::Last;
}

BoundaryCondition parse_bc(const std::string& s) {
  return s == "bc2" ? BoundaryCondition::BC2 : BoundaryCondition::BC1;
}

LawClass parse_class(const std::string& s) {
  if (s == "markov") return LawClass::Markov;
  if (s == "reciprocal") return LawClass::Reciprocal;
  if (s == "cml") return LawClass::CmLOnly;
  if (s == "cmf") return LawClass::CmFOnly;
  return LawClass::Generic;
}

struct ClassifyArgs {
  std::string in;
  std::string out;
  double tol = Tolerance{}.zero_tol;
};

struct ConvertArgs {
  std::string in;
  std::string out;
  std::string direction = "forward";
  std::string side;
  std::string bc = "bc1";
};

struct VerifyArgs {
  std::string in;
  std::string out;
  double tol = Tolerance{}.residual_tol;
};

struct SimulateArgs {
  std::string in;
  std::string out;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::string format = "csv";
};

struct ValidateArgs {
  std::string in;
  std::string law;
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  double tol = 0.02;
};

struct GenArgs {
  std::string cls;
  std::string out;
  std::size_t last_index = 0;
  std::size_t dim = 1;
  std::uint64_t seed = 0;
};

int do_classify(const ClassifyArgs& a, std::ostream& out) {
  Tolerance tol;
  tol.zero_tol = a.tol;
  const SequenceLaw law = io::law_from_json(io::read_json_file(a.in));
  const ClassificationReport report = full_report(law, tol);
  io::write_text_file(a.out, io::dump(io::report_to_json(report)));

  const auto held = std::count_if(report.interval_cm.begin(), report.interval_cm.end(),
                                  [](const IntervalVerdict& v) { return v.verdict.holds; });
  out << "markov       " << yes_no(report.markov.holds) << '\n'
      << "reciprocal   " << yes_no(report.reciprocal.holds) << '\n'
      << "cm_l         " << yes_no(report.cm_l.holds) << '\n'
      << "cm_f         " << yes_no(report.cm_f.holds) << '\n'
      << "interval_cm  " << held << "/" << report.interval_cm.size() << " hold\n"
      << "consistency  " << yes_no(report.consistency) << '\n';
  return report.consistency ? kSuccess : kInconsistent;
}

int do_convert(const ConvertArgs& a, std::ostream& out) {
  const SequenceLaw law = io::law_from_json(io::read_json_file(a.in));
  const Direction direction = a.direction == "backward" ? Direction::Backward : Direction::Forward;
  const ConditioningSide side = parse_side(a.side);
  const BoundaryCondition bc = parse_bc(a.bc);
  if (!is_valid_variant(direction, side, bc)) {
    throw io::SchemaError("--bc " + a.bc + " is not available for " + a.direction +
                          " models with --c " + a.side);
  }
  const CmcModel model = direction == Direction::Forward
                             ? static_cast<CmcModel>(build_forward(law, side, bc))
                             : static_cast<CmcModel>(build_backward(law, side, bc));
  io::write_text_file(a.out, io::dump(io::model_to_json(model, direction)));
  out << "wrote " << a.direction << " CM_" << (side == ConditioningSide::First ? "F" : "L")
      << " model (" << a.bc << ", N=" << model.last_index << ", d=" << model.dim << ")\n";
  return kSuccess;
}

template <typename Model>
Json verify_model(const Model& model, const Tolerance& tol, bool& consistent) {
  const ConditionCheck reciprocity = check_reciprocity(model, tol);
  const ConditionCheck markov_addon = check_markov(model, tol);
  const BlockMatrix a = assemble_precision(model);
  const PatternWitness cyclic = detect(a, PatternSpec::cyclic_tridiagonal(a.last_index()), tol);
  const PatternWitness tri = detect(a, PatternSpec::tridiagonal(a.last_index()), tol);

  auto check_json = [](const ConditionCheck& c) {
    Json j;
    j["holds"] = c.holds;
    j["max_residual"] = c.max_residual;
    j["worst_index"] = c.worst_index ? Json(*c.worst_index) : Json(nullptr);
    return j;
  };
  auto pattern_json = [](const PatternWitness& w) {
    Json j;
    j["holds"] = w.conforms;
    j["worst_block"] = w.worst_block ? Json::array({w.worst_block->first, w.worst_block->second})
                                     : Json(nullptr);
    j["worst_ratio"] = w.worst_ratio;
    return j;
  };

  const bool markov_params = reciprocity.holds && markov_addon.holds;
  const bool reciprocal_agree = reciprocity.holds == cyclic.conforms;
  const bool markov_agree = markov_params == tri.conforms;
  consistent = reciprocal_agree && markov_agree;

  Json j;
  j["reciprocal"]["holds"] = reciprocity.holds;
  j["reciprocal"]["parameter_condition"] = check_json(reciprocity);
  j["reciprocal"]["assembled_precision"] = pattern_json(cyclic);
  j["reciprocal"]["routes_agree"] = reciprocal_agree;
  j["markov"]["holds"] = markov_params;
  j["markov"]["boundary_condition"] = check_json(markov_addon);
  j["markov"]["assembled_precision"] = pattern_json(tri);
  j["markov"]["routes_agree"] = markov_agree;
  return j;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  Tolerance tol;
  tol.residual_tol = a.tol;
  tol.validate();
  const io::LoadedModel loaded = io::model_from_json(io::read_json_file(a.in));
  bool consistent = false;
  const Json checks = loaded.direction == Direction::Forward
                          ? verify_model(loaded.forward(), tol, consistent)
                          : verify_model(loaded.backward(), tol, consistent);

  Json report;
  report["schema_version"] = io::kSchemaVersion;
  report["kind"] = to_string(loaded.direction);
  report["N"] = loaded.model.last_index;
  report["d"] = loaded.model.dim;
  report["c"] = to_string(loaded.model.side);
  report["bc"] = to_string(loaded.model.bc);
  report["reciprocal"] = checks["reciprocal"];
  report["markov"] = checks["markov"];
  report["consistency"] = consistent;
  if (!a.out.empty()) io::write_text_file(a.out, io::dump(report));

  out << "reciprocal   " << yes_no(checks["reciprocal"]["holds"].get<bool>())
      << "  (routes agree: " << yes_no(checks["reciprocal"]["routes_agree"].get<bool>()) << ")\n"
      << "markov       " << yes_no(checks["markov"]["holds"].get<bool>())
      << "  (routes agree: " << yes_no(checks["markov"]["routes_agree"].get<bool>()) << ")\n";
  return consistent ? kSuccess : kInconsistent;
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const io::LoadedModel loaded = io::model_from_json(io::read_json_file(a.in));
  const SampleBatch batch = loaded.direction == Direction::Forward
                                ? sample_forward(loaded.forward(), a.samples, a.seed)
                                : sample_backward(loaded.backward(), a.samples, a.seed);
  io::write_text_file(a.out, a.format == "csv" ? io::batch_to_csv(batch)
                                               : io::dump(io::batch_to_json(batch)));
  out << "wrote " << a.samples << " trajectories of length " << batch.last_index + 1 << '\n';
  return kSuccess;
}

int do_validate(const ValidateArgs& a, std::ostream& out) {
  const io::LoadedModel loaded = io::model_from_json(io::read_json_file(a.in));
  std::optional<SequenceLaw> reference;
  if (!a.law.empty()) reference = io::law_from_json(io::read_json_file(a.law));
  const McReport report =
      loaded.direction == Direction::Forward
          ? mc_validate(loaded.forward(), a.samples, a.seed, a.tol, reference)
          : mc_validate(loaded.backward(), a.samples, a.seed, a.tol, reference);
  out << "monte carlo  " << (report.pass ? "pass" : "fail") << "  worst |deviation| "
      << io::format_double(report.worst_deviation) << " at (" << report.worst_row << ", "
      << report.worst_col << "), tolerance " << io::format_double(report.tol_abs) << '\n';
  return report.pass ? kSuccess : kCheckFailed;
}

int do_gen(const GenArgs& a, std::ostream& out) {
  const SequenceLaw law = random_law(parse_class(a.cls), a.last_index, a.dim, a.seed);
  io::write_text_file(a.out, io::dump(io::law_to_json(law)));
  out << "wrote " << a.cls << " law (N=" << a.last_index << ", d=" << a.dim
      << ", seed=" << a.seed << ")\n";
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conditionally Markov / reciprocal Gaussian sequence toolkit", "cmseq"};
  app.require_subcommand(1);

  ClassifyArgs classify_args;
  auto* classify = app.add_subcommand("classify", "Classify a law file (writes a JSON report)");
  classify->add_option("law", classify_args.in, "Law file")->required();
  classify->add_option("--tol", classify_args.tol, "Relative zero-block tolerance");
  classify->add_option("--out", classify_args.out, "Report file")->required();

  ConvertArgs convert_args;
  auto* convert = app.add_subcommand("convert", "Build a CM_c dynamic model from a law file");
  convert->add_option("law", convert_args.in, "Law file")->required();
  convert->add_option("--direction", convert_args.direction)
      ->check(CLI::IsMember({"forward", "backward"}));
  convert->add_option("--c", convert_args.side, "Conditioning endpoint")
      ->required()
      ->check(CLI::IsMember({"first", "last"}));
  convert->add_option("--bc", convert_args.bc)->check(CLI::IsMember({"bc1", "bc2"}));
  convert->add_option("--out", convert_args.out, "Model file")->required();

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check reciprocity / Markov conditions of a model");
  verify->add_option("model", verify_args.in, "Model file")->required();
  verify->add_option("--tol", verify_args.tol, "Relative residual tolerance");
  verify->add_option("--out", verify_args.out, "Optional JSON report file");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand("simulate", "Sample trajectories from a model");
  simulate->add_option("model", simulate_args.in, "Model file")->required();
  simulate->add_option("--samples", simulate_args.samples, "Replicate count")->required();
  simulate->add_option("--seed", simulate_args.seed);
  simulate->add_option("--out", simulate_args.out, "Output file")->required();
  simulate->add_option("--format", simulate_args.format)
      ->check(CLI::IsMember({"csv", "structured"}));

  ValidateArgs validate_args;
  auto* validate_cmd =
      app.add_subcommand("validate", "Monte Carlo check of a model's covariance");
  validate_cmd->add_option("model", validate_args.in, "Model file")->required();
  validate_cmd->add_option("--samples", validate_args.samples);
  validate_cmd->add_option("--seed", validate_args.seed);
  validate_cmd->add_option("--tol", validate_args.tol, "Absolute entrywise tolerance");
  validate_cmd->add_option("--law", validate_args.law,
                           "Reference law (defaults to the model's own law)");

  GenArgs gen_args;
  auto* gen = app.add_subcommand("gen", "Generate a random law of a given class");
  gen->add_option("--class", gen_args.cls)
      ->required()
      ->check(CLI::IsMember({"markov", "reciprocal", "cml", "cmf", "generic"}));
  gen->add_option("--N", gen_args.last_index, "Last time index")->required();
  gen->add_option("--d", gen_args.dim, "State dimension");
  gen->add_option("--seed", gen_args.seed);
  gen->add_option("--out", gen_args.out, "Law file")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kInputError;
  }

  try {
    if (*classify) return do_classify(classify_args, out);
    if (*convert) return do_convert(convert_args, out);
    if (*verify) return do_verify(verify_args, out);
    if (*simulate) return do_simulate(simulate_args, out);
    if (*validate_cmd) return do_validate(validate_args, out);
    if (*gen) return do_gen(gen_args, out);
  } catch (const NotPositiveDefinite& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const NotSymmetric& e) {
    err << "error: " << e.what() << '\n';
    return kNumericError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace cmseq::cli
