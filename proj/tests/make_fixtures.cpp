// Regenerates tests/fixtures and tests/golden. Run from the build tree:
//   cmseq_make_fixtures <source>/tests
// and review the diff before committing.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "cli_app.hpp"
#include "cmseq/io.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace cmseq;

namespace {

void write_law(const fs::path& path, const SequenceLaw& law) {
  io::write_text_file(path, io::dump(io::law_to_json(law)));
}

int run_cli(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  std::cout << "cmseq";
  for (const auto& a : args) std::cout << ' ' << a;
  std::cout << "  -> " << code << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: cmseq_make_fixtures <tests dir>\n";
    return 2;
  }
  const fs::path root = argv[1];
  const fs::path fixtures = root / "fixtures";
  const fs::path golden = root / "golden";
  fs::create_directories(fixtures);
  fs::create_directories(golden);

  write_law(fixtures / "identity.json",
            SequenceLaw::from_covariance(BlockMatrix::identity(4, 1)));
  write_law(fixtures / "ar1_n2.json", testing::ar1_law(0.5, 2));
  write_law(fixtures / "ar1_n3.json", testing::ar1_law(0.5, 3));
  write_law(fixtures / "ar1_n4.json", testing::ar1_law(0.5, 4));
  write_law(fixtures / "cyclic.json", testing::law_from_precision(testing::cyclic_fixture_precision()));
  write_law(fixtures / "cml.json", testing::law_from_precision(testing::cml_fixture_precision()));

  io::write_text_file(fixtures / "truncated.json", "{\"schema_version\": \"1\", \"N\": 2, \"d\": 1, \"covar");
  io::write_text_file(fixtures / "missing_covariance.json",
                      "{\"schema_version\": \"1\", \"N\": 1, \"d\": 1}\n");
  io::write_text_file(fixtures / "not_spd.json",
                      "{\"schema_version\": \"1\", \"N\": 1, \"d\": 1, \"covariance\": [[1, 2], [2, 1]]}\n");

  const std::string f = fixtures.string() + "/";
  const std::string g = golden.string() + "/";
  int failures = 0;
  for (const char* name : {"identity", "ar1_n3", "cyclic", "cml"}) {
    const std::string law = f + name + ".json";
    if (run_cli({"classify", law, "--out", g + "classify_" + name + ".json"}) != 0) ++failures;
    const std::string model = f + "model_" + name + ".json";
    if (run_cli({"convert", law, "--c", "last", "--out", model}) != 0) ++failures;
    if (run_cli({"verify", model, "--out", g + "verify_" + name + ".json"}) != 0) ++failures;
  }
  if (run_cli({"convert", f + "ar1_n2.json", "--c", "last", "--out", f + "model_ar1_n2.json"}) != 0) {
    ++failures;
  }
  if (run_cli({"convert", f + "ar1_n4.json", "--c", "last", "--out", f + "model_ar1_n4.json"}) != 0) {
    ++failures;
  }
  return failures == 0 ? 0 : 1;
}
