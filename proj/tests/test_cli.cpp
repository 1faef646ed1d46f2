#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "cdho/config.hpp"
#include "cdho/error.hpp"
#include "cdho/run.hpp"
#include "cdho/sweep.hpp"
#include "doctest.h"

using namespace cdho;
namespace fs = std::filesystem;

namespace {

std::string error_text(const nlohmann::json& user) {
  try {
    resolve_config(user);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("cdho_cli_" + name);
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST_CASE("defaults resolve") {
  const RunConfig c = resolve_config(nlohmann::json::object());
  CHECK(c.seed == 1729);
  CHECK(c.grid.N == 2048);
  CHECK(c.experiment == Experiment::Evolve);
  CHECK(c.params.R > 1e40);
  CHECK(c.resolved.at("grid").at("L") == 32.0);
}

TEST_CASE("config errors name the field") {
  CHECK(error_text({{"grid", {{"N", -4}}}}).find("grid.N") != std::string::npos);
  CHECK(error_text({{"solver", {{"dt0", "fast"}}}}).find("solver.dt0") != std::string::npos);
  CHECK(error_text({{"grid", {{"bogus", 1}}}}).find("grid.bogus") != std::string::npos);
  CHECK(error_text({{"nonsense", 1}}).find("nonsense") != std::string::npos);
  CHECK(error_text({{"experiment", "dance"}}).find("experiment") != std::string::npos);
  CHECK(error_text({{"params", {{"delta0", 2.0}}}}).find("params.delta0") != std::string::npos);
}

TEST_CASE("overrides") {
  nlohmann::json j = nlohmann::json::object();
  apply_override(j, "grid.N=512");
  apply_override(j, "solver.scheme=position");
  apply_override(j, "classify.theta3=[1,2]");
  CHECK(j["grid"]["N"] == 512);
  CHECK(j["solver"]["scheme"] == "position");
  CHECK(j["classify"]["theta3"].size() == 2);
  CHECK_THROWS_AS(apply_override(j, "grid.N"), Error);
  CHECK_THROWS_AS(apply_override(j, "grid.N.x=1"), Error);
  const RunConfig c = resolve_config(j);
  CHECK(c.grid.N == 512);
  CHECK(c.solver.scheme == Scheme::Position);
}

TEST_CASE("FNV-1a hash") {
  CHECK(hex64(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex64(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("sweep rejects bad requests before writing") {
  const fs::path out = scratch("empty");
  CHECK_THROWS_AS(sweep(nlohmann::json::object(), "grid.N", {}, 2, out), Error);
  CHECK_THROWS_AS(sweep(nlohmann::json::object(), "grid", {1}, 2, out), Error);
  CHECK_THROWS_AS(sweep(nlohmann::json::object(), "grid.N", {256}, 0, out), Error);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("classify output is deterministic") {
  nlohmann::json j = {{"experiment", "classify"}};
  const RunConfig c = resolve_config(j);
  const fs::path a = scratch("cls_a"), b = scratch("cls_b");
  CHECK(run(c, a).status == 0);
  CHECK(run(c, b).status == 0);
  const std::string va = slurp(a / "verdicts.json");
  CHECK(!va.empty());
  CHECK(va == slurp(b / "verdicts.json"));
  const auto m = nlohmann::json::parse(slurp(a / "manifest.json"));
  CHECK(m.at("config_hash") == hex64(fnv1a(c.resolved.dump())));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("sweep keeps going past a failing job") {
  const fs::path out = scratch("partial");
  const nlohmann::json base = {{"experiment", "classify"}};
  const SweepReport r = sweep(base, "params.delta0", {0.01, 5.0, 0.5}, 2, out);
  CHECK(r.succeeded == 2);
  REQUIRE(r.failures.size() == 1);
  CHECK(r.failures[0].value == 5.0);
  CHECK(r.failures[0].error.find("params.delta0") != std::string::npos);
  CHECK(fs::exists(out / "sweep.csv"));
  const auto f = nlohmann::json::parse(slurp(out / "failures.json"));
  CHECK(f.size() == 1);
  fs::remove_all(out);
}
