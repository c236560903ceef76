#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "warpdirac/app.hpp"
#include "warpdirac/config.hpp"
#include "warpdirac/errors.hpp"
#include "warpdirac/report.hpp"

using namespace warpdirac;
namespace fs = std::filesystem;

namespace {

std::string config_error(const std::string& text) {
  try {
    validate_config(parse_config(text));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Configuration);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("warpdirac_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const char* kSmallValidate = R"(
profile: {family: flat}
grid: {r_max: 40, N: 512}
validation: {sizes: [128, 256, 512], trials: 5}
)";

}  // namespace

TEST_CASE("minimal configuration uses the documented defaults") {
  const RunConfig c = parse_config("profile: {family: flat}\n");
  validate_config(c);
  CHECK(c.grid.r_max == 40.0);
  CHECK(c.grid.N == 2048);
  CHECK(c.n == 3);
  CHECK(c.m == 0.0);
  CHECK(c.triples.size() == 1);
  CHECK(c.seed == 20240611);
  CHECK(c.profile.family == ProfileFamily::Flat);
}

TEST_CASE("configuration parsing of every section") {
  const RunConfig c = parse_config(R"(
profile: {family: asymptotically_flat, epsilon: 0.01, alpha: 1, beta: 2}
n: 3
m: 1
modes: {mu: [1, -2, 3]}
grid: {r_max: 30, N: 512}
time: {t_end: causal, samples: 33}
triples: [{p: inf, q: 2}]
teo2: {a: 1, b: 4}
epsilon: 0.2
output_dir: results
scan: {r_min: 1e-5, r_max: 1e5, points: 1000, refine_iterations: 40}
initial_data: {r0: 10, width: 2, amplitude: 0.5, component: minus}
validation: {sizes: [64, 128], mu: [1], masses: [0], trials: 3, min_order: 1.8}
seed: 7
threads: 1
)");
  validate_config(c);
  CHECK(c.profile.epsilon == 0.01);
  CHECK(c.profile.beta == 2);
  CHECK(c.selection == ModeSelection::MuList);
  CHECK(c.two_mu_list == std::vector<int>{2, -4, 6});
  CHECK(c.grid.N == 512);
  CHECK(c.t_end_causal);
  CHECK(c.time_samples == 33);
  CHECK(std::isinf(c.triples[0].p));
  CHECK(c.triples[0].m == 1.0);
  CHECK(*c.teo2_b == 4.0);
  CHECK(c.output_dir == fs::path("results"));
  CHECK(c.scan.points == 1000);
  CHECK(c.initial.component == SpinorComponent::Minus);
  CHECK(c.validation.sizes == std::vector<int>{64, 128});
  CHECK(c.seed == 7);
  CHECK(selected_modes(c).size() == 3);
}

TEST_CASE("configuration errors") {
  CHECK(config_error("profile: {family: flat}\ntriples: [{p: 4, q: 1.5}]\n").find("admissible-triple") !=
        std::string::npos);
  CHECK(config_error("profile: {family: flat}\nmodes: {mu: [0.5]}\n").find("mu = 0.5") != std::string::npos);
  const std::string unknown = config_error("profile: {family: flat}\ngrdi: {N: 64}\n");
  CHECK(unknown.find("grdi") != std::string::npos);
  CHECK(unknown.find("line 2") != std::string::npos);
  CHECK(config_error("profile: {family: flat\n").find("line") != std::string::npos);
  CHECK(config_error("profile: {family: torus}\n").find("torus") != std::string::npos);
  CHECK(config_error("profile: {family: flat}\ngrid: {N: 8}\n").find("N") != std::string::npos);
  CHECK(config_error("profile: {family: asymptotically_flat, epsilon: 0.1, alpha: 2, beta: 1}\n").size() > 0);
  // Every violated rule is reported together.
  const std::string many = config_error("profile: {family: flat}\nm: -1\ntime: {samples: 1}\n");
  CHECK(many.find("mass") != std::string::npos);
  CHECK(many.find("samples") != std::string::npos);
}

TEST_CASE("mode selection") {
  const RunConfig c = parse_config("profile: {family: flat}\nmodes: {mu_max: 3}\n");
  const auto modes = selected_modes(c);
  CHECK(modes.size() == 3);
  for (const ModeIndex& m : modes) CHECK(m.two_mu > 0);
  const RunConfig both = parse_config("profile: {family: flat}\nmodes: {mu_max: 3, signs: both}\n");
  CHECK(selected_modes(both).size() == 6);
  const RunConfig band = parse_config("profile: {family: flat}\nmodes: {band: 1}\n");
  for (const ModeIndex& m : selected_modes(band)) {
    CHECK(std::abs(m.mu()) >= 2.0);
    CHECK(std::abs(m.mu()) <= 5.0);
  }
}

TEST_CASE("deterministic JSON emitter") {
  Json j;
  j["zeta"] = 1.0;
  j["alpha"] = {{"b", 0.1}, {"a", std::numeric_limits<double>::infinity()}};
  j["count"] = 3;
  j["bad"] = std::nan("");
  j["low"] = -std::numeric_limits<double>::infinity();
  const std::string text = to_json_text(j);
  CHECK(text.find("\"alpha\"") < text.find("\"bad\""));
  CHECK(text.find("\"bad\"") < text.find("\"count\""));
  CHECK(text.find("\"a\": \"inf\"") != std::string::npos);
  CHECK(text.find("\"nan\"") != std::string::npos);
  CHECK(text.find("\"-inf\"") != std::string::npos);
  CHECK(text.find("1.0000000000000001e-01") != std::string::npos);
  CHECK(text.find("\"count\": 3") != std::string::npos);
  CHECK(text.back() == '\n');
  CHECK(format_double(0.5) == "5.0000000000000000e-01");
  CHECK(to_json_text(j) == text);
}

TEST_CASE("CSV tables and atomic writes") {
  CsvTable t({"a", "b"});
  t.add_row({"1", "2"});
  CHECK(t.text() == "a,b\n1,2\n");
  CHECK_THROWS_AS(t.add_row({"1"}), Error);
  const fs::path dir = fresh_dir("atomic");
  fs::create_directories(dir);
  write_file_atomic(dir / "x.txt", "hello");
  write_file_atomic(dir / "x.txt", "again");
  CHECK(read_file(dir / "x.txt") == "again");
  int files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorKind::Contract) == 2);
  CHECK(exit_code_for(ErrorKind::Hypothesis) == 2);
  CHECK(exit_code_for(ErrorKind::NonAdmissible) == 3);
  CHECK(exit_code_for(ErrorKind::Configuration) == 4);
  CHECK(exit_code_for(ErrorKind::UnsupportedFamily) == 4);
  CHECK(exit_code_for(ErrorKind::Policy) == 4);
  CHECK(exit_code_for(ErrorKind::Numerical) == 5);
  CHECK(parse_command("strichartz-scan") == Command::StrichartzScan);
  CHECK_THROWS_AS(parse_command("bogus"), Error);
}

TEST_CASE("check-metric workflow") {
  const RunOutcome flat = execute(parse_config("profile: {family: flat}\nmodes: {mu_max: 2}\n"), Command::CheckMetric);
  CHECK(flat.exit_code == 0);
  REQUIRE(flat.artifacts.count("check_metric.json"));
  const Json j = Json::parse(flat.artifacts.at("check_metric.json"));
  CHECK(j.contains("reports"));

  const RunOutcome sinh = execute(parse_config("profile: {family: sinh}\nmodes: {mu: [1, -1]}\n"), Command::CheckMetric);
  CHECK(sinh.exit_code == 3);
  CHECK(sinh.artifacts.count("check_metric.json") + sinh.artifacts.count("non_admissible.json") >= 1);
}

TEST_CASE("spectrum workflow") {
  const RunOutcome out = execute(parse_config("profile: {family: flat}\nmodes: {mu_max: 3, signs: both}\n"),
                                 Command::Spectrum);
  CHECK(out.exit_code == 0);
  const std::string csv = out.artifacts.at("spectrum.csv");
  CHECK(csv.rfind("mu,multiplicity,degree_plus,degree_minus,band_j\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}

TEST_CASE("evolve outside the causal window writes nothing") {
  RunConfig c = parse_config("profile: {family: flat}\ngrid: {N: 128}\ntime: {t_end: 30}\nmodes: {mu: [1]}\n");
  c.output_dir = fresh_dir("causal");
  std::ostringstream log;
  CHECK(run(c, Command::Evolve, log) == 4);
  CHECK_FALSE(fs::exists(c.output_dir));
}

TEST_CASE("evolve writes a report and trajectory") {
  RunConfig c = parse_config(
      "profile: {family: flat}\ngrid: {N: 256}\ntime: {t_end: 4, samples: 9}\nmodes: {mu: [1, -1]}\n");
  c.output_dir = fresh_dir("evolve");
  std::ostringstream log;
  CHECK(run(c, Command::Evolve, log) == 0);
  CHECK(fs::exists(c.output_dir / "evolve.json"));
  CHECK(fs::exists(c.output_dir / "trajectory_mu_1.csv"));
  const Json j = Json::parse(read_file(c.output_dir / "evolve.json"));
  CHECK(j.dump().find("norm_drift") != std::string::npos);
  fs::remove_all(c.output_dir);
}

TEST_CASE("validate is byte-for-byte deterministic") {
  RunConfig c = parse_config(kSmallValidate);
  const RunOutcome a = execute(c, Command::Validate);
  const RunOutcome b = execute(c, Command::Validate);
  CHECK(a.exit_code == 0);
  REQUIRE(a.artifacts.count("validate.json"));
  CHECK(a.artifacts.at("validate.json") == b.artifacts.at("validate.json"));
}

TEST_CASE("strichartz-scan on a non-admissible profile") {
  RunConfig c = parse_config("profile: {family: sinh}\ngrid: {N: 128}\nmodes: {mu: [1, -1]}\ntime: {t_end: causal}\n");
  c.output_dir = fresh_dir("scan_sinh");
  std::ostringstream log;
  CHECK(run(c, Command::StrichartzScan, log) == 3);
  CHECK(fs::exists(c.output_dir / "non_admissible.json"));
  fs::remove_all(c.output_dir);
}
