#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;

namespace {

const std::string cli = OCRAN_CLI_PATH;
const std::filesystem::path data_dir = OCRAN_TEST_DATA;
const std::filesystem::path work = std::filesystem::temp_directory_path() / "ocran_cli_test";

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run run(const std::string& args) {
  std::filesystem::create_directories(work);
  const auto out = work / "stdout.txt";
  const auto err = work / "stderr.txt";
  const std::string cmd = cli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string data(const std::string& name) { return (data_dir / name).string(); }

std::vector<std::vector<std::string>> csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

bool contains(const std::string& s, const std::string& what) { return s.find(what) != std::string::npos; }

}  // namespace

TEST_CASE("region of the golden scenario") {
  auto r = run("--scenario " + data("golden_scalar.json") + " region --quantizers " + data("golden_b.json"));
  REQUIRE(r.code == 0);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"T_mask", "S_mask", "bound_bits"});
  CHECK(std::stod(rows[1][2]) == doctest::Approx(std::log2(1.5)).epsilon(1e-10));
  CHECK(std::stod(rows[2][2]) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(!contains(r.out, "nan"));
  // the manifest goes to stderr without --out
  auto manifest = json::parse(r.err);
  CHECK(manifest["command"] == "region");
  CHECK(manifest["exit_code"] == 0);
  CHECK(manifest["scenario"]["content_hash"].get<std::string>().size() == 16);
}

TEST_CASE("boundary quantizers print -inf") {
  std::filesystem::create_directories(work);
  const auto q = work / "edge.json";
  std::ofstream(q) << R"({"B": [[[1.0]]]})";
  auto r = run("--scenario " + data("golden_scalar.json") + " region --quantizers " + q.string());
  REQUIRE(r.code == 0);
  CHECK(contains(r.out, "-inf"));
  CHECK(!contains(r.out, "nan"));
}

TEST_CASE("error exit codes") {
  CHECK(run("--scenario " + data("bsc_no_aux.json") + " region").code == 2);
  auto missing = run("--scenario " + data("bsc_no_aux.json") + " sumrate");
  CHECK(missing.code == 2);
  CHECK(contains(missing.err, "aux"));
  CHECK(run("--scenario " + data("golden_scalar.json") + " region").code == 2);
  CHECK(run("--scenario " + data("does_not_exist.json") + " region").code == 2);
  CHECK(run("region --bogus-flag").code == 2);
  CHECK(run("--scenario " + data("golden_scalar.json") + " boundary").code == 2);
  CHECK(run("verify --suite nope").code == 2);
}

TEST_CASE("conditionally independent bound warns on correlated relays") {
  auto r = run("--scenario " + data("correlated_relays.json") + " region --which thm1");
  CHECK(r.code == 0);
  CHECK(contains(r.err, "warning"));
  auto general = run("--scenario " + data("correlated_relays.json") + " region --which thm3");
  CHECK(general.code == 0);
  CHECK(!contains(general.err, "warning"));
}

TEST_CASE("optimize writes reusable quantizers and a manifest") {
  const auto out = work / "opt.json";
  auto r = run("--scenario " + data("golden_scalar.json") + " --seed 3 --out " + out.string() + " optimize");
  REQUIRE(r.code == 0);
  auto doc = json::parse(slurp(out));
  CHECK(doc["value_bits"].get<double>() > 0.0);
  CHECK(doc.contains("trace"));
  CHECK(doc.contains("active"));
  auto manifest = json::parse(slurp(out.string() + ".manifest.json"));
  CHECK(manifest["seed"] == 3);
  CHECK(manifest["command"] == "optimize");

  const std::string first = slurp(out);
  REQUIRE(run("--scenario " + data("golden_scalar.json") + " --seed 3 --out " + out.string() + " optimize").code == 0);
  CHECK(slurp(out) == first);

  auto region = run("--scenario " + data("golden_scalar.json") + " region --quantizers " + out.string());
  REQUIRE(region.code == 0);
  double worst = INFINITY;
  for (std::size_t i = 1; i < csv(region.out).size(); ++i) worst = std::min(worst, std::stod(csv(region.out)[i][2]));
  CHECK(worst == doctest::Approx(doc["value_bits"].get<double>()).epsilon(1e-9));
}

TEST_CASE("discrete commands") {
  auto sum = run("--scenario " + data("two_relay_factorizing.json") + " sumrate");
  REQUIRE(sum.code == 0);
  auto ep = run("--scenario " + data("two_relay_factorizing.json") + " --format csv extreme-points");
  REQUIRE(ep.code == 0);
  auto rows = csv(ep.out);
  CHECK(rows[0] == std::vector<std::string>{"ordering", "k", "relay", "C_tilde_bits"});
  CHECK(rows.size() == 5);
  auto swz = run("--scenario " + data("two_relay_factorizing.json") + " swz-check");
  CHECK(swz.code == 0);
  auto doc = json::parse(swz.out);
  CHECK(doc["gap"].get<double>() <= 1e-9);
  CHECK(doc.contains("best_ordering"));
  auto opt = run("--scenario " + data("bsc_no_aux.json") + " optimize --card 2 --restarts 2");
  REQUIRE(opt.code == 0);
  CHECK(json::parse(opt.out).contains("aux"));
}

TEST_CASE("codebook and mc checks") {
  auto cb = run("codebook-check --rate 1 --n 3 --trials 20000 --pmf 0.3,0.7");
  REQUIRE(cb.code == 0);
  CHECK(json::parse(cb.out)["max_tv"].get<double>() <= 0.03);
  auto mc = run("--scenario " + data("golden_scalar.json") + " mc-check --quantizers " + data("golden_b.json") +
                " --samples 20000");
  REQUIRE(mc.code == 0);
  CHECK(json::parse(mc.out).contains("std_error_bits"));
}

TEST_CASE("verify suites") {
  auto swz = run("verify --suite swz --instances 50");
  REQUIRE(swz.code == 0);
  auto doc = json::parse(swz.out);
  CHECK(doc["suites"][0]["cases"] == 50);
  CHECK(doc["failures"] == 0);

  auto perturbed = run("verify --suite mc --perturb-gaussian 0.05 --mc-samples 20000");
  CHECK(perturbed.code == 1);
  CHECK(contains(perturbed.err, "verify: suite mc failed"));
  CHECK(json::parse(perturbed.out)["failed_suites"][0] == "mc");
}

TEST_CASE("boundary sweeps") {
  std::filesystem::create_directories(work);
  std::filesystem::remove(work / "sym_b.json");
  auto fixed = run("--scenario " + data("two_user_symmetric.json") + " boundary --points 11 --quantizers " +
                   (work / "sym_b.json").string());
  // the quantizer file does not exist yet
  CHECK(fixed.code == 2);
  std::ofstream(work / "sym_b.json") << R"({"B": [[[0.4]], [[0.4]]]})";
  fixed = run("--scenario " + data("two_user_symmetric.json") + " boundary --points 11 --quantizers " +
              (work / "sym_b.json").string());
  REQUIRE(fixed.code == 0);
  auto rows = csv(fixed.out);
  REQUIRE(rows.size() >= 2);
  CHECK(rows[0] == std::vector<std::string>{"w1", "w2", "R1_bits", "R2_bits"});

  // endpoints against the single-user maxima of the same region
  auto summary_path = work / "sym_region.csv";
  auto region = run("--scenario " + data("two_user_symmetric.json") + " --out " + summary_path.string() +
                    " region --quantizers " + (work / "sym_b.json").string());
  REQUIRE(region.code == 0);
  auto summary = json::parse(slurp(summary_path.string() + ".summary.json"));
  const auto per_user = summary["per_user_max_bits"];
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(per_user[0].get<double>()).epsilon(1e-9));
  CHECK(std::stod(rows[1][3]) == doctest::Approx(per_user[1].get<double>()).epsilon(1e-9));

  auto optimized = run("--scenario " + data("two_user_symmetric.json") + " boundary --points 5 --restarts 2 --iters 200");
  REQUIRE(optimized.code == 0);
  auto pts = csv(optimized.out);
  // the scenario is symmetric under swapping users, so is its boundary
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double a = std::stod(pts[i][2]);
    const double b = std::stod(pts[i][3]);
    bool mirrored = false;
    for (std::size_t j = 1; j < pts.size(); ++j) {
      mirrored = mirrored || (std::abs(std::stod(pts[j][2]) - b) < 1e-5 && std::abs(std::stod(pts[j][3]) - a) < 1e-5);
    }
    CHECK(mirrored);
  }
}

TEST_CASE("zero fronthaul boundary is the origin") {
  std::filesystem::create_directories(work);
  auto doc = json::parse(slurp(data_dir / "two_user_symmetric.json"));
  doc["fronthaul"] = {0.0, 0.0};
  const auto path = work / "zero_c.json";
  std::ofstream(path) << doc.dump();
  auto r = run("--scenario " + path.string() + " boundary --points 5 --restarts 1 --iters 50");
  REQUIRE(r.code == 0);
  auto rows = csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stod(rows[1][2]) == 0.0);
  CHECK(std::stod(rows[1][3]) == 0.0);
}
