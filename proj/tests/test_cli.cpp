#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kBin = fs::path(KACGC_BINARY);

struct RunResult {
  int status;
  std::string output;
};

RunResult run(const std::string& args) {
  const std::string cmd = kBin.string() + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
  const int rc = pclose(pipe);
  return {WEXITSTATUS(rc), out};
}

fs::path write_config(const json& j, const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

json base_config() {
  return json{{"params", {{"mu", 5.0}, {"rho", 1.0}, {"lambda", 1.0}}},
              {"initial", {{"type", "product"}, {"eta", 2.0}}},
              {"checkpoints", {0.5, 1.0}},
              {"replicas", 200},
              {"seed", 7}};
}

}  // namespace

TEST_CASE("config validation failures exit nonzero with diagnostics") {
  auto bad_rate = base_config();
  bad_rate["params"]["rho"] = 0.0;
  const auto r1 = run("simulate --config " + write_config(bad_rate, "bad_rate.json").string() +
                      " --out /tmp/kacgc_t1");
  CHECK(r1.status != 0);
  CHECK(r1.output.find("rho") != std::string::npos);

  auto no_seed = base_config();
  no_seed.erase("seed");
  const auto r2 = run("simulate --config " + write_config(no_seed, "no_seed.json").string() +
                      " --out /tmp/kacgc_t2");
  CHECK(r2.status != 0);
  CHECK(r2.output.find("seed") != std::string::npos);

  auto bad_checks = base_config();
  bad_checks["checkpoints"] = {1.0, 0.5};
  const auto r3 = run("simulate --config " + write_config(bad_checks, "bad_checks.json").string() +
                      " --out /tmp/kacgc_t3");
  CHECK(r3.status != 0);
  CHECK(r3.output.find("checkpoints") != std::string::npos);
}

TEST_CASE("simulate is byte-identical for a fixed seed and embeds the stamp") {
  auto j = base_config();
  j["observables"] = {3, 4};
  const auto cfg = write_config(j, "sim.json").string();
  CHECK(run("simulate --config " + cfg + " --out /tmp/kacgc_a --threads 2").status == 0);
  CHECK(run("simulate --config " + cfg + " --out /tmp/kacgc_b --threads 1").status == 0);
  const auto a = slurp("/tmp/kacgc_a/trajectory.csv");
  const auto b = slurp("/tmp/kacgc_b/trajectory.csv");
  CHECK(!a.empty());
  CHECK(a == b);
  CHECK(a.rfind("# config_hash=", 0) == 0);
  CHECK(a.find("seed=7") != std::string::npos);
  CHECK(a.find("t,replica,N,sum_v2,obs_h3,obs_h4") != std::string::npos);
  const auto summary = json::parse(slurp("/tmp/kacgc_a/summary.json"));
  CHECK(summary["checkpoints"][0].contains("obs_h3_mean"));
  CHECK(summary["checkpoints"][0].contains("obs_h4_se"));

  // A seed override changes the draw.
  CHECK(run("simulate --config " + cfg + " --out /tmp/kacgc_c --seed 8").status == 0);
  CHECK(slurp("/tmp/kacgc_c/trajectory.csv") != a);
}

TEST_CASE("moments subcommand writes closed forms and number laws") {
  const auto cfg = write_config(base_config(), "mom.json").string();
  CHECK(run("moments --config " + cfg + " --out /tmp/kacgc_m").status == 0);
  const auto csv = slurp("/tmp/kacgc_m/moments.csv");
  CHECK(csv.find("t,N_mean,E_mean,e") != std::string::npos);
  CHECK(fs::exists("/tmp/kacgc_m/number_law_t1.csv"));
}

TEST_CASE("spectrum subcommand reports the paper gaps") {
  auto cfg = base_config();
  cfg["params"] = {{"mu", 512.0}, {"rho", 1.0}, {"lambda", 1.0}};
  cfg["truncation"] = {{"k_max", 12}};
  const auto r = run("spectrum --config " + write_config(cfg, "spec.json").string() +
                     " --out /tmp/kacgc_s");
  CHECK(r.status == 0);
  const auto out = json::parse(slurp("/tmp/kacgc_s/spectrum.json"));
  CHECK(out["delta"].get<double>() == doctest::Approx(-1.0));
  const double d2 = out["delta2"].get<double>();
  CHECK(d2 >= -1.25 - 1e-12);
  CHECK(d2 < -1.25 + 2.0 / std::sqrt(512.0));
  CHECK(out["condition_ok"].get<bool>());
  CHECK(out["truncation"]["drift"].get<double>() < 1e-8);
}

TEST_CASE("bk-solve writes the field trajectory") {
  auto cfg = base_config();
  cfg["params"] = {{"mu", 1.0}, {"rho", 1.0}, {"lambda", 0.0}};
  cfg["initial"] = {{"type", "product"}, {"eta", 1.0}, {"g", {{"type", "bimodal"}}}};
  cfg["checkpoints"] = {0.2};
  cfg["grid"] = {{"v_max", 4.0}, {"dv", 0.05}, {"dt", 0.005}};
  const auto r = run("bk-solve --config " + write_config(cfg, "bk.json").string() +
                     " --out /tmp/kacgc_bk");
  CHECK(r.status == 0);
  const auto csv = slurp("/tmp/kacgc_bk/bk_solution.csv");
  CHECK(csv.find("t,v,F") != std::string::npos);
}

TEST_CASE("entropy subcommand emits the decay report") {
  auto cfg = base_config();
  cfg["params"] = {{"mu", 2.0}, {"rho", 1.0}, {"lambda", 1.0}};
  cfg["initial"] = {{"type", "product"}, {"eta", 0.5}};
  cfg["checkpoints"] = {0.5, 1.0};
  cfg["replicas"] = 5000;
  const auto r = run("entropy --config " + write_config(cfg, "ent.json").string() +
                     " --out /tmp/kacgc_e --threads 2");
  CHECK(r.status == 0);
  const auto out = json::parse(slurp("/tmp/kacgc_e/entropy.json"));
  CHECK(out["analytic_bound_holds"].get<bool>());
  CHECK(out["checkpoints"].size() == 2);
  for (const auto& row : out["checkpoints"]) {
    CHECK(row.contains("S_estimate"));
    CHECK(row.contains("bound"));
    CHECK(row.contains("psi"));
    CHECK(row.contains("lemma_ent_slack"));
  }
}

TEST_CASE("chaos subcommand emits the scan report") {
  auto cfg = base_config();
  cfg["params"] = {{"mu", 8.0}, {"rho", 1.0}, {"lambda", 0.0}};
  cfg["initial"] = {{"type", "product"}, {"g", {{"type", "bimodal"}}}};
  cfg["replicas"] = 400;
  cfg["grid"] = {{"v_max", 4.0}, {"dv", 0.05}, {"dt", 0.01}};
  cfg["chaos"] = {{"eta_scale", 0.5}, {"mu_list", {8.0, 16.0}}, {"t", 0.3}};
  const auto r = run("chaos --config " + write_config(cfg, "chaos.json").string() +
                     " --out /tmp/kacgc_ch --threads 2");
  CHECK(r.status == 0);
  const auto out = json::parse(slurp("/tmp/kacgc_ch/chaos.json"));
  CHECK(out["rows"].size() == 2);
  CHECK(out["replicas"].get<int>() == 400);
  for (const auto& row : out["rows"]) {
    CHECK(row["l1_pde"].get<double>() >= 0.0);
    CHECK(row["factor_defect"].get<double>() >= 0.0);
  }
}
