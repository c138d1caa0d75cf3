#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kacgc/acceptance.hpp"
#include "kacgc/bk.hpp"
#include "kacgc/entropy.hpp"
#include "kacgc/jump.hpp"
#include "kacgc/number_chain.hpp"
#include "kacgc/spectral.hpp"
#include "kacgc/stats.hpp"

using nlohmann::json;
namespace fs = std::filesystem;
using namespace kacgc;

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

struct Config {
  ModelParams params;
  std::string initial_type = "stationary";  // stationary | product | delta
  double eta = 1.0;
  std::string g_type = "maxwellian";  // maxwellian | scaled_maxwellian | bimodal
  double g_scale = 1.0;               // variance scale for scaled_maxwellian
  int n0 = 0;
  std::vector<double> checkpoints;
  int replicas = 1000;
  std::uint64_t seed = 0;
  bool seed_set = false;
  // module blocks
  double v_max = 4.0, dv = 0.02;
  int n_theta = 64;
  double dt = 1e-3;
  int cells = 8;
  int k_max = 40;
  std::vector<int> observables;  // Hermite modes recorded as sum_i L_m(v_i)
  // chaos block
  double eta_scale = 0.5;
  std::vector<double> mu_list{32.0, 128.0, 512.0};
  double horizon = 1.0;

  std::uint64_t hash = 0;
  json raw;
};

[[noreturn]] void fail(const std::string& field, const std::string& why) {
  throw std::runtime_error("config field '" + field + "': " + why);
}

Config parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("config is not valid JSON: ") + e.what());
  }

  Config c;
  c.raw = j;
  if (!j.contains("params")) fail("params", "missing");
  const auto& p = j["params"];
  for (const char* k : {"mu", "rho"})
    if (!p.contains(k) || !p[k].is_number()) fail(std::string("params.") + k, "missing number");
  c.params.mu = p["mu"];
  c.params.rho = p["rho"];
  c.params.lambda = p.value("lambda", 0.0);
  try {
    c.params.validate();
  } catch (const std::exception& e) {
    fail("params", e.what());
  }

  if (j.contains("initial")) {
    const auto& ini = j["initial"];
    c.initial_type = ini.value("type", "stationary");
    if (c.initial_type != "stationary" && c.initial_type != "product" &&
        c.initial_type != "delta")
      fail("initial.type", "must be stationary | product | delta");
    c.eta = ini.value("eta", c.params.mean_n());
    if (c.initial_type == "product" && !(c.eta > 0.0)) fail("initial.eta", "must be > 0");
    c.n0 = ini.value("N0", 0);
    if (c.n0 < 0) fail("initial.N0", "must be >= 0");
    if (ini.contains("g")) {
      c.g_type = ini["g"].value("type", "maxwellian");
      c.g_scale = ini["g"].value("variance_scale", 1.0);
      if (c.g_type != "maxwellian" && c.g_type != "scaled_maxwellian" && c.g_type != "bimodal")
        fail("initial.g.type", "must be maxwellian | scaled_maxwellian | bimodal");
      if (!(c.g_scale > 0.0)) fail("initial.g.variance_scale", "must be > 0");
    }
  }

  c.checkpoints = j.value("checkpoints", std::vector<double>{1.0});
  for (std::size_t i = 0; i < c.checkpoints.size(); ++i) {
    if (c.checkpoints[i] <= 0.0) fail("checkpoints", "must be positive");
    if (i > 0 && c.checkpoints[i] <= c.checkpoints[i - 1])
      fail("checkpoints", "must be strictly increasing");
  }
  c.replicas = j.value("replicas", 1000);
  if (c.replicas < 1) fail("replicas", "must be >= 1");
  if (j.contains("seed")) {
    c.seed = j["seed"].get<std::uint64_t>();
    c.seed_set = true;
  }

  if (j.contains("grid")) {
    c.v_max = j["grid"].value("v_max", 4.0);
    c.dv = j["grid"].value("dv", 0.02);
    c.n_theta = j["grid"].value("n_theta", 64);
    c.dt = j["grid"].value("dt", 1e-3);
    if (!(c.v_max > 0) || !(c.dv > 0)) fail("grid", "v_max and dv must be > 0");
    if (c.n_theta < 10) fail("grid.n_theta", "must be >= 10");
  }
  if (j.contains("partition")) {
    c.cells = j["partition"].value("cells", 8);
    if (c.cells < 1 || c.cells > 16) fail("partition.cells", "must be in 1..16");
  }
  if (j.contains("truncation")) {
    c.k_max = j["truncation"].value("k_max", 40);
    if (c.k_max < 7) fail("truncation.k_max", "must be >= 7");
  }
  if (j.contains("observables")) {
    c.observables = j["observables"].get<std::vector<int>>();
    for (int m : c.observables)
      if (m < 0) fail("observables", "Hermite modes must be >= 0");
  }
  if (j.contains("chaos")) {
    const auto& ch = j["chaos"];
    c.eta_scale = ch.value("eta_scale", 0.5);
    c.mu_list = ch.value("mu_list", c.mu_list);
    c.horizon = ch.value("t", 1.0);
    if (c.mu_list.empty()) fail("chaos.mu_list", "must be nonempty");
    if (!(c.eta_scale > 0.0)) fail("chaos.eta_scale", "must be > 0");
  }

  c.hash = fnv1a(j.dump());
  return c;
}

std::string stamp(const Config& c) {
  std::ostringstream os;
  os << "# config_hash=" << std::hex << c.hash << std::dec << " seed=" << c.seed << "\n";
  return os.str();
}

std::function<double(RngStream&)> velocity_sampler(const Config& c) {
  if (c.g_type == "maxwellian") return sample_maxwellian;
  if (c.g_type == "scaled_maxwellian") {
    const double s = std::sqrt(c.g_scale);
    return [s](RngStream& rng) { return s * sample_maxwellian(rng); };
  }
  return [](RngStream& rng) {
    const double center = rng.uniform() < 0.5 ? -0.8 : 0.8;
    return center + 0.3 * rng.normal();
  };
}

Eigen::VectorXd velocity_density(const Config& c, const VelocityGrid& grid) {
  Eigen::VectorXd g(grid.n);
  for (int i = 0; i < grid.n; ++i) {
    const double v = grid.v(i);
    if (c.g_type == "maxwellian") {
      g[i] = maxwellian_pdf(v);
    } else if (c.g_type == "scaled_maxwellian") {
      g[i] = maxwellian_pdf(v / std::sqrt(c.g_scale)) / std::sqrt(c.g_scale);
    } else {
      const double sd = 0.3;
      const double a = (v + 0.8) / sd, b = (v - 0.8) / sd;
      g[i] = 0.5 * (std::exp(-0.5 * a * a) + std::exp(-0.5 * b * b)) /
             (sd * std::sqrt(kTwoPi));
    }
  }
  return g;
}

InitialSampler initial_sampler(const Config& c) {
  if (c.initial_type == "stationary") return stationary_sampler(c.params);
  if (c.initial_type == "product") return product_sampler(c.eta, velocity_sampler(c));
  return fixed_n_sampler(c.n0, velocity_sampler(c));
}

std::string format_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

int cmd_simulate(const Config& c, const fs::path& out_dir, int threads) {
  SimulationOptions opts;
  opts.threads = threads;
  opts.hermite_modes = c.observables;
  const auto series =
      simulate_replicas(initial_sampler(c), c.params, c.checkpoints, c.replicas, c.seed, opts);

  std::ostringstream csv;
  csv << stamp(c) << "t,replica,N,sum_v2";
  for (int m : c.observables) csv << ",obs_h" << m;
  csv << "\n";
  for (std::size_t ck = 0; ck < series.times.size(); ++ck)
    for (int r = 0; r < series.replicas; ++r) {
      const auto& rec = series.records[ck][r];
      csv << format_double(series.times[ck]) << ',' << r << ',' << rec.n << ','
          << format_double(rec.sum_v2);
      for (double h : rec.hermite_sums) csv << ',' << format_double(h);
      csv << "\n";
    }
  write_file(out_dir / "trajectory.csv", csv.str());

  json summary;
  summary["seed"] = c.seed;
  summary["config_hash"] = c.hash;
  summary["replicas"] = c.replicas;
  summary["checkpoints"] = json::array();
  for (std::size_t ck = 0; ck < series.times.size(); ++ck) {
    std::vector<double> ns, es;
    for (const auto& rec : series.records[ck]) {
      ns.push_back(rec.n);
      es.push_back(rec.sum_v2);
    }
    const auto mn = mean_se(ns);
    const auto me = mean_se(es);
    json row{{"t", series.times[ck]},
             {"N_mean", mn.mean},
             {"N_se", mn.se},
             {"sum_v2_mean", me.mean},
             {"sum_v2_se", me.se}};
    for (std::size_t o = 0; o < c.observables.size(); ++o) {
      std::vector<double> hs;
      for (const auto& rec : series.records[ck]) hs.push_back(rec.hermite_sums[o]);
      const auto mh = mean_se(hs);
      const std::string key = "obs_h" + std::to_string(c.observables[o]);
      row[key + "_mean"] = mh.mean;
      row[key + "_se"] = mh.se;
    }
    summary["checkpoints"].push_back(row);
  }
  write_file(out_dir / "summary.json", summary.dump(2) + "\n");
  return 0;
}

int cmd_moments(const Config& c, const fs::path& out_dir) {
  const double e0 = c.initial_type == "product" ? c.eta * c.g_scale / kTwoPi
                                                : c.n0 * c.g_scale / kTwoPi;
  const double n0 = c.initial_type == "product" ? c.eta : c.n0;

  std::ostringstream csv;
  csv << stamp(c) << "t,N_mean,E_mean,e\n";
  for (double t : c.checkpoints) {
    const auto m = closed_form_moments(n0, e0, c.params, t);
    csv << format_double(t) << ',' << format_double(m.n) << ',' << format_double(m.energy)
        << ',' << format_double(m.energy_per_particle) << "\n";
  }
  write_file(out_dir / "moments.csv", csv.str());

  // Birth-death law advanced checkpoint to checkpoint.
  const int n_max = default_number_truncation(c.params);
  NumberDistribution dist = c.initial_type == "product"
                                ? NumberDistribution::delta(0, n_max)
                                : NumberDistribution::delta(std::min(c.n0, n_max), n_max);
  if (c.initial_type == "product") {
    for (int n = 0; n <= n_max; ++n)
      dist.p[n] = std::exp(n * std::log(c.eta) - c.eta - std::lgamma(n + 1.0));
  }
  double prev = 0.0;
  for (double t : c.checkpoints) {
    dist = evolve_number_dist(dist, c.params, t - prev);
    prev = t;
    std::ostringstream dcsv;
    dcsv << stamp(c) << "N,p_N\n";
    for (int n = 0; n <= n_max; ++n)
      dcsv << n << ',' << format_double(dist.p[n]) << "\n";
    std::ostringstream name;
    name << "number_law_t" << t << ".csv";
    write_file(out_dir / name.str(), dcsv.str());
  }
  return 0;
}

int cmd_spectrum(const Config& c, const fs::path& out_dir) {
  const auto gaps = spectral_gaps(c.params, c.k_max);
  json out;
  out["seed"] = c.seed;
  out["config_hash"] = c.hash;
  out["delta"] = gaps.delta;
  out["delta2"] = gaps.delta2;
  out["bounds"] = {{"lower", gaps.lower}, {"upper", gaps.upper}};
  out["condition_ok"] = gaps.condition_ok;
  json gersh = json::object();
  for (int m : {1, 3, 5, 6, 8, 10}) {
    const auto b = m % 2 == 1 ? gershgorin_lower_bounds(std::max(1, (m - 1) / 2), c.params).first
                              : gershgorin_lower_bounds(m / 2, c.params).second;
    gersh["delta_" + std::to_string(m)] = b;
  }
  out["gershgorin"] = gersh;
  out["truncation"] = {{"k_max", c.k_max}, {"drift", gaps.drift}};
  write_file(out_dir / "spectrum.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_entropy(const Config& c, const fs::path& out_dir, int threads) {
  const double eta = c.initial_type == "product" ? c.eta : c.params.mean_n();
  const auto rep = entropy_decay_experiment(eta, c.params, c.checkpoints, c.replicas, c.seed,
                                            c.cells, 200, threads);
  json out;
  out["seed"] = c.seed;
  out["config_hash"] = c.hash;
  out["S0"] = rep.s0;
  out["analytic_bound_holds"] = rep.analytic_bound_holds;
  out["mc_bound_holds"] = rep.mc_bound_holds;
  out["checkpoints"] = json::array();
  for (const auto& row : rep.checkpoints) {
    out["checkpoints"].push_back({{"t", row.t},
                                  {"S_analytic", row.s_analytic},
                                  {"S_estimate", row.s_estimate},
                                  {"S_se", row.s_se},
                                  {"bound", row.bound},
                                  {"psi", row.psi},
                                  {"lemma_ent_slack", row.lemma_ent_slack}});
  }
  write_file(out_dir / "entropy.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_bk_solve(const Config& c, const fs::path& out_dir, int threads) {
  const VelocityGrid grid(c.v_max, c.dv);
  DensityField f0{grid, velocity_density(c, grid)};
  if (c.initial_type == "product") f0.values *= c.eta * c.params.rho / c.params.mu;
  BkOptions opts;
  opts.n_theta = c.n_theta;
  opts.dt = c.dt;
  opts.threads = threads;
  const auto traj = bk_solve(f0, c.params, c.checkpoints, opts);
  std::ostringstream csv;
  csv << stamp(c) << "t,v,F\n";
  for (std::size_t ck = 0; ck < traj.times.size(); ++ck)
    for (int i = 0; i < grid.n; ++i)
      csv << format_double(traj.times[ck]) << ',' << format_double(grid.v(i)) << ','
          << format_double(traj.fields[ck].values[i]) << "\n";
  write_file(out_dir / "bk_solution.csv", csv.str());
  return 0;
}

int cmd_chaos(const Config& c, const fs::path& out_dir, int threads) {
  const VelocityGrid fine(c.v_max, c.dv);
  const VelocityGrid comparison(c.v_max, 5.0 * c.dv);
  const VelocityGrid pair(c.v_max, 0.2);
  BkOptions opts;
  opts.n_theta = c.n_theta;
  opts.dt = c.dt;
  opts.threads = threads;
  const auto report = chaos_experiment(velocity_sampler(c), velocity_density(c, fine),
                                       c.eta_scale, c.mu_list, c.replicas, c.params, c.horizon,
                                       c.seed, fine, comparison, pair, opts);
  json out;
  out["seed"] = c.seed;
  out["config_hash"] = c.hash;
  out["t"] = report.t;
  out["eta_scale"] = report.eta_scale;
  out["replicas"] = report.replicas;
  out["rows"] = json::array();
  for (const auto& row : report.rows) {
    out["rows"].push_back({{"mu", row.mu},
                           {"l1_pde", row.l1_pde},
                           {"l1_pde_se", row.l1_pde_se},
                           {"factor_defect", row.factor_defect},
                           {"factor_defect_se", row.factor_defect_se}});
  }
  write_file(out_dir / "chaos.json", out.dump(2) + "\n");
  std::cout << out.dump(2) << std::endl;
  return 0;
}

int cmd_verify(const fs::path& out_dir, int threads) {
  const auto results = kacgc::acceptance::run_all(threads, &std::cout);
  json out = json::array();
  bool all = true;
  for (const auto& r : results) {
    all = all && r.pass;
    out.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"details", r.details},
                   {"seconds", r.seconds}});
  }
  write_file(out_dir / "verify.json", out.dump(2) + "\n");
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grand-canonical Kac model: exact jump-process simulator and its "
               "analytic, spectral, entropy, and hydrodynamic companions"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int threads = 1;
  std::uint64_t seed_override = 0;
  bool seed_given = false;

  app.add_option("--config", config_path, "JSON experiment configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");

  const char* names[] = {"simulate", "moments", "spectrum", "entropy", "bk-solve", "chaos",
                         "verify"};
  for (const char* n : names) app.add_subcommand(n)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  seed_given = seed_opt->count() > 0;
  const std::string sub = app.get_subcommands().front()->get_name();

  try {
    fs::create_directories(out_dir);
    if (sub == "verify") return cmd_verify(out_dir, threads);

    if (config_path.empty()) throw std::runtime_error("--config is required");
    Config cfg = parse_config(config_path);
    if (seed_given) {
      cfg.seed = seed_override;
      cfg.seed_set = true;
    }
    if (!cfg.seed_set)
      throw std::runtime_error("seed must be given in the config or via --seed "
                               "(no wall-clock default)");

    if (sub == "simulate") return cmd_simulate(cfg, out_dir, threads);
    if (sub == "moments") return cmd_moments(cfg, out_dir);
    if (sub == "spectrum") return cmd_spectrum(cfg, out_dir);
    if (sub == "entropy") return cmd_entropy(cfg, out_dir, threads);
    if (sub == "bk-solve") return cmd_bk_solve(cfg, out_dir, threads);
    if (sub == "chaos") return cmd_chaos(cfg, out_dir, threads);
    throw std::runtime_error("unknown subcommand " + sub);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
}
