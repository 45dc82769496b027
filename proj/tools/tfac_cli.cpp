#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tfac/config.hpp"
#include "tfac/harness.hpp"
#include "tfac/io.hpp"
#include "tfac/simulation.hpp"

using nlohmann::json;
using namespace tfac;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  int threads = 0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void emit(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) return;
  write_text((std::filesystem::path(g.out) / name).string(), text);
}

void emit_summary(const Globals& g, json summary) {
  const std::string text = summary.dump(2) + "\n";
  std::cout << text;
  emit(g, "summary.json", text);
}

SchemeType scheme_of(const std::string& s) {
  if (s == "pc") return SchemeType::pc;
  if (s == "sfl1") return SchemeType::sfl1;
  throw std::invalid_argument("scheme must be pc or sfl1");
}

SchemeMode mode_of(const std::string& s) {
  if (s == "direct") return SchemeMode::direct;
  if (s == "fast") return SchemeMode::fast;
  throw std::invalid_argument("mode must be direct or fast");
}

struct ConvergenceArgs {
  double alpha = 0.3;
  double mu = 0.5;
  std::string gamma = "1";
  std::string scheme = "pc";
  std::string mode = "fast";
  std::vector<std::size_t> ladder = {100, 200, 400, 800, 1600, 3200};
  std::size_t M = 64;
  int dim = 2;
  double eps2 = 1e-4;
  double kappa = 2.0;
  double T = 1.0;
  double soe_tol = 1e-9;
  bool spatial_check = false;
};

// "optimal" is min(1+a, 2-a)/mu, "inverse-mu" is 1/mu.
double gamma_of(const std::string& g, double alpha, double mu) {
  if (g == "optimal") return std::min(1.0 + alpha, 2.0 - alpha) / mu;
  if (g == "inverse-mu") return 1.0 / mu;
  return std::stod(g);
}

void apply_convergence_config(const std::string& path, ConvergenceArgs& a) {
  const json j = json::parse(read_file(path));
  for (const auto& [key, v] : j.items()) {
    if (key == "alpha") a.alpha = v.get<double>();
    else if (key == "mu") a.mu = v.get<double>();
    else if (key == "gamma") a.gamma = v.is_string() ? v.get<std::string>() : format_double(v.get<double>());
    else if (key == "scheme") a.scheme = v.get<std::string>();
    else if (key == "mode") a.mode = v.get<std::string>();
    else if (key == "ladder") a.ladder = v.get<std::vector<std::size_t>>();
    else if (key == "M") a.M = v.get<std::size_t>();
    else if (key == "dim") a.dim = v.get<int>();
    else if (key == "eps2") a.eps2 = v.get<double>();
    else if (key == "kappa") a.kappa = v.get<double>();
    else if (key == "T") a.T = v.get<double>();
    else if (key == "soe_tol") a.soe_tol = v.get<double>();
    else throw std::invalid_argument("convergence config: unknown key '" + key + "'");
  }
}

int run_convergence_cmd(const Globals& g, ConvergenceArgs a) {
  ConvergenceSetup s;
  s.alpha = a.alpha;
  s.mu = a.mu;
  s.gamma = gamma_of(a.gamma, a.alpha, a.mu);
  s.scheme = scheme_of(a.scheme);
  s.mode = mode_of(a.mode);
  s.ladder = a.ladder;
  s.M = a.M;
  s.dim = a.dim;
  s.eps2 = a.eps2;
  s.kappa = a.kappa;
  s.T = a.T;
  s.soe_tol = a.soe_tol;

  const auto rep = run_convergence(s);
  std::string csv = "N,tau_max,error,wall_time\n";
  double wall = 0.0;
  std::size_t mbp = 0, energy = 0;
  for (const auto& e : rep.entries) {
    csv += std::to_string(e.N) + "," + format_double(e.tau_max) + "," + format_double(e.error) + "," +
           format_double(e.wall_time) + "\n";
    wall += e.wall_time;
    mbp += e.mbp_violations;
    energy += e.energy_violations;
  }
  std::cerr << csv;
  emit(g, "convergence.csv", csv);

  const json params = {{"alpha", s.alpha}, {"mu", s.mu},   {"gamma", s.gamma}, {"scheme", a.scheme},
                       {"mode", a.mode},   {"ladder", s.ladder}, {"M", s.M}, {"dim", s.dim},
                       {"eps2", s.eps2},   {"kappa", s.kappa}, {"T", s.T}, {"soe_tol", s.soe_tol}};
  json summary = {{"config_hash", fnv1a_hex(params.dump())},
                  {"slopes", {rep.slope}},
                  {"monotone", rep.monotone},
                  {"mbp_violations", mbp},
                  {"energy_violations", energy},
                  {"wall_time", wall}};
  if (a.spatial_check) {
    const auto sc = spatial_refinement_check(s, s.ladder.back());
    summary["spatial_check"] = {{"N", sc.N}, {"error_M", sc.error_coarse}, {"error_2M", sc.error_fine}};
  }
  emit_summary(g, summary);
  return 0;
}

struct CoarsenArgs {
  double alpha = 0.4;
  double tau = 0.01;
  std::string mode = "fast";
  std::size_t M = 64;
  int dim = 2;
  double T = 50.0;
  bool adaptive = false;
  std::string snapshot_format = "vtk";
  std::vector<double> snapshot_times;
};

int run_coarsen_cmd(const Globals& g, const CoarsenArgs& a, bool seed_given) {
  RunConfig c;
  if (!g.config.empty()) {
    c = load_run_config(g.config);
    if (seed_given) c.init.seed = g.seed;
  } else {
    c = coarsening_config(a.alpha, a.tau, mode_of(a.mode), a.M, a.T, a.dim, g.seed);
    if (a.adaptive) c.mesh.type = "adaptive";
    c.output.snapshot_format = a.snapshot_format;
    if (!a.snapshot_times.empty()) c.output.snapshot_times = a.snapshot_times;
  }
  if (!g.out.empty()) c.output.dir = g.out;
  const auto rep = run_coarsening(c);
  for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
  emit(g, "config.json", json::parse(to_json(c)).dump(2) + "\n");
  std::cout << summary_json(rep);
  return rep.mbp_violations == 0 && rep.energy_violations == 0 ? 0 : 3;
}

int run_soe_check_cmd(const Globals& g, const std::vector<double>& alphas, const std::vector<double>& tols, double delta,
                      double T, std::size_t meshes) {
  const auto rep = run_soe_check(g.seed, alphas, tols, delta, T, meshes);
  std::string csv = "alpha,tol,nodes,scan_error\n";
  std::size_t failures = 0;
  for (const auto& e : rep.entries) {
    csv += format_double(e.alpha) + "," + format_double(e.tol) + "," + std::to_string(e.nodes) + "," +
           format_double(e.scan_error) + "\n";
    if (e.scan_error > e.tol) ++failures;
  }
  std::cerr << csv;
  emit(g, "soe_check.csv", csv);
  const json params = {{"alphas", alphas}, {"tols", tols}, {"delta", delta}, {"T", T}, {"meshes", meshes}, {"seed", g.seed}};
  emit_summary(g, {{"config_hash", fnv1a_hex(params.dump())},
                   {"scan_failures", failures},
                   {"audit_meshes", rep.audit_meshes},
                   {"leading_exact", rep.leading_exact},
                   {"rows_decreasing", rep.rows_decreasing},
                   {"min_ratio", rep.min_ratio},
                   {"max_weight_error_over_tol", rep.max_weight_error},
                   {"mbp_violations", 0},
                   {"energy_violations", 0},
                   {"wall_time", rep.wall_time}});
  const bool ok = failures == 0 && rep.leading_exact && rep.rows_decreasing && rep.min_ratio >= 2.0 / 3.0;
  return ok ? 0 : 3;
}

int run_kernel_check_cmd(const Globals& g, std::size_t meshes, std::size_t max_count, std::size_t sequences) {
  const auto rep = run_kernel_check(g.seed, meshes, max_count, sequences);
  const json params = {{"meshes", meshes}, {"max_count", max_count}, {"sequences", sequences}, {"seed", g.seed}};
  emit_summary(g, {{"config_hash", fnv1a_hex(params.dump())},
                   {"rows", rep.rows},
                   {"max_delta_residual", rep.max_delta_residual},
                   {"max_partition_residual", rep.max_partition_residual},
                   {"min_dcc", rep.min_dcc},
                   {"min_quadratic_slack", rep.min_quadratic_slack},
                   {"mbp_violations", 0},
                   {"energy_violations", 0},
                   {"wall_time", rep.wall_time}});
  const bool ok = rep.max_delta_residual <= 1e-12 && rep.max_partition_residual <= 1e-12 && rep.min_dcc >= -1e-14 &&
                  rep.min_quadratic_slack >= -1e-10;
  return ok ? 0 : 3;
}

int run_perf_cmd(const Globals& g, PerfSetup s, std::size_t profile_steps, std::size_t repeats) {
  s.seed = g.seed;
  const auto rows = run_perf_compare(s);
  std::string csv = "N,direct_time,fast_time,divergence\n";
  double wall = 0.0;
  for (const auto& r : rows) {
    csv += std::to_string(r.N) + "," + format_double(r.direct_time) + "," + format_double(r.fast_time) + "," +
           format_double(r.divergence) + "\n";
    wall += r.direct_time + r.fast_time;
  }
  std::cerr << csv;
  emit(g, "perf.csv", csv);
  json summary = {{"mbp_violations", 0}, {"energy_violations", 0}};
  if (profile_steps > 0) {
    const auto prof = run_step_profile(s, profile_steps, repeats);
    std::string steps = "step,direct_time,fast_time\n";
    for (std::size_t n = 0; n < profile_steps; ++n) {
      steps += std::to_string(n + 1) + "," + format_double(prof.direct_step_time[n]) + "," +
               format_double(prof.fast_step_time[n]) + "\n";
      wall += prof.direct_step_time[n] + prof.fast_step_time[n];
    }
    emit(g, "perf_steps.csv", steps);
    summary["profile_divergence"] = prof.divergence;
    summary["soe_nodes"] = prof.soe_nodes;
  }
  const json params = {{"ladder", s.ladder}, {"dim", s.dim},         {"M", s.M},         {"L", s.L},
                       {"alpha", s.alpha},   {"eps2", s.eps2},       {"tau", s.tau},     {"soe_tol", s.soe_tol},
                       {"amplitude", s.amplitude}, {"seed", s.seed}, {"profile_steps", profile_steps}};
  summary["config_hash"] = fnv1a_hex(params.dump());
  summary["wall_time"] = wall;
  emit_summary(g, summary);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional Allen-Cahn solver"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "Output directory");
  auto* seed_opt = app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--threads", g.threads, "Worker threads (0 keeps the default)")->check(CLI::NonNegativeNumber);

  ConvergenceArgs conv;
  auto* cmd_conv = app.add_subcommand("convergence", "Manufactured-solution convergence ladder");
  cmd_conv->add_option("--alpha", conv.alpha);
  cmd_conv->add_option("--mu", conv.mu);
  cmd_conv->add_option("--gamma", conv.gamma, "Grading exponent, 'optimal' or 'inverse-mu'");
  cmd_conv->add_option("--scheme", conv.scheme)->check(CLI::IsMember({"pc", "sfl1"}));
  cmd_conv->add_option("--mode", conv.mode)->check(CLI::IsMember({"direct", "fast"}));
  cmd_conv->add_option("--ladder", conv.ladder)->delimiter(',');
  cmd_conv->add_option("--M", conv.M);
  cmd_conv->add_option("--dim", conv.dim)->check(CLI::Range(1, 3));
  cmd_conv->add_option("--soe-tol", conv.soe_tol);
  cmd_conv->add_flag("--spatial-check", conv.spatial_check, "Also rerun the finest entry on a 2M grid");

  CoarsenArgs coarsen;
  auto* cmd_coarsen = app.add_subcommand("coarsen", "Coarsening run from random data");
  cmd_coarsen->add_option("--alpha", coarsen.alpha, "Fractional order in (0, 1)");
  cmd_coarsen->add_option("--tau", coarsen.tau, "Step size after the graded head");
  cmd_coarsen->add_option("--mode", coarsen.mode, "History evaluation")->check(CLI::IsMember({"direct", "fast"}));
  cmd_coarsen->add_option("--M", coarsen.M, "Grid points per direction");
  cmd_coarsen->add_option("--dim", coarsen.dim, "Spatial dimension")->check(CLI::Range(1, 3));
  cmd_coarsen->add_option("--T", coarsen.T, "Final time");
  cmd_coarsen->add_flag("--adaptive", coarsen.adaptive, "Adaptive steps after the graded head");
  cmd_coarsen->add_option("--snapshots", coarsen.snapshot_format, "Snapshot format")
      ->check(CLI::IsMember({"vtk", "raw", "both", "none"}));
  cmd_coarsen->add_option("--snapshot-times", coarsen.snapshot_times, "Snapshot times, comma separated")->delimiter(',');

  std::vector<double> alphas = {0.1, 0.3, 0.5, 0.7, 0.9}, tols = {1e-6, 1e-8, 1e-10};
  double delta = 1e-6, horizon = 1.0;
  std::size_t soe_meshes = 50;
  auto* cmd_soe = app.add_subcommand("soe-check", "SOE certification and fast-weight audits");
  cmd_soe->add_option("--alphas", alphas)->delimiter(',');
  cmd_soe->add_option("--tols", tols)->delimiter(',');
  cmd_soe->add_option("--delta", delta);
  cmd_soe->add_option("--T", horizon);
  cmd_soe->add_option("--meshes", soe_meshes);

  std::size_t k_meshes = 200, k_max = 50, k_sequences = 1000;
  auto* cmd_kernel = app.add_subcommand("kernel-check", "Kernel identities on random meshes");
  cmd_kernel->add_option("--meshes", k_meshes);
  cmd_kernel->add_option("--max-count", k_max)->check(CLI::PositiveNumber);
  cmd_kernel->add_option("--sequences", k_sequences);

  PerfSetup perf;
  std::size_t profile_steps = 1000, repeats = 3;
  auto* cmd_perf = app.add_subcommand("perf", "Direct versus fast mode timings");
  cmd_perf->add_option("--ladder", perf.ladder)->delimiter(',');
  cmd_perf->add_option("--M", perf.M);
  cmd_perf->add_option("--alpha", perf.alpha);
  cmd_perf->add_option("--soe-tol", perf.soe_tol);
  cmd_perf->add_option("--profile-steps", profile_steps, "Steps of the per-step profile (0 skips it)");
  cmd_perf->add_option("--repeats", repeats)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (g.threads > 0) omp_set_num_threads(g.threads);
#endif

  try {
    if (*cmd_conv) {
      if (!g.config.empty()) {
        ConvergenceArgs from_file;
        apply_convergence_config(g.config, from_file);
        // Flags given on the command line win over the file.
        for (auto* opt : cmd_conv->get_options()) {
          if (opt->count() == 0) continue;
          const auto name = opt->get_name();
          if (name == "--alpha") from_file.alpha = conv.alpha;
          else if (name == "--mu") from_file.mu = conv.mu;
          else if (name == "--gamma") from_file.gamma = conv.gamma;
          else if (name == "--scheme") from_file.scheme = conv.scheme;
          else if (name == "--mode") from_file.mode = conv.mode;
          else if (name == "--ladder") from_file.ladder = conv.ladder;
          else if (name == "--M") from_file.M = conv.M;
          else if (name == "--dim") from_file.dim = conv.dim;
          else if (name == "--soe-tol") from_file.soe_tol = conv.soe_tol;
          else if (name == "--spatial-check") from_file.spatial_check = conv.spatial_check;
        }
        conv = from_file;
      }
      return run_convergence_cmd(g, conv);
    }
    if (*cmd_coarsen) return run_coarsen_cmd(g, coarsen, seed_opt->count() > 0);
    if (*cmd_soe) return run_soe_check_cmd(g, alphas, tols, delta, horizon, soe_meshes);
    if (*cmd_kernel) return run_kernel_check_cmd(g, k_meshes, k_max, k_sequences);
    if (*cmd_perf) return run_perf_cmd(g, perf, profile_steps, repeats);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
