// spinbath: drive the exact and master-equation engines for the laser-driven
// three-qubit + spin-bath decoherence model, dump memory-kernel data, and
// compare runs.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spinbath/compare.hpp"
#include "spinbath/csv_io.hpp"
#include "spinbath/master_solver.hpp"
#include "spinbath/memory_kernel.hpp"
#include "spinbath/rng.hpp"
#include "spinbath/run_config.hpp"

namespace fs = std::filesystem;
using namespace spinbath;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<int> threads;
  std::optional<int> probes;
  bool allow_large = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "config file (key = value lines)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--seed", args.seed, "override rng seed");
  cmd->add_option("--grid-n", args.grid_n, "u-grid size for the master engine");
  cmd->add_option("--dt", args.dt, "integrator time step (hbar/eV)");
  cmd->add_option("--t-end", args.t_end, "propagation time (hbar/eV)");
  cmd->add_option("--threads", args.threads, "worker threads (0 = hardware)");
  cmd->add_option("--probes", args.probes, "stochastic moment probes");
  cmd->add_flag("--allow-large", args.allow_large, "lift the n_s/step-budget guard");
}

RunConfig load_config(const CommonArgs& args) {
  RunConfig cfg = args.config_path.empty() ? RunConfig{} : parse_config_file(args.config_path);
  if (args.seed) cfg.model.seed = *args.seed;
  if (args.grid_n) cfg.grid_n = *args.grid_n;
  if (args.dt) cfg.model.dt = *args.dt;
  if (args.t_end) cfg.model.t_end = *args.t_end;
  if (args.threads) cfg.threads = *args.threads;
  if (args.probes) cfg.moment_probes = *args.probes;
  cfg.allow_large = args.allow_large;
  cfg.model.validate();
  return cfg;
}

std::string out_path(const CommonArgs& args, const std::string& name) {
  fs::create_directories(args.out_dir);
  return (fs::path(args.out_dir) / name).string();
}

void report_series(const MarginalSeries& ms, const std::string& path) {
  double min_eig = 0.0, worst_trace = 0.0;
  for (const auto& row : ms.rows) {
    min_eig = std::min(min_eig, row[12]);
    worst_trace = std::max(worst_trace, std::abs(row[13] - 1.0));
  }
  std::printf("wrote %s (%zu samples, min eig %.3e, worst |Tr-1| %.3e)\n",
              path.c_str(), ms.rows.size(), min_eig, worst_trace);
}

int cmd_exact(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  TimeSeries series = run_exact(cfg.model, cfg.run_options());
  const MarginalSeries ms = to_marginal_series(series);
  const std::string path = out_path(args, "exact.csv");
  write_series_csv(path, ms, manifest_entries(cfg, "exact"), series.notes);
  for (const std::string& n : series.notes) std::fprintf(stderr, "note: %s\n", n.c_str());
  report_series(ms, path);
  return 0;
}

int cmd_master(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  std::vector<std::string> notes;
  const MasterConfig mc =
      assemble_master_config(cfg.model, cfg.moment_options(), cfg.c_convention, &notes);
  TimeSeries series = run_master(mc, cfg.run_options());
  for (std::string& n : series.notes) notes.push_back(std::move(n));
  const MarginalSeries ms = to_marginal_series(series);
  const std::string path = out_path(args, "master.csv");
  write_series_csv(path, ms, manifest_entries(cfg, "master"), notes);
  for (const std::string& n : notes) std::fprintf(stderr, "note: %s\n", n.c_str());
  report_series(ms, path);
  return 0;
}

int cmd_kernel(const CommonArgs& args) {
  RunConfig cfg = load_config(args);
  const ModelConfig& m = cfg.model;
  const BathSpec bath = bath_spec_from(m);
  const int n_eig = static_cast<int>(
      std::min<std::size_t>(m.n_eig, std::size_t{1} << m.n_s));
  LanczosOptions lopt;
  lopt.seed = mix_seed(m.seed, 0xba7);
  const BathEnsemble ensemble = thermal_bath_ensemble(bath, n_eig, m.kT, lopt);
  const BathStatistics stats = bath_statistics(ensemble, bath, cfg.c_convention);
  const MomentEstimate moments =
      kernel_moments(build_total_hamiltonian(m, bath), 3, ensemble, cfg.moment_options());
  const KernelParams kp = kernel_params(moments.aa_dag, moments.aa);
  const double tau = kernel_time_constant(kp);

  std::printf("W(0) = %.17g\n", evaluate_W(kp, 0.0));
  std::printf("p = %.12g eV\nq = %.12g eV\ntau = %.12g hbar/eV\n", kp.p, kp.q, tau);
  std::printf("sigma_x_mean = %.12g\nC = %.12g eV^2\n", stats.sigma_x_mean, stats.C);
  std::printf("<AA+> = %.12g +- %.3g eV^2\n<AA>  = %.12g +- %.3g eV^2\n",
              moments.aa_dag, moments.aa_dag_stderr, moments.aa, moments.aa_stderr);
  std::printf("truncation ratio p_last/p_first = %.3e\n", ensemble.truncation_ratio());

  // W on a grid out to where it has fully decayed
  const std::string path = out_path(args, "kernel.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& [k, v] : manifest_entries(cfg, "kernel")) out << "# " << k << " = " << v << "\n";
  out << "t,W\n";
  const double t_max = 20.0 / kp.q;
  char buf[96];
  for (double t = 0.0; t <= t_max + 1e-12; t += m.dt) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", t, evaluate_W(kp, t));
    out << buf;
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int cmd_compare(const CommonArgs& args, const std::string& csv_a, const std::string& csv_b) {
  const MarginalSeries a = read_series_csv(csv_a);
  const MarginalSeries b = read_series_csv(csv_b);
  const DeviationReport rep = compare_series(a, b);
  for (int m = 0; m < 3; ++m)
    std::printf("marginal %d: max dev %.6e, time-avg dev %.6e\n", m, rep.max_dev[m],
                rep.avg_dev[m]);
  std::printf("overall: max dev %.6e, time-avg dev %.6e\n", rep.max_overall, rep.avg_overall);
  (void)args;
  return 0;
}

int cmd_converge(const CommonArgs& args, const std::vector<int>& ns_list) {
  RunConfig base = load_config(args);
  struct Row {
    int n_s;
    DeviationReport rep;
  };
  std::vector<Row> table;
  for (int ns : ns_list) {
    RunConfig cfg = base;
    cfg.model.n_s = ns;
    std::fprintf(stderr, "converge: n_s = %d exact run...\n", ns);
    const MarginalSeries exact = to_marginal_series(run_exact(cfg.model, cfg.run_options()));
    write_series_csv(out_path(args, "exact_ns" + std::to_string(ns) + ".csv"), exact,
                     manifest_entries(cfg, "exact"));
    std::fprintf(stderr, "converge: n_s = %d master run...\n", ns);
    std::vector<std::string> notes;
    const MasterConfig mc =
        assemble_master_config(cfg.model, cfg.moment_options(), cfg.c_convention, &notes);
    const MarginalSeries master = to_marginal_series(run_master(mc, cfg.run_options()));
    write_series_csv(out_path(args, "master_ns" + std::to_string(ns) + ".csv"), master,
                     manifest_entries(cfg, "master"), notes);
    table.push_back({ns, compare_series(exact, master)});
  }

  const std::string path = out_path(args, "converge.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  for (const auto& [k, v] : manifest_entries(base, "converge"))
    out << "# " << k << " = " << v << "\n";
  out << "n_s,max_dev,avg_dev\n";
  std::printf("n_s   max_dev        avg_dev\n");
  for (const Row& row : table) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", row.n_s, row.rep.max_overall,
                  row.rep.avg_overall);
    out << buf;
    std::printf("%-5d %.6e   %.6e\n", row.n_s, row.rep.max_overall, row.rep.avg_overall);
  }
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"driven three-qubit decoherence in a self-interacting spin bath"};
  app.require_subcommand(1);

  CommonArgs exact_args, master_args, kernel_args, compare_args, converge_args;
  std::string csv_a, csv_b;
  std::vector<int> ns_list = {4, 6, 8};

  add_common(app.add_subcommand("exact", "full-Hilbert-space benchmark engine"), exact_args);
  add_common(app.add_subcommand("master", "mean-field master-equation engine"), master_args);
  add_common(app.add_subcommand("kernel", "dump W(t), p, q, tau and bath statistics"),
             kernel_args);

  CLI::App* cmp = app.add_subcommand("compare", "diff two run CSVs");
  add_common(cmp, compare_args);
  cmp->add_option("csv_a", csv_a, "first run")->required()->check(CLI::ExistingFile);
  cmp->add_option("csv_b", csv_b, "second run")->required()->check(CLI::ExistingFile);

  CLI::App* conv = app.add_subcommand("converge", "sweep n_s and tabulate exact-vs-master deviation");
  add_common(conv, converge_args);
  conv->add_option("--ns", ns_list, "bath sizes to sweep")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("exact")) return cmd_exact(exact_args);
    if (app.got_subcommand("master")) return cmd_master(master_args);
    if (app.got_subcommand("kernel")) return cmd_kernel(kernel_args);
    if (app.got_subcommand("compare")) return cmd_compare(compare_args, csv_a, csv_b);
    if (app.got_subcommand("converge")) return cmd_converge(converge_args, ns_list);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
