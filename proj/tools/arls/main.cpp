#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

/// Maps command failures onto the documented exit codes: 0 success,
/// 1 I/O or configuration, 2 verification, 3 solver.
template <typename Command, typename Args>
int run(Command command, const Args& args) {
  try {
    return command(args);
  } catch (const arls::cli::VerificationFailure& e) {
    std::cerr << "arls: " << e.what() << "\n";
    return 2;
  } catch (const arls::cli::SolverFailure& e) {
    std::cerr << "arls: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "arls: " << e.what() << "\n";
    return 1;
  }
}

void add_run_flags(CLI::App* command, arls::cli::RunArgs& args) {
  command->add_option("--config", args.config, "Configuration file (docs/example.cfg)");
  command->add_option("--output-dir", args.output_dir,
                      "Output directory (overrides ARLS_OUTPUT_DIR and the config)");
  command->add_option("--seed", args.seed, "Master seed (overrides the config)");
  command->add_option("--threads", args.threads,
                      "Worker threads, 0 = all cores (overrides ARLS_THREADS and the config)");
  command->add_option("--policy", args.policy,
                      "Kernel policy: adaptive, squared, fixed:<alpha>, or a named kernel");
  command->add_option("--compare", args.compare,
                      "Comma-separated policies to run side by side on identical data");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive robust least-squares toolkit"};
  app.require_subcommand(1);
  int exit_code = 0;

  arls::cli::PartitionTableArgs partition_args;
  CLI::App* partition =
      app.add_subcommand("partition-table", "Build or verify a partition-function table");
  partition->add_option("--out", partition_args.out, "Build a table and write it here");
  partition->add_option("--verify", partition_args.verify,
                        "Check an existing table against a halved quadrature step");
  partition->add_option("--alpha-min", partition_args.alpha_min, "Grid lower bound")
      ->capture_default_str();
  partition->add_option("--alpha-max", partition_args.alpha_max, "Grid upper bound")
      ->capture_default_str();
  partition->add_option("--resolution", partition_args.resolution, "Grid spacing")
      ->capture_default_str();
  partition->add_option("--tau", partition_args.tau, "Truncation limit (residual units of c)")
      ->capture_default_str();
  partition->add_option("--tolerance", partition_args.tolerance,
                        "Allowed deviation when verifying")
      ->capture_default_str();
  partition->callback(
      [&] { exit_code = run(arls::cli::cmd_partition_table, partition_args); });

  arls::cli::EstimateAlphaArgs estimate_args;
  CLI::App* estimate = app.add_subcommand(
      "estimate-alpha", "Estimate the kernel shape that best explains a residual file");
  estimate->add_option("--residuals", estimate_args.residuals,
                       "Residual file (whitespace-separated values, '#' comments)")
      ->required();
  estimate->add_option("--c", estimate_args.c, "Kernel scale")->capture_default_str();
  estimate->add_option("--table", estimate_args.table,
                       "Prebuilt partition table (default: build in process)");
  estimate->add_option("--out", estimate_args.out, "JSON destination (default: stdout)");
  estimate->add_option("--alpha-min", estimate_args.alpha_min, "Grid lower bound")
      ->capture_default_str();
  estimate->add_option("--alpha-max", estimate_args.alpha_max, "Grid upper bound")
      ->capture_default_str();
  estimate->add_option("--resolution", estimate_args.resolution, "Grid spacing")
      ->capture_default_str();
  estimate->add_option("--tau", estimate_args.tau, "Truncation limit (residual units of c)")
      ->capture_default_str();
  estimate->add_option("--seed", estimate_args.seed,
                       "Subsample seed used above the residual-count cap");
  estimate->callback([&] { exit_code = run(arls::cli::cmd_estimate_alpha, estimate_args); });

  arls::cli::RunArgs fit_args;
  CLI::App* fit = app.add_subcommand("fit", "Robust line fit on a data file or synthetic data");
  add_run_flags(fit, fit_args);
  fit->add_option("--data", fit_args.data, "x/y data file (default: synthetic from config)");
  fit->callback([&] { exit_code = run(arls::cli::cmd_fit, fit_args); });

  arls::cli::RunArgs icp_args;
  CLI::App* icp =
      app.add_subcommand("icp", "Point-set registration on cloud files or synthetic data");
  add_run_flags(icp, icp_args);
  icp->add_option("--source", icp_args.source, "Source cloud (x y z per line)");
  icp->add_option("--target", icp_args.target, "Target cloud (x y z [nx ny nz] per line)");
  icp->callback([&] { exit_code = run(arls::cli::cmd_icp, icp_args); });

  arls::cli::RunArgs ba_args;
  CLI::App* ba =
      app.add_subcommand("ba", "Bundle adjustment on a scene file or synthetic data");
  add_run_flags(ba, ba_args);
  ba->add_option("--scene", ba_args.scene, "Scene file (default: synthetic from config)");
  ba->callback([&] { exit_code = run(arls::cli::cmd_ba, ba_args); });

  arls::cli::RunArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "basin-sweep", "Convergence-basin experiment over noise levels and kernel policies");
  add_run_flags(sweep, sweep_args);
  sweep->add_option("--scene", sweep_args.scene, "Scene file (default: synthetic from config)");
  sweep->callback([&] { exit_code = run(arls::cli::cmd_basin_sweep, sweep_args); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int parse_code = app.exit(e);
    return parse_code == 0 ? 0 : 1;
  }
  return exit_code;
}
