// ballop: command-line harness for the composition-operator experiments.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ballop/experiment.hpp"

namespace ex = ballop::experiment;

int main(int argc, char** argv) {
  CLI::App app{"Composition operators on weighted Hardy spaces of the ball: symmetry certificates and sweeps"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<unsigned> threads;

  const std::vector<std::pair<std::string, std::string>> commands{
      {"symcheck", "certify J_a-symmetry of Mobius composition operators"},
      {"normality", "classify normality of composition operators"},
      {"takagi", "run the Takagi / J_V pipeline on linear symbols"},
      {"convergence", "sweep truncation degree and record convergent residuals"},
      {"basis", "dump the graded-lex basis and monomial norms"},
      {"calibrate", "freeze convergent thresholds at the reference degree"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file")->required();
    sub->add_option("--seed", seed, "override the configuration seed");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "worker threads (fallback: BALLOP_THREADS, then 1)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : ex::kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    ex::ExperimentConfig cfg = ex::load_config(config_path);
    ex::RunOptions opts;
    opts.threads = ex::resolve_threads(threads);
    opts.seed = seed;
    if (seed) cfg.seed = *seed;

    ex::RunResult result;
    if (command == "symcheck") {
      result = ex::cmd_symcheck(cfg, opts);
    } else if (command == "normality") {
      result = ex::cmd_normality(cfg, opts);
    } else if (command == "takagi") {
      result = ex::cmd_takagi(cfg, opts);
    } else if (command == "convergence") {
      result = ex::cmd_convergence(cfg, opts);
    } else if (command == "basis") {
      result = ex::cmd_basis(cfg, opts);
    } else {
      result = ex::cmd_calibrate(cfg, opts);
    }

    const std::filesystem::path dir = out_dir ? std::filesystem::path(*out_dir) : cfg.output_dir;
    ex::write_outputs(result, command, dir);

    std::size_t pass = 0, fail = 0, error = 0;
    for (const auto& r : result.rows) {
      if (r.status == ex::Status::Pass) ++pass;
      else if (r.status == ex::Status::Fail) ++fail;
      else ++error;
      if (r.status != ex::Status::Pass) {
        std::cerr << ex::to_string(r.status) << (r.exploratory ? " (exploratory)" : "") << ": " << r.space << ' '
                  << r.symbol << " D=" << r.degree << ' ' << r.residual << ' ' << r.message << '\n';
      }
    }
    std::cout << command << ": " << pass << " pass, " << fail << " fail, " << error << " error -> "
              << (dir / "report.csv").string() << '\n';
    return result.exit_code;
  } catch (const ex::ConfigError& e) {
    std::cerr << "ballop: config error: " << e.what() << '\n';
    return ex::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "ballop: " << e.what() << '\n';
    return ex::kNumericalError;
  }
}
