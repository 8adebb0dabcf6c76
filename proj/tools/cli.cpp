#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <cctype>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "tcs/balance.hpp"
#include "tcs/config.hpp"
#include "tcs/datasets.hpp"
#include "tcs/report.hpp"
#include "tcs/sim_engine.hpp"

namespace tcs::cli {
namespace {

namespace fs = std::filesystem;

// Writes to `path`, or to `out` when the path is empty or "-".
template <class Fn>
void emit(const std::string& path, std::ostream& out, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("", "cannot write '" + path + "'");
  fn(file);
}

std::string slug(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tweedie common shock models: balance checks, moments and simulation", "tcs"};
  app.require_subcommand(1);

  std::string config_path;
  double tol = kDefaultBalanceTolerance;
  std::string json_path;
  auto* validate = app.add_subcommand("validate", "check the auto-balance conditions");
  validate->add_option("config", config_path, "model document")->required();
  validate->add_option("--tol", tol, "relative tolerance")->check(CLI::PositiveNumber);
  validate->add_option("--json", json_path, "also write the report as JSON ('-' for stdout)");

  std::size_t array_number = 1;
  std::string output;
  auto* moments = app.add_subcommand("moments", "per-cell mean, variance and squared CoV");
  moments->add_option("config", config_path, "model document")->required();
  moments->add_option("--array", array_number, "array number (1-based)")->required()->check(CLI::PositiveNumber);
  moments->add_option("-o,--output", output, "CSV destination (default stdout)");

  auto* contributions = app.add_subcommand("contributions", "expected shock proportions");
  contributions->add_option("config", config_path, "model document")->required();
  contributions->add_option("-o,--output", output, "destination (default stdout)");

  std::uint64_t seed = 0;
  std::uint64_t reps = 1000;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  bool retain = false;
  std::string out_dir;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo realizations of a model");
  simulate->add_option("config", config_path, "model document")->required();
  simulate->add_option("--seed", seed, "master seed")->required();
  simulate->add_option("--reps", reps, "number of replications")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  simulate->add_flag("--retain", retain, "write per-replication contribution CSVs");
  simulate->add_option("--out-dir", out_dir, "directory for per-replication CSVs")->needs(
      simulate->get_option("--retain"));
  simulate->add_option("-o,--output", output, "summary CSV destination (default stdout)");

  int which = 1;
  auto* gen = app.add_subcommand("gen-dataset", "write a synthetic data set configuration");
  gen->add_option("which", which, "data set number")->required()->check(CLI::Range(1, 3));
  gen->add_option("-o,--output", output, "destination (default stdout)");

  auto* classes = app.add_subcommand("classes", "equivalence classes of each array");
  classes->add_option("config", config_path, "model document")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kInvalidInput;
  }

  try {
    if (*gen) {
      emit(output, out, [&](std::ostream& os) { os << config::dump(datasets::generate(which)); });
      return kOk;
    }

    const ShockModel model = config::load_model(config_path);

    if (*validate) {
      const BalanceReport report = check_auto_balance(model, tol);
      if (json_path != "-") out << report::balance_text(report, model);
      if (!json_path.empty())
        emit(json_path, out, [&](std::ostream& os) {
          os << config::dump(report::balance_json(report, model));
        });
      return report.balanced ? kOk : kUnbalanced;
    }
    if (*moments) {
      if (array_number > model.array_count())
        throw ConfigError("", "--array " + std::to_string(array_number) + " exceeds the " +
                                  std::to_string(model.array_count()) + " arrays of the model");
      emit(output, out,
           [&](std::ostream& os) { report::write_moments_csv(os, model, array_number - 1); });
      return kOk;
    }
    if (*contributions) {
      emit(output, out, [&](std::ostream& os) { os << report::contributions_text(model); });
      return kOk;
    }
    if (*classes) {
      out << report::classes_text(model);
      return kOk;
    }
    if (*simulate) {
      if (retain && out_dir.empty())
        throw ConfigError("", "--retain needs --out-dir for the per-replication CSVs");
      SimulationOptions opts{seed, reps, workers, retain};
      const SimulationResult result = tcs::simulate(model, opts);
      if (reps >= 2)
        emit(output, out, [&](std::ostream& os) { report::write_summary_csv(os, result, model); });
      else
        err << "summary needs at least two replications; none written\n";
      if (retain) {
        fs::create_directories(out_dir);
        for (std::size_t rep = 0; rep < result.replications; ++rep) {
          for (const ContributionTable& t : realized_contributions(result, model, rep)) {
            if (t.key.role == ShockRole::idiosyncratic) continue;
            const fs::path file = fs::path(out_dir) /
                                  ("rep" + std::to_string(rep + 1) + "_" +
                                   slug(model.array(t.array).name) + "_" +
                                   slug(label(model, t.key)) + ".csv");
            std::ofstream os(file, std::ios::binary);
            if (!os) throw ConfigError("", "cannot write '" + file.string() + "'");
            report::write_contribution_csv(os, t, model, rep);
          }
        }
      }
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace tcs::cli
