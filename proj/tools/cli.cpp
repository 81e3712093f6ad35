#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qtomo/analytic.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/io.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/povm.hpp"
#include "qtomo/simulate.hpp"

namespace qtomo::cli {

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

namespace {

std::filesystem::path default_out_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("QTOMO_OUT_DIR"); env && *env) return env;
  return "qtomo_out";
}

std::map<std::string, double> parse_params(const std::vector<std::string>& extras) {
  std::map<std::string, double> params;
  for (std::size_t i = 0; i < extras.size(); ++i) {
    std::string key = extras[i];
    if (key.rfind("--", 0) != 0) throw ValidationError("unexpected argument '" + key + "'");
    key = key.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= extras.size()) throw ValidationError("missing value for --" + key);
      value = extras[++i];
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty())
      throw ValidationError("parameter --" + key + " is not a number: '" + value + "'");
    params[key] = v;
  }
  return params;
}

void povm_check(const std::string& spec, std::ostream& out) {
  const Povm povm = resolve_povm(spec);
  const bool ic = is_informationally_complete(povm);
  const TightIcResult tight = is_tight_ic(povm);
  out << "IC: " << (ic ? "true" : "false") << ", tight-IC: " << (tight.tight ? "true" : "false");
  if (tight.rank_one) {
    if (tight.residual < 1e-12) out << " (residual < 1e-12)";
    else out << " (residual " << short_number(tight.residual) << ")";
  } else {
    out << " (not rank one)";
  }
  out << "\n";
  out << "label: " << povm.label() << ", dim: " << povm.dim() << ", outcomes: " << povm.size()
      << "\n";
  Eigen::SelfAdjointEigenSolver<Superoperator> es(frame_superop(povm));
  out << "frame spectrum:";
  for (Eigen::Index i = es.eigenvalues().size(); i-- > 0;) out << ' ' << short_number(es.eigenvalues()(i));
  out << "\n";
}

nlohmann::json matrix_json(const CMatrix& m) { return nlohmann::json::parse(matrix_to_json(m)); }

void estimate_command(const std::string& povm_spec, const std::string& counts_file,
                      const std::string& estimator, const std::string& state_file,
                      const std::string& zero_policy, std::ostream& out) {
  const Povm povm = resolve_povm(povm_spec);
  const Frequencies freqs(read_counts(counts_file));
  if (freqs.size() != povm.size())
    throw ValidationError("got " + std::to_string(freqs.size()) + " counts for a POVM with " +
                          std::to_string(povm.size()) + " outcomes");
  const EstimatorKind kind = parse_estimator(estimator);
  EstimationResult result;
  switch (kind) {
    case EstimatorKind::cle: result = cle(povm, freqs); break;
    case EstimatorKind::mle: result = mle(povm, freqs); break;
    default: {
      BlueOptions opts;
      opts.mode = kind;
      if (zero_policy == "error") opts.zero_policy = ZeroFrequencyPolicy::error;
      else if (zero_policy != "regularize") throw ValidationError("--zero-policy must be regularize or error");
      if (kind == EstimatorKind::blue_oracle) {
        if (state_file.empty()) throw ValidationError("blue_oracle needs --state");
        opts.rho_true = read_state(state_file);
      }
      result = blue(povm, freqs, opts);
    }
  }
  const CMatrix& rho = result.estimate;
  nlohmann::json j;
  j["estimator"] = std::string(to_string(kind));
  j["shots"] = freqs.shots();
  j["estimate"] = matrix_json(rho);
  j["trace"] = rho.trace().real();
  const RVector eig = hermitian_eigenvalues(rho);
  j["eigenvalues"] = std::vector<double>(eig.data(), eig.data() + eig.size());
  j["purity"] = (rho * rho).trace().real();
  j["psd"] = eig.minCoeff() >= -1e-10;
  if (povm.dim() == 2) {
    const BlochVector b = bloch_vector(rho);
    j["bloch"] = {b.x, b.y, b.z};
  }
  if (kind == EstimatorKind::mle) {
    j["iterations"] = result.iterations;
    j["converged"] = result.converged;
    j["residual"] = result.residual;
    j["log_likelihood"] = result.log_likelihood;
  }
  // Predicted scaled figures at the estimate, when it is an interior state.
  nlohmann::json figures = nlohmann::json::object();
  if (eig.minCoeff() > 1e-10) {
    try {
      const bool optimal = kind != EstimatorKind::cle;
      const PointFigures f = point_figures(povm, rho, optimal);
      figures["scaled_mse"] = f.mse;
      figures["scaled_msb"] = f.msb;
      figures["log_volume"] = f.log_volume;
    } catch (const NumericalError&) {
    }
  }
  if (result.scaled_mse_matrix) figures["oracle_scaled_mse"] = result.scaled_mse_matrix->trace();
  j["figures"] = std::move(figures);
  out << j.dump(2) << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qtomo: quantum state tomography with informationally (over)complete measurements"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  // povm
  auto* povm_cmd = app.add_subcommand("povm", "Build, validate and export POVMs");
  povm_cmd->require_subcommand(1);
  std::string povm_spec;
  auto* check = povm_cmd->add_subcommand("check", "Print IC and tight-IC status and the frame spectrum");
  check->add_option("povm", povm_spec, "builtin:<name> or POVM JSON file")->required();
  auto* exp = povm_cmd->add_subcommand("export", "Write a POVM as JSON");
  std::string export_out;
  std::string fiducial_file;
  exp->add_option("povm", povm_spec, "builtin:<name> or POVM JSON file")->required();
  exp->add_option("--out,-o", export_out, "Output file (default: stdout)");
  exp->add_option("--fiducial", fiducial_file, "Fiducial JSON; builds sic<d> from it");

  // analytic
  auto* analytic = app.add_subcommand("analytic", "Evaluate closed-form figures of merit");
  analytic->require_subcommand(1);
  auto* eval = analytic->add_subcommand("eval", "Evaluate one formula");
  std::string formula;
  eval->add_option("--formula", formula, "Formula name (see `analytic list`)")->required();
  eval->allow_extras();
  auto* list = analytic->add_subcommand("list", "List the available formulas");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate a state from outcome counts");
  std::string est_povm, counts_file, estimator = "cle", state_file, zero_policy = "regularize";
  estimate->add_option("--povm", est_povm, "builtin:<name> or POVM JSON file")->required();
  estimate->add_option("--counts", counts_file, "Counts file")->required();
  estimate->add_option("--estimator", estimator,
                       "cle, blue (plug-in), blue_twostep, blue_oracle or mle");
  estimate->add_option("--state", state_file, "True state JSON (blue_oracle only)");
  estimate->add_option("--zero-policy", zero_policy, "regularize or error");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment from a JSON config");
  std::string config_file, sim_out_dir;
  simulate->add_option("--config", config_file, "Experiment config JSON")->required();
  simulate->add_option("--out-dir", sim_out_dir, "Output directory when the config has no output");

  // figures
  auto* figures = app.add_subcommand("figures", "Reproduce the figure data sets");
  std::string which;
  FigureOptions fopts;
  bool paper_scale = false;
  std::string fig_out_dir;
  figures->add_option("figure", which, "fig1, fig2, fig3 or fig4")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));
  figures->add_option("--seed", fopts.seed, "Master seed");
  auto* reps_opt = figures->add_option("--reps", fopts.reps, "Repetitions per point (default 100)")
                       ->check(CLI::PositiveNumber);
  figures->add_flag("--paper-scale", paper_scale, "Use 1000 repetitions");
  figures->add_option("--out-dir", fig_out_dir, "Output directory (default $QTOMO_OUT_DIR or qtomo_out)");
  figures->add_option("--threads", threads, "Cap on worker threads (0 = all cores)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kValidation;
  }

  const char* op = "qtomo";
  try {
    if (povm_cmd->parsed()) {
      if (check->parsed()) {
        op = "povm check";
        povm_check(povm_spec, out);
      } else {
        op = "povm export";
        const Povm povm = fiducial_file.empty()
                              ? resolve_povm(povm_spec)
                              : sic_povm(static_cast<int>(read_fiducial(fiducial_file).size()),
                                         read_fiducial(fiducial_file));
        if (export_out.empty()) out << povm_to_json(povm);
        else write_povm(povm, export_out);
      }
    } else if (analytic->parsed()) {
      op = "analytic";
      if (list->parsed()) {
        for (const auto& f : formula_catalog()) {
          out << f.name << " (";
          for (std::size_t i = 0; i < f.params.size(); ++i) out << (i ? ", " : "") << "--" << f.params[i];
          out << "): " << f.description << "\n";
        }
      } else {
        op = "analytic eval";
        const auto value = evaluate_formula(formula, parse_params(eval->remaining()));
        if (value) out << short_number(*value) << "\n";
        else out << "numeric-only\n";
      }
    } else if (estimate->parsed()) {
      op = "estimate";
      estimate_command(est_povm, counts_file, estimator, state_file, zero_policy, out);
    } else if (simulate->parsed()) {
      op = "simulate";
      ExperimentConfig cfg = read_experiment_config(config_file);
      if (threads > 0) cfg.threads = threads;
      if (cfg.output.empty()) cfg.output = (default_out_dir(sim_out_dir) / "simulate").string();
      const ExperimentResult res = run_experiment(cfg);
      out << "wrote " << cfg.output << ".csv (" << res.trials.size() << " rows) and "
          << cfg.output << "_aggregate.csv\n";
    } else if (figures->parsed()) {
      op = "figures";
      if (paper_scale && reps_opt->count() == 0) fopts.reps = 1000;
      fopts.threads = threads;
      fopts.out_dir = default_out_dir(fig_out_dir);
      if (which == "fig1") run_fig1(fopts, out);
      else if (which == "fig2") run_fig2(fopts, out);
      else if (which == "fig3") run_fig3(fopts, out);
      else run_fig4(fopts, out);
    }
  } catch (const ValidationError& e) {
    err << op << ": " << e.what() << "\n";
    return kValidation;
  } catch (const NumericalError& e) {
    err << op << ": numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    err << op << ": " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    err << op << ": " << e.what() << "\n";
    return kNumerical;
  }
  return kOk;
}

}  // namespace qtomo::cli
