#include "commands.hpp"

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "varhsmm/analysis.hpp"
#include "varhsmm/csv.hpp"
#include "varhsmm/decode.hpp"
#include "varhsmm/em.hpp"
#include "varhsmm/errors.hpp"
#include "varhsmm/manifest.hpp"
#include "varhsmm/model_json.hpp"
#include "varhsmm/random.hpp"
#include "varhsmm/selection.hpp"
#include "varhsmm/simulate.hpp"

namespace varhsmm::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct GlobalOptions {
  int threads = 1;
  bool strict = false;
};

// Raised after all outputs are written when --strict sees a non-converged fit.
struct StrictFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SplitOptions {
  int train_end = 0;       // 0: derive from the fractions
  int validation_end = 0;
  double train_fraction = 0.6;
  double validation_fraction = 0.2;
};

struct GridOptions {
  std::vector<double> sigma;
  std::vector<double> a;
  bool refit_each_step = false;
};

struct EmOptions {
  int max_iterations = 200;
  double tolerance = 1e-6;
  std::uint64_t seed = 0;
  bool jitter = false;
};

void add_split_flags(CLI::App* cmd, SplitOptions& split) {
  cmd->add_option("--train-end", split.train_end, "Rows [0, T1) train (overrides --train-frac)");
  cmd->add_option("--validation-end", split.validation_end,
                  "Rows [T1, T2) are validation targets (overrides --validate-frac)");
  cmd->add_option("--train-frac", split.train_fraction, "Training share when --train-end is absent")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--validate-frac", split.validation_fraction, "Validation share when --validation-end is absent")
      ->check(CLI::Range(0.0, 1.0));
}

void add_grid_flags(CLI::App* cmd, GridOptions& grid) {
  cmd->add_option("--grid-sigma", grid.sigma, "lambda_sigma grid (default: 15 log-spaced points in [1e-4, 1])")
      ->delimiter(',');
  cmd->add_option("--grid-a", grid.a, "lambda_a grid (default: 15 log-spaced points in [0.1, 100])")
      ->delimiter(',');
  cmd->add_flag("--refit-each-step", grid.refit_each_step, "Refit before every validation target");
}

void add_em_flags(CLI::App* cmd, EmOptions& em) {
  cmd->add_option("--max-iter", em.max_iterations, "EM iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", em.tolerance, "Relative tolerance on the penalized log-likelihood");
  cmd->add_option("--seed", em.seed, "Seed for the optional initial jitter");
  cmd->add_flag("--jitter", em.jitter, "Perturb the initial means");
}

FitConfig make_fit_config(const EmOptions& em, double lambda_sigma, double lambda_a) {
  FitConfig config;
  config.reg = {lambda_sigma, lambda_a};
  config.max_iterations = em.max_iterations;
  config.tolerance = em.tolerance;
  config.seed = em.seed;
  config.jitter = em.jitter;
  validate(config);
  return config;
}

CvPlan make_plan(const SplitOptions& split, const GridOptions& grid, int T) {
  CvPlan plan;
  plan.train_end = split.train_end > 0 ? split.train_end : static_cast<int>(std::floor(split.train_fraction * T));
  plan.validation_end = split.validation_end > 0
                            ? split.validation_end
                            : static_cast<int>(std::floor((split.train_fraction + split.validation_fraction) * T));
  plan.grid_sigma = grid.sigma.empty() ? default_sigma_grid() : grid.sigma;
  plan.grid_a = grid.a.empty() ? default_a_grid() : grid.a;
  plan.refit = grid.refit_each_step ? RefitPolicy::RefitEachStep : RefitPolicy::FitOnceFilterForward;
  validate(plan, T);
  return plan;
}

Json fit_config_json(const FitConfig& config) {
  return {{"lambda_sigma", config.reg.lambda_sigma},
          {"lambda_a", config.reg.lambda_a},
          {"max_iterations", config.max_iterations},
          {"tolerance", config.tolerance},
          {"init_policy", "segmented-moments"},
          {"seed", config.seed},
          {"jitter", config.jitter},
          {"lasso_tolerance", config.lasso.tolerance},
          {"lasso_max_sweeps", config.lasso.max_sweeps}};
}

Json plan_json(const CvPlan& plan) {
  return {{"train_end", plan.train_end},
          {"validation_end", plan.validation_end},
          {"grid_sigma", plan.grid_sigma},
          {"grid_a", plan.grid_a},
          {"refit_policy", plan.refit == RefitPolicy::RefitEachStep ? "refit-each-step" : "fit-once-filter-forward"}};
}

Json spec_json(const ModelSpec& spec) {
  return {{"M", spec.states}, {"d", spec.dim}, {"p", spec.order}, {"D", spec.max_duration}};
}

// JSON has no infinity; failed cells are written as null.
Json number_or_null(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

void write_json(const fs::path& path, const Json& doc) { write_text_atomic(path, doc.dump(2) + "\n"); }

RunManifest start_manifest(const std::string& command, int argc, char** argv, const GlobalOptions& global) {
  RunManifest manifest;
  manifest.command = command;
  for (int i = 1; i < argc; ++i) manifest.arguments.emplace_back(argv[i]);
  manifest.rng_algorithm = std::string(Rng::kAlgorithm);
  manifest.config["threads"] = global.threads;
  manifest.config["strict"] = global.strict;
  return manifest;
}

TimeSeries load_series(const fs::path& path, std::vector<std::string>* header = nullptr) {
  CsvTable table = read_csv(path);
  if (table.values.rows() == 0) throw ValidationError(fmt::format("{}: no data rows", path.string()));
  if (header) *header = std::move(table.header);
  return std::move(table.values);
}

void check_dimension(const TimeSeries& series, const ModelSpec& spec) {
  if (series.cols() != spec.dim)
    throw ValidationError(
        fmt::format("data has {} columns but the model dimension is {}", series.cols(), spec.dim));
}

CsvTable state_table(const std::vector<int>& states) {
  CsvTable table{{"state"}, Matrix(static_cast<Eigen::Index>(states.size()), 1)};
  for (std::size_t t = 0; t < states.size(); ++t) table.values(static_cast<Eigen::Index>(t), 0) = states[t] + 1;
  return table;
}

// 1-based rows and states, as in the states file.
CsvTable segment_table(const std::vector<Segment>& segments) {
  CsvTable table{{"state", "start", "duration"}, Matrix(static_cast<Eigen::Index>(segments.size()), 3)};
  for (std::size_t s = 0; s < segments.size(); ++s)
    table.values.row(static_cast<Eigen::Index>(s)) << segments[s].state + 1, segments[s].start + 1,
        segments[s].duration;
  return table;
}

CsvTable trace_table(const std::vector<double>& trace) {
  CsvTable table{{"iteration", "penalized_loglik"}, Matrix(static_cast<Eigen::Index>(trace.size()), 2)};
  for (std::size_t i = 0; i < trace.size(); ++i) table.values.row(static_cast<Eigen::Index>(i)) << i, trace[i];
  return table;
}

CsvTable surface_table(const CvResult& cv) {
  CsvTable table{{"lambda_sigma", "lambda_a", "msfe", "converged"},
                 Matrix(static_cast<Eigen::Index>(cv.cells.size()), 4)};
  for (std::size_t i = 0; i < cv.cells.size(); ++i) {
    const CvCell& cell = cv.cells[i];
    table.values.row(static_cast<Eigen::Index>(i)) << cell.lambda_sigma, cell.lambda_a, cell.msfe,
        cell.converged ? 1.0 : 0.0;
  }
  return table;
}

Json cv_summary(const CvResult& cv) {
  Json failed = Json::array();
  for (const CvCell& cell : cv.cells)
    if (!std::isfinite(cell.msfe))
      failed.push_back({{"lambda_sigma", cell.lambda_sigma}, {"lambda_a", cell.lambda_a}, {"diagnostic", cell.diagnostic}});
  return {{"best_lambda_sigma", cv.best_lambda_sigma},
          {"best_lambda_a", cv.best_lambda_a},
          {"best_msfe", cv.msfe_surface.minCoeff()},
          {"failed_cells", std::move(failed)}};
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  fs::path model;
  int length = 0;
  std::uint64_t seed = 0;
  fs::path out;
};

void run_simulate(const SimulateOptions& opt, RunManifest manifest) {
  if (opt.length < 1) throw ValidationError("--length must be at least 1");
  const StoredModel model = read_model(opt.model);
  manifest.add_input(opt.model);
  manifest.seed = opt.seed;
  manifest.config["length"] = opt.length;
  manifest.config["spec"] = spec_json(model.spec);

  const SimulationOutput sim = simulate(model.spec, model.params, opt.length, opt.seed);
  write_csv(opt.out / "series.csv", {default_header(model.spec.dim), sim.series});
  write_csv(opt.out / "states.csv", state_table(sim.states));
  write_csv(opt.out / "segments.csv", segment_table(sim.segments));
  write_model(opt.out / "model.json", model.spec, model.params);
  write_manifest(opt.out / "manifest.json", manifest);
}

// --------------------------------------------------------------------- fit

struct FitOptions {
  fs::path data;
  ModelSpec spec{1, 1, 0, 1};
  double lambda_sigma = 0.0;
  double lambda_a = 0.0;
  bool cv = false;
  SplitOptions split;
  GridOptions grid;
  EmOptions em;
  fs::path out;
};

void run_fit(FitOptions opt, RunManifest manifest, const GlobalOptions& global) {
  const TimeSeries series = load_series(opt.data);
  manifest.add_input(opt.data);
  opt.spec.dim = static_cast<int>(series.cols());
  validate_spec(opt.spec);
  manifest.seed = opt.em.seed;
  manifest.config["spec"] = spec_json(opt.spec);

  FitConfig config = make_fit_config(opt.em, opt.lambda_sigma, opt.lambda_a);
  Json report;
  TimeSeries fit_rows = series;
  if (opt.cv) {
    const CvPlan plan = make_plan(opt.split, opt.grid, static_cast<int>(series.rows()));
    manifest.config["plan"] = plan_json(plan);
    const CvResult cv = grid_search(series, opt.spec, plan, config, global.threads);
    write_csv(opt.out / "cv_surface.csv", surface_table(cv));
    write_json(opt.out / "cv_summary.json", cv_summary(cv));
    config.reg = {cv.best_lambda_sigma, cv.best_lambda_a};
    fit_rows = series.topRows(plan.validation_end);
    report["fit_rows"] = plan.validation_end;
  } else {
    report["fit_rows"] = series.rows();
  }
  manifest.config["fit"] = fit_config_json(config);

  const FitResult result = fit(fit_rows, opt.spec, config);
  write_model(opt.out / "model.json", opt.spec, result.params);
  write_csv(opt.out / "trace.csv", trace_table(result.penalized_loglik_trace));
  report["converged"] = result.converged;
  report["iterations"] = result.iterations;
  report["log_likelihood"] = result.log_likelihood;
  report["penalized_loglik"] = result.penalized_loglik_trace.back();
  report["lambda_sigma"] = config.reg.lambda_sigma;
  report["lambda_a"] = config.reg.lambda_a;
  report["free_parameters"] = count_free_parameters(opt.spec);
  report["diagnostics"] = result.diagnostics;
  write_json(opt.out / "fit_report.json", report);
  write_manifest(opt.out / "manifest.json", manifest);

  if (!result.converged) {
    const std::string message =
        fmt::format("EM did not converge within {} iterations", config.max_iterations);
    if (global.strict) throw StrictFailure(message);
    std::cerr << "warning: " << message << '\n';
  }
}

// ------------------------------------------------------------------ decode

struct DecodeOptions {
  fs::path data;
  fs::path model;
  fs::path out;
};

void run_decode(const DecodeOptions& opt, RunManifest manifest) {
  const TimeSeries series = load_series(opt.data);
  const StoredModel model = read_model(opt.model);
  manifest.add_input(opt.data);
  manifest.add_input(opt.model);
  check_dimension(series, model.spec);

  const DecodedPath path = viterbi_decode(series, model.params, model.spec);
  write_csv(opt.out / "states.csv", state_table(path.states));
  write_csv(opt.out / "segments.csv", segment_table(path.segments));
  write_json(opt.out / "decode_report.json",
             {{"path_log_score", path.path_log_score}, {"segments", path.segments.size()}});
  write_manifest(opt.out / "manifest.json", manifest);
}

// ---------------------------------------------------------------- forecast

struct ForecastOptions {
  fs::path data;
  fs::path model;
  int horizon = 0;
  bool next = false;
  fs::path out;
};

void run_forecast(const ForecastOptions& opt, RunManifest manifest) {
  const TimeSeries series = load_series(opt.data);
  const StoredModel model = read_model(opt.model);
  manifest.add_input(opt.data);
  manifest.add_input(opt.model);
  check_dimension(series, model.spec);
  const int T = static_cast<int>(series.rows());
  if (opt.horizon < 0 || opt.horizon > T - 1)
    throw ValidationError(fmt::format("--horizon {} needs 0 <= horizon <= T - 1 = {}", opt.horizon, T - 1));
  if (opt.horizon == 0 && !opt.next) throw ValidationError("nothing to forecast: give --horizon or --next");
  manifest.config["horizon"] = opt.horizon;
  manifest.config["next"] = opt.next;

  const int first = T - opt.horizon;
  const int last = opt.next ? T + 1 : T;
  const Matrix forecasts = rolling_forecasts(series, model.params, model.spec, first, last);

  std::vector<std::string> header{"row"};
  for (auto& name : default_header(model.spec.dim)) header.push_back(std::move(name));
  CsvTable table{header, Matrix(forecasts.rows(), forecasts.cols() + 1)};
  for (Eigen::Index i = 0; i < forecasts.rows(); ++i) table.values(i, 0) = first + i + 1;
  table.values.rightCols(forecasts.cols()) = forecasts;
  write_csv(opt.out / "forecasts.csv", table);

  Json report{{"first_row", first + 1}, {"forecasts", forecasts.rows()}};
  if (opt.horizon > 0)
    report["msfe"] = msfe(forecasts.topRows(opt.horizon), series.bottomRows(opt.horizon));
  write_json(opt.out / "forecast_report.json", report);
  write_manifest(opt.out / "manifest.json", manifest);
}

// ----------------------------------------------------------------- returns

struct ReturnsOptions {
  fs::path prices;
  fs::path out;
};

void run_returns(const ReturnsOptions& opt, RunManifest manifest) {
  std::vector<std::string> header;
  const Matrix prices = load_series(opt.prices, &header);
  manifest.add_input(opt.prices);
  write_csv(opt.out / "returns.csv", {header, log_returns(prices)});
  write_manifest(opt.out / "manifest.json", manifest);
}

// --------------------------------------------------------------- correlate

struct CorrelateOptions {
  fs::path data;
  int lag = 1;
  double alpha = 0.05;
  fs::path out;
};

void run_correlate(const CorrelateOptions& opt, RunManifest manifest) {
  std::vector<std::string> header;
  const TimeSeries series = load_series(opt.data, &header);
  manifest.add_input(opt.data);
  manifest.config["lag"] = opt.lag;
  manifest.config["alpha"] = opt.alpha;

  const CorrelationReport report = lag_correlation(series, opt.lag, opt.alpha);
  write_csv(opt.out / "corr.csv", {header, report.corr});
  write_csv(opt.out / "significant.csv", {header, report.significant.cast<double>()});
  Json flagged = Json::array();
  for (int c : report.zero_variance_columns) flagged.push_back(header[c]);
  write_json(opt.out / "correlate_report.json", {{"lag", report.lag},
                                                  {"alpha", report.alpha},
                                                  {"n_significant", report.n_significant},
                                                  {"zero_variance_columns", std::move(flagged)}});
  write_manifest(opt.out / "manifest.json", manifest);
}

// ----------------------------------------------------------------- compare

struct CompareOptions {
  fs::path data;
  std::vector<std::string> candidates;
  SplitOptions split;
  GridOptions grid;
  EmOptions em;
  fs::path out;
};

// "M,p,D" or "M,p,D,plain"; plain pins both lambdas to zero.
Candidate parse_candidate(const std::string& text, int dim, const EmOptions& em) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string part; std::getline(in, part, ',');) parts.push_back(part);
  if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "plain"))
    throw ValidationError(fmt::format("candidate '{}' must look like M,p,D or M,p,D,plain", text));
  Candidate c;
  try {
    c.spec = {std::stoi(parts[0]), dim, std::stoi(parts[1]), std::stoi(parts[2])};
  } catch (const std::exception&) {
    throw ValidationError(fmt::format("candidate '{}' has a non-integer field", text));
  }
  validate_spec(c.spec);
  c.config = make_fit_config(em, 0.0, 0.0);
  const bool plain = parts.size() == 4;
  if (plain) c.grid_sigma = c.grid_a = {0.0};
  c.description = fmt::format("{}VAR({})-HSMM with {} latent states, D={}", plain ? "" : "Regularized ",
                              c.spec.order, c.spec.states, c.spec.max_duration);
  return c;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

void run_compare(const CompareOptions& opt, RunManifest manifest, const GlobalOptions& global) {
  const TimeSeries series = load_series(opt.data);
  manifest.add_input(opt.data);
  const int dim = static_cast<int>(series.cols());
  std::vector<Candidate> candidates;
  for (const std::string& text : opt.candidates) candidates.push_back(parse_candidate(text, dim, opt.em));
  const CvPlan plan = make_plan(opt.split, opt.grid, static_cast<int>(series.rows()));
  manifest.seed = opt.em.seed;
  manifest.config["plan"] = plan_json(plan);
  manifest.config["fit"] = fit_config_json(candidates.front().config);
  manifest.config["candidates"] = opt.candidates;

  const auto rows = compare_models(series, candidates, plan, global.threads);
  std::string csv = "rank,model,M,p,D,free_parameters,lambda_sigma,lambda_a,validation_msfe,forecast_msfe\n";
  Json table = Json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const ComparisonRow& r = rows[i];
    csv += fmt::format("{},{},{},{},{},{},{},{},{},{}\n", i + 1, csv_field(r.description), r.spec.states,
                       r.spec.order, r.spec.max_duration, r.free_parameters, format_double(r.lambda_sigma),
                       format_double(r.lambda_a), format_double(r.validation_msfe), format_double(r.forecast_msfe));
    table.push_back({{"rank", i + 1},
                     {"model", r.description},
                     {"spec", spec_json(r.spec)},
                     {"free_parameters", r.free_parameters},
                     {"lambda_sigma", r.lambda_sigma},
                     {"lambda_a", r.lambda_a},
                     {"validation_msfe", number_or_null(r.validation_msfe)},
                     {"forecast_msfe", number_or_null(r.forecast_msfe)},
                     {"diagnostic", r.diagnostic}});
  }
  write_text_atomic(opt.out / "comparison.csv", csv);
  write_json(opt.out / "comparison.json", table);
  write_manifest(opt.out / "manifest.json", manifest);
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Regularized VAR(p)-HSMM toolkit", "varhsmm"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--threads", global.threads, "Worker threads for grid searches")->check(CLI::PositiveNumber);
  app.add_flag("--strict", global.strict, "Exit with code 3 when EM does not converge");

  SimulateOptions sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Draw a series from a model JSON");
  simulate_cmd->add_option("--model", sim.model, "Model JSON")->required();
  simulate_cmd->add_option("--length,-T", sim.length, "Number of observations")->required();
  simulate_cmd->add_option("--seed", sim.seed, "Random seed");
  simulate_cmd->add_option("--out", sim.out, "Output directory")->required();

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate a model by penalized EM");
  fit_cmd->add_option("--data", fit_opt.data, "Series CSV")->required();
  fit_cmd->add_option("--states,-M", fit_opt.spec.states, "Number of latent states")->required();
  fit_cmd->add_option("--order,-p", fit_opt.spec.order, "Autoregressive order")->required();
  fit_cmd->add_option("--max-duration,-D", fit_opt.spec.max_duration, "Maximum state duration")->required();
  auto* lambda_sigma = fit_cmd->add_option("--lambda-sigma", fit_opt.lambda_sigma, "Covariance shrinkage");
  auto* lambda_a = fit_cmd->add_option("--lambda-a", fit_opt.lambda_a, "LASSO penalty");
  auto* cv_flag = fit_cmd->add_flag("--cv", fit_opt.cv, "Select both lambdas by grid search");
  cv_flag->excludes(lambda_sigma)->excludes(lambda_a);
  add_split_flags(fit_cmd, fit_opt.split);
  add_grid_flags(fit_cmd, fit_opt.grid);
  add_em_flags(fit_cmd, fit_opt.em);
  fit_cmd->add_option("--out", fit_opt.out, "Output directory")->required();

  DecodeOptions dec;
  auto* decode_cmd = app.add_subcommand("decode", "Viterbi state sequence");
  decode_cmd->add_option("--data", dec.data, "Series CSV")->required();
  decode_cmd->add_option("--model", dec.model, "Model JSON")->required();
  decode_cmd->add_option("--out", dec.out, "Output directory")->required();

  ForecastOptions fc;
  auto* forecast_cmd = app.add_subcommand("forecast", "Rolling one-step-ahead forecasts");
  forecast_cmd->add_option("--data", fc.data, "Series CSV")->required();
  forecast_cmd->add_option("--model", fc.model, "Model JSON")->required();
  forecast_cmd->add_option("--horizon", fc.horizon, "Forecast the last N observed rows");
  forecast_cmd->add_flag("--next", fc.next, "Also forecast the row after the data");
  forecast_cmd->add_option("--out", fc.out, "Output directory")->required();

  ReturnsOptions ret;
  auto* returns_cmd = app.add_subcommand("returns", "Log returns of a price CSV");
  returns_cmd->add_option("--prices", ret.prices, "Price CSV")->required();
  returns_cmd->add_option("--out", ret.out, "Output directory")->required();

  CorrelateOptions cor;
  auto* correlate_cmd = app.add_subcommand("correlate", "Lag-k correlation with Fisher z screening");
  correlate_cmd->add_option("--data", cor.data, "Series CSV")->required();
  correlate_cmd->add_option("--lag", cor.lag, "Lag k")->check(CLI::NonNegativeNumber);
  correlate_cmd->add_option("--alpha", cor.alpha, "Two-sided test level");
  correlate_cmd->add_option("--out", cor.out, "Output directory")->required();

  CompareOptions cmp;
  auto* compare_cmd = app.add_subcommand("compare", "Rank candidate models by held-out MSFE");
  compare_cmd->add_option("--data", cmp.data, "Series CSV")->required();
  compare_cmd->add_option("--candidate", cmp.candidates, "M,p,D or M,p,D,plain (repeatable)")->required();
  add_split_flags(compare_cmd, cmp.split);
  add_grid_flags(compare_cmd, cmp.grid);
  add_em_flags(compare_cmd, cmp.em);
  compare_cmd->add_option("--out", cmp.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidInput;
  }

  try {
    const auto* cmd = app.get_subcommands().front();
    RunManifest manifest = start_manifest(cmd->get_name(), argc, argv, global);
    if (cmd == simulate_cmd) run_simulate(sim, manifest);
    else if (cmd == fit_cmd) run_fit(fit_opt, manifest, global);
    else if (cmd == decode_cmd) run_decode(dec, manifest);
    else if (cmd == forecast_cmd) run_forecast(fc, manifest);
    else if (cmd == returns_cmd) run_returns(ret, manifest);
    else if (cmd == correlate_cmd) run_correlate(cor, manifest);
    else run_compare(cmp, manifest, global);
  } catch (const StrictFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNotConverged;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const FitError& e) {
    std::cerr << "fit failed: " << e.what() << '\n';
    return kNotConverged;
  } catch (const ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoFailure;
  }
  return kOk;
}

}  // namespace varhsmm::cli
