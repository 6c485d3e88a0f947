// Command-line front end: fit, infer, simulate, qq.
//
// Exit codes: 0 success, 1 usage or I/O error, 2 the MLE does not exist.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "maxent/edge_csv.hpp"
#include "maxent/maxent.hpp"
#include "maxent/report.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNoMle = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::size_t> parse_index_list(const std::string& text, std::size_t n) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (field.empty() || used != field.size()) throw UsageError("bad vertex index '" + field + "'");
    if (v < 1 || static_cast<std::size_t>(v) > n) {
      throw UsageError("vertex index " + field + " outside 1.." + std::to_string(n));
    }
    out.push_back(static_cast<std::size_t>(v - 1));
  }
  return out;
}

// Output goes to `path`, or stdout when the path is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

maxent::SolverConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config " + path);
  return maxent::SolverConfig::from_key_value(in);
}

struct FitArgs {
  std::string model;
  std::string input;
  std::string output;
  std::string config;
  std::size_t n = 0;
};

int cmd_fit(const FitArgs& args) {
  const auto model = maxent::WeightModel::parse(args.model);
  std::ifstream in(args.input);
  if (!in) throw UsageError("cannot read " + args.input);
  const auto graph = maxent::read_edge_list(in, args.n > 0 ? std::optional(args.n) : std::nullopt);
  graph.validate_for(model);
  const auto d = maxent::degrees(graph);
  const auto boundary = maxent::identifiability_gauge(model, d);
  const auto result = maxent::fit(model, d, load_config(args.config));
  Output out(args.output);
  out.stream() << maxent::to_json(result, model, boundary).dump(2) << '\n';
  return result.exists == maxent::Existence::Exists && boundary.empty() ? kOk : kNoMle;
}

struct InferArgs {
  std::string fit;
  std::string model;
  std::string output;
  std::vector<std::string> pairs;
  std::vector<std::string> equal;
  double alpha = 0.05;
};

int cmd_infer(const InferArgs& args) {
  std::ifstream in(args.fit);
  if (!in) throw UsageError("cannot read " + args.fit);
  const auto fit_json = nlohmann::json::parse(in);
  const auto model =
      maxent::WeightModel::parse(args.model.empty() ? fit_json.at("model").get<std::string>() : args.model);
  if (fit_json.at("exists").get<std::string>() != "Exists") {
    std::cerr << "fit reports no MLE (" << fit_json.at("exists").get<std::string>() << ")\n";
    return kNoMle;
  }
  auto theta_hat = fit_json.at("theta_hat").get<std::vector<double>>();
  const std::size_t n = theta_hat.size();
  if (!(args.alpha > 0.0 && args.alpha < 1.0)) throw UsageError("--alpha must be in (0, 1)");
  auto report = maxent::make_inference_report(model, std::move(theta_hat));
  for (const auto& p : args.pairs) {
    const auto idx = parse_index_list(p, n);
    if (idx.size() != 2 || idx[0] == idx[1]) throw UsageError("--pair needs two distinct indices i,j");
    maxent::add_interval(report, idx[0], idx[1], args.alpha);
  }
  for (const auto& e : args.equal) {
    auto idx = parse_index_list(e, n);
    if (idx.size() < 2) throw UsageError("--equal needs at least two indices");
    maxent::add_test(report, std::move(idx));
  }
  Output out(args.output);
  out.stream() << maxent::to_json(report, model).dump(2) << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string model;
  std::size_t n = 50;
  std::string mtilde = "1";
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> pairs;
  std::string track;
  std::string equal;
  unsigned threads = 1;
  std::string csv;
  std::string json;
  std::string emit_graph;
  std::string config;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("MAXENT_SEED")) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(env, &used);
      if (used == std::string(env).size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("MAXENT_SEED is not an unsigned integer: ") + env);
  }
  return 1;
}

int cmd_simulate(const SimulateArgs& args) {
  maxent::ExperimentSpec spec;
  spec.model = maxent::WeightModel::parse(args.model);
  spec.n = args.n;
  if (spec.n < 3) throw UsageError("--n must be >= 3");
  spec.mtilde = maxent::MTilde::parse(args.mtilde);
  spec.reps = args.reps;
  spec.alpha = args.alpha;
  spec.seed = resolve_seed(args.seed);
  spec.threads = args.threads;
  spec.solver = load_config(args.config);
  if (args.pairs.empty()) {
    spec.pairs = maxent::ExperimentSpec::default_pairs(spec.n);
  } else {
    for (const auto& p : args.pairs) {
      const auto idx = parse_index_list(p, spec.n);
      if (idx.size() != 2 || idx[0] == idx[1]) throw UsageError("--pairs needs i,j with i != j");
      spec.pairs.emplace_back(idx[0], idx[1]);
    }
  }
  spec.tracked = args.track.empty() ? maxent::ExperimentSpec::default_tracked(spec.n)
                                    : parse_index_list(args.track, spec.n);
  if (!args.equal.empty()) spec.equality_indices = parse_index_list(args.equal, spec.n);
  spec.validate();
  const auto theta = maxent::parameter_grid(spec);

  if (!args.emit_graph.empty()) {
    // Same stream as replication 0.
    auto rng = maxent::Rng::substream(spec.seed, 0);
    const auto graph = maxent::sample_graph(spec.model, theta, rng);
    std::ofstream g(args.emit_graph);
    if (!g) throw UsageError("cannot write " + args.emit_graph);
    maxent::write_edge_list(g, graph);
  }

  const auto summary = maxent::run_experiment(spec);
  {
    Output out(args.csv);
    maxent::write_table_header(out.stream());
    maxent::write_table_rows(out.stream(), summary);
  }
  if (!args.json.empty()) {
    Output out(args.json);
    out.stream() << maxent::to_json(summary).dump(2) << '\n';
  }
  return kOk;
}

struct QqArgs {
  std::string input;
  std::string output;
  std::size_t coordinate = 0;
};

int cmd_qq(const QqArgs& args) {
  std::ifstream in(args.input);
  if (!in) throw UsageError("cannot read " + args.input);
  std::vector<double> samples;
  if (in.peek() == '{') {
    const auto j = nlohmann::json::parse(in);
    const auto& coords = j.at("coordinates");
    if (coords.empty()) throw UsageError("simulation output has no tracked coordinates");
    const nlohmann::json* chosen = nullptr;
    for (const auto& c : coords) {
      if (args.coordinate == 0 || c.at("index").get<std::size_t>() == args.coordinate) {
        chosen = &c;
        break;
      }
    }
    if (chosen == nullptr) throw UsageError("coordinate " + std::to_string(args.coordinate) + " was not tracked");
    for (const auto& z : chosen->at("z_samples")) samples.push_back(z.get<double>());
  } else {
    double x = 0.0;
    while (in >> x) samples.push_back(x);
    if (!in.eof()) throw UsageError("non-numeric value in " + args.input);
  }
  if (samples.empty()) throw UsageError("no samples in " + args.input);
  const auto rows = maxent::qq_export(std::move(samples));
  Output out(args.output);
  maxent::write_qq_table(out.stream(), rows);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fit, sample and run inference for maximum entropy graph models"};
  app.require_subcommand(1);

  FitArgs fit_args;
  auto* fit = app.add_subcommand("fit", "Fit theta to an edge-list CSV");
  fit->add_option("--model", fit_args.model, "finite:q | continuous | geometric")->required();
  fit->add_option("--input", fit_args.input, "edge list CSV (i,j,weight; 1-based)")->required();
  fit->add_option("--n", fit_args.n, "vertex count (default: largest index in the file)");
  fit->add_option("--config", fit_args.config, "solver config (key = value lines)");
  fit->add_option("--out", fit_args.output, "FitResult JSON path (default stdout)");

  InferArgs infer_args;
  auto* infer = app.add_subcommand("infer", "Confidence intervals and equality tests from a fit");
  infer->add_option("--fit", infer_args.fit, "FitResult JSON from `fit`")->required();
  infer->add_option("--model", infer_args.model, "override the model recorded in the fit");
  infer->add_option("--pair", infer_args.pairs, "interval for theta_i - theta_j, as i,j");
  infer->add_option("--alpha", infer_args.alpha, "interval level is 1 - alpha");
  infer->add_option("--equal", infer_args.equal, "chi-square test of equality, as i1,i2,...");
  infer->add_option("--out", infer_args.output, "InferenceReport JSON path (default stdout)");

  SimulateArgs sim_args;
  std::uint64_t seed_flag = 0;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo coverage study");
  simulate->add_option("--model", sim_args.model, "finite:q | continuous | geometric")->required();
  simulate->add_option("--n", sim_args.n, "vertex count");
  simulate->add_option("--mtilde", sim_args.mtilde, "0 | 1 | loglogn | sqrtlogn | logn | sqrtn | n | <number>");
  simulate->add_option("--reps", sim_args.reps, "replications");
  simulate->add_option("--alpha", sim_args.alpha, "interval level is 1 - alpha");
  auto* seed_opt = simulate->add_option("--seed", seed_flag, "seed (fallback: MAXENT_SEED, then 1)");
  simulate->add_option("--pairs", sim_args.pairs, "tracked pair i,j (repeatable)");
  simulate->add_option("--track", sim_args.track, "coordinates for z-scores, as i1,i2,...");
  simulate->add_option("--equal", sim_args.equal, "indices for the chi-square equality test");
  simulate->add_option("--threads", sim_args.threads, "worker threads");
  simulate->add_option("--csv", sim_args.csv, "table CSV path (default stdout)");
  simulate->add_option("--json", sim_args.json, "raw JSON with z-samples and KS distances");
  simulate->add_option("--emit-graph", sim_args.emit_graph, "write replication 1's graph as edge CSV");
  simulate->add_option("--config", sim_args.config, "solver config (key = value lines)");

  QqArgs qq_args;
  auto* qq = app.add_subcommand("qq", "QQ table of z-samples against the standard normal");
  qq->add_option("--input", qq_args.input, "simulate JSON, or whitespace-separated numbers")->required();
  qq->add_option("--coordinate", qq_args.coordinate, "tracked vertex to export (default: first)");
  qq->add_option("--out", qq_args.output, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*fit) return cmd_fit(fit_args);
    if (*infer) return cmd_infer(infer_args);
    if (*simulate) {
      if (*seed_opt) sim_args.seed = seed_flag;
      return cmd_simulate(sim_args);
    }
    if (*qq) return cmd_qq(qq_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}
