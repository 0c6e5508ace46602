// Command-line front end: run and resume boosting experiments, evaluate
// fitted mixtures against an oracle, and generate benchmark datasets.
#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <random>
#include <sstream>

#include "bvi/serialize.hpp"

namespace fs = std::filesystem;
using namespace bvi;
using bvi::io::json;

namespace {

// "lo1,hi1,lo2,hi2,..." -> (count/2) x 2 matrix of (lo, hi) rows.
Mat parse_box(const std::string& text) {
  std::vector<double> vals;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ',')) {
    const char* b = tok.data();
    const char* e = b + tok.size();
    while (b < e && std::isspace(static_cast<unsigned char>(*b))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(e[-1]))) --e;
    double v = 0.0;
    auto [p, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || p != e)
      throw std::invalid_argument("box: cannot parse number in '" + text + "'");
    vals.push_back(v);
  }
  if (vals.empty() || vals.size() % 2 != 0)
    throw std::invalid_argument("box needs an even number of values (lo,hi pairs)");
  Mat box(static_cast<Eigen::Index>(vals.size() / 2), 2);
  for (Eigen::Index k = 0; k < box.rows(); ++k) {
    box(k, 0) = vals[2 * k];
    box(k, 1) = vals[2 * k + 1];
  }
  return box;
}

Mixture load_mixture_arg(const std::string& path, const io::ExperimentSpec& spec) {
  const json j = io::read_json_file(path);
  if (j.is_object() && j.contains("config_hash") && j.contains("mixture")) {
    // Checkpoint file; accept it only when it belongs to this spec.
    const std::string expect = io::spec_config_hash(spec);
    const std::string got = j.at("config_hash").get<std::string>();
    if (got != expect)
      throw CheckpointError("checkpoint config_hash " + got +
                            " does not match the spec (" + expect + ")");
    return io::mixture_from_json(j.at("mixture"));
  }
  return io::mixture_from_json(j);
}

void write_run_outputs(const io::ExperimentSpec& spec, const std::string& hash,
                       const BoostResult& res) {
  fs::create_directories(spec.output_dir);
  const fs::path dir(spec.output_dir);
  io::write_json_file((dir / "trace.json").string(),
                      io::trace_to_json(res.trace, hash));
  io::write_json_file((dir / "mixture.json").string(),
                      io::mixture_to_json(res.q));
  io::write_json_file((dir / "checkpoint.json").string(),
                      io::checkpoint_to_json({hash, res.q, res.trace}));
  io::write_timings_csv((dir / "timings.csv").string(), res.trace);
}

void print_summary(const BoostResult& res) {
  double elbo = res.trace.init_elbo;
  bool ok = res.trace.init_elbo_ok;
  for (auto it = res.trace.iterations.rbegin();
       it != res.trace.iterations.rend(); ++it)
    if (it->elbo_ok) {
      elbo = it->elbo;
      ok = true;
      break;
    }
  std::cout << "status=" << res.trace.status << " t=" << res.trace.last_t()
            << " components=" << res.q.size() << " elbo="
            << (ok ? io::format_double(elbo) : std::string("n/a")) << '\n';
}

int cmd_run(const std::string& spec_path) {
  const io::ExperimentSpec spec = io::spec_from_json(io::read_json_file(spec_path));
  const TargetDensity target = io::build_target(spec);
  const std::string hash = io::spec_config_hash(spec);
  const BoostResult res = run_bvi(target, spec.run);
  write_run_outputs(spec, hash, res);
  print_summary(res);
  return 0;
}

int cmd_resume(const std::string& checkpoint_path, const std::string& spec_path,
               int extra_T) {
  const io::ExperimentSpec spec = io::spec_from_json(io::read_json_file(spec_path));
  const TargetDensity target = io::build_target(spec);
  const std::string hash = io::spec_config_hash(spec);
  io::Checkpoint ck = io::checkpoint_from_json(io::read_json_file(checkpoint_path));
  if (ck.config_hash != hash)
    throw CheckpointError("checkpoint config_hash " + ck.config_hash +
                          " does not match the spec (" + hash +
                          "); refusing to resume");
  const BoostResult res = resume_bvi(std::move(ck.mixture), std::move(ck.trace),
                                     target, spec.run, extra_T);
  write_run_outputs(spec, hash, res);
  print_summary(res);
  return 0;
}

int cmd_eval(const std::string& mixture_path, const std::string& spec_path) {
  const io::ExperimentSpec spec = io::spec_from_json(io::read_json_file(spec_path));
  const TargetDensity target = io::build_target(spec);
  const Mixture q = load_mixture_arg(mixture_path, spec);
  const auto t0 = std::chrono::steady_clock::now();
  const MCEstimate elbo =
      elbo_estimate(q, target, spec.run.elbo_eval_n, spec.run.master_seed);
  const ReferencePosterior ref = io::build_reference(spec, target);
  const double rel_err = rem(q, ref);
  const double wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                t0)
          .count();
  const json metrics{{"elbo", elbo.value},
                     {"elbo_se", elbo.std_error},
                     {"rem", rel_err},
                     {"k", q.size()},
                     {"wall_ms", wall_ms}};
  fs::create_directories(spec.output_dir);
  io::write_json_file((fs::path(spec.output_dir) / "metrics.json").string(),
                      metrics);
  std::cout << metrics.dump(2) << '\n';
  return 0;
}

int cmd_grid(const std::string& mixture_path, const std::string& box_text,
             int resolution, const std::string& out) {
  const Mixture q = io::mixture_from_json(io::read_json_file(mixture_path));
  io::write_grid_csv(out, q, parse_box(box_text), resolution);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_sample(const std::string& mixture_path, int n, std::uint64_t seed,
               const std::string& out) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  const Mixture q = io::mixture_from_json(io::read_json_file(mixture_path));
  std::mt19937_64 rng(seed);
  std::vector<Vec> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) rows.push_back(q.sample(rng));
  io::write_samples_csv(out, rows);
  std::cout << "wrote " << out << '\n';
  return 0;
}

int cmd_make_sensor(const std::string& out, const std::string& truth_out,
                    int n, double range, double sigma, std::uint64_t seed,
                    int min_links, const std::string& box_text) {
  SensorModel model;
  Mat truth;
  const std::uint64_t used = generate_sensor_model(
      n, range, sigma, parse_box(box_text), seed, min_links, model, truth);
  io::write_json_file(out, io::sensor_to_json(model));
  if (!truth_out.empty())
    io::write_json_file(truth_out, json{{"positions", io::mat_to_json(truth)},
                                        {"seed", used}});
  std::cout << "wrote " << out << " (N=" << n << ", links=" << model.Z.sum() / 2
            << ", seed=" << used << ")\n";
  return 0;
}

int cmd_make_logistic(const std::string& out, int n, std::uint64_t seed) {
  const SyntheticLogisticData data = generate_logistic_data(n, seed);
  std::ostringstream os;
  for (std::size_t j = 0; j < data.columns.size(); ++j)
    os << (j ? "," : "") << data.columns[j];
  os << '\n';
  for (Eigen::Index i = 0; i < data.rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.rows.cols(); ++j)
      os << (j ? "," : "") << io::format_double(data.rows(i, j));
    os << '\n';
  }
  io::write_text_file(out, os.str());
  std::cout << "wrote " << out << " (" << data.rows.rows() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian mixture boosting for variational inference"};
  app.require_subcommand(1);

  std::string spec_path, checkpoint_path, mixture_path, box_text;
  std::string out, truth_out;
  int extra_T = 0, resolution = 0, n = 0, min_links = 2;
  int n_sensors = 11, n_rows = 53;
  double range = 0.3, sigma = 0.02;
  std::uint64_t seed = 1;
  std::string grid_out = "grid.csv", sample_out = "samples.csv";
  std::string sensor_box = "-1,2,-1,2";

  auto* run = app.add_subcommand("run", "Run a boosting experiment");
  run->add_option("--spec", spec_path, "Experiment spec JSON")->required();

  auto* resume = app.add_subcommand("resume", "Continue from a checkpoint");
  resume->add_option("--checkpoint", checkpoint_path, "checkpoint.json from a run")
      ->required();
  resume->add_option("--spec", spec_path, "Experiment spec JSON")->required();
  resume->add_option("--extra-T", extra_T, "Additional iterations")->required();

  auto* eval = app.add_subcommand("eval", "Score a mixture against the oracle");
  eval->add_option("--mixture", mixture_path, "mixture.json or checkpoint.json")
      ->required();
  eval->add_option("--spec", spec_path, "Experiment spec JSON (oracle required)")
      ->required();

  auto* grid = app.add_subcommand("grid", "Export a log-density grid CSV");
  grid->add_option("--mixture", mixture_path, "mixture.json")->required();
  grid->add_option("--box", box_text, "lo1,hi1[,lo2,hi2]")->required();
  grid->add_option("--resolution", resolution, "Points per axis")->required();
  grid->add_option("--out", grid_out, "Output CSV path")->capture_default_str();

  auto* sample = app.add_subcommand("sample", "Draw samples from a mixture");
  sample->add_option("--mixture", mixture_path, "mixture.json")->required();
  sample->add_option("--n", n, "Number of draws")->required();
  sample->add_option("--seed", seed, "RNG seed");
  sample->add_option("--out", sample_out, "Output CSV path")->capture_default_str();

  auto* mksensor = app.add_subcommand("make-sensor",
                                      "Generate a sensor localization instance");
  mksensor->add_option("--out", out, "Model JSON path")->required();
  mksensor->add_option("--truth-out", truth_out, "True positions JSON path");
  mksensor->add_option("--n", n_sensors, "Total sensors, anchors included")
      ->capture_default_str();
  mksensor->add_option("--range", range, "Link range R")->capture_default_str();
  mksensor->add_option("--sigma", sigma, "Distance noise sd")
      ->capture_default_str();
  mksensor->add_option("--seed", seed, "Starting seed");
  mksensor->add_option("--min-links", min_links, "Minimum links per unknown")
      ->capture_default_str();
  mksensor->add_option("--box", sensor_box, "Prior box lo1,hi1,lo2,hi2")
      ->capture_default_str();

  auto* mklog = app.add_subcommand("make-logistic",
                                   "Generate a synthetic logistic dataset");
  mklog->add_option("--out", out, "CSV path")->required();
  mklog->add_option("--n", n_rows, "Number of rows")->capture_default_str();
  mklog->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run) return cmd_run(spec_path);
    if (*resume) return cmd_resume(checkpoint_path, spec_path, extra_T);
    if (*eval) return cmd_eval(mixture_path, spec_path);
    if (*grid) return cmd_grid(mixture_path, box_text, resolution, grid_out);
    if (*sample) return cmd_sample(mixture_path, n, seed, sample_out);
    if (*mksensor)
      return cmd_make_sensor(out, truth_out, n_sensors, range, sigma, seed,
                             min_links, sensor_box);
    if (*mklog) return cmd_make_logistic(out, n_rows, seed);
  } catch (const CheckpointError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
