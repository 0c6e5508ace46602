#include "bvi/serialize.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace bvi::io {

namespace {

double require_num(const json& j, const std::string& field) {
  if (!j.is_number())
    throw std::invalid_argument(field + " must be a number");
  return j.get<double>();
}

double get_num(const json& j, const std::string& key, const std::string& path,
               double def) {
  if (!j.contains(key)) return def;
  return require_num(j.at(key), path + "." + key);
}

int get_int(const json& j, const std::string& key, const std::string& path,
            int def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw std::invalid_argument(path + "." + key + " must be an integer");
  return v.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& key,
                      const std::string& path, std::uint64_t def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer())
    throw std::invalid_argument(path + "." + key + " must be an integer");
  return v.get<std::uint64_t>();
}

std::string get_str(const json& j, const std::string& key,
                    const std::string& path, const std::string& def) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_string())
    throw std::invalid_argument(path + "." + key + " must be a string");
  return v.get<std::string>();
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json vec_to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const json& j, const char* what) {
  if (!j.is_array())
    throw std::invalid_argument(std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  Eigen::Index i = 0;
  for (const auto& e : j) v[i++] = require_num(e, what);
  return v;
}

json mat_to_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(what) +
                                " must be a non-empty array of rows");
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  Eigen::Index cols = -1;
  Mat m;
  Eigen::Index r = 0;
  for (const auto& row : j) {
    if (!row.is_array())
      throw std::invalid_argument(std::string(what) + " rows must be arrays");
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(row.size());
      m.resize(rows, cols);
    } else if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw std::invalid_argument(std::string(what) + " rows have ragged lengths");
    }
    Eigen::Index c = 0;
    for (const auto& e : row) m(r, c++) = require_num(e, what);
    ++r;
  }
  return m;
}

void write_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("parse error in " + path + ": " + e.what());
  }
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  return std::string(buf, 16);
}

json mixture_to_json(const Mixture& q) {
  json comps = json::array();
  for (const auto& c : q.components())
    comps.push_back(json{{"mean", vec_to_json(c.mean())},
                         {"cov", mat_to_json(c.cov())}});
  return json{{"weights", q.weights()}, {"components", std::move(comps)}};
}

Mixture mixture_from_json(const json& j) {
  if (!j.is_object() || !j.contains("weights") || !j.contains("components"))
    throw std::invalid_argument("mixture JSON needs weights and components");
  const json& jw = j.at("weights");
  if (!jw.is_array())
    throw std::invalid_argument("mixture weights must be an array");
  std::vector<double> w;
  for (const auto& e : jw) w.push_back(require_num(e, "mixture weight"));
  std::vector<GaussianComponent> comps;
  for (const auto& jc : j.at("components")) {
    comps.emplace_back(vec_from_json(jc.at("mean"), "component mean"),
                       mat_from_json(jc.at("cov"), "component cov"));
  }
  return Mixture(std::move(w), std::move(comps));
}

namespace {

json estimate_json(bool ok, double value, double se, int n) {
  if (!ok) return nullptr;
  return json{{"value", value}, {"std_error", se}, {"n", n}};
}

std::vector<SgdTraceRow> decimate(const std::vector<SgdTraceRow>& rows) {
  if (rows.size() <= 101) return rows;
  const std::size_t stride = (rows.size() + 99) / 100;
  std::vector<SgdTraceRow> out;
  for (std::size_t i = 0; i < rows.size(); i += stride) out.push_back(rows[i]);
  if (out.back().k != rows.back().k) out.push_back(rows.back());
  return out;
}

}  // namespace

json trace_to_json(const BoostTrace& trace, const std::string& config_hash) {
  json iters = json::array();
  for (const auto& r : trace.iterations) {
    json comp = nullptr;
    if (r.has_component)
      comp = json{{"mean", vec_to_json(r.comp_mean)},
                  {"cov", mat_to_json(r.comp_cov)}};
    json rows = json::array();
    for (const auto& row : decimate(r.sgd_trace))
      rows.push_back(json::array({row.k, row.alpha, row.grad}));
    iters.push_back(json{{"t", r.t},
                         {"alpha", r.alpha},
                         {"component", std::move(comp)},
                         {"residual_value", r.residual_value},
                         {"peak_converged", r.peak_converged},
                         {"hessian_repaired", r.hessian_repaired},
                         {"sgd_iters", r.sgd_iters},
                         {"sgd_converged", r.sgd_converged},
                         {"pruned", r.pruned},
                         {"elbo", estimate_json(r.elbo_ok, r.elbo, r.elbo_se,
                                                r.elbo_n)},
                         {"note", r.note},
                         {"sgd_trace", std::move(rows)}});
  }
  return json{{"config_hash", config_hash},
              {"status", trace.status},
              {"init_elbo",
               estimate_json(trace.init_elbo_ok, trace.init_elbo,
                             trace.init_elbo_se, trace.init_elbo_n)},
              {"iterations", std::move(iters)}};
}

BoostTrace trace_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("trace JSON must be an object");
  BoostTrace t;
  t.status = get_str(j, "status", "trace", "completed");
  const json& init = j.at("init_elbo");
  if (init.is_null()) {
    t.init_elbo_ok = false;
    t.init_elbo = std::numeric_limits<double>::quiet_NaN();
    t.init_elbo_se = std::numeric_limits<double>::quiet_NaN();
  } else {
    t.init_elbo_ok = true;
    t.init_elbo = require_num(init.at("value"), "init_elbo.value");
    t.init_elbo_se = require_num(init.at("std_error"), "init_elbo.std_error");
    t.init_elbo_n = get_int(init, "n", "init_elbo", 0);
  }
  for (const auto& ji : j.at("iterations")) {
    IterationRecord r;
    r.t = get_int(ji, "t", "iteration", 0);
    r.alpha = require_num(ji.at("alpha"), "iteration.alpha");
    const json& comp = ji.at("component");
    if (!comp.is_null()) {
      r.has_component = true;
      r.comp_mean = vec_from_json(comp.at("mean"), "iteration component mean");
      r.comp_cov = mat_from_json(comp.at("cov"), "iteration component cov");
    }
    r.residual_value = get_num(ji, "residual_value", "iteration", 0.0);
    r.peak_converged = ji.value("peak_converged", false);
    r.hessian_repaired = ji.value("hessian_repaired", false);
    r.sgd_iters = get_int(ji, "sgd_iters", "iteration", 0);
    r.sgd_converged = ji.value("sgd_converged", false);
    r.pruned = ji.value("pruned", false);
    const json& e = ji.at("elbo");
    if (e.is_null()) {
      r.elbo_ok = false;
      r.elbo = std::numeric_limits<double>::quiet_NaN();
      r.elbo_se = std::numeric_limits<double>::quiet_NaN();
    } else {
      r.elbo_ok = true;
      r.elbo = require_num(e.at("value"), "iteration.elbo.value");
      r.elbo_se = require_num(e.at("std_error"), "iteration.elbo.std_error");
      r.elbo_n = get_int(e, "n", "iteration.elbo", 0);
    }
    r.note = get_str(ji, "note", "iteration", "");
    for (const auto& row : ji.at("sgd_trace")) {
      if (!row.is_array() || row.size() != 3)
        throw std::invalid_argument("iteration.sgd_trace rows must be triples");
      r.sgd_trace.push_back(SgdTraceRow{row[0].get<int>(),
                                        require_num(row[1], "sgd_trace.alpha"),
                                        require_num(row[2], "sgd_trace.grad")});
    }
    t.iterations.push_back(std::move(r));
  }
  return t;
}

json checkpoint_to_json(const Checkpoint& c) {
  return json{{"config_hash", c.config_hash},
              {"mixture", mixture_to_json(c.mixture)},
              {"trace", trace_to_json(c.trace, c.config_hash)}};
}

Checkpoint checkpoint_from_json(const json& j) {
  if (!j.is_object() || !j.contains("config_hash") || !j.contains("mixture") ||
      !j.contains("trace"))
    throw CheckpointError("checkpoint JSON needs config_hash, mixture, trace");
  return Checkpoint{j.at("config_hash").get<std::string>(),
                    mixture_from_json(j.at("mixture")),
                    trace_from_json(j.at("trace"))};
}

json sensor_to_json(const SensorModel& m) {
  json z = json::array();
  for (int i = 0; i < m.num_sensors; ++i) {
    json row = json::array();
    for (int j2 = 0; j2 < m.num_sensors; ++j2) row.push_back(m.Z(i, j2));
    z.push_back(std::move(row));
  }
  return json{{"anchors", mat_to_json(m.anchors)}, {"Z", std::move(z)},
              {"Y", mat_to_json(m.Y)},             {"R", m.range},
              {"sigma", m.noise_sd},               {"box", mat_to_json(m.box)}};
}

SensorModel sensor_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("sensor JSON must be an object");
  SensorModel m;
  m.anchors = mat_from_json(j.at("anchors"), "sensor anchors");
  const Mat zj = mat_from_json(j.at("Z"), "sensor Z");
  m.num_sensors = static_cast<int>(zj.rows());
  m.Z = zj.cast<int>();
  m.Y = mat_from_json(j.at("Y"), "sensor Y");
  m.range = require_num(j.at("R"), "sensor R");
  m.noise_sd = require_num(j.at("sigma"), "sensor sigma");
  m.box = mat_from_json(j.at("box"), "sensor box");
  m.validate();
  return m;
}

ExperimentSpec spec_from_json(const json& j) {
  if (!j.is_object())
    throw std::invalid_argument("spec must be a JSON object");
  if (!j.contains("target"))
    throw std::invalid_argument("spec.target is required");
  const json& jt = j.at("target");
  ExperimentSpec s;
  s.selector = get_str(jt, "selector", "target", "");
  if (s.selector.empty())
    throw std::invalid_argument("target.selector is required");
  s.banana_curvature = get_num(jt, "curvature", "target", 0.1);
  s.sensor_file = get_str(jt, "file", "target", "");
  s.csv_file = get_str(jt, "csv", "target", "");
  s.label_column = get_str(jt, "label_column", "target", "");
  s.log_shift = get_num(jt, "log_shift", "target", 0.0);
  if (jt.contains("weights") || jt.contains("means") || jt.contains("covs")) {
    if (!(jt.contains("weights") && jt.contains("means") && jt.contains("covs")))
      throw std::invalid_argument(
          "target: weights, means, covs must be given together");
    s.has_gmm_params = true;
    for (const auto& e : jt.at("weights"))
      s.gmm_weights.push_back(require_num(e, "target.weights"));
    for (const auto& e : jt.at("means"))
      s.gmm_means.push_back(vec_from_json(e, "target.means"));
    for (const auto& e : jt.at("covs"))
      s.gmm_covs.push_back(mat_from_json(e, "target.covs"));
  }

  if (j.contains("run")) {
    const json& jr = j.at("run");
    s.run.T = get_int(jr, "T", "run", s.run.T);
    if (jr.contains("init_mean"))
      s.run.init_mean = vec_from_json(jr.at("init_mean"), "run.init_mean");
    s.run.init_cov_scale =
        get_num(jr, "init_cov_scale", "run", s.run.init_cov_scale);
    s.run.elbo_eval_n = get_int(jr, "elbo_eval_n", "run", s.run.elbo_eval_n);
    s.run.master_seed = get_u64(jr, "master_seed", "run", s.run.master_seed);
    s.run.prune_threshold =
        get_num(jr, "prune_threshold", "run", s.run.prune_threshold);
    if (jr.contains("sgd")) {
      const json& js = jr.at("sgd");
      s.run.sgd.n = get_int(js, "n", "run.sgd", s.run.sgd.n);
      s.run.sgd.b = get_num(js, "b", "run.sgd", s.run.sgd.b);
      s.run.sgd.eps = get_num(js, "eps", "run.sgd", s.run.sgd.eps);
      s.run.sgd.max_iters =
          get_int(js, "max_iters", "run.sgd", s.run.sgd.max_iters);
    }
    if (jr.contains("search")) {
      const json& jc = jr.at("search");
      s.run.search.lambda = get_num(jc, "lambda", "run.search", s.run.search.lambda);
      s.run.search.stab_a = get_num(jc, "stab_a", "run.search", s.run.search.stab_a);
      s.run.search.fd_rel_step =
          get_num(jc, "fd_rel_step", "run.search", s.run.search.fd_rel_step);
      const std::string mode = get_str(jc, "hessian_mode", "run.search", "dense");
      if (mode == "dense")
        s.run.search.hessian_mode = HessianMode::dense;
      else if (mode == "diagonal")
        s.run.search.hessian_mode = HessianMode::diagonal;
      else
        throw std::invalid_argument(
            "run.search.hessian_mode must be dense or diagonal");
      s.run.search.restarts =
          get_int(jc, "restarts", "run.search", s.run.search.restarts);
      s.run.search.max_evals =
          get_int(jc, "max_evals", "run.search", s.run.search.max_evals);
      s.run.search.grad_tol =
          get_num(jc, "grad_tol", "run.search", s.run.search.grad_tol);
    }
  }

  if (j.contains("oracle")) {
    const json& jo = j.at("oracle");
    s.oracle.kind = get_str(jo, "kind", "oracle", "none");
    if (s.oracle.kind != "none" && s.oracle.kind != "quadrature" &&
        s.oracle.kind != "mh")
      throw std::invalid_argument("oracle.kind must be none, quadrature, or mh");
    if (jo.contains("box"))
      s.oracle.box = mat_from_json(jo.at("box"), "oracle.box");
    s.oracle.grid_points =
        get_int(jo, "grid_points", "oracle", s.oracle.grid_points);
    s.oracle.mh_samples = get_int(jo, "mh_samples", "oracle", s.oracle.mh_samples);
    s.oracle.mh_burn_in = get_int(jo, "mh_burn_in", "oracle", s.oracle.mh_burn_in);
    s.oracle.mh_step = get_num(jo, "mh_step", "oracle", s.oracle.mh_step);
    s.oracle.mh_seed = get_u64(jo, "mh_seed", "oracle", s.oracle.mh_seed);
    if (jo.contains("mh_start"))
      s.oracle.mh_start = vec_from_json(jo.at("mh_start"), "oracle.mh_start");
  }
  s.output_dir = get_str(j, "output_dir", "spec", ".");
  return s;
}

json spec_canonical_json(const ExperimentSpec& s) {
  json jt{{"selector", s.selector}, {"log_shift", s.log_shift}};
  if (s.selector == "banana") jt["curvature"] = s.banana_curvature;
  if (!s.sensor_file.empty()) jt["file"] = s.sensor_file;
  if (!s.csv_file.empty()) jt["csv"] = s.csv_file;
  if (!s.label_column.empty()) jt["label_column"] = s.label_column;
  if (s.has_gmm_params) {
    jt["weights"] = s.gmm_weights;
    json means = json::array(), covs = json::array();
    for (const auto& m : s.gmm_means) means.push_back(vec_to_json(m));
    for (const auto& c : s.gmm_covs) covs.push_back(mat_to_json(c));
    jt["means"] = std::move(means);
    jt["covs"] = std::move(covs);
  }
  // T is a stopping time, not an algorithm parameter: per-iteration seeds
  // derive from (master_seed, t), so runs of different lengths share a
  // trajectory.  Keeping T out of the hash is what lets resume extend a run.
  const RunConfig& r = s.run;
  json jr{{"init_mean", vec_to_json(r.init_mean)},
          {"init_cov_scale", r.init_cov_scale},
          {"elbo_eval_n", r.elbo_eval_n},
          {"master_seed", r.master_seed},
          {"prune_threshold", r.prune_threshold},
          {"sgd", json{{"n", r.sgd.n},
                       {"b", r.sgd.b},
                       {"eps", r.sgd.eps},
                       {"max_iters", r.sgd.max_iters}}},
          {"search",
           json{{"lambda", r.search.lambda},
                {"stab_a", r.search.stab_a},
                {"fd_rel_step", r.search.fd_rel_step},
                {"hessian_mode",
                 r.search.hessian_mode == HessianMode::dense ? "dense"
                                                             : "diagonal"},
                {"restarts", r.search.restarts},
                {"max_evals", r.search.max_evals},
                {"grad_tol", r.search.grad_tol}}}};
  return json{{"target", std::move(jt)}, {"run", std::move(jr)}};
}

std::string spec_config_hash(const ExperimentSpec& spec) {
  return hash_hex(fnv1a(spec_canonical_json(spec).dump()));
}

TargetDensity build_target(const ExperimentSpec& spec) {
  TargetDensity t;
  if (spec.selector == "cauchy") {
    t = make_cauchy();
  } else if (spec.selector == "banana") {
    t = make_banana(spec.banana_curvature);
  } else if (spec.selector == "gmm1d" || spec.selector == "gmm2d" ||
             spec.selector == "gmm") {
    if (spec.has_gmm_params)
      t = make_gmm(spec.gmm_weights, spec.gmm_means, spec.gmm_covs);
    else if (spec.selector == "gmm1d")
      t = default_gmm1d();
    else if (spec.selector == "gmm2d")
      t = default_gmm2d();
    else
      throw std::invalid_argument(
          "target: selector gmm requires weights, means, covs");
  } else if (spec.selector == "sensor") {
    if (spec.sensor_file.empty())
      throw std::invalid_argument("target.file is required for sensor");
    t = make_sensor(sensor_from_json(read_json_file(spec.sensor_file)));
  } else if (spec.selector == "logistic" || spec.selector == "user-csv") {
    std::string csv = spec.csv_file;
    std::string label = spec.label_column;
    if (spec.selector == "logistic") {
      if (csv.empty()) csv = "data/nodal_synthetic.csv";
      if (label.empty()) label = "r";
    } else if (csv.empty()) {
      throw std::invalid_argument("target.csv is required for user-csv");
    }
    t = make_logistic(load_csv_dataset(csv, label));
  } else {
    throw std::invalid_argument("target.selector unknown: " + spec.selector);
  }
  if (spec.log_shift != 0.0) t = with_log_shift(std::move(t), spec.log_shift);
  return t;
}

ReferencePosterior build_reference(const ExperimentSpec& spec,
                                   const TargetDensity& target) {
  if (spec.oracle.kind == "quadrature") {
    if (spec.oracle.box.size() == 0)
      throw std::invalid_argument("oracle.box is required for quadrature");
    return quadrature_reference(target, spec.oracle.box,
                                spec.oracle.grid_points);
  }
  if (spec.oracle.kind == "mh") {
    Vec start = spec.oracle.mh_start;
    if (start.size() == 0)
      start = spec.run.init_mean.size() ? spec.run.init_mean
                                        : Vec::Zero(target.dim);
    return mh_reference(target, spec.oracle.mh_samples,
                        Vec::Constant(target.dim, spec.oracle.mh_step),
                        spec.oracle.mh_burn_in, spec.oracle.mh_seed, start);
  }
  throw std::invalid_argument("oracle.kind must be quadrature or mh for eval");
}

void write_samples_csv(const std::string& path, const std::vector<Vec>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  if (rows.empty()) throw std::invalid_argument("write_samples_csv: no rows");
  const Eigen::Index d = rows.front().size();
  for (Eigen::Index j = 0; j < d; ++j)
    out << (j ? "," : "") << "theta" << (j + 1);
  out << '\n';
  for (const Vec& r : rows) {
    for (Eigen::Index j = 0; j < d; ++j)
      out << (j ? "," : "") << format_double(r[j]);
    out << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_grid_csv(const std::string& path, const Mixture& q, const Mat& box,
                    int resolution) {
  if (resolution < 2)
    throw std::invalid_argument("grid resolution must be >= 2");
  const int d = q.dim();
  if (d > 2) throw std::invalid_argument("grid export needs dimension <= 2");
  if (box.rows() != d || box.cols() != 2)
    throw std::invalid_argument("grid box must be dim x 2");
  for (int k = 0; k < d; ++k)
    if (!(box(k, 1) > box(k, 0)))
      throw std::invalid_argument("grid box rows must be (lo, hi)");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  auto node = [&](int k, int i) {
    return box(k, 0) + (box(k, 1) - box(k, 0)) * i / (resolution - 1);
  };
  if (d == 1) {
    out << "x,logq\n";
    Vec p(1);
    for (int i = 0; i < resolution; ++i) {
      p[0] = node(0, i);
      out << format_double(p[0]) << ',' << format_double(q.log_pdf(p)) << '\n';
    }
  } else {
    out << "x,y,logq\n";
    Vec p(2);
    for (int i = 0; i < resolution; ++i)
      for (int j = 0; j < resolution; ++j) {
        p[0] = node(0, i);
        p[1] = node(1, j);
        out << format_double(p[0]) << ',' << format_double(p[1]) << ','
            << format_double(q.log_pdf(p)) << '\n';
      }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_timings_csv(const std::string& path, const BoostTrace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t,wall_ms,cum_wall_ms\n";
  double cum = 0.0;
  for (const auto& r : trace.iterations) {
    cum += r.wall_ms;
    out << r.t << ',' << format_double(r.wall_ms) << ',' << format_double(cum)
        << '\n';
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace bvi::io
