#include "bvi/targets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace bvi {

TargetDensity with_log_shift(TargetDensity base, double shift) {
  TargetDensity out = base;
  auto inner = base.log_f;
  out.log_f = [inner, shift](const Vec& x) { return inner(x) + shift; };
  if (base.log_normalizer) out.log_normalizer = *base.log_normalizer + shift;
  if (base.grad_log_f) out.grad_log_f = base.grad_log_f;
  return out;
}

TargetDensity make_cauchy() {
  TargetDensity t;
  t.dim = 1;
  t.name = "cauchy";
  t.log_f = [](const Vec& x) {
    check_dim(1, x.size(), "cauchy");
    const double h = x[0] / 2.0;
    return -std::log1p(h * h);
  };
  t.log_normalizer = std::log(2.0 * M_PI);
  return t;
}

TargetDensity make_gmm(std::vector<double> weights, std::vector<Vec> means,
                       std::vector<Mat> covs) {
  if (means.size() != covs.size() || means.size() != weights.size())
    throw std::invalid_argument("make_gmm: mismatched parameter list lengths");
  std::vector<GaussianComponent> comps;
  comps.reserve(means.size());
  for (std::size_t i = 0; i < means.size(); ++i)
    comps.emplace_back(means[i], covs[i]);
  auto mix = std::make_shared<Mixture>(std::move(weights), std::move(comps));
  TargetDensity t;
  t.dim = mix->dim();
  t.name = "gmm";
  t.log_f = [mix](const Vec& x) { return mix->log_pdf(x); };
  t.log_normalizer = 0.0;
  return t;
}

TargetDensity make_banana(double curvature) {
  TargetDensity t;
  t.dim = 2;
  t.name = "banana";
  const double b = curvature;
  t.log_f = [b](const Vec& x) {
    check_dim(2, x.size(), "banana");
    const double u = x[1] + b * x[0] * x[0] - 100.0 * b;
    return -x[0] * x[0] / 200.0 - u * u / 2.0;
  };
  // The shear (t1, t2) -> (t1, t2 + b*t1^2 - 100b) preserves volume, so the
  // normalizer equals that of N(0, diag(100, 1)): 2*pi*10.
  t.log_normalizer = std::log(20.0 * M_PI);
  return t;
}

void SensorModel::validate() const {
  if (num_sensors < 4)
    throw std::invalid_argument("SensorModel: need at least 4 sensors");
  if (anchors.rows() != 3 || anchors.cols() != 2)
    throw std::invalid_argument("SensorModel: anchors must be 3x2");
  const int n = num_sensors;
  if (Z.rows() != n || Z.cols() != n || Y.rows() != n || Y.cols() != n)
    throw std::invalid_argument("SensorModel: Z and Y must be NxN");
  if (!(range > 0.0) || !(noise_sd > 0.0))
    throw std::invalid_argument("SensorModel: range and noise_sd must be positive");
  if (box.rows() != 2 || box.cols() != 2 || box(0, 0) >= box(0, 1) ||
      box(1, 0) >= box(1, 1))
    throw std::invalid_argument("SensorModel: box rows must be (lo, hi) pairs");
  for (int i = 0; i < n; ++i) {
    if (Z(i, i) != 0)
      throw std::invalid_argument("SensorModel: Z diagonal must be zero");
    for (int j = 0; j < n; ++j) {
      if (Z(i, j) != Z(j, i) || (Z(i, j) != 0 && Z(i, j) != 1))
        throw std::invalid_argument("SensorModel: Z must be symmetric binary");
      if ((Z(i, j) == 1) != (Y(i, j) > 0.0))
        throw std::invalid_argument(
            "SensorModel: Y_ij > 0 exactly where Z_ij = 1");
    }
  }
}

TargetDensity make_sensor(SensorModel model) {
  model.validate();
  auto m = std::make_shared<SensorModel>(std::move(model));
  TargetDensity t;
  t.dim = 2 * (m->num_sensors - 3);
  t.name = "sensor";
  t.log_f = [m](const Vec& th) {
    const int n = m->num_sensors;
    check_dim(2 * (n - 3), th.size(), "sensor");
    for (int k = 3; k < n; ++k) {
      const double x = th[2 * (k - 3)], y = th[2 * (k - 3) + 1];
      if (x < m->box(0, 0) || x > m->box(0, 1) || y < m->box(1, 0) ||
          y > m->box(1, 1))
        return kNegInf;
    }
    auto pos = [&](int i) -> Eigen::Vector2d {
      if (i < 3) return m->anchors.row(i).transpose();
      return {th[2 * (i - 3)], th[2 * (i - 3) + 1]};
    };
    const double two_r2 = 2.0 * m->range * m->range;
    const double two_s2 = 2.0 * m->noise_sd * m->noise_sd;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      const Eigen::Vector2d pi = pos(i);
      for (int j = i + 1; j < n; ++j) {
        const double d2 = (pi - pos(j)).squaredNorm();
        const double e = d2 / two_r2;
        if (m->Z(i, j) == 1) {
          const double r = m->Y(i, j) - std::sqrt(d2);
          acc += -e - r * r / two_s2;
        } else {
          if (e == 0.0) return kNegInf;
          acc += std::log(-std::expm1(-e));
        }
      }
    }
    return acc;
  };
  return t;
}

namespace {

double log_sigmoid(double z) {
  if (z >= 0.0) return -std::log1p(std::exp(-z));
  return z - std::log1p(std::exp(z));
}

}  // namespace

void LogisticModel::validate() const {
  if (design.rows() == 0 || design.cols() == 0)
    throw std::invalid_argument("LogisticModel: empty design");
  if (labels.size() != design.rows())
    throw std::invalid_argument("LogisticModel: label count mismatch");
  if (!design.allFinite())
    throw std::invalid_argument("LogisticModel: NaN in design");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels[i] != 1.0 && labels[i] != -1.0)
      throw std::invalid_argument("LogisticModel: labels must be +-1");
  if (!(prior_scale > 0.0))
    throw std::invalid_argument("LogisticModel: prior_scale must be positive");
}

TargetDensity make_logistic(LogisticModel model) {
  model.validate();
  auto m = std::make_shared<LogisticModel>(std::move(model));
  TargetDensity t;
  t.dim = static_cast<int>(m->design.cols());
  t.name = "logistic";
  t.log_f = [m](const Vec& beta) {
    check_dim(static_cast<int>(m->design.cols()), beta.size(), "logistic");
    const Vec z = m->design * beta;
    double acc = -beta.squaredNorm() / (2.0 * m->prior_scale * m->prior_scale);
    for (Eigen::Index i = 0; i < z.size(); ++i)
      acc += log_sigmoid(m->labels[i] * z[i]);
    return acc;
  };
  return t;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
      cell.pop_back();
    std::size_t start = 0;
    while (start < cell.size() && cell[start] == ' ') ++start;
    out.push_back(cell.substr(start));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_cell(const std::string& s, int row, const std::string& col) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last)
    throw std::runtime_error("CSV parse failure at row " + std::to_string(row) +
                             ", column '" + col + "': '" + s + "'");
  return v;
}

}  // namespace

LogisticModel load_csv_dataset(const std::string& path,
                               const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("empty dataset: " + path);
  const auto header = split_csv_line(line);
  if (header.size() < 2)
    throw std::runtime_error("dataset needs a label and at least one predictor");

  std::size_t label_idx = 0;
  if (!label_column.empty()) {
    auto it = std::find(header.begin(), header.end(), label_column);
    if (it == header.end())
      throw std::runtime_error("label column '" + label_column +
                               "' not present in " + path);
    label_idx = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("ragged row " + std::to_string(lineno) + " in " +
                               path + ": " + std::to_string(cells.size()) +
                               " cells, expected " +
                               std::to_string(header.size()));
    std::vector<double> vals;
    vals.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
      vals.push_back(parse_cell(cells[c], lineno, header[c]));
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::runtime_error("dataset has no data rows: " + path);

  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size());  // predictors + intercept
  LogisticModel m;
  m.design.resize(n, p);
  m.labels.resize(n);
  for (int i = 0; i < n; ++i) {
    const double raw = rows[i][label_idx];
    if (raw == 0.0 || raw == -1.0)
      m.labels[i] = -1.0;
    else if (raw == 1.0)
      m.labels[i] = 1.0;
    else
      throw std::runtime_error("non-binary label at row " + std::to_string(i + 2) +
                               ": " + std::to_string(raw));
    m.design(i, 0) = 1.0;
    int c = 1;
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      if (j == label_idx) continue;
      m.design(i, c++) = rows[i][j];
    }
  }
  m.validate();
  return m;
}

Mixture default_gmm1d_mixture() {
  const std::vector<double> w{0.3, 0.25, 0.25, 0.2};
  const std::vector<double> mu{-6.0, -2.5, 1.5, 5.0};
  const std::vector<double> sd{0.8, 0.6, 0.9, 0.7};
  std::vector<GaussianComponent> comps;
  for (int i = 0; i < 4; ++i) {
    Vec m(1);
    m << mu[i];
    Mat c(1, 1);
    c << sd[i] * sd[i];
    comps.emplace_back(m, c);
  }
  return Mixture(w, std::move(comps));
}

Mixture default_gmm2d_mixture() {
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::normal_distribution<double> n01;
  std::vector<double> w;
  std::vector<GaussianComponent> comps;
  for (int i = 0; i < 5; ++i) {
    Vec m(2);
    m << -4.0 + 8.0 * u01(rng), -4.0 + 8.0 * u01(rng);
    Mat a(2, 2);
    a << 0.7 * n01(rng), 0.7 * n01(rng), 0.7 * n01(rng), 0.7 * n01(rng);
    Mat c = a * a.transpose() + 0.4 * Mat::Identity(2, 2);
    comps.emplace_back(m, c);
    w.push_back(0.5 + u01(rng));
  }
  return Mixture(std::move(w), std::move(comps));
}

namespace {

TargetDensity mixture_target(Mixture mix, std::string name) {
  auto m = std::make_shared<Mixture>(std::move(mix));
  TargetDensity t;
  t.dim = m->dim();
  t.name = std::move(name);
  t.log_f = [m](const Vec& x) { return m->log_pdf(x); };
  t.log_normalizer = 0.0;
  return t;
}

}  // namespace

TargetDensity default_gmm1d() {
  return mixture_target(default_gmm1d_mixture(), "gmm1d");
}

TargetDensity default_gmm2d() {
  return mixture_target(default_gmm2d_mixture(), "gmm2d");
}

std::uint64_t generate_sensor_model(int num_sensors, double range,
                                    double noise_sd, const Mat& box,
                                    std::uint64_t seed, int min_links,
                                    SensorModel& model, Mat& truth) {
  if (num_sensors < 4)
    throw std::invalid_argument("generate_sensor_model: need at least 4 sensors");
  const int n = num_sensors;
  for (std::uint64_t candidate = seed; candidate < seed + 1000; ++candidate) {
    std::mt19937_64 rng(candidate);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::normal_distribution<double> n01;
    Mat pos(n, 2);
    for (int i = 0; i < n; ++i) {
      pos(i, 0) = u01(rng);
      pos(i, 1) = u01(rng);
    }
    Eigen::MatrixXi z = Eigen::MatrixXi::Zero(n, n);
    Mat y = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double dist = (pos.row(i) - pos.row(j)).norm();
        const double p_link = std::exp(-dist * dist / (2.0 * range * range));
        if (u01(rng) < p_link) {
          z(i, j) = z(j, i) = 1;
          const double obs = std::max(dist + noise_sd * n01(rng), 1e-6);
          y(i, j) = y(j, i) = obs;
        }
      }
    }
    bool connected = true;
    for (int i = 3; i < n && connected; ++i)
      if (z.row(i).sum() < min_links) connected = false;
    if (!connected) continue;

    model.num_sensors = n;
    model.range = range;
    model.noise_sd = noise_sd;
    model.anchors = pos.topRows(3);
    model.Z = std::move(z);
    model.Y = std::move(y);
    model.box = box;
    model.validate();
    truth = std::move(pos);
    return candidate;
  }
  throw std::runtime_error(
      "generate_sensor_model: no connected layout within 1000 seeds");
}

SyntheticLogisticData generate_logistic_data(int n, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("generate_logistic_data: n too small");
  SyntheticLogisticData d;
  d.columns = {"r", "aged", "stage", "grade", "xray", "acid"};
  d.rows.resize(n, 6);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  // Marginal rates for the binary predictors; grade is coupled to stage so the
  // posterior has visible off-diagonal covariance.
  const double rate_aged = 0.45, rate_stage = 0.50, rate_xray = 0.40,
               rate_acid = 0.55;
  const double beta_true[6] = {-2.4, 0.6, 1.1, 0.7, 1.4, 1.0};
  for (int i = 0; i < n; ++i) {
    const double aged = u01(rng) < rate_aged ? 1.0 : 0.0;
    const double stage = u01(rng) < rate_stage ? 1.0 : 0.0;
    const double grade = u01(rng) < (stage > 0.5 ? 0.65 : 0.25) ? 1.0 : 0.0;
    const double xray = u01(rng) < rate_xray ? 1.0 : 0.0;
    const double acid = u01(rng) < rate_acid ? 1.0 : 0.0;
    const double lin = beta_true[0] + beta_true[1] * aged + beta_true[2] * stage +
                       beta_true[3] * grade + beta_true[4] * xray +
                       beta_true[5] * acid;
    const double label = u01(rng) < 1.0 / (1.0 + std::exp(-lin)) ? 1.0 : 0.0;
    d.rows.row(i) << label, aged, stage, grade, xray, acid;
  }
  return d;
}

}  // namespace bvi
