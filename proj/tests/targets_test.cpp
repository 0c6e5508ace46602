#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "bvi/finite_diff.hpp"
#include "bvi/targets.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bvi;

namespace {

std::filesystem::path temp_file(const std::string& name,
                                const std::string& content) {
  auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << content;
  return p;
}

// FD error halves as O(h^2): the h/2 estimate must sit much closer to the
// h/4 estimate than the h one does.
void check_richardson(const TargetDensity& t, const Vec& x) {
  const double h = 1e-3;
  const Vec g1 = fd_gradient(t.log_f, x, h);
  const Vec g2 = fd_gradient(t.log_f, x, h / 2.0);
  const Vec g4 = fd_gradient(t.log_f, x, h / 4.0);
  CHECK((g2 - g4).norm() <= 0.35 * (g1 - g4).norm() + 1e-7);
}

}  // namespace

TEST_CASE("heavy-tailed scalar target pins its density and normalizer") {
  TargetDensity t = make_cauchy();
  CHECK(t.dim == 1);
  CHECK(t.log_f(Vec::Zero(1)) == 0.0);
  CHECK(t.log_f(Vec::Constant(1, 2.0)) ==
        doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  REQUIRE(t.log_normalizer.has_value());
  CHECK(*t.log_normalizer == doctest::Approx(std::log(2.0 * M_PI)).epsilon(1e-15));

  // Piecewise Simpson out to +-1e4; the truncated tail mass is ~8e-4.
  auto f = [&](double x) { return std::exp(t.log_f(Vec::Constant(1, x))); };
  const double mass = testsup::simpson(f, -100.0, 100.0, 40000) +
                      testsup::simpson(f, 100.0, 1e4, 200000) +
                      testsup::simpson(f, -1e4, -100.0, 200000);
  CHECK(std::abs(mass - 2.0 * M_PI) < 1e-3);
}

TEST_CASE("single-component mixture target equals the Gaussian density") {
  Vec m = Vec::Constant(1, 1.5);
  Mat c = Mat::Constant(1, 1, 0.8);
  TargetDensity t = make_gmm({1.0}, {m}, {c});
  GaussianComponent g(m, c);
  for (double x : {-1.0, 1.5, 4.0})
    CHECK(t.log_f(Vec::Constant(1, x)) ==
          doctest::Approx(g.log_pdf(Vec::Constant(1, x))).epsilon(1e-15));
  CHECK(*t.log_normalizer == 0.0);
}

TEST_CASE("make_gmm rejects mismatched parameter lists") {
  Vec m = Vec::Zero(1);
  Mat c = Mat::Identity(1, 1);
  CHECK_THROWS_AS(make_gmm({0.5, 0.5}, {m}, {c}), std::invalid_argument);
  CHECK_THROWS_AS(make_gmm({-1.0}, {m}, {c}), std::invalid_argument);
}

TEST_CASE("four-mode benchmark density has its local maxima where expected") {
  TargetDensity t = default_gmm1d();
  const int n = 4001;
  const double lo = -10.0, hi = 9.0;
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i)
    vals[i] = t.log_f(Vec::Constant(1, lo + (hi - lo) * i / (n - 1)));
  std::vector<double> peaks;
  for (int i = 1; i + 1 < n; ++i)
    if (vals[i] > vals[i - 1] && vals[i] > vals[i + 1])
      peaks.push_back(lo + (hi - lo) * i / (n - 1));
  CHECK(peaks.size() >= 2);
  // The four modes sit near the component means of the fixed instance.
  REQUIRE(peaks.size() == 4);
  const double expect[4] = {-6.0, -2.5, 1.5, 5.0};
  for (int j = 0; j < 4; ++j) CHECK(std::abs(peaks[j] - expect[j]) < 0.1);
}

TEST_CASE("five-component 2D benchmark integrates to one") {
  TargetDensity t = default_gmm2d();
  auto f = [&](double x, double y) {
    Vec p(2);
    p << x, y;
    return std::exp(t.log_f(p));
  };
  const double mass = testsup::simpson2(f, -20.0, 20.0, -20.0, 20.0, 500, 500);
  CHECK(std::abs(mass - 1.0) < 1e-3);
}

TEST_CASE("curved-ridge target pins two exponent values and its normalizer") {
  TargetDensity t = make_banana(0.1);
  Vec a(2), b(2);
  a << 0.0, 10.0;
  b << 10.0, 0.0;
  CHECK(t.log_f(a) == 0.0);
  CHECK(t.log_f(b) == doctest::Approx(-0.5).epsilon(1e-15));
  REQUIRE(t.log_normalizer.has_value());
  CHECK(*t.log_normalizer ==
        doctest::Approx(std::log(20.0 * M_PI)).epsilon(1e-15));

  auto f = [&](double x, double y) {
    Vec p(2);
    p << x, y;
    return std::exp(t.log_f(p));
  };
  // The ridge center falls with the square of the first coordinate, so the
  // box must reach far enough down to hold it out to the side truncation.
  const double mass =
      testsup::simpson2(f, -45.0, 45.0, -200.0, 40.0, 900, 1200);
  CHECK(std::abs(mass - 20.0 * M_PI) < 1e-3);
}

TEST_CASE("sensor target: coincident unlinked pair has zero density") {
  SensorModel m;
  m.num_sensors = 4;
  m.range = 0.3;
  m.noise_sd = 0.02;
  m.anchors.resize(3, 2);
  m.anchors << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  m.Z = Eigen::MatrixXi::Zero(4, 4);
  m.Y = Mat::Zero(4, 4);
  m.box.resize(2, 2);
  m.box << -1.0, 2.0, -1.0, 2.0;
  TargetDensity t = make_sensor(m);
  Vec at_anchor(2);
  at_anchor << 0.0, 0.0;  // exactly on anchor 0, Z=0 between them
  CHECK(t.log_f(at_anchor) == kNegInf);
  Vec inside(2);
  inside << 0.4, 0.6;
  CHECK(std::isfinite(t.log_f(inside)));
  Vec outside(2);
  outside << 3.0, 0.5;
  CHECK(t.log_f(outside) == kNegInf);
}

TEST_CASE("sensor target: exact-distance observation maximizes the link term") {
  SensorModel m;
  m.num_sensors = 4;
  m.range = 0.3;
  m.noise_sd = 0.02;
  m.anchors.resize(3, 2);
  m.anchors << 0.0, 0.0, 1.0, 0.0, 0.0, 1.0;
  m.Z = Eigen::MatrixXi::Zero(4, 4);
  m.Y = Mat::Zero(4, 4);
  m.box.resize(2, 2);
  m.box << -1.0, 2.0, -1.0, 2.0;
  Vec theta(2);
  theta << 0.2, 0.1;
  const double true_dist = std::hypot(0.2, 0.1);
  m.Z(0, 3) = m.Z(3, 0) = 1;
  m.Y(0, 3) = m.Y(3, 0) = true_dist;
  TargetDensity t = make_sensor(m);

  // Manual sum over all pairs: the linked pair's Gaussian factor vanishes at
  // the true distance, every unlinked pair contributes log(1 - e^{-D/2R^2}).
  const double two_r2 = 2.0 * 0.3 * 0.3;
  auto miss = [&](double d2) { return std::log(-std::expm1(-d2 / two_r2)); };
  double expect = -true_dist * true_dist / two_r2;  // linked pair, zero residual
  expect += miss(1.0) + miss(1.0) + miss(2.0);      // anchor-anchor pairs
  expect += miss(std::pow(0.8, 2) + std::pow(0.1, 2));  // anchor 1 - sensor
  expect += miss(std::pow(0.2, 2) + std::pow(0.9, 2));  // anchor 2 - sensor
  CHECK(t.log_f(theta) == doctest::Approx(expect).epsilon(1e-12));

  // Perturbing the observed distance strictly lowers the density.
  SensorModel worse = m;
  worse.Y(0, 3) = worse.Y(3, 0) = true_dist + 0.05;
  CHECK(make_sensor(worse).log_f(theta) < t.log_f(theta));
}

TEST_CASE("generated sensor instance puts the truth above random guesses") {
  SensorModel model;
  Mat truth;
  Mat box(2, 2);
  box << -1.0, 2.0, -1.0, 2.0;
  generate_sensor_model(5, 0.3, 0.02, box, 0, 2, model, truth);
  model.validate();  // symmetric Z, Y>0 iff Z=1, zero diagonal
  REQUIRE(truth.rows() == 5);

  TargetDensity t = make_sensor(model);
  Vec at_truth(4);
  at_truth << truth(3, 0), truth(3, 1), truth(4, 0), truth(4, 1);
  const double best = t.log_f(at_truth);
  CHECK(std::isfinite(best));
  std::mt19937_64 rng(1234);
  std::normal_distribution<double> jitter(0.0, 0.2);
  for (int trial = 0; trial < 100; ++trial) {
    Vec p = at_truth;
    for (int i = 0; i < 4; ++i) p[i] += jitter(rng);
    CHECK(t.log_f(p) <= best);
  }
}

TEST_CASE("generated sensor layouts honor the minimum link count") {
  SensorModel model;
  Mat truth;
  Mat box(2, 2);
  box << -1.0, 2.0, -1.0, 2.0;
  generate_sensor_model(8, 0.3, 0.02, box, 3, 2, model, truth);
  for (int k = 3; k < 8; ++k) {
    int links = 0;
    for (int j = 0; j < 8; ++j) links += model.Z(k, j);
    CHECK(links >= 2);
  }
}

TEST_CASE("logistic target at the origin is N log one-half") {
  LogisticModel m;
  m.design.resize(3, 2);
  m.design << 1.0, 0.5, 1.0, -1.0, 1.0, 2.0;
  m.labels.resize(3);
  m.labels << 1.0, -1.0, 1.0;
  TargetDensity t = make_logistic(m);
  CHECK(t.log_f(Vec::Zero(2)) ==
        doctest::Approx(3.0 * std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("logistic likelihood term vanishes for strongly correct scores") {
  LogisticModel m;
  m.design = Mat::Constant(1, 1, 1.0);
  m.labels = Vec::Constant(1, 1.0);
  TargetDensity t = make_logistic(m);
  // log f(z) + z^2/2 = log g(z) -> 0 as z grows.
  const double z = 40.0;
  CHECK(std::abs(t.log_f(Vec::Constant(1, z)) + z * z / 2.0) < 1e-15);
  // Strongly wrong scores stay finite through the stable branch.
  const double wrong = t.log_f(Vec::Constant(1, -z));
  CHECK(std::isfinite(wrong));
  CHECK(wrong + z * z / 2.0 == doctest::Approx(-40.0).epsilon(1e-12));
}

TEST_CASE("CSV loader builds the design with an intercept column") {
  auto p = temp_file("bvi_toy.csv", "y,x1,x2\n1,0.5,-1\n0,2,3\n");
  LogisticModel m = load_csv_dataset(p.string(), "y");
  CHECK(m.design.rows() == 2);
  CHECK(m.design.cols() == 3);
  CHECK(m.design(0, 0) == 1.0);
  CHECK(m.design(1, 2) == 3.0);
  CHECK(m.labels[0] == 1.0);
  CHECK(m.labels[1] == -1.0);  // 0 remapped
  std::filesystem::remove(p);
}

TEST_CASE("CSV loader accepts a plus-minus-one label column by name") {
  auto p = temp_file("bvi_pm1.csv", "a,r\n0.1,-1\n0.2,1\n0.3,1\n");
  LogisticModel m = load_csv_dataset(p.string(), "r");
  CHECK(m.labels[0] == -1.0);
  CHECK(m.labels[2] == 1.0);
  CHECK(m.design(1, 1) == doctest::Approx(0.2));
  std::filesystem::remove(p);
}

TEST_CASE("CSV loader rejects broken inputs") {
  auto ragged = temp_file("bvi_ragged.csv", "y,x\n1,2\n0\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(ragged.string(), "y"),
                       doctest::Contains("ragged"), std::runtime_error);
  std::filesystem::remove(ragged);

  auto bad_label = temp_file("bvi_badlabel.csv", "y,x\n2,1\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(bad_label.string(), "y"),
                       doctest::Contains("non-binary"), std::runtime_error);
  std::filesystem::remove(bad_label);

  auto unparsable = temp_file("bvi_parse.csv", "y,x\n1,abc\n");
  CHECK_THROWS_AS(load_csv_dataset(unparsable.string(), "y"),
                  std::runtime_error);
  std::filesystem::remove(unparsable);

  CHECK_THROWS_AS(load_csv_dataset("/nonexistent/nothing.csv", ""),
                  std::runtime_error);

  auto missing_col = temp_file("bvi_missingcol.csv", "y,x\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv_dataset(missing_col.string(), "nope"),
                       doctest::Contains("nope"), std::runtime_error);
  std::filesystem::remove(missing_col);
}

TEST_CASE("checked-in nodal replica loads with the documented shape") {
  LogisticModel m = load_csv_dataset(BVI_DATA_DIR "/nodal_synthetic.csv", "r");
  CHECK(m.design.rows() == 53);
  CHECK(m.design.cols() == 6);
  TargetDensity t = make_logistic(m);
  CHECK(t.log_f(Vec::Zero(6)) ==
        doctest::Approx(53.0 * std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("target evaluation is bit-deterministic") {
  TargetDensity targets[] = {make_cauchy(), default_gmm1d(), make_banana(0.1)};
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n01;
  for (const auto& t : targets) {
    for (int i = 0; i < 5; ++i) {
      Vec x(t.dim);
      for (int k = 0; k < t.dim; ++k) x[k] = 2.0 * n01(rng);
      CHECK(t.log_f(x) == t.log_f(x));
    }
  }
}

TEST_CASE("finite-difference gradients tighten at the expected rate") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> n01;
  auto random_point = [&](int d, double scale) {
    Vec x(d);
    for (int i = 0; i < d; ++i) x[i] = scale * n01(rng);
    return x;
  };
  TargetDensity cauchy = make_cauchy();
  TargetDensity gmm1 = default_gmm1d();
  TargetDensity gmm2 = default_gmm2d();
  TargetDensity banana = make_banana(0.1);
  for (int i = 0; i < 20; ++i) {
    check_richardson(cauchy, random_point(1, 3.0));
    check_richardson(gmm1, random_point(1, 4.0));
    check_richardson(gmm2, random_point(2, 3.0));
    check_richardson(banana, random_point(2, 5.0));
  }
  TargetDensity nodal = make_logistic(
      load_csv_dataset(BVI_DATA_DIR "/nodal_synthetic.csv", "r"));
  for (int i = 0; i < 20; ++i) check_richardson(nodal, random_point(6, 1.0));
}

TEST_CASE("constant shift moves the density and normalizer together") {
  TargetDensity base = make_cauchy();
  TargetDensity shifted = with_log_shift(base, 7.5);
  Vec x = Vec::Constant(1, 1.3);
  CHECK(shifted.log_f(x) == doctest::Approx(base.log_f(x) + 7.5).epsilon(1e-15));
  CHECK(*shifted.log_normalizer ==
        doctest::Approx(*base.log_normalizer + 7.5).epsilon(1e-15));
}
