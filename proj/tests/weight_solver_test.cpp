#include <cmath>

#include "bvi/targets.hpp"
#include "bvi/weight_solver.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace bvi;

namespace {

GaussianComponent comp1d(double mean, double var) {
  return GaussianComponent(Vec::Constant(1, mean), Mat::Constant(1, 1, var));
}

TargetDensity bump_target() {
  return make_gmm({0.8, 0.2}, {Vec::Zero(1), Vec::Constant(1, 3.0)},
                  {Mat::Identity(1, 1), Mat::Identity(1, 1)});
}

}  // namespace

TEST_CASE("solver config validation") {
  SgdConfig cfg;
  cfg.n = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SgdConfig{};
  cfg.b = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SgdConfig{};
  cfg.eps = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = SgdConfig{};
  cfg.max_iters = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("flat objective still terminates inside the unit interval") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(0.0, 1.0);  // same density as q
  TargetDensity f = make_gmm({1.0}, {Vec::Constant(1, 0.5)},
                             {Mat::Identity(1, 1)});
  SgdConfig cfg;
  cfg.seed = 5;
  SgdResult r = solve_alpha(q, h, f, cfg);
  CHECK(r.alpha >= 0.0);
  CHECK(r.alpha <= 1.0);
}

TEST_CASE("exact half-half mixture target pulls the weight to one half") {
  Mixture q(comp1d(-2.0, 1.0));
  GaussianComponent h = comp1d(2.0, 1.0);
  TargetDensity f = make_gmm({0.5, 0.5}, {Vec::Constant(1, -2.0), Vec::Constant(1, 2.0)},
                             {Mat::Identity(1, 1), Mat::Identity(1, 1)});
  SgdConfig cfg;
  cfg.seed = 7;
  SgdResult r = solve_alpha(q, h, f, cfg);
  CHECK(std::abs(r.alpha - 0.5) < 0.05);
}

TEST_CASE("four-to-one mixture target pulls the weight to one fifth") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(3.0, 1.0);
  SgdConfig cfg;
  cfg.seed = 11;
  SgdResult r = solve_alpha(q, h, bump_target(), cfg);
  CHECK(std::abs(r.alpha - 0.2) < 0.05);
}

TEST_CASE("every iterate stays projected onto the unit interval") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(3.0, 1.0);
  SgdConfig cfg;
  cfg.seed = 13;
  cfg.b = 5.0;  // aggressive steps force the clamp to engage
  SgdResult r = solve_alpha(q, h, bump_target(), cfg);
  REQUIRE(!r.trace.empty());
  for (const auto& row : r.trace) {
    CHECK(row.alpha >= 0.0);
    CHECK(row.alpha <= 1.0);
  }
}

TEST_CASE("the same loop with exact gradients lands on the quadrature argmin") {
  TargetDensity f = bump_target();
  auto log_q = [](double x) { return testsup::normal_logpdf(x, 0.0, 1.0); };
  auto log_h = [](double x) { return testsup::normal_logpdf(x, 3.0, 1.0); };
  auto log_f = [&](double x) { return f.log_f(Vec::Constant(1, x)); };
  auto obj = [&](double a) {
    return testsup::blend_discrepancy(log_q, log_h, log_f, a, -12.0, 15.0, 4000);
  };
  const double astar = testsup::golden_min(obj, 0.0, 1.0, 1e-10);

  // Exact derivative by quadrature replaces the MC oracle; the SGD loop
  // itself (steps, clamp, stopping) is unchanged.
  auto exact_grad = [&](double a, std::uint64_t) {
    const double d = 1e-6;
    return (obj(std::min(1.0, a + d)) - obj(std::max(0.0, a - d))) /
           (std::min(1.0, a + d) - std::max(0.0, a - d));
  };
  SgdConfig cfg;
  cfg.b = 0.5;  // larger step: the 1/k schedule closes the gap fast here
  cfg.eps = 1e-7;
  SgdResult r = sgd_projected(exact_grad, cfg);
  CHECK(std::abs(r.alpha - astar) < 1e-3);
}

TEST_CASE("trace and result are identical across reruns with one seed") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(3.0, 1.0);
  TargetDensity f = bump_target();
  SgdConfig cfg;
  cfg.seed = 99;
  SgdResult a = solve_alpha(q, h, f, cfg);
  SgdResult b = solve_alpha(q, h, f, cfg);
  CHECK(a.alpha == b.alpha);
  CHECK(a.iters == b.iters);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].alpha == b.trace[i].alpha);
    CHECK(a.trace[i].grad == b.trace[i].grad);
  }
}

TEST_CASE("iteration cap flags non-convergence instead of throwing") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(3.0, 1.0);
  SgdConfig cfg;
  cfg.seed = 3;
  cfg.max_iters = 2;
  cfg.eps = 1e-12;
  SgdResult r = solve_alpha(q, h, bump_target(), cfg);
  CHECK(!r.converged);
  CHECK(r.iters == 2);
  CHECK(r.alpha >= 0.0);
  CHECK(r.alpha <= 1.0);
}

TEST_CASE("final weight does not worsen the quadrature discrepancy") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(3.0, 1.0);
  TargetDensity f = bump_target();
  SgdConfig cfg;
  cfg.seed = 21;
  SgdResult r = solve_alpha(q, h, f, cfg);
  auto log_q = [](double x) { return testsup::normal_logpdf(x, 0.0, 1.0); };
  auto log_h = [](double x) { return testsup::normal_logpdf(x, 3.0, 1.0); };
  auto log_f = [&](double x) { return f.log_f(Vec::Constant(1, x)); };
  const double at_final = testsup::blend_discrepancy(log_q, log_h, log_f,
                                                     r.alpha, -12.0, 15.0, 4000);
  const double at_zero = testsup::blend_discrepancy(log_q, log_h, log_f, 0.0,
                                                    -12.0, 15.0, 4000);
  CHECK(at_final <= at_zero + 0.02);
}

TEST_CASE("support mismatch inside the estimator propagates out") {
  Mixture q(comp1d(0.0, 1.0));
  GaussianComponent h = comp1d(4.0, 0.04);  // h mass far outside supp(f)
  TargetDensity f;
  f.dim = 1;
  f.log_f = [](const Vec& x) {
    return std::abs(x[0]) < 2.0 ? testsup::normal_logpdf(x[0], 0.0, 1.0)
                                : kNegInf;
  };
  SgdConfig cfg;
  cfg.seed = 1;
  CHECK_THROWS_AS(solve_alpha(q, h, f, cfg), SupportMismatchError);
}
