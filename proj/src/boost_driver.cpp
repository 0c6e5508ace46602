#include "bvi/boost_driver.hpp"

#include <chrono>
#include <cmath>

namespace bvi {

void RunConfig::validate(int dim) const {
  if (T < 1) throw std::invalid_argument("RunConfig: T must be >= 1");
  if (!(init_cov_scale > 0.0))
    throw std::invalid_argument("RunConfig: init_cov_scale must be positive");
  if (init_mean.size() != 0 && init_mean.size() != dim)
    throw DimensionMismatchError("RunConfig: init_mean length " +
                                 std::to_string(init_mean.size()) +
                                 " does not match target dimension " +
                                 std::to_string(dim));
  if (elbo_eval_n < 2)
    throw std::invalid_argument("RunConfig: elbo_eval_n must be >= 2");
  if (!(prune_threshold >= 0.0))
    throw std::invalid_argument("RunConfig: prune_threshold must be >= 0");
  search.validate();
  sgd.validate();
}

namespace {

constexpr std::uint64_t kStagePeak = 0;
constexpr std::uint64_t kStageSgd = 1;
constexpr std::uint64_t kStageElbo = 2;

void record_elbo(IterationRecord& rec, const Mixture& q,
                 const TargetDensity& target, const RunConfig& cfg, int t) {
  try {
    const MCEstimate e = elbo_estimate(
        q, target, cfg.elbo_eval_n,
        mix_seed(cfg.master_seed, static_cast<std::uint64_t>(t), kStageElbo));
    rec.elbo_ok = true;
    rec.elbo = e.value;
    rec.elbo_se = e.std_error;
    rec.elbo_n = e.n;
  } catch (const SupportMismatchError&) {
    rec.elbo_ok = false;
    rec.elbo = std::numeric_limits<double>::quiet_NaN();
    rec.elbo_se = std::numeric_limits<double>::quiet_NaN();
    rec.elbo_n = 0;
  }
}

/// Runs iterations t_begin..t_end, appending one record per completed
/// iteration.  Returns false when a degenerate Hessian ended the run early.
bool advance(BoostResult& state, const TargetDensity& target,
             const RunConfig& cfg, int t_begin, int t_end) {
  using clock = std::chrono::steady_clock;
  for (int t = t_begin; t <= t_end; ++t) {
    const auto started = clock::now();
    IterationRecord rec;
    rec.t = t;
    try {
      const LaplacePeak peak = find_peak(
          state.q, target, cfg.search,
          mix_seed(cfg.master_seed, static_cast<std::uint64_t>(t), kStagePeak));
      rec.residual_value = peak.value;
      rec.peak_converged = peak.optimizer_converged;
      const ComponentResult built = build_component(peak, cfg.search);
      rec.has_component = true;
      rec.comp_mean = built.component.mean();
      rec.comp_cov = built.component.cov();
      rec.hessian_repaired = built.repaired;

      SgdConfig sgd = cfg.sgd;
      sgd.seed =
          mix_seed(cfg.master_seed, static_cast<std::uint64_t>(t), kStageSgd);
      try {
        SgdResult s = solve_alpha(state.q, built.component, target, sgd);
        rec.alpha = s.alpha;
        rec.sgd_iters = s.iters;
        rec.sgd_converged = s.converged;
        rec.sgd_trace = std::move(s.trace);
      } catch (const SupportMismatchError& e) {
        rec.alpha = 0.0;
        rec.note = std::string("skipped: weight solve aborted: ") + e.what();
      }
      rec.pruned = rec.alpha < cfg.prune_threshold;
      if (!rec.pruned)
        state.q = state.q.blended_with(built.component, rec.alpha);
    } catch (const DegenerateHessianError&) {
      state.trace.status = "residual_flat";
      return false;
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("iteration t=" + std::to_string(t) + ": " +
                                  e.what());
    } catch (const std::runtime_error& e) {
      rec.alpha = 0.0;
      rec.pruned = true;
      rec.note = std::string("skipped: ") + e.what();
    }

    record_elbo(rec, state.q, target, cfg, t);
    rec.wall_ms =
        std::chrono::duration<double, std::milli>(clock::now() - started)
            .count();
    state.trace.iterations.push_back(std::move(rec));
  }
  return true;
}

}  // namespace

BoostResult run_bvi(const TargetDensity& target, const RunConfig& cfg) {
  cfg.validate(target.dim);
  const int d = target.dim;
  const Vec mean = cfg.init_mean.size() ? cfg.init_mean : Vec::Zero(d);
  Mixture q1(
      GaussianComponent(mean, cfg.init_cov_scale * Mat::Identity(d, d)));

  BoostResult res{std::move(q1), BoostTrace{}};
  try {
    const MCEstimate e =
        elbo_estimate(res.q, target, cfg.elbo_eval_n,
                      mix_seed(cfg.master_seed, 1, kStageElbo));
    res.trace.init_elbo_ok = true;
    res.trace.init_elbo = e.value;
    res.trace.init_elbo_se = e.std_error;
    res.trace.init_elbo_n = e.n;
  } catch (const SupportMismatchError&) {
    res.trace.init_elbo_ok = false;
    res.trace.init_elbo = std::numeric_limits<double>::quiet_NaN();
    res.trace.init_elbo_se = std::numeric_limits<double>::quiet_NaN();
  }
  advance(res, target, cfg, 2, cfg.T);
  return res;
}

BoostResult resume_bvi(Mixture q_prev, BoostTrace trace,
                       const TargetDensity& target, const RunConfig& cfg,
                       int extra_T) {
  cfg.validate(target.dim);
  if (extra_T < 0)
    throw std::invalid_argument("resume_bvi: extra_T must be >= 0");
  int live = 1;
  for (const auto& rec : trace.iterations)
    if (rec.has_component && !rec.pruned) ++live;
  if (live != q_prev.size())
    throw CheckpointError("resume_bvi: mixture has " +
                          std::to_string(q_prev.size()) +
                          " components but the trace accounts for " +
                          std::to_string(live));
  BoostResult res{std::move(q_prev), std::move(trace)};
  if (extra_T == 0) return res;
  const int t_done = res.trace.last_t();
  res.trace.status = "completed";
  advance(res, target, cfg, t_done + 1, t_done + extra_T);
  return res;
}

}  // namespace bvi
