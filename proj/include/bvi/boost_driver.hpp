#pragma once

#include <string>
#include <vector>

#include "bvi/component_search.hpp"
#include "bvi/weight_solver.hpp"

namespace bvi {

struct RunConfig {
  int T = 1;                       // total iteration count, init included
  Vec init_mean;                   // empty means the origin
  double init_cov_scale = 100.0;   // q1 = N(init_mean, c*I)
  SearchConfig search;
  SgdConfig sgd;                   // sgd.seed is ignored; seeds derive per iteration
  int elbo_eval_n = 1000;
  std::uint64_t master_seed = 0;
  double prune_threshold = 1e-6;   // alpha below this: component recorded, not kept

  void validate(int dim) const;
};

struct IterationRecord {
  int t = 0;
  double alpha = 0.0;
  bool has_component = false;
  Vec comp_mean;
  Mat comp_cov;
  double residual_value = 0.0;
  bool peak_converged = false;
  bool hessian_repaired = false;
  int sgd_iters = 0;
  bool sgd_converged = false;
  bool pruned = false;   // alpha below threshold, component not added to q
  bool elbo_ok = false;
  double elbo = 0.0;
  double elbo_se = 0.0;
  int elbo_n = 0;
  std::string note;      // empty, or the reason an iteration was skipped
  double wall_ms = 0.0;  // excluded from the deterministic trace file
  std::vector<SgdTraceRow> sgd_trace;
};

struct BoostTrace {
  bool init_elbo_ok = false;
  double init_elbo = 0.0;
  double init_elbo_se = 0.0;
  int init_elbo_n = 0;
  std::vector<IterationRecord> iterations;
  std::string status = "completed";  // or "residual_flat"

  int last_t() const { return iterations.empty() ? 1 : iterations.back().t; }
};

struct BoostResult {
  Mixture q;
  BoostTrace trace;
};

/// Runs t = 2..cfg.T of greedy boosting from q1 = N(init_mean, c*I):
/// peak search, Laplace component, projected-SGD weight, blend.  Failed
/// iterations record alpha = 0 and continue; a degenerate Hessian stops the
/// run with status "residual_flat".  Per-iteration RNG streams derive from
/// (master_seed, t, stage), making runs resumable.
BoostResult run_bvi(const TargetDensity& target, const RunConfig& cfg);

/// Continues a finished run for extra_T more iterations, numbering onward
/// from the trace.  With seeds derived per iteration this is bit-identical to
/// a single longer run.
BoostResult resume_bvi(Mixture q_prev, BoostTrace trace,
                       const TargetDensity& target, const RunConfig& cfg,
                       int extra_T);

}  // namespace bvi
