#include "bvi/oracle.hpp"

#include <cmath>
#include <functional>

namespace bvi {

namespace {

Vec trapezoid_weights(const Vec& nodes) {
  const Eigen::Index m = nodes.size();
  if (m < 2) throw std::invalid_argument("quadrature: need at least 2 nodes");
  for (Eigen::Index i = 1; i < m; ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw std::invalid_argument("quadrature: nodes must be strictly increasing");
  Vec w(m);
  w[0] = (nodes[1] - nodes[0]) / 2.0;
  w[m - 1] = (nodes[m - 1] - nodes[m - 2]) / 2.0;
  for (Eigen::Index i = 1; i + 1 < m; ++i) w[i] = (nodes[i + 1] - nodes[i - 1]) / 2.0;
  return w;
}

Vec uniform_nodes(double lo, double hi, int m) {
  if (!(hi > lo)) throw std::invalid_argument("quadrature: box rows must be (lo, hi)");
  if (m < 2) throw std::invalid_argument("quadrature: grid_points must be >= 2");
  Vec x(m);
  const double step = (hi - lo) / (m - 1);
  for (int i = 0; i < m; ++i) x[i] = lo + step * i;
  x[m - 1] = hi;
  return x;
}

void check_box(const Mat& box, int dim) {
  if (box.rows() != dim || box.cols() != 2)
    throw std::invalid_argument("quadrature: box must be dim x 2");
}

ReferencePosterior reference_1d(const TargetDensity& target, const Vec& nodes) {
  const Vec w = trapezoid_weights(nodes);
  const Eigen::Index m = nodes.size();
  Vec lf(m);
  double max_lf = kNegInf;
  Vec p(1);
  for (Eigen::Index i = 0; i < m; ++i) {
    p[0] = nodes[i];
    lf[i] = target.log_f(p);
    max_lf = std::max(max_lf, lf[i]);
  }
  if (max_lf == kNegInf)
    throw std::runtime_error("quadrature: target vanishes on the whole grid");
  double total = 0.0, boundary = 0.0, s1 = 0.0;
  Vec mass(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    mass[i] = w[i] * std::exp(lf[i] - max_lf);
    total += mass[i];
    s1 += mass[i] * nodes[i];
  }
  boundary = mass[0] + mass[m - 1];
  if (boundary > 1e-4 * total)
    throw std::runtime_error("quadrature: boundary mass fraction " +
                             std::to_string(boundary / total) +
                             " exceeds 1e-4; box too small");
  const double mean = s1 / total;
  double s2 = 0.0;
  for (Eigen::Index i = 0; i < m; ++i)
    s2 += mass[i] * (nodes[i] - mean) * (nodes[i] - mean);
  ReferencePosterior ref;
  ref.source = "quadrature-grid";
  ref.mean = Vec::Constant(1, mean);
  ref.covariance = Mat::Constant(1, 1, s2 / total);
  ref.log_normalizer = std::log(total) + max_lf;
  return ref;
}

ReferencePosterior reference_2d(const TargetDensity& target, const Mat& box,
                                int grid_points) {
  const Vec xs = uniform_nodes(box(0, 0), box(0, 1), grid_points);
  const Vec ys = uniform_nodes(box(1, 0), box(1, 1), grid_points);
  const Vec wx = trapezoid_weights(xs);
  const Vec wy = trapezoid_weights(ys);
  const Eigen::Index m = grid_points;
  Mat lf(m, m);
  double max_lf = kNegInf;
  Vec p(2);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      p[0] = xs[i];
      p[1] = ys[j];
      lf(i, j) = target.log_f(p);
      max_lf = std::max(max_lf, lf(i, j));
    }
  if (max_lf == kNegInf)
    throw std::runtime_error("quadrature: target vanishes on the whole grid");
  double total = 0.0, boundary = 0.0;
  Eigen::Vector2d s1 = Eigen::Vector2d::Zero();
  Eigen::Matrix2d s2 = Eigen::Matrix2d::Zero();
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) {
      const double mass = wx[i] * wy[j] * std::exp(lf(i, j) - max_lf);
      total += mass;
      if (i == 0 || j == 0 || i == m - 1 || j == m - 1) boundary += mass;
      const Eigen::Vector2d pt(xs[i], ys[j]);
      s1 += mass * pt;
      s2 += mass * pt * pt.transpose();
    }
  if (boundary > 1e-4 * total)
    throw std::runtime_error("quadrature: boundary mass fraction " +
                             std::to_string(boundary / total) +
                             " exceeds 1e-4; box too small");
  ReferencePosterior ref;
  ref.source = "quadrature-grid";
  const Eigen::Vector2d mean = s1 / total;
  ref.mean = mean;
  ref.covariance = s2 / total - mean * mean.transpose();
  ref.log_normalizer = std::log(total) + max_lf;
  return ref;
}

/// Integral of exp(log_q) * (log_q - log_f) over the grid, plus log_z.
double kl_core(const std::function<double(const Vec&)>& log_q,
               const TargetDensity& target, const Mat& box, int grid_points,
               double log_z) {
  const int d = target.dim;
  double acc = 0.0;
  if (d == 1) {
    const Vec xs = uniform_nodes(box(0, 0), box(0, 1), grid_points);
    const Vec w = trapezoid_weights(xs);
    Vec p(1);
    for (Eigen::Index i = 0; i < xs.size(); ++i) {
      p[0] = xs[i];
      const double lq = log_q(p);
      const double dens = std::exp(lq);
      if (dens == 0.0) continue;
      acc += w[i] * dens * (lq - target.log_f(p));
    }
  } else {
    const Vec xs = uniform_nodes(box(0, 0), box(0, 1), grid_points);
    const Vec ys = uniform_nodes(box(1, 0), box(1, 1), grid_points);
    const Vec wx = trapezoid_weights(xs);
    const Vec wy = trapezoid_weights(ys);
    Vec p(2);
    for (Eigen::Index i = 0; i < xs.size(); ++i)
      for (Eigen::Index j = 0; j < ys.size(); ++j) {
        p[0] = xs[i];
        p[1] = ys[j];
        const double lq = log_q(p);
        const double dens = std::exp(lq);
        if (dens == 0.0) continue;
        acc += wx[i] * wy[j] * dens * (lq - target.log_f(p));
      }
  }
  return acc + log_z;
}

double normalizer_for(const TargetDensity& target, const Mat& box,
                      int grid_points) {
  if (target.log_normalizer) return *target.log_normalizer;
  return quadrature_reference(target, box, grid_points).log_normalizer;
}

}  // namespace

ReferencePosterior quadrature_reference(const TargetDensity& target,
                                        const Mat& box, int grid_points) {
  if (target.dim > 2)
    throw std::invalid_argument("quadrature_reference: dimension above 2");
  check_box(box, target.dim);
  if (target.dim == 1)
    return reference_1d(target, uniform_nodes(box(0, 0), box(0, 1), grid_points));
  return reference_2d(target, box, grid_points);
}

ReferencePosterior quadrature_reference_1d(const TargetDensity& target,
                                           const Vec& nodes) {
  if (target.dim != 1)
    throw std::invalid_argument("quadrature_reference_1d: 1D targets only");
  return reference_1d(target, nodes);
}

double quadrature_kl(const Mixture& q, const TargetDensity& target,
                     const Mat& box, int grid_points) {
  check_dim(target.dim, q.dim(), "quadrature_kl");
  if (target.dim > 2)
    throw std::invalid_argument("quadrature_kl: dimension above 2");
  check_box(box, target.dim);
  const double log_z = normalizer_for(target, box, grid_points);
  return kl_core([&](const Vec& x) { return q.log_pdf(x); }, target, box,
                 grid_points, log_z);
}

double quadrature_blend_discrepancy(const Mixture& q_prev,
                                    const GaussianComponent& h, double alpha,
                                    const TargetDensity& target,
                                    const Mat& box, int grid_points) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("quadrature_blend_discrepancy: alpha outside [0,1]");
  if (target.dim > 2)
    throw std::invalid_argument("quadrature_blend_discrepancy: dimension above 2");
  check_box(box, target.dim);
  const double log_z = normalizer_for(target, box, grid_points);
  auto log_blend = [&](const Vec& x) {
    if (alpha == 0.0) return q_prev.log_pdf(x);
    if (alpha == 1.0) return h.log_pdf(x);
    return log_add(std::log1p(-alpha) + q_prev.log_pdf(x),
                   std::log(alpha) + h.log_pdf(x));
  };
  return kl_core(log_blend, target, box, grid_points, log_z);
}

ReferencePosterior mh_reference(const TargetDensity& target, int n_samples,
                                Vec step_scales, int burn_in,
                                std::uint64_t seed, const Vec& start) {
  const int d = target.dim;
  if (n_samples < 1000)
    throw std::invalid_argument("mh_reference: n_samples must be >= 1000");
  if (burn_in < 0) throw std::invalid_argument("mh_reference: negative burn_in");
  if (step_scales.size() == 1)
    step_scales = Vec::Constant(d, step_scales[0]);
  check_dim(d, step_scales.size(), "mh_reference: step_scales");
  check_dim(d, start.size(), "mh_reference: start");
  if ((step_scales.array() <= 0.0).any())
    throw std::invalid_argument("mh_reference: step scales must be positive");

  Vec x = start;
  double lf = target.log_f(x);
  if (!std::isfinite(lf))
    throw std::invalid_argument("mh_reference: start point has zero density");

  std::mt19937_64 rng(split_mix(seed));
  std::uniform_real_distribution<double> u01(0.0, 1.0);

  constexpr int kWindow = 100;
  int window_accepts = 0;
  int kept_accepts = 0;
  std::vector<Vec> samples;
  samples.reserve(n_samples);

  const int total = burn_in + n_samples;
  for (int step = 0; step < total; ++step) {
    Vec prop = x + step_scales.cwiseProduct(standard_normal(d, rng));
    const double lf_prop = target.log_f(prop);
    const double u = u01(rng);
    if (std::log(u) < lf_prop - lf) {
      x = std::move(prop);
      lf = lf_prop;
      ++window_accepts;
      if (step >= burn_in) ++kept_accepts;
    }
    if (step < burn_in && (step + 1) % kWindow == 0) {
      const double rate = static_cast<double>(window_accepts) / kWindow;
      step_scales *= std::exp(rate - 0.25);
      window_accepts = 0;
    }
    if (step >= burn_in) samples.push_back(x);
  }

  const double acc = static_cast<double>(kept_accepts) / n_samples;
  if (acc < 0.05 || acc > 0.6)
    throw std::runtime_error("mh_reference: post-adaptation acceptance " +
                             std::to_string(acc) + " outside [0.05, 0.6]");

  ReferencePosterior ref;
  ref.source = "mh-samples";
  Vec mean = Vec::Zero(d);
  for (const Vec& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  Mat cov = Mat::Zero(d, d);
  for (const Vec& s : samples) {
    const Vec c = s - mean;
    cov += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
  ref.mean = mean;
  ref.covariance = cov;
  ref.acceptance_rate = acc;

  // Effective-sample proxy from lag-1 autocorrelation, worst coordinate.
  double ess = static_cast<double>(samples.size());
  for (int j = 0; j < d; ++j) {
    double num = 0.0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i)
      num += (samples[i][j] - mean[j]) * (samples[i + 1][j] - mean[j]);
    const double denom = cov(j, j) * static_cast<double>(samples.size() - 1);
    double rho = denom > 0.0 ? num / denom : 0.0;
    rho = std::clamp(rho, 0.0, 0.9999);
    ess = std::min(ess, samples.size() * (1.0 - rho) / (1.0 + rho));
  }
  ref.ess_proxy = ess;
  ref.samples = std::move(samples);
  return ref;
}

double rem(const Mixture& q, const ReferencePosterior& ref) {
  check_dim(q.dim(), ref.mean.size(), "rem");
  const double denom = ref.mean.lpNorm<1>();
  if (!(denom > 0.0))
    throw std::invalid_argument("rem: reference mean has zero l1 norm");
  return (q.mean() - ref.mean).lpNorm<1>() / denom;
}

double gaussian_kl(const GaussianComponent& a, const GaussianComponent& b) {
  check_dim(a.dim(), b.dim(), "gaussian_kl");
  const int d = a.dim();
  const Mat m = b.chol_lower().triangularView<Eigen::Lower>().solve(a.chol_lower());
  const Vec z = b.chol_lower().triangularView<Eigen::Lower>().solve(a.mean() - b.mean());
  return 0.5 * (m.squaredNorm() + z.squaredNorm() - d + b.log_det_cov() -
                a.log_det_cov());
}

ChainStats chain_statistics(const std::vector<Vec>& samples, int n_batches) {
  if (n_batches < 2)
    throw std::invalid_argument("chain_statistics: need at least 2 batches");
  const int n = static_cast<int>(samples.size());
  const int len = n / n_batches;
  if (len < 2)
    throw std::invalid_argument("chain_statistics: chain too short for batches");
  const int d = static_cast<int>(samples.front().size());
  const int used = len * n_batches;

  Vec mean = Vec::Zero(d);
  for (int i = 0; i < used; ++i) mean += samples[i];
  mean /= used;

  Mat batch_means(n_batches, d);
  std::vector<Mat> batch_covs(n_batches, Mat::Zero(d, d));
  for (int b = 0; b < n_batches; ++b) {
    Vec bm = Vec::Zero(d);
    Mat bc = Mat::Zero(d, d);
    for (int i = b * len; i < (b + 1) * len; ++i) {
      bm += samples[i];
      const Vec c = samples[i] - mean;
      bc += c * c.transpose();
    }
    batch_means.row(b) = (bm / len).transpose();
    batch_covs[b] = bc / len;
  }

  ChainStats st;
  st.mean = mean;
  st.cov = Mat::Zero(d, d);
  for (const Mat& c : batch_covs) st.cov += c;
  st.cov /= n_batches;

  st.mean_se = Vec::Zero(d);
  for (int j = 0; j < d; ++j) {
    double ss = 0.0;
    const double mu = batch_means.col(j).mean();
    for (int b = 0; b < n_batches; ++b)
      ss += (batch_means(b, j) - mu) * (batch_means(b, j) - mu);
    st.mean_se[j] = std::sqrt(ss / (n_batches - 1) / n_batches);
  }
  st.cov_se = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double ss = 0.0;
      double mu = 0.0;
      for (int b = 0; b < n_batches; ++b) mu += batch_covs[b](j, k);
      mu /= n_batches;
      for (int b = 0; b < n_batches; ++b)
        ss += (batch_covs[b](j, k) - mu) * (batch_covs[b](j, k) - mu);
      st.cov_se(j, k) = std::sqrt(ss / (n_batches - 1) / n_batches);
    }
  return st;
}

}  // namespace bvi
