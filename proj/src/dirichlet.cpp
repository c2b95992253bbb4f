#include "seatcast/dirichlet.hpp"

#include <cmath>
#include <limits>

#include "seatcast/special_functions.hpp"

namespace seatcast {

DirichletParams::DirichletParams(Eigen::VectorXd alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() < 1) throw std::invalid_argument("DirichletParams: empty");
  if (!alpha_.allFinite() || (alpha_.array() <= 0.0).any()) {
    throw std::invalid_argument("DirichletParams: entries must be finite and positive");
  }
  precision_ = alpha_.sum();
  log_normalizer_ = std::lgamma(precision_);
  for (Index k = 0; k < alpha_.size(); ++k) log_normalizer_ -= std::lgamma(alpha_(k));
}

DirichletParams::DirichletParams(std::initializer_list<double> alpha)
    : DirichletParams(Eigen::Map<const Eigen::VectorXd>(alpha.begin(), static_cast<Index>(alpha.size()))) {}

double BetaParams::mode() const {
  if (a <= 1.0 || b <= 1.0) throw std::domain_error("BetaParams::mode: no interior mode");
  return (a - 1.0) / (a + b - 2.0);
}

double BetaParams::log_pdf(double x) const {
  if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(x) +
         (b - 1.0) * std::log1p(-x);
}

ShareVector sample(const DirichletParams& params, Rng& rng) {
  const Index k = params.size();
  Eigen::VectorXd draws(k);
  if (params.alpha().minCoeff() >= 1.0) {
    for (Index i = 0; i < k; ++i) draws(i) = sample_gamma(params[i], rng);
    return ShareVector::normalized(draws);
  }
  for (Index i = 0; i < k; ++i) draws(i) = sample_log_gamma(params[i], rng);
  const double top = draws.maxCoeff();
  return ShareVector::normalized((draws.array() - top).exp().matrix());
}

Eigen::MatrixXd stack_rows(std::span<const ShareVector> samples) {
  if (samples.empty()) return {};
  const Index k = samples.front().size();
  Eigen::MatrixXd out(static_cast<Index>(samples.size()), k);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != k) throw std::invalid_argument("stack_rows: inconsistent dimensions");
    out.row(static_cast<Index>(i)) = samples[i].values().transpose();
  }
  return out;
}

Eigen::VectorXd mean_log_smoothed(const Eigen::Ref<const Eigen::MatrixXd>& samples, double eps) {
  const double k = static_cast<double>(samples.cols());
  const Eigen::ArrayXXd smoothed = (samples.array() + eps) / (1.0 + k * eps);
  return smoothed.log().colwise().mean().transpose();
}

Eigen::VectorXd moment_match(const Eigen::Ref<const Eigen::MatrixXd>& samples, double eps) {
  const double k = static_cast<double>(samples.cols());
  const Eigen::MatrixXd smoothed = ((samples.array() + eps) / (1.0 + k * eps)).matrix();
  const Eigen::VectorXd m = smoothed.colwise().mean().transpose();
  const Eigen::VectorXd sq = smoothed.array().square().colwise().mean().transpose();
  // Each coordinate gives an estimate of the precision; average the well-defined ones on the log scale.
  double log_sum = 0;
  int used = 0;
  for (Index i = 0; i < m.size(); ++i) {
    const double var = sq(i) - m(i) * m(i);
    if (var <= 0) continue;
    const double s = m(i) * (1.0 - m(i)) / var - 1.0;
    if (s > 0 && std::isfinite(s)) {
      log_sum += std::log(s);
      ++used;
    }
  }
  const double precision = used > 0 ? std::exp(log_sum / used) : 1.0;
  return m * precision;
}

double mean_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                           const Eigen::Ref<const Eigen::VectorXd>& mean_log_x) {
  double ll = std::lgamma(alpha.sum());
  for (Index k = 0; k < alpha.size(); ++k) ll += -std::lgamma(alpha(k)) + (alpha(k) - 1.0) * mean_log_x(k);
  return ll;
}

namespace {

bool converged(const Eigen::VectorXd& prev, const Eigen::VectorXd& next, double tol) {
  for (Index k = 0; k < prev.size(); ++k) {
    if (std::abs(next(k) - prev(k)) > tol * std::max(1.0, std::abs(next(k)))) return false;
  }
  return true;
}

Eigen::VectorXd fixed_point_step(const Eigen::VectorXd& alpha, const Eigen::VectorXd& t) {
  const double psi_total = digamma(alpha.sum());
  Eigen::VectorXd next(alpha.size());
  for (Index k = 0; k < alpha.size(); ++k) next(k) = inverse_digamma(psi_total + t(k));
  return next;
}

// Newton direction for the concave mean log-likelihood; Hessian = diag(q) + z 11^T.
Eigen::VectorXd newton_step(const Eigen::VectorXd& alpha, const Eigen::VectorXd& t) {
  const double total = alpha.sum();
  const double psi_total = digamma(total);
  const double z = trigamma(total);
  const Index k = alpha.size();
  Eigen::VectorXd g(k);
  Eigen::VectorXd q(k);
  for (Index i = 0; i < k; ++i) {
    g(i) = psi_total - digamma(alpha(i)) + t(i);
    q(i) = -trigamma(alpha(i));
  }
  const double b = (g.array() / q.array()).sum() / (1.0 / z + (1.0 / q.array()).sum());
  return ((g.array() - b) / q.array()).matrix();  // H^{-1} g
}

}  // namespace

MleResult mle_fit_detailed(const Eigen::Ref<const Eigen::MatrixXd>& samples, const MleOptions& options) {
  if (samples.rows() < 2) {
    throw FitError(FitError::Kind::kTooFewSamples, "mle_fit: need at least 2 samples");
  }
  if (samples.cols() < 2) throw std::invalid_argument("mle_fit: need at least 2 coordinates");
  const Eigen::VectorXd t = mean_log_smoothed(samples, options.smoothing);
  Eigen::VectorXd alpha = moment_match(samples, options.smoothing);
  double ll = mean_log_likelihood(alpha, t);

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd next;
    if (options.method == MleMethod::kFixedPoint) {
      next = fixed_point_step(alpha, t);
    } else {
      const Eigen::VectorXd step = newton_step(alpha, t);
      double scale = 1.0;
      for (int halvings = 0; halvings < 60; ++halvings, scale *= 0.5) {
        next = alpha - scale * step;
        if ((next.array() > 0.0).all() && mean_log_likelihood(next, t) >= ll - 1e-12 * std::abs(ll)) break;
      }
      if (!((next.array() > 0.0).all())) next = alpha;
    }
    if (!next.allFinite() || next.sum() > options.max_precision) {
      throw FitError(FitError::Kind::kDiverged,
                     "mle_fit: precision diverging after " + std::to_string(it) + " iterations (degenerate samples?)",
                     next.allFinite() ? next : alpha, it);
    }
    const bool done = converged(alpha, next, options.tolerance);
    alpha = std::move(next);
    ll = mean_log_likelihood(alpha, t);
    if (done) return MleResult{DirichletParams(alpha), it, ll};
  }
  throw FitError(FitError::Kind::kNotConverged,
                 "mle_fit: no convergence within " + std::to_string(options.max_iterations) + " iterations", alpha,
                 options.max_iterations);
}

DirichletParams mle_fit(std::span<const ShareVector> samples, const MleOptions& options) {
  if (samples.size() < 2) throw FitError(FitError::Kind::kTooFewSamples, "mle_fit: need at least 2 samples");
  return mle_fit(stack_rows(samples), options);
}

ShareVector mode(const DirichletParams& params) {
  if ((params.alpha().array() <= 1.0).any()) {
    throw std::domain_error("mode: some alpha_k <= 1, the mode lies on the simplex boundary");
  }
  const double denom = params.precision() - static_cast<double>(params.size());
  return ShareVector::normalized((params.alpha().array() - 1.0).matrix() / denom);
}

BetaParams beta_marginal(const DirichletParams& params, Index k) {
  if (k < 0 || k >= params.size()) throw std::out_of_range("beta_marginal: party index out of range");
  return BetaParams{params[k], params.precision() - params[k]};
}

}  // namespace seatcast
