#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seatcast/core.hpp"
#include "seatcast/random.hpp"

namespace seatcast {

inline constexpr double kFitSmoothing = 1e-6;
inline constexpr double kDensitySmoothing = 1e-10;

/// Concentration vector of a Dirichlet distribution. Caches the log normaliser.
class DirichletParams {
 public:
  DirichletParams() = default;
  /// Throws std::invalid_argument unless every entry is finite and > 0.
  explicit DirichletParams(Eigen::VectorXd alpha);
  DirichletParams(std::initializer_list<double> alpha);

  const Eigen::VectorXd& alpha() const { return alpha_; }
  Index size() const { return alpha_.size(); }
  double operator[](Index k) const { return alpha_(k); }
  double precision() const { return precision_; }
  /// log Gamma(sum alpha) - sum log Gamma(alpha_k).
  double log_normalizer() const { return log_normalizer_; }
  Eigen::VectorXd mean() const { return alpha_ / precision_; }

 private:
  Eigen::VectorXd alpha_;
  double precision_ = 0;
  double log_normalizer_ = 0;
};

struct BetaParams {
  double a = 1;
  double b = 1;

  double mean() const { return a / (a + b); }
  /// Interior mode; requires a > 1 and b > 1.
  double mode() const;
  double log_pdf(double x) const;
};

/// log Dir(x | params) at the point smoothed by (x + eps)/(1 + K eps).
template <typename Derived>
double log_density(const DirichletParams& params, const Eigen::MatrixBase<Derived>& x,
                   double eps = kDensitySmoothing) {
  if (x.size() != params.size()) throw std::invalid_argument("log_density: dimension mismatch");
  const Eigen::VectorXd xs = smooth_simplex(x.template cast<double>(), eps);
  return params.log_normalizer() + ((params.alpha().array() - 1.0) * xs.array().log()).sum();
}

inline double log_density(const DirichletParams& params, const ShareVector& x, double eps = kDensitySmoothing) {
  return log_density(params, x.values(), eps);
}

/// K independent Gamma draws, normalised. Works in log space when some alpha_k < 1.
ShareVector sample(const DirichletParams& params, Rng& rng);

enum class MleMethod {
  kNewton,      ///< Newton-Raphson on the diagonal-plus-rank-one Hessian, with backtracking
  kFixedPoint,  ///< psi(alpha_k) = psi(sum alpha) + mean log x_k
};

struct MleOptions {
  double smoothing = kFitSmoothing;
  MleMethod method = MleMethod::kNewton;
  /// Stop when |delta alpha_k| <= tolerance * max(1, alpha_k) for all k.
  double tolerance = 1e-8;
  int max_iterations = 1000;
  /// Iterates whose precision exceeds this are treated as diverging (degenerate samples).
  double max_precision = 1e8;
};

/// Maximum-likelihood fit failed; carries the last iterate.
class FitError : public std::runtime_error {
 public:
  enum class Kind { kTooFewSamples, kNotConverged, kDiverged };

  FitError(Kind kind, const std::string& what, Eigen::VectorXd last_iterate = {}, int iterations = 0)
      : std::runtime_error(what), kind_(kind), last_iterate_(std::move(last_iterate)), iterations_(iterations) {}

  Kind kind() const { return kind_; }
  const Eigen::VectorXd& last_iterate() const { return last_iterate_; }
  int iterations() const { return iterations_; }

 private:
  Kind kind_;
  Eigen::VectorXd last_iterate_;
  int iterations_;
};

struct MleResult {
  DirichletParams params;
  int iterations = 0;
  double log_likelihood = 0;  ///< mean per-sample log-likelihood at the smoothed samples
};

/// Sufficient statistic of a sample set: mean of log(smoothed x) per coordinate.
/// `samples` holds one observation per row.
Eigen::VectorXd mean_log_smoothed(const Eigen::Ref<const Eigen::MatrixXd>& samples, double eps);

/// Moment-matching initialiser (mean times a precision estimated from the variances).
Eigen::VectorXd moment_match(const Eigen::Ref<const Eigen::MatrixXd>& samples, double eps);

/// Mean per-sample log-likelihood given the sufficient statistic.
double mean_log_likelihood(const Eigen::Ref<const Eigen::VectorXd>& alpha,
                           const Eigen::Ref<const Eigen::VectorXd>& mean_log_x);

/// ML estimate of the concentration vector. Throws FitError.
MleResult mle_fit_detailed(const Eigen::Ref<const Eigen::MatrixXd>& samples, const MleOptions& options = {});

inline DirichletParams mle_fit(const Eigen::Ref<const Eigen::MatrixXd>& samples, const MleOptions& options = {}) {
  return mle_fit_detailed(samples, options).params;
}

DirichletParams mle_fit(std::span<const ShareVector> samples, const MleOptions& options = {});

/// Stacks share vectors as rows.
Eigen::MatrixXd stack_rows(std::span<const ShareVector> samples);

/// (alpha_k - 1) / (sum alpha - K). Throws std::domain_error when any alpha_k <= 1.
ShareVector mode(const DirichletParams& params);

/// Marginal of coordinate k: Beta(alpha_k, sum alpha - alpha_k).
BetaParams beta_marginal(const DirichletParams& params, Index k);

}  // namespace seatcast
