#pragma once

#include "renhd/rng.hpp"
#include "renhd/types.hpp"

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace renhd {

/// Per-datum pieces of a potential difference between two configurations a, b:
/// log rho(a)/rho(b) for the prior and log l(a;x)/l(b;x) for each batch datum.
struct PotentialDiffTerms {
  double prior_log_ratio = 0.0;
  Vector per_datum_log_ratio;  // one entry per batch element
  int dataset_size = 0;
};

/// Contract every sampling target implements: exact potential/gradient plus a
/// noisy gradient. Mini-batch targets additionally expose per-datum potential
/// difference terms; synthetic targets expose the injected noise level so the
/// exchange protocol knows the variance of its estimates.
class Target {
 public:
  virtual ~Target() = default;

  virtual int dim() const = 0;
  virtual double potential(const Vector& theta) const = 0;
  /// Force f = -grad U.
  virtual Vector gradient(const Vector& theta) const = 0;
  /// Unbiased noisy force estimate; draws come from the caller's stream.
  virtual Vector noisy_gradient(const Vector& theta, RngStream& rng) const = 0;

  virtual bool has_minibatch() const = 0;
  virtual int dataset_size() const { return 0; }
  virtual PotentialDiffTerms potential_diff_terms(const Vector& theta_a,
                                                  const Vector& theta_b,
                                                  std::span<const int> batch) const;

  /// Potential evaluation with injected noise (synthetic targets); the exact
  /// potential by default.
  virtual double noisy_potential(const Vector& theta, RngStream& rng) const {
    (void)rng;
    return potential(theta);
  }
  /// Variance of the noise added by noisy_potential.
  virtual double potential_noise_variance() const { return 0.0; }
};

/// Mixture of Gaussians with optional isotropic Gaussian noise injected into
/// every potential and gradient evaluation (fresh draw per call).
class GaussianMixtureTarget : public Target {
 public:
  GaussianMixtureTarget(std::vector<Vector> means, std::vector<Matrix> covariances,
                        Vector weights, double noise_variance = 0.0);

  int dim() const override { return dim_; }
  double potential(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  Vector noisy_gradient(const Vector& theta, RngStream& rng) const override;
  double noisy_potential(const Vector& theta, RngStream& rng) const override;
  double potential_noise_variance() const override { return noise_variance_; }
  bool has_minibatch() const override { return false; }

  /// Exact draw from the mixture (oracle for diagnostics tests).
  Vector sample_exact(RngStream& rng) const;

  int components() const { return static_cast<int>(means_.size()); }
  const Vector& mean(int k) const { return means_[k]; }
  const Matrix& covariance(int k) const { return covariances_[k]; }
  double weight(int k) const { return weights_[k]; }
  /// Largest per-component standard deviation (sqrt of top eigenvalue).
  double component_std(int k) const { return comp_std_[k]; }
  double noise_variance() const { return noise_variance_; }

 private:
  // log of w_k N(theta; mu_k, Sigma_k) for every k.
  Vector component_log_terms(const Vector& theta) const;

  int dim_;
  std::vector<Vector> means_;
  std::vector<Matrix> covariances_;
  Vector weights_;
  double noise_variance_;

  std::vector<Matrix> precisions_;
  std::vector<Matrix> chol_;  // lower-triangular factors, for exact draws
  Vector log_norm_;           // log w_k - (d/2)log(2pi) - (1/2)log|Sigma_k|
  std::vector<double> comp_std_;
};

/// The canonical five-mode instance: equal-weight isotropic components
/// (covariance 0.1 I) centered on a circle of radius 4 at angles
/// 90, 162, 234, 306, 18 degrees.
GaussianMixtureTarget make_five_mode_circle(double noise_variance,
                                            double radius = 4.0,
                                            double component_variance = 0.1);

/// Quadratic potential U = |theta|^2 / (2) * curvature, optionally with
/// injected isotropic gradient/potential noise. Stationary position variance
/// at temperature T is T / curvature per coordinate.
class HarmonicTarget : public Target {
 public:
  HarmonicTarget(int dim, double curvature = 1.0, double noise_variance = 0.0);

  int dim() const override { return dim_; }
  double potential(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  Vector noisy_gradient(const Vector& theta, RngStream& rng) const override;
  double noisy_potential(const Vector& theta, RngStream& rng) const override;
  double potential_noise_variance() const override { return noise_variance_; }
  bool has_minibatch() const override { return false; }

 private:
  int dim_;
  double curvature_;
  double noise_variance_;
};

/// Bayesian model over a scalar dataset with evaluable prior and per-datum
/// likelihood; noisy gradients follow the |D|/|S|-scaled mini-batch estimator.
class MiniBatchModelTarget : public Target {
 public:
  using LogDensityFn = std::function<double(const Vector&)>;
  using GradFn = std::function<Vector(const Vector&)>;
  using DatumLogLikFn = std::function<double(const Vector&, double)>;
  using DatumGradFn = std::function<Vector(const Vector&, double)>;

  MiniBatchModelTarget(int dim, Eigen::VectorXd dataset, LogDensityFn log_prior,
                       GradFn grad_log_prior, DatumLogLikFn log_lik,
                       DatumGradFn grad_log_lik, int batch_size_nhd);

  int dim() const override { return dim_; }
  double potential(const Vector& theta) const override;
  Vector gradient(const Vector& theta) const override;
  Vector noisy_gradient(const Vector& theta, RngStream& rng) const override;
  bool has_minibatch() const override { return true; }
  int dataset_size() const override { return static_cast<int>(data_.size()); }
  PotentialDiffTerms potential_diff_terms(const Vector& theta_a,
                                          const Vector& theta_b,
                                          std::span<const int> batch) const override;

  /// Mini-batch force estimate: grad log prior + (|D|/|S|) sum over batch of
  /// grad log likelihood. Batch indices must be nonempty and in range.
  Vector minibatch_gradient(const Vector& theta, std::span<const int> batch) const;

 private:
  int dim_;
  Eigen::VectorXd data_;
  LogDensityFn log_prior_;
  GradFn grad_log_prior_;
  DatumLogLikFn log_lik_;
  DatumGradFn grad_log_lik_;
  int batch_size_nhd_;
};

/// Desk-scale bimodal instance: 1-D inference of the location theta of a
/// symmetric two-component likelihood 0.5 N(x; theta, s^2) + 0.5 N(x; -theta, s^2)
/// under a N(0, prior_sigma^2) prior; the posterior has modes near +-theta_true.
MiniBatchModelTarget make_bimodal_mean_target(int n_data, double theta_true,
                                              double lik_sigma, double prior_sigma,
                                              std::uint64_t data_seed,
                                              int batch_size_nhd);

/// Draws batch indices without replacement from [0, n); grow() extends the
/// current batch with previously unused indices.
class BatchDraw {
 public:
  BatchDraw(int population_size, RngStream& rng);
  /// Extends the batch by up to `count` fresh indices (fewer if exhausted).
  void grow(int count);
  std::span<const int> batch() const { return {order_.data(), taken_}; }
  int size() const { return static_cast<int>(taken_); }
  bool exhausted() const { return taken_ == order_.size(); }

 private:
  std::vector<int> order_;
  std::size_t taken_ = 0;
  RngStream* rng_;
};

}  // namespace renhd
