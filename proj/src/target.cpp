#include "renhd/target.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

namespace renhd {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

void check_finite(const Vector& theta) {
  if (!theta.allFinite())
    throw std::invalid_argument("target evaluation at non-finite configuration");
}
}  // namespace

PotentialDiffTerms Target::potential_diff_terms(const Vector&, const Vector&,
                                                std::span<const int>) const {
  throw std::logic_error("potential_diff_terms: target has no mini-batch structure");
}

GaussianMixtureTarget::GaussianMixtureTarget(std::vector<Vector> means,
                                             std::vector<Matrix> covariances,
                                             Vector weights, double noise_variance)
    : means_(std::move(means)),
      covariances_(std::move(covariances)),
      weights_(std::move(weights)),
      noise_variance_(noise_variance) {
  if (means_.empty()) throw ConfigError("mixture needs at least one component");
  if (covariances_.size() != means_.size() ||
      weights_.size() != static_cast<Eigen::Index>(means_.size()))
    throw ConfigError("mixture: means/covariances/weights size mismatch");
  if (noise_variance_ < 0.0) throw ConfigError("mixture: noise_variance must be >= 0");
  if (std::abs(weights_.sum() - 1.0) > 1e-9)
    throw ConfigError("mixture: weights must sum to 1");
  if ((weights_.array() <= 0.0).any())
    throw ConfigError("mixture: weights must be positive");

  dim_ = static_cast<int>(means_[0].size());
  const int k = components();
  precisions_.resize(k);
  chol_.resize(k);
  log_norm_.resize(k);
  comp_std_.resize(k);
  for (int i = 0; i < k; ++i) {
    if (means_[i].size() != dim_) throw ConfigError("mixture: mean dimension mismatch");
    const Matrix& cov = covariances_[i];
    if (cov.rows() != dim_ || cov.cols() != dim_)
      throw ConfigError("mixture: covariance dimension mismatch");
    if (!cov.isApprox(cov.transpose(), 1e-10))
      throw ConfigError("mixture: covariance must be symmetric");
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success)
      throw ConfigError("mixture: covariance must be positive definite");
    chol_[i] = llt.matrixL();
    precisions_[i] = llt.solve(Matrix::Identity(dim_, dim_));
    double log_det = 0.0;
    for (int r = 0; r < dim_; ++r) log_det += 2.0 * std::log(chol_[i](r, r));
    log_norm_[i] = std::log(weights_[i]) - 0.5 * (dim_ * kLog2Pi + log_det);
    Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
    comp_std_[i] = std::sqrt(es.eigenvalues().maxCoeff());
  }
}

Vector GaussianMixtureTarget::component_log_terms(const Vector& theta) const {
  Vector terms(components());
  for (int k = 0; k < components(); ++k) {
    const Vector diff = theta - means_[k];
    terms[k] = log_norm_[k] - 0.5 * diff.dot(precisions_[k] * diff);
  }
  return terms;
}

double GaussianMixtureTarget::potential(const Vector& theta) const {
  check_finite(theta);
  const Vector terms = component_log_terms(theta);
  const double m = terms.maxCoeff();
  return -(m + std::log((terms.array() - m).exp().sum()));
}

Vector GaussianMixtureTarget::gradient(const Vector& theta) const {
  check_finite(theta);
  const Vector terms = component_log_terms(theta);
  const double m = terms.maxCoeff();
  const Eigen::ArrayXd resp = (terms.array() - m).exp();
  const double total = resp.sum();
  Vector grad = Vector::Zero(dim_);
  for (int k = 0; k < components(); ++k)
    grad.noalias() -= (resp[k] / total) * (precisions_[k] * (theta - means_[k]));
  return grad;
}

Vector GaussianMixtureTarget::noisy_gradient(const Vector& theta, RngStream& rng) const {
  Vector g = gradient(theta);
  if (noise_variance_ > 0.0)
    g += std::sqrt(noise_variance_) * rng.normal_vector(dim_);
  return g;
}

double GaussianMixtureTarget::noisy_potential(const Vector& theta, RngStream& rng) const {
  double u = potential(theta);
  if (noise_variance_ > 0.0) u += std::sqrt(noise_variance_) * rng.normal();
  return u;
}

Vector GaussianMixtureTarget::sample_exact(RngStream& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  int pick = components() - 1;
  for (int k = 0; k < components(); ++k) {
    acc += weights_[k];
    if (u < acc) {
      pick = k;
      break;
    }
  }
  return means_[pick] + chol_[pick] * rng.normal_vector(dim_);
}

GaussianMixtureTarget make_five_mode_circle(double noise_variance, double radius,
                                            double component_variance) {
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (int k = 0; k < 5; ++k) {
    const double angle = (90.0 + 72.0 * k) * std::numbers::pi / 180.0;
    Vector mu(2);
    mu << radius * std::cos(angle), radius * std::sin(angle);
    means.push_back(mu);
    covs.push_back(component_variance * Matrix::Identity(2, 2));
  }
  Vector w = Vector::Constant(5, 0.2);
  return GaussianMixtureTarget(std::move(means), std::move(covs), w, noise_variance);
}

HarmonicTarget::HarmonicTarget(int dim, double curvature, double noise_variance)
    : dim_(dim), curvature_(curvature), noise_variance_(noise_variance) {
  if (dim < 1) throw ConfigError("harmonic: dim must be >= 1");
  if (!(curvature > 0.0)) throw ConfigError("harmonic: curvature must be > 0");
  if (noise_variance < 0.0) throw ConfigError("harmonic: noise_variance must be >= 0");
}

double HarmonicTarget::potential(const Vector& theta) const {
  check_finite(theta);
  return 0.5 * curvature_ * theta.squaredNorm();
}

Vector HarmonicTarget::gradient(const Vector& theta) const {
  check_finite(theta);
  return -curvature_ * theta;
}

Vector HarmonicTarget::noisy_gradient(const Vector& theta, RngStream& rng) const {
  Vector g = gradient(theta);
  if (noise_variance_ > 0.0)
    g += std::sqrt(noise_variance_) * rng.normal_vector(dim_);
  return g;
}

double HarmonicTarget::noisy_potential(const Vector& theta, RngStream& rng) const {
  double u = potential(theta);
  if (noise_variance_ > 0.0) u += std::sqrt(noise_variance_) * rng.normal();
  return u;
}

MiniBatchModelTarget::MiniBatchModelTarget(int dim, Eigen::VectorXd dataset,
                                           LogDensityFn log_prior, GradFn grad_log_prior,
                                           DatumLogLikFn log_lik, DatumGradFn grad_log_lik,
                                           int batch_size_nhd)
    : dim_(dim),
      data_(std::move(dataset)),
      log_prior_(std::move(log_prior)),
      grad_log_prior_(std::move(grad_log_prior)),
      log_lik_(std::move(log_lik)),
      grad_log_lik_(std::move(grad_log_lik)),
      batch_size_nhd_(batch_size_nhd) {
  if (dim_ < 1) throw ConfigError("minibatch target: dim must be >= 1");
  if (data_.size() < 2) throw ConfigError("minibatch target: dataset needs >= 2 points");
  if (batch_size_nhd_ < 1) throw ConfigError("minibatch target: batch size must be >= 1");
}

double MiniBatchModelTarget::potential(const Vector& theta) const {
  check_finite(theta);
  double log_post = log_prior_(theta);
  for (Eigen::Index i = 0; i < data_.size(); ++i) log_post += log_lik_(theta, data_[i]);
  return -log_post;
}

Vector MiniBatchModelTarget::gradient(const Vector& theta) const {
  check_finite(theta);
  Vector g = grad_log_prior_(theta);
  for (Eigen::Index i = 0; i < data_.size(); ++i) g += grad_log_lik_(theta, data_[i]);
  return g;
}

Vector MiniBatchModelTarget::minibatch_gradient(const Vector& theta,
                                                std::span<const int> batch) const {
  check_finite(theta);
  if (batch.empty()) throw std::invalid_argument("minibatch_gradient: empty batch");
  Vector g = grad_log_prior_(theta);
  Vector lik_sum = Vector::Zero(dim_);
  for (int idx : batch) {
    if (idx < 0 || idx >= dataset_size())
      throw std::out_of_range("minibatch_gradient: batch index out of range");
    lik_sum += grad_log_lik_(theta, data_[idx]);
  }
  const double scale = static_cast<double>(dataset_size()) / static_cast<double>(batch.size());
  g += scale * lik_sum;
  return g;
}

Vector MiniBatchModelTarget::noisy_gradient(const Vector& theta, RngStream& rng) const {
  BatchDraw draw(dataset_size(), rng);
  draw.grow(std::min(batch_size_nhd_, dataset_size()));
  return minibatch_gradient(theta, draw.batch());
}

PotentialDiffTerms MiniBatchModelTarget::potential_diff_terms(
    const Vector& theta_a, const Vector& theta_b, std::span<const int> batch) const {
  check_finite(theta_a);
  check_finite(theta_b);
  PotentialDiffTerms terms;
  terms.prior_log_ratio = log_prior_(theta_a) - log_prior_(theta_b);
  terms.dataset_size = dataset_size();
  terms.per_datum_log_ratio.resize(static_cast<Eigen::Index>(batch.size()));
  Eigen::Index out = 0;
  for (int idx : batch) {
    if (idx < 0 || idx >= dataset_size())
      throw std::out_of_range("potential_diff_terms: batch index out of range");
    terms.per_datum_log_ratio[out++] =
        log_lik_(theta_a, data_[idx]) - log_lik_(theta_b, data_[idx]);
  }
  return terms;
}

MiniBatchModelTarget make_bimodal_mean_target(int n_data, double theta_true,
                                              double lik_sigma, double prior_sigma,
                                              std::uint64_t data_seed,
                                              int batch_size_nhd) {
  if (n_data < 2) throw ConfigError("bimodal target: n_data must be >= 2");
  if (!(lik_sigma > 0.0) || !(prior_sigma > 0.0))
    throw ConfigError("bimodal target: sigmas must be > 0");

  RngStream gen(data_seed, 0);
  Eigen::VectorXd data(n_data);
  for (int i = 0; i < n_data; ++i) {
    const double sign = (gen.uniform() < 0.5) ? -1.0 : 1.0;
    data[i] = sign * theta_true + lik_sigma * gen.normal();
  }

  const double inv_prior_var = 1.0 / (prior_sigma * prior_sigma);
  const double inv_lik_var = 1.0 / (lik_sigma * lik_sigma);

  auto log_prior = [inv_prior_var](const Vector& t) {
    return -0.5 * inv_prior_var * t[0] * t[0];
  };
  auto grad_log_prior = [inv_prior_var](const Vector& t) {
    Vector g(1);
    g[0] = -inv_prior_var * t[0];
    return g;
  };
  // l(theta; x) = 0.5 N(x; theta, s^2) + 0.5 N(x; -theta, s^2); the shared
  // normalization constant drops out of potentials up to an additive constant.
  auto log_lik = [inv_lik_var](const Vector& t, double x) {
    const double ap = -0.5 * inv_lik_var * (x - t[0]) * (x - t[0]);
    const double am = -0.5 * inv_lik_var * (x + t[0]) * (x + t[0]);
    const double m = std::max(ap, am);
    return m + std::log(0.5 * std::exp(ap - m) + 0.5 * std::exp(am - m));
  };
  auto grad_log_lik = [inv_lik_var](const Vector& t, double x) {
    const double ap = -0.5 * inv_lik_var * (x - t[0]) * (x - t[0]);
    const double am = -0.5 * inv_lik_var * (x + t[0]) * (x + t[0]);
    const double m = std::max(ap, am);
    const double wp = std::exp(ap - m);
    const double wm = std::exp(am - m);
    Vector g(1);
    g[0] = inv_lik_var * (wp * (x - t[0]) - wm * (x + t[0])) / (wp + wm);
    return g;
  };

  return MiniBatchModelTarget(1, std::move(data), log_prior, grad_log_prior,
                              log_lik, grad_log_lik, batch_size_nhd);
}

BatchDraw::BatchDraw(int population_size, RngStream& rng) : rng_(&rng) {
  if (population_size < 1)
    throw std::invalid_argument("BatchDraw: empty population");
  order_.resize(population_size);
  for (int i = 0; i < population_size; ++i) order_[i] = i;
}

void BatchDraw::grow(int count) {
  const int n = static_cast<int>(order_.size());
  for (int c = 0; c < count && taken_ < order_.size(); ++c) {
    const int i = static_cast<int>(taken_);
    const int j = i + rng_->uniform_int(n - i);
    std::swap(order_[i], order_[j]);
    ++taken_;
  }
}

}  // namespace renhd
