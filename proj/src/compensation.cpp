#include "renhd/compensation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace renhd {

namespace {

long long checked_mul(long long a, long long b) {
  long long out;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::overflow_error("logistic derivative coefficients exceed 64-bit range");
  return out;
}

long long checked_add(long long a, long long b) {
  long long out;
  if (__builtin_add_overflow(a, b, &out))
    throw std::overflow_error("logistic derivative coefficients exceed 64-bit range");
  return out;
}

double eval_poly_no_constant(const Vector& coeffs, double g) {
  // Horner on c_1 g + c_2 g^2 + ... (no constant term).
  double acc = 0.0;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
    acc = (acc + coeffs[i]) * g;
  return acc;
}

}  // namespace

double LogisticDerivativePoly::eval_at_g(double g) const {
  double acc = 0.0;
  for (int i = static_cast<int>(coeffs.size()) - 1; i >= 0; --i)
    acc = (acc + static_cast<double>(coeffs[i])) * g;
  return acc;
}

LogisticDerivativePoly logistic_derivative(int k) {
  if (k < 1) throw ConfigError("logistic_derivative: order must be >= 1");
  std::vector<long long> a = {1, -1};  // g - g^2
  for (int step = 1; step < k; ++step) {
    std::vector<long long> b(a.size() + 1, 0);
    for (std::size_t idx = 0; idx < a.size(); ++idx) {
      const long long i = static_cast<long long>(idx) + 1;
      const long long ai_i = checked_mul(a[idx], i);
      b[idx] = checked_add(b[idx], ai_i);
      b[idx + 1] = checked_add(b[idx + 1], -ai_i);
    }
    a = std::move(b);
  }
  return LogisticDerivativePoly{k, std::move(a)};
}

double hermite(int n, double u) {
  if (n < 0) throw ConfigError("hermite: order must be >= 0");
  double h_prev = 1.0;
  double h = 2.0 * u;
  if (n == 0) return h_prev;
  for (int m = 1; m < n; ++m) {
    const double h_next = 2.0 * u * h - 2.0 * m * h_prev;
    h_prev = h;
    h = h_next;
  }
  return h;
}

double CompensationDensity::evaluate(double z) const {
  return eval_poly_no_constant(poly, logistic(z));
}

CompensationDensity build_series(double sigma2, double lambda, int n_terms,
                                 int grid_size, double grid_half_width) {
  if (!(sigma2 > 0.0)) throw ConfigError("build_series: sigma2 must be > 0");
  if (!(lambda > 0.0)) throw ConfigError("build_series: lambda must be > 0");
  if (n_terms < 1) throw ConfigError("build_series: n_terms must be >= 1");
  if (grid_size < 16) throw ConfigError("build_series: grid too small");

  CompensationDensity out;
  out.sigma2 = sigma2;
  out.lambda = lambda;
  out.n_terms = n_terms;
  out.poly = Vector::Zero(2 * n_terms);

  // Term n carries weight (-1)^n H_n(lambda sigma2 / 4) / (lambda^n n!) on the
  // (2n+1)-th logistic derivative. The derivative coefficients are exact
  // integers; floats enter only here.
  const double u = lambda * sigma2 / 4.0;
  double lambda_pow_factorial = 1.0;  // lambda^n * n!
  for (int n = 0; n < n_terms; ++n) {
    if (n > 0) lambda_pow_factorial *= lambda * n;
    const double weight =
        ((n % 2 == 0) ? 1.0 : -1.0) * hermite(n, u) / lambda_pow_factorial;
    const LogisticDerivativePoly deriv = logistic_derivative(2 * n + 1);
    for (std::size_t i = 0; i < deriv.coeffs.size(); ++i)
      out.poly[static_cast<int>(i)] += weight * static_cast<double>(deriv.coeffs[i]);
  }

  out.grid_z = Vector::LinSpaced(grid_size, -grid_half_width, grid_half_width);
  out.pdf.resize(grid_size);
  const double dz = out.grid_z[1] - out.grid_z[0];
  double negative_mass = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double q = eval_poly_no_constant(out.poly, logistic(out.grid_z[i]));
    if (q < 0.0) {
      negative_mass -= q * dz;
      out.pdf[i] = 0.0;
    } else {
      out.pdf[i] = q;
    }
  }
  out.clamped_negative_mass = negative_mass;

  // Cumulative trapezoid, renormalized so sampling sees a proper CDF.
  out.cdf.resize(grid_size);
  out.cdf[0] = 0.0;
  for (int i = 1; i < grid_size; ++i)
    out.cdf[i] = out.cdf[i - 1] + 0.5 * (out.pdf[i - 1] + out.pdf[i]) * dz;
  const double total = out.cdf[grid_size - 1];
  if (!(total > 0.0))
    throw ConfigError("build_series: density has no positive mass on the grid");
  out.cdf /= total;
  out.cdf[grid_size - 1] = 1.0;
  return out;
}

double sample(const CompensationDensity& density, RngStream& rng) {
  const double u = rng.uniform();
  const auto& cdf = density.cdf;
  const int n = static_cast<int>(cdf.size());
  // First node with cdf >= u.
  int lo = 0, hi = n - 1;
  while (lo < hi) {
    const int mid = (lo + hi) / 2;
    if (cdf[mid] < u)
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo == 0) return density.grid_z[0];
  const double c0 = cdf[lo - 1];
  const double c1 = cdf[lo];
  const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
  return density.grid_z[lo - 1] + t * density.grid_step();
}

double reconstruct(const CompensationDensity& density, double sigma2) {
  const int n = static_cast<int>(density.pdf.size());
  const double dz = density.grid_step();
  const double sigma = std::sqrt(std::max(sigma2, 0.0));

  // Cell-integrated Gaussian kernel; degenerates to a discrete delta when the
  // Gaussian is narrower than a grid cell.
  int half = static_cast<int>(std::ceil(8.0 * sigma / dz)) + 1;
  half = std::min(half, n - 1);
  std::vector<double> kernel(2 * half + 1);
  double kernel_sum = 0.0;
  const double inv = (sigma > 0.0) ? 1.0 / (std::sqrt(2.0) * sigma) : 0.0;
  for (int m = -half; m <= half; ++m) {
    double w;
    if (sigma > 0.0) {
      w = 0.5 * (std::erf((m + 0.5) * dz * inv) - std::erf((m - 0.5) * dz * inv));
    } else {
      w = (m == 0) ? 1.0 : 0.0;
    }
    kernel[m + half] = w;
    kernel_sum += w;
  }
  for (double& w : kernel) w /= kernel_sum;

  double max_err = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = density.grid_z[i];
    if (std::abs(z) > 10.0) continue;
    double acc = 0.0;
    const int m_lo = std::max(-half, i - (n - 1));
    const int m_hi = std::min(half, i);
    for (int m = m_lo; m <= m_hi; ++m) acc += kernel[m + half] * density.pdf[i - m];
    const double g = logistic(z);
    max_err = std::max(max_err, std::abs(acc - g * (1.0 - g)));
  }
  return max_err;
}

}  // namespace renhd
