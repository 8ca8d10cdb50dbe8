#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdd/rng.hpp"

namespace mdd {

enum class FamilyTag { Normal, Gamma, Beta, Exponential, Poisson, Binomial, ImproperFlat };

std::string_view to_string(FamilyTag tag);
FamilyTag family_tag_from_string(std::string_view name);

/// Observations y_1..y_m. Discrete families store counts as doubles.
using Sample = std::vector<double>;

/// A tagged univariate parametric density.
///
/// Parameterizations:
///   Normal(mean, var)       -- variance, not standard deviation
///   Gamma(shape, rate)
///   Beta(alpha, beta)
///   Exponential(rate)
///   Poisson(rate)
///   Binomial(trials, prob)
///   ImproperFlat()          -- density identically 1
///
/// Construction validates the parameter domain and throws DomainError.
class Family {
 public:
  static Family normal(double mean, double var);
  static Family gamma(double shape, double rate);
  static Family beta(double alpha, double beta);
  static Family exponential(double rate);
  static Family poisson(double rate);
  static Family binomial(int trials, double prob);
  static Family improper_flat();

  FamilyTag tag() const { return tag_; }
  std::span<const double> params() const { return {params_.data(), size_}; }
  double param(std::size_t i) const { return params_.at(i); }

  bool is_proper() const { return tag_ != FamilyTag::ImproperFlat; }
  bool is_discrete() const { return tag_ == FamilyTag::Poisson || tag_ == FamilyTag::Binomial; }

  /// Moments of proper families; ImproperFlat throws UnsupportedError.
  double mean() const;
  double variance() const;

  bool operator==(const Family&) const = default;

 private:
  Family(FamilyTag tag, std::array<double, 2> params, std::size_t size)
      : tag_(tag), params_(params), size_(size) {}

  FamilyTag tag_;
  std::array<double, 2> params_;
  std::size_t size_;
};

/// Known nuisance parameters for closed-form ML fits.
struct Nuisance {
  std::optional<double> var;   // Normal: known variance
  std::optional<int> trials;   // Binomial: trials per observation
};

/// Value, first derivative and negative second derivative of log f at x.
struct LogDerivs {
  double log_value;
  double score;
  double curvature;  // -d^2/dx^2 log f
};

bool in_support(const Family& f, double y);
double log_pdf(const Family& f, double y);
double pdf(const Family& f, double y);

/// m i.i.d. draws. ImproperFlat throws UnsupportedError.
Sample sample(const Family& f, std::size_t m, Rng& rng);
double sample_one(const Family& f, Rng& rng);

/// Closed-form maximum likelihood fit (Normal mean with known variance,
/// Exponential rate, Poisson rate, Binomial probability).
Family ml_estimate(FamilyTag tag, std::span<const double> data, const Nuisance& fixed = {});

/// -d^2/dθ^2 log f(θ), the family read as a density in θ.
double neg_log_curvature(const Family& f, double theta);

LogDerivs log_derivs(const Family& f, double x);

double sample_mean(std::span<const double> data);
double sample_sd(std::span<const double> data);

}  // namespace mdd
