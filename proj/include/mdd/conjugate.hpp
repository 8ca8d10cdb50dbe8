#pragma once

#include <optional>
#include <span>
#include <string_view>

#include "mdd/family.hpp"

namespace mdd {

/// Normal-Normal, Gamma-Poisson, Gamma-Exponential, Beta-Binomial.
enum class ModelTag { NN, GP, GExp, BB };

std::string_view to_string(ModelTag tag);
ModelTag model_tag_from_string(std::string_view name);

enum class Component { Baseline, Informative };

/// A conjugate likelihood/prior pair. The baseline prior is derived from the
/// informative one by inflating its variance with c while keeping the mean:
///   NN:      N(mu, c tau^2)
///   GP/GExp: Ga(alpha/c, beta/c)
///   BB:      Be(alpha/c, beta/c)
class ConjugateModel {
 public:
  /// `sigma2` is required for NN; `trials` is the number of Bernoulli trials
  /// per BB observation. Throws ConfigError on an inconsistent combination.
  ConjugateModel(ModelTag tag, Family informative, double c, std::optional<double> sigma2 = std::nullopt,
                 int trials = 1);

  ModelTag tag() const { return tag_; }
  const Family& informative() const { return informative_; }
  const Family& baseline() const { return baseline_; }
  const Family& prior(Component which) const {
    return which == Component::Baseline ? baseline_ : informative_;
  }
  double c() const { return c_; }
  double sigma2() const;
  int trials() const { return trials_; }

  /// Sampling density of one observation given theta.
  Family likelihood(double theta) const;
  FamilyTag data_family() const;
  Nuisance nuisance() const;

 private:
  ModelTag tag_;
  Family informative_;
  Family baseline_;
  double c_;
  std::optional<double> sigma2_;
  int trials_;
};

/// Exact conjugate update of one component. An empty sample returns the prior.
Family posterior(const ConjugateModel& model, Component which, std::span<const double> data);

/// Two-component density  w * first + (1 - w) * second.
/// `first` may be ImproperFlat; the mixture is then unnormalized.
struct Mixture {
  double weight = 0.0;
  Family first;
  Family second;
};

Mixture make_mixture(double weight, Family first, Family second);

double pdf(const Mixture& mix, double theta);
double log_pdf(const Mixture& mix, double theta);
double mean(const Mixture& mix);

/// Log-density derivatives of a two-component mixture, given the weight on the
/// first component and each component's log-derivatives at the same point.
/// Computed in log space so far-tail evaluations stay finite.
LogDerivs mix_log_derivs(double weight, const LogDerivs& first, const LogDerivs& second);

LogDerivs log_derivs(const Mixture& mix, double theta);
double neg_log_curvature(const Mixture& mix, double theta);

/// Mixture prior over a conjugate model, weight on the baseline.
struct MddPrior {
  double weight = 0.0;
  ConjugateModel model;

  Mixture density() const { return make_mixture(weight, model.baseline(), model.informative()); }
};

/// Component-wise posterior; the weight is carried over unchanged.
Mixture mdd_posterior(const MddPrior& prior, std::span<const double> data);

/// H(pi, pi_m): distance between the informative prior and its own posterior.
double natural_weight(const ConjugateModel& model, std::span<const double> data);

/// -d^2/dtheta^2 log(w pi_b + (1 - w) pi); DomainError where the mixture vanishes.
double mdd_log_curvature(const MddPrior& prior, double theta);

}  // namespace mdd
