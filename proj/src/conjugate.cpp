#include "mdd/conjugate.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "mdd/errors.hpp"
#include "mdd/hellinger.hpp"

namespace mdd {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

FamilyTag prior_family(ModelTag tag) {
  switch (tag) {
    case ModelTag::NN: return FamilyTag::Normal;
    case ModelTag::GP:
    case ModelTag::GExp: return FamilyTag::Gamma;
    case ModelTag::BB: return FamilyTag::Beta;
  }
  return FamilyTag::Normal;
}

Family inflate(const Family& f, double c) {
  switch (f.tag()) {
    case FamilyTag::Normal: return Family::normal(f.param(0), c * f.param(1));
    case FamilyTag::Gamma: return Family::gamma(f.param(0) / c, f.param(1) / c);
    case FamilyTag::Beta: return Family::beta(f.param(0) / c, f.param(1) / c);
    default: break;
  }
  throw ConfigError("no variance-inflated baseline for family " + std::string(to_string(f.tag())));
}

void check_data(const ConjugateModel& model, std::span<const double> data) {
  const Family lik = model.likelihood(model.informative().mean());
  for (double y : data) {
    if (!in_support(lik, y)) {
      std::ostringstream os;
      os << "observation " << y << " is outside the support of the " << to_string(model.tag())
         << " likelihood";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

std::string_view to_string(ModelTag tag) {
  switch (tag) {
    case ModelTag::NN: return "NN";
    case ModelTag::GP: return "GP";
    case ModelTag::GExp: return "GExp";
    case ModelTag::BB: return "BB";
  }
  return "unknown";
}

ModelTag model_tag_from_string(std::string_view name) {
  for (auto tag : {ModelTag::NN, ModelTag::GP, ModelTag::GExp, ModelTag::BB})
    if (to_string(tag) == name) return tag;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected NN, GP, GExp or BB)");
}

ConjugateModel::ConjugateModel(ModelTag tag, Family informative, double c, std::optional<double> sigma2,
                               int trials)
    : tag_(tag),
      informative_(informative),
      baseline_(informative),
      c_(c),
      sigma2_(sigma2),
      trials_(trials) {
  if (informative.tag() != prior_family(tag)) {
    std::ostringstream os;
    os << to_string(tag) << " needs a " << to_string(prior_family(tag)) << " informative prior, got "
       << to_string(informative.tag());
    throw ConfigError(os.str());
  }
  if (!(c >= 1.0) || !std::isfinite(c)) throw ConfigError("inflation factor c must be >= 1");
  if (tag == ModelTag::NN && !(sigma2 && *sigma2 > 0.0 && std::isfinite(*sigma2)))
    throw ConfigError("NN model needs a known sampling variance sigma2 > 0");
  if (tag == ModelTag::BB && trials < 1) throw ConfigError("BB model needs trials >= 1");
  baseline_ = inflate(informative, c);
}

double ConjugateModel::sigma2() const {
  if (!sigma2_) throw ConfigError("sampling variance is only defined for the NN model");
  return *sigma2_;
}

Family ConjugateModel::likelihood(double theta) const {
  switch (tag_) {
    case ModelTag::NN: return Family::normal(theta, *sigma2_);
    case ModelTag::GP: return Family::poisson(theta);
    case ModelTag::GExp: return Family::exponential(theta);
    case ModelTag::BB: return Family::binomial(trials_, theta);
  }
  throw ConfigError("unknown model");
}

FamilyTag ConjugateModel::data_family() const {
  switch (tag_) {
    case ModelTag::NN: return FamilyTag::Normal;
    case ModelTag::GP: return FamilyTag::Poisson;
    case ModelTag::GExp: return FamilyTag::Exponential;
    case ModelTag::BB: return FamilyTag::Binomial;
  }
  return FamilyTag::Normal;
}

Nuisance ConjugateModel::nuisance() const {
  Nuisance n;
  n.var = sigma2_;
  n.trials = trials_;
  return n;
}

Family posterior(const ConjugateModel& model, Component which, std::span<const double> data) {
  const Family& prior = model.prior(which);
  if (data.empty()) return prior;
  check_data(model, data);
  const double m = static_cast<double>(data.size());
  const double sum = std::accumulate(data.begin(), data.end(), 0.0);
  const double a = prior.param(0), b = prior.param(1);
  switch (model.tag()) {
    case ModelTag::NN: {
      const double s2 = model.sigma2();
      const double precision = 1.0 / b + m / s2;
      return Family::normal((a / b + sum / s2) / precision, 1.0 / precision);
    }
    case ModelTag::GP: return Family::gamma(a + sum, b + m);
    case ModelTag::GExp: return Family::gamma(a + m, b + sum);
    case ModelTag::BB: return Family::beta(a + sum, b + m * model.trials() - sum);
  }
  return prior;
}

Mixture make_mixture(double weight, Family first, Family second) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  if (!second.is_proper()) throw DomainError("the second mixture component must be proper");
  return {weight, first, second};
}

double log_pdf(const Mixture& mix, double theta) {
  const double l1 = mix.weight > 0.0 && in_support(mix.first, theta)
                        ? std::log(mix.weight) + log_pdf(mix.first, theta)
                        : kNegInf;
  const double l2 = mix.weight < 1.0 && in_support(mix.second, theta)
                        ? std::log1p(-mix.weight) + log_pdf(mix.second, theta)
                        : kNegInf;
  const double hi = std::max(l1, l2);
  if (hi == kNegInf) return kNegInf;
  return hi + std::log1p(std::exp(std::min(l1, l2) - hi));
}

double pdf(const Mixture& mix, double theta) { return std::exp(log_pdf(mix, theta)); }

double mean(const Mixture& mix) {
  if (mix.weight == 0.0) return mix.second.mean();
  return mix.weight * mix.first.mean() + (1.0 - mix.weight) * mix.second.mean();
}

LogDerivs mix_log_derivs(double weight, const LogDerivs& first, const LogDerivs& second) {
  const double l1 = weight > 0.0 ? std::log(weight) + first.log_value : kNegInf;
  const double l2 = weight < 1.0 ? std::log1p(-weight) + second.log_value : kNegInf;
  if (l1 == kNegInf && l2 == kNegInf) throw DomainError("mixture density is zero");
  if (l1 == kNegInf) return {l2, second.score, second.curvature};
  if (l2 == kNegInf) return {l1, first.score, first.curvature};

  const double hi = std::max(l1, l2);
  const double log_total = hi + std::log1p(std::exp(std::min(l1, l2) - hi));
  const double r1 = std::exp(l1 - log_total);
  const double r2 = std::exp(l2 - log_total);
  const double ds = first.score - second.score;
  // -(log phi)'' = E_r[kappa] - Var_r[score] over the responsibilities r.
  return {log_total, r1 * first.score + r2 * second.score,
          r1 * first.curvature + r2 * second.curvature - r1 * r2 * ds * ds};
}

LogDerivs log_derivs(const Mixture& mix, double theta) {
  auto component = [&](const Family& f, bool used) {
    if (!used || !in_support(f, theta)) return LogDerivs{kNegInf, 0.0, 0.0};
    return log_derivs(f, theta);
  };
  return mix_log_derivs(mix.weight, component(mix.first, mix.weight > 0.0),
                        component(mix.second, mix.weight < 1.0));
}

double neg_log_curvature(const Mixture& mix, double theta) { return log_derivs(mix, theta).curvature; }

Mixture mdd_posterior(const MddPrior& prior, std::span<const double> data) {
  return make_mixture(prior.weight, posterior(prior.model, Component::Baseline, data),
                      posterior(prior.model, Component::Informative, data));
}

double natural_weight(const ConjugateModel& model, std::span<const double> data) {
  if (data.empty()) return 0.0;
  return hellinger_cf(model.informative(), posterior(model, Component::Informative, data)).value;
}

double mdd_log_curvature(const MddPrior& prior, double theta) {
  return neg_log_curvature(prior.density(), theta);
}

}  // namespace mdd
