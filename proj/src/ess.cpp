#include "mdd/ess.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mdd/errors.hpp"

namespace mdd {

namespace {

constexpr int kAutoStart = 64;

void check_interior(const ConjugateModel& model, double theta) {
  const bool ok = model.tag() == ModelTag::NN      ? std::isfinite(theta)
                  : model.tag() == ModelTag::BB    ? theta > 0.0 && theta < 1.0
                                                   : theta > 0.0 && std::isfinite(theta);
  if (!ok) {
    std::ostringstream os;
    os << "plug-in value " << theta << " is not interior for the " << to_string(model.tag()) << " model";
    throw DomainError(os.str());
  }
}

EssResult grid_for(double prior_curvature, const ConjugateModel& model, double theta,
                   std::optional<int> m_max) {
  check_interior(model, theta);
  auto posterior = [&](int m) { return expected_posterior_curvature(model, m, theta); };
  EssResult r = m_max ? interpolate_ess(prior_curvature, posterior, *m_max)
                      : interpolate_ess_auto(prior_curvature, posterior, kAutoStart);
  r.plug_in = theta;
  return r;
}

}  // namespace

std::string_view to_string(EssMethod method) {
  switch (method) {
    case EssMethod::ClosedForm: return "closed_form";
    case EssMethod::GridInterpolated: return "grid_interpolated";
    case EssMethod::MonteCarlo: return "monte_carlo";
  }
  return "unknown";
}

EssResult interpolate_ess(double prior_curvature, const std::function<double(int)>& posterior_curvature,
                          int m_max, int m_min) {
  if (m_max < m_min + 2) throw ConfigError("ESS grid needs m_max >= m_min + 2");
  if (!std::isfinite(prior_curvature)) throw DomainError("prior curvature is not finite");

  EssResult r;
  r.method = EssMethod::GridInterpolated;
  r.curve.reserve(static_cast<std::size_t>(m_max - m_min + 1));
  std::optional<double> raw;
  double prev_gap = 0.0;
  for (int m = m_min; m <= m_max; ++m) {
    const double gap = prior_curvature - posterior_curvature(m);
    r.curve.push_back({m, std::abs(gap)});
    if (!raw) {
      if (gap <= 0.0) {
        raw = m == m_min ? static_cast<double>(m_min)
                         : (m - 1) + prev_gap / (prev_gap - gap);
      }
      prev_gap = gap;
    }
  }
  if (!raw) {
    std::ostringstream os;
    os << "posterior curvature stays below the prior curvature up to m = " << m_max
       << "; raise m_max";
    throw RangeExceededError(os.str());
  }
  r.raw = *raw;
  r.ess = std::max(1.0, *raw);
  return r;
}

EssResult interpolate_ess_auto(double prior_curvature,
                               const std::function<double(int)>& posterior_curvature, int m_start,
                               int m_limit, int m_min) {
  int m_max = std::max(m_start, m_min + 2);
  for (;;) {
    try {
      return interpolate_ess(prior_curvature, posterior_curvature, m_max, m_min);
    } catch (const RangeExceededError&) {
      if (m_max >= m_limit) throw;
      m_max = std::min(m_limit, 2 * m_max);
    }
  }
}

double expected_posterior_curvature(const ConjugateModel& model, int m, double theta) {
  if (m < 0) throw DomainError("sample size must be >= 0");
  check_interior(model, theta);
  const double md = static_cast<double>(m);
  const double c = model.c();
  const Family& pi = model.informative();
  switch (model.tag()) {
    case ModelTag::NN: return md / model.sigma2();
    case ModelTag::GP: return (pi.param(0) / c + md * theta - 1.0) / (theta * theta);
    case ModelTag::GExp: return (pi.param(0) / c + md - 1.0) / (theta * theta);
    case ModelTag::BB: {
      const double n = md * model.trials();
      const double u = 1.0 - theta;
      return (pi.param(0) / c + n * theta - 1.0) / (theta * theta) +
             (pi.param(1) / c + n * u - 1.0) / (u * u);
    }
  }
  return 0.0;
}

double delta(int m, double theta, const Family& prior, const ConjugateModel& model) {
  return std::abs(neg_log_curvature(prior, theta) - expected_posterior_curvature(model, m, theta));
}

double delta(int m, double theta, const Mixture& prior, const ConjugateModel& model) {
  return std::abs(neg_log_curvature(prior, theta) - expected_posterior_curvature(model, m, theta));
}

EssResult ess_grid(const Family& prior, const ConjugateModel& model, double theta,
                   std::optional<int> m_max) {
  check_interior(model, theta);
  return grid_for(neg_log_curvature(prior, theta), model, theta, m_max);
}

EssResult ess_grid(const Mixture& prior, const ConjugateModel& model, double theta,
                   std::optional<int> m_max) {
  check_interior(model, theta);
  return grid_for(neg_log_curvature(prior, theta), model, theta, m_max);
}

EssResult ess_mdd(const MddPrior& prior, std::optional<int> m_max) {
  return ess_grid(prior.density(), prior.model, prior.model.informative().mean(), m_max);
}

EssResult ess_closed_form(const ConjugateModel& model) {
  const Family& pi = model.informative();
  const double a = pi.param(0), b = pi.param(1), c = model.c();
  EssResult r;
  r.method = EssMethod::ClosedForm;
  r.plug_in = pi.mean();
  switch (model.tag()) {
    case ModelTag::NN: r.raw = model.sigma2() / b; break;
    case ModelTag::GP: r.raw = (a - a / c) / r.plug_in; break;
    case ModelTag::GExp: r.raw = a - a / c; break;
    case ModelTag::BB: r.raw = a + b; break;
  }
  r.ess = std::max(1.0, r.raw);
  return r;
}

namespace jeffreys {

LogDerivs prior_log_derivs(double theta) {
  if (!(theta > 0.0)) throw DomainError("Jeffreys prior 1/theta needs theta > 0");
  // log j = -log theta; (log j)' = -1/theta; -(log j)'' = -1/theta^2.
  return {-std::log(theta), -1.0 / theta, -1.0 / (theta * theta)};
}

double posterior_curvature(int m, double theta) {
  if (m < 1) throw DomainError("Jeffreys posterior Ga(m, sum y) is improper for m = 0");
  return (m - 1.0) / (theta * theta);
}

double mixture_curvature(double weight, const Family& informative, double theta) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw DomainError("mixture weight must lie in [0, 1]");
  return mix_log_derivs(weight, prior_log_derivs(theta), log_derivs(informative, theta)).curvature;
}

Deltas deltas(int m, const Family& informative, std::span<const double> weights) {
  if (informative.tag() != FamilyTag::Gamma) throw ConfigError("informative prior must be Gamma");
  const double theta = informative.mean();
  const double post = posterior_curvature(m, theta);
  Deltas d{m, std::abs(neg_log_curvature(informative, theta) - post),
           std::abs(prior_log_derivs(theta).curvature - post), {}};
  d.mixture.reserve(weights.size());
  for (double w : weights) d.mixture.push_back(std::abs(mixture_curvature(w, informative, theta) - post));
  return d;
}

EssResult ess(double weight, const Family& informative, int m_max) {
  if (informative.tag() != FamilyTag::Gamma) throw ConfigError("informative prior must be Gamma");
  const double theta = informative.mean();
  EssResult r = interpolate_ess(mixture_curvature(weight, informative, theta),
                                [&](int m) { return posterior_curvature(m, theta); }, m_max, 1);
  r.plug_in = theta;
  return r;
}

}  // namespace jeffreys

}  // namespace mdd
