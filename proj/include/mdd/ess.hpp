#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mdd/conjugate.hpp"
#include "mdd/family.hpp"

namespace mdd {

enum class EssMethod { ClosedForm, GridInterpolated, MonteCarlo };

std::string_view to_string(EssMethod method);

struct CurvePoint {
  int m;
  double delta;  // |D_prior - D_posterior(m)|
};

struct EssResult {
  double ess = 1.0;  // floored at 1
  double raw = 0.0;  // before the floor
  std::vector<CurvePoint> curve;
  EssMethod method = EssMethod::GridInterpolated;
  double plug_in = 0.0;
};

/// Locate the crossing of a prior curvature with an increasing posterior
/// curvature on m = m_min..m_max and interpolate linearly between the
/// bracketing integers. If the posterior already dominates at m_min the raw
/// ESS is m_min. Throws RangeExceededError when no crossing is found.
EssResult interpolate_ess(double prior_curvature, const std::function<double(int)>& posterior_curvature,
                          int m_max, int m_min = 0);

/// Same, doubling m_max from `m_start` until the crossing is bracketed (up to
/// `m_limit`).
EssResult interpolate_ess_auto(double prior_curvature,
                               const std::function<double(int)>& posterior_curvature, int m_start,
                               int m_limit = 1 << 24, int m_min = 0);

/// Expected curvature of the baseline posterior after m observations at the
/// plug-in value: the data sum is replaced by its expectation m E[y | theta].
///   NN:   m / sigma^2
///   GP:   (alpha/c + m theta - 1) / theta^2
///   GExp: (alpha/c + m - 1) / theta^2
///   BB:   (alpha/c + m n theta - 1) / theta^2 + (beta/c + m n (1 - theta) - 1) / (1 - theta)^2
double expected_posterior_curvature(const ConjugateModel& model, int m, double theta);

double delta(int m, double theta, const Family& prior, const ConjugateModel& model);
double delta(int m, double theta, const Mixture& prior, const ConjugateModel& model);

/// Grid ESS of a prior against the model's baseline posterior. Without m_max
/// the grid grows automatically.
EssResult ess_grid(const Family& prior, const ConjugateModel& model, double theta,
                   std::optional<int> m_max = std::nullopt);
EssResult ess_grid(const Mixture& prior, const ConjugateModel& model, double theta,
                   std::optional<int> m_max = std::nullopt);

/// Grid ESS of the mixture prior at the informative mean.
EssResult ess_mdd(const MddPrior& prior, std::optional<int> m_max = std::nullopt);

/// Tabulated closed forms: sigma^2/tau^2, (alpha - alpha/c)/theta, alpha - alpha/c, alpha + beta.
EssResult ess_closed_form(const ConjugateModel& model);

/// Exponential likelihood with the Jeffreys prior 1/theta as baseline.
namespace jeffreys {

/// Log-derivatives of the (improper) prior 1/theta.
LogDerivs prior_log_derivs(double theta);

/// Curvature of the Jeffreys posterior Ga(m, sum y) at theta: (m - 1)/theta^2.
double posterior_curvature(int m, double theta);

struct Deltas {
  int m;
  double informative;          // |D_pi - D_jm|
  double jeffreys;             // |D_j - D_jm|
  std::vector<double> mixture; // |D_phi - D_jm|, one per weight
};

/// Distances at theta = alpha/beta for an informative Ga(alpha, beta).
/// The mixture w/theta + (1-w) Ga(alpha, beta) is left unnormalized.
Deltas deltas(int m, const Family& informative, std::span<const double> weights);

double mixture_curvature(double weight, const Family& informative, double theta);

/// ESS on the m >= 1 grid for weight in [0, 1] (0 = informative, 1 = Jeffreys).
EssResult ess(double weight, const Family& informative, int m_max = 200);

}  // namespace jeffreys

}  // namespace mdd
