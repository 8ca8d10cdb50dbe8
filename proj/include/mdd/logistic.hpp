#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace mdd::logistic {

/// How log doses are put on a common scale. Center subtracts the mean of the
/// log doses; the two Sd variants additionally divide by the standard
/// deviation with an n-1 or n denominator.
enum class Standardization { Center, SampleSd, PopulationSd };

std::string_view to_string(Standardization s);
Standardization standardization_from_string(std::string_view name);

struct DoseDesign {
  Eigen::VectorXd raw;
  Eigen::VectorXd x;  // standardized log doses
  Standardization standardization = Standardization::Center;
};

DoseDesign standardize_doses(std::span<const double> raw, Standardization s = Standardization::Center);

/// 100, 200, ..., 600 mg/m^2.
DoseDesign default_design(Standardization s = Standardization::Center);

/// Coefficients of logit P(toxicity) = intercept + slope * x.
struct Coefficients {
  double intercept = -0.11313;
  double slope = 2.3980;
};

/// Expected Fisher information per patient, for the intercept and the slope:
/// E[p(1-p)] and E[x^2 p(1-p)] with x uniform over the design levels.
struct InfoPerObs {
  double intercept = 0.0;
  double slope = 0.0;
  double se_intercept = 0.0;  // Monte Carlo standard errors (0 when exact)
  double se_slope = 0.0;
  long draws = 0;
};

/// Monte Carlo version: each of the T replicates draws one dose per design
/// level uniformly with replacement and averages the information terms.
/// Results depend only on (seed, T), not on `threads`.
InfoPerObs info_per_obs(const DoseDesign& design, const Coefficients& at, long T, std::uint64_t seed,
                        unsigned threads = 0);

/// Exact expectation over the uniform dose distribution.
InfoPerObs info_per_obs_exact(const DoseDesign& design, const Coefficients& at);

enum class Variant {
  Informative,  // N(mean, s2)
  MddFlat,      // psi N(mean, c s2) + (1 - psi) N(mean, s2)
  MddImproper,  // psi * 1 + (1 - psi) N(mean, s2)
};

std::string_view to_string(Variant v);
Variant variant_from_string(std::string_view name);

struct PriorSpec {
  Variant variant = Variant::Informative;
  double sigma2_intercept = 4.0;
  double sigma2_slope = 4.0;
  double psi = 0.0;
  double c = 1e4;
  Coefficients mean;
};

struct EssResult {
  double ess = 1.0;          // global, interpolated, floored at 1
  double ess_integer = 1.0;  // global, integer minimizer of the distance, floored at 1
  double ess_intercept = 1.0;
  double ess_slope = 1.0;
  double raw = 0.0;  // unfloored versions
  double raw_intercept = 0.0;
  double raw_slope = 0.0;
  double se_intercept = 0.0;  // delta-method Monte Carlo errors of the component ESS
  double se_slope = 0.0;
  long draws = 0;
  bool non_finite_curvature = false;
};

/// Prior curvature -d^2/dtheta^2 log prior at the prior mean, per component.
double prior_curvature(Variant v, double sigma2, double psi, double c);

/// Curvature of the baseline prior that the baseline posterior starts from.
double baseline_curvature(Variant v, double sigma2, double c);

EssResult ess(const PriorSpec& spec, const InfoPerObs& info);
EssResult ess(const PriorSpec& spec, const DoseDesign& design, long T, std::uint64_t seed);

struct TableRow {
  Variant variant;
  double sigma2;
  double psi;
  EssResult result;
};

/// Sweep the prior variances {0.25, 1, 4, 9, 25} for the informative prior
/// and psi in {0.2, 0.5, 0.8} for both mixture variants, sharing one
/// information estimate.
std::vector<TableRow> reproduce_tables(const DoseDesign& design, long T, std::uint64_t seed);

}  // namespace mdd::logistic
