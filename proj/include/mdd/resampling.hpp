#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "mdd/conjugate.hpp"

namespace mdd {

enum class Algorithm { Res1, Res2, Natural };
enum class Termination { Tolerance, Cap, NotApplicable };

std::string_view to_string(Algorithm a);
std::string_view to_string(Termination t);
Algorithm algorithm_from_string(std::string_view name);

struct ResamplingConfig {
  double epsilon = 0.05;  // stop once omega < epsilon
  int k_max = 1000;       // iteration cap
  Algorithm algorithm = Algorithm::Res1;
  std::uint64_t seed = 0;
  std::optional<double> theta0;      // known data-generating value; ML estimate otherwise
  std::optional<double> theta_star;  // fixes the prior draw instead of sampling it
  bool pooled = true;                // res1: KDE over original + generated data (false: generated only)
  std::optional<double> bandwidth;   // res1 KDE bandwidth; Silverman's rule if unset

  void validate() const;
};

struct ResamplingStep {
  int k;
  double psi;
  double omega;
};

struct ResamplingTrace {
  std::vector<ResamplingStep> steps;
  int m = 0;
  int m_star = 0;
  double final_psi = 0.0;
  double final_omega = 0.0;
  Termination terminated_by = Termination::NotApplicable;
  double theta_star = 0.0;
  double theta0 = 0.0;
};

/// Algorithm 1: draw theta* from the informative prior once, then grow the
/// sample with draws from f(.|theta*). psi compares f(.|theta0) against a
/// kernel estimate of the sample; omega is the distance between the baseline
/// and informative posteriors on the augmented data.
ResamplingTrace run_res1(const ConjugateModel& model, std::span<const double> data,
                         const ResamplingConfig& cfg);

/// Algorithm 2: the sample grows with draws from f(.|theta0_hat), the ML fit
/// to everything held so far; psi is the closed-form distance between
/// f(.|theta0_hat) and f(.|theta*).
ResamplingTrace run_res2(const ConjugateModel& model, std::span<const double> data,
                         const ResamplingConfig& cfg);

struct WeightResult {
  double psi;
  int m_star;
  ResamplingTrace trace;
};

/// Dispatch on cfg.algorithm. The natural weight H(pi, pi_m) yields a single
/// step at k = 0 with m_star = m.
WeightResult compute_weight(const ConjugateModel& model, std::span<const double> data,
                            const ResamplingConfig& cfg);

/// JSON lines: a header with the configuration, one line per step, a summary.
void write_trace_jsonl(std::ostream& out, const ConjugateModel& model, const ResamplingConfig& cfg,
                       const ResamplingTrace& trace);

}  // namespace mdd
