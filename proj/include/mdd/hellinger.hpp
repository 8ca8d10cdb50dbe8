#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "mdd/family.hpp"

namespace mdd {

enum class HellingerMethod { ClosedForm, Quadrature, SampleKde, SampleEmpirical };

std::string_view to_string(HellingerMethod method);

/// H(f, g) = sqrt(1 - BC(f, g)), always in [0, 1].
struct HellingerValue {
  double value = 0.0;
  HellingerMethod method = HellingerMethod::ClosedForm;
};

struct QuadratureControl {
  double abs_tol = 1e-8;
  double truncation = 1e-14;  // densities below this are treated as zero
  unsigned max_depth = 20;
};

/// m i.i.d. coordinates of a base density.
struct JointSpec {
  Family base;
  std::size_t m = 1;
};

/// Closed-form Bhattacharyya coefficient; both families must share a tag
/// (and the trial count for Binomial). Throws UnsupportedError otherwise.
double bhattacharyya_cf(const Family& f, const Family& g);

HellingerValue hellinger_cf(const Family& f, const Family& g);

/// (1/√2)·‖√f − √g‖₂ by adaptive quadrature over the truncated common
/// support, or by summation for discrete families. Returns exactly 1 when
/// the effective supports do not overlap.
HellingerValue hellinger_num(const Family& f, const Family& g, const QuadratureControl& ctl = {});

/// Distance between a density and a sample.
///
/// Continuous f: Gaussian kernel density estimate of the data (bandwidth
/// 1.06·s·m^{-1/5} unless given), integrated against f on a uniform grid.
/// Discrete f: the empirical pmf of the data against f's pmf.
/// Needs at least two observations.
HellingerValue hellinger_sample(const Family& f, std::span<const double> data,
                                std::optional<double> bandwidth = std::nullopt);

/// Distance between the m-fold product densities: sqrt(1 − BC₁^m).
HellingerValue hellinger_joint(const JointSpec& a, const JointSpec& b);

/// Silverman's rule-of-thumb bandwidth 1.06·s·m^{-1/5}.
double silverman_bandwidth(std::span<const double> data);

}  // namespace mdd
