#include "mdd/hellinger.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <vector>

#include "mdd/errors.hpp"

namespace mdd {

namespace {

struct Interval {
  double lo;
  double hi;
};

double clamp_unit(double h) { return std::clamp(h, 0.0, 1.0); }

double lbeta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

double log_bhattacharyya(const Family& f, const Family& g) {
  if (f.tag() != g.tag()) {
    std::ostringstream os;
    os << "no closed-form Bhattacharyya coefficient between " << to_string(f.tag()) << " and "
       << to_string(g.tag());
    throw UnsupportedError(os.str());
  }
  const double a1 = f.param(0), b1 = f.param(1);
  const double a2 = g.param(0), b2 = g.param(1);
  double lbc = 0.0;
  switch (f.tag()) {
    case FamilyTag::Normal: {
      const double vs = b1 + b2;
      const double d = a1 - a2;
      lbc = 0.5 * std::log(2.0 * std::sqrt(b1 * b2) / vs) - d * d / (4.0 * vs);
      break;
    }
    case FamilyTag::Gamma: {
      const double sa = 0.5 * (a1 + a2);
      const double sb = 0.5 * (b1 + b2);
      lbc = 0.5 * (a1 * std::log(b1) + a2 * std::log(b2)) + std::lgamma(sa) - sa * std::log(sb) -
            0.5 * (std::lgamma(a1) + std::lgamma(a2));
      break;
    }
    case FamilyTag::Beta:
      lbc = lbeta(0.5 * (a1 + a2), 0.5 * (b1 + b2)) - 0.5 * (lbeta(a1, b1) + lbeta(a2, b2));
      break;
    case FamilyTag::Exponential:
      lbc = std::log(2.0 * std::sqrt(a1 * a2) / (a1 + a2));
      break;
    case FamilyTag::Poisson: {
      const double d = std::sqrt(a1) - std::sqrt(a2);
      lbc = -0.5 * d * d;
      break;
    }
    case FamilyTag::Binomial:
      if (a1 != a2) throw UnsupportedError("binomial Bhattacharyya coefficient needs equal trials");
      lbc = a1 * std::log(std::sqrt(b1 * b2) + std::sqrt((1.0 - b1) * (1.0 - b2)));
      break;
    case FamilyTag::ImproperFlat:
      throw UnsupportedError("Hellinger distance is undefined for improper densities");
  }
  return std::min(lbc, 0.0);
}

double density_or_zero(const Family& f, double x) {
  if (!in_support(f, x)) return 0.0;
  const double lp = log_pdf(f, x);
  return std::isfinite(lp) ? std::exp(lp) : 0.0;
}

// Outer bound of {x : f(x) >= threshold} for a proper continuous family.
Interval effective_support(const Family& f, double threshold) {
  const double log_t = std::log(threshold);
  const double mu = f.mean();
  const double sd = std::sqrt(f.variance());
  double lower_bound = -std::numeric_limits<double>::infinity();
  double upper_bound = std::numeric_limits<double>::infinity();
  if (f.tag() == FamilyTag::Gamma || f.tag() == FamilyTag::Exponential) lower_bound = 0.0;
  if (f.tag() == FamilyTag::Beta) {
    lower_bound = 0.0;
    upper_bound = 1.0;
  }
  auto below = [&](double x) {
    if (!in_support(f, x)) return true;
    const double lp = log_pdf(f, x);
    return lp < log_t;
  };
  auto walk = [&](double dir, double bound) {
    double step = 0.5 * sd;
    double x = mu;
    for (int i = 0; i < 4000; ++i) {
      const double next = x + dir * step;
      if ((dir < 0 && next <= bound) || (dir > 0 && next >= bound)) return bound;
      x = next;
      if (below(x)) return x;
      if (i > 40) step *= 1.5;
    }
    return x;
  };
  return {walk(-1.0, lower_bound), walk(1.0, upper_bound)};
}

bool support_starts_at_zero(const Family& f) {
  return f.tag() == FamilyTag::Gamma || f.tag() == FamilyTag::Exponential || f.tag() == FamilyTag::Beta;
}

double integrate_squared_root_gap(const Family& f, const Family& g, Interval range,
                                  const QuadratureControl& ctl) {
  std::vector<double> cuts{range.lo, range.hi};
  for (const Family* h : {&f, &g}) {
    const double mu = h->mean();
    const double sd = std::sqrt(h->variance());
    for (double k : {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}) cuts.push_back(mu + k * sd);
  }
  std::erase_if(cuts, [&](double x) { return x < range.lo || x > range.hi || !std::isfinite(x); });
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto integrand = [&](double x) {
    const double d = std::sqrt(density_or_zero(f, x)) - std::sqrt(density_or_zero(g, x));
    return d * d;
  };
  using boost::math::quadrature::gauss_kronrod;
  // The adaptive rule's tolerance is relative; on panels carrying almost no
  // mass (tails, or where the densities cross) it would recurse to full depth
  // chasing rounding noise, so it is capped at an absolute 1e-14 per panel.
  auto gk = [&](auto&& fn, double a, double b) {
    double err = 0.0;
    const double rough = std::abs(gauss_kronrod<double, 61>::integrate(fn, a, b, 0, 0.0, &err));
    const double rel = std::max(1e-10, 1e-14 / std::max(rough, 1e-300));
    return gauss_kronrod<double, 61>::integrate(fn, a, b, ctl.max_depth, rel, &err);
  };
  // Gamma and Beta densities with shape < 1 are unbounded at the support
  // boundary; the double-exponential rule handles endpoint singularities.
  const bool lower_edge = support_starts_at_zero(f) && support_starts_at_zero(g);
  const bool upper_edge = f.tag() == FamilyTag::Beta && g.tag() == FamilyTag::Beta;
  boost::math::quadrature::tanh_sinh<double> edge_rule;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if ((lower_edge && a == 0.0) || (upper_edge && b == 1.0)) {
      total += edge_rule.integrate(integrand, a, b, 1e-10);
    } else {
      total += gk(integrand, a, b);
    }
  }
  return total;
}

// Largest count with pmf >= threshold, scanning up from the mean.
double discrete_upper(const Family& f, double threshold) {
  const double log_t = std::log(threshold);
  double k = std::floor(f.mean());
  const double cap = f.tag() == FamilyTag::Binomial ? f.param(0) : 1e9;
  while (k < cap && log_pdf(f, k + 1.0) >= log_t) k += 1.0;
  return std::min(k + 1.0, cap);
}

double discrete_lower(const Family& f, double threshold) {
  const double log_t = std::log(threshold);
  double k = std::floor(f.mean());
  while (k > 0.0 && log_pdf(f, k - 1.0) >= log_t) k -= 1.0;
  return std::max(k - 1.0, 0.0);
}

}  // namespace

std::string_view to_string(HellingerMethod method) {
  switch (method) {
    case HellingerMethod::ClosedForm: return "closed_form";
    case HellingerMethod::Quadrature: return "quadrature";
    case HellingerMethod::SampleKde: return "sample_kde";
    case HellingerMethod::SampleEmpirical: return "sample_empirical";
  }
  return "unknown";
}

double bhattacharyya_cf(const Family& f, const Family& g) { return std::exp(log_bhattacharyya(f, g)); }

HellingerValue hellinger_cf(const Family& f, const Family& g) {
  const double h2 = -std::expm1(log_bhattacharyya(f, g));
  return {clamp_unit(std::sqrt(std::max(h2, 0.0))), HellingerMethod::ClosedForm};
}

HellingerValue hellinger_num(const Family& f, const Family& g, const QuadratureControl& ctl) {
  if (!f.is_proper() || !g.is_proper())
    throw UnsupportedError("Hellinger distance is undefined for improper densities");
  if (f.is_discrete() != g.is_discrete())
    throw UnsupportedError("Hellinger distance between a pmf and a density is undefined");

  if (f.is_discrete()) {
    const double lo_f = discrete_lower(f, ctl.truncation), hi_f = discrete_upper(f, ctl.truncation);
    const double lo_g = discrete_lower(g, ctl.truncation), hi_g = discrete_upper(g, ctl.truncation);
    if (hi_f < lo_g || hi_g < lo_f) return {1.0, HellingerMethod::Quadrature};
    double sum = 0.0;
    for (double k = std::min(lo_f, lo_g); k <= std::max(hi_f, hi_g); k += 1.0) {
      const double d = std::sqrt(density_or_zero(f, k)) - std::sqrt(density_or_zero(g, k));
      sum += d * d;
    }
    return {clamp_unit(std::sqrt(0.5 * sum)), HellingerMethod::Quadrature};
  }

  const Interval sf = effective_support(f, ctl.truncation);
  const Interval sg = effective_support(g, ctl.truncation);
  if (sf.hi < sg.lo || sg.hi < sf.lo) return {1.0, HellingerMethod::Quadrature};
  const Interval range{std::min(sf.lo, sg.lo), std::max(sf.hi, sg.hi)};
  const double integral = integrate_squared_root_gap(f, g, range, ctl);
  return {clamp_unit(std::sqrt(std::max(0.5 * integral, 0.0))), HellingerMethod::Quadrature};
}

double silverman_bandwidth(std::span<const double> data) {
  const double s = sample_sd(data);
  return 1.06 * s * std::pow(static_cast<double>(data.size()), -0.2);
}

HellingerValue hellinger_sample(const Family& f, std::span<const double> data,
                                std::optional<double> bandwidth) {
  if (data.empty()) throw InsufficientDataError("density-vs-sample Hellinger distance needs data");
  if (!f.is_proper()) throw UnsupportedError("Hellinger distance is undefined for improper densities");

  if (f.is_discrete()) {
    std::map<double, double> freq;
    for (double y : data) {
      if (!in_support(f, y)) throw DomainError("sample value outside the family's support");
      freq[y] += 1.0 / static_cast<double>(data.size());
    }
    double lo = discrete_lower(f, 1e-14), hi = discrete_upper(f, 1e-14);
    lo = std::min(lo, freq.begin()->first);
    hi = std::max(hi, freq.rbegin()->first);
    double sum = 0.0;
    for (double k = lo; k <= hi; k += 1.0) {
      const auto it = freq.find(k);
      const double q = it == freq.end() ? 0.0 : it->second;
      const double d = std::sqrt(density_or_zero(f, k)) - std::sqrt(q);
      sum += d * d;
    }
    return {clamp_unit(std::sqrt(0.5 * sum)), HellingerMethod::SampleEmpirical};
  }

  if (data.size() < 2)
    throw InsufficientDataError("kernel density estimate needs at least 2 observations");
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(data);
  if (!(h > 0.0) || !std::isfinite(h))
    throw InsufficientDataError("kernel bandwidth is zero (sample has no spread)");

  const auto [dmin, dmax] = std::minmax_element(data.begin(), data.end());
  const Interval sf = effective_support(f, 1e-14);
  const double lo = std::min(*dmin - 6.0 * h, sf.lo);
  const double hi = std::max(*dmax + 6.0 * h, sf.hi);
  const double sd_f = std::sqrt(f.variance());
  constexpr Eigen::Index kMaxGrid = 1 << 18;
  double dx = std::min(h, sd_f) / 5.0;
  Eigen::Index n_grid = static_cast<Eigen::Index>(std::ceil((hi - lo) / dx)) + 1;
  if (n_grid > kMaxGrid) {
    n_grid = kMaxGrid;
    dx = (hi - lo) / static_cast<double>(n_grid - 1);
  }

  // Linear binning onto the grid.
  Eigen::ArrayXd counts = Eigen::ArrayXd::Zero(n_grid);
  for (double y : data) {
    const double pos = (y - lo) / dx;
    const auto j = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(std::floor(pos)), 0, n_grid - 2);
    const double frac = std::clamp(pos - static_cast<double>(j), 0.0, 1.0);
    counts(j) += 1.0 - frac;
    counts(j + 1) += frac;
  }

  const auto half = static_cast<Eigen::Index>(std::ceil(6.0 * h / dx));
  Eigen::ArrayXd kernel(2 * half + 1);
  const double norm = 1.0 / (static_cast<double>(data.size()) * h * std::sqrt(2.0 * std::numbers::pi));
  for (Eigen::Index k = -half; k <= half; ++k) {
    const double u = static_cast<double>(k) * dx / h;
    kernel(k + half) = norm * std::exp(-0.5 * u * u);
  }

  Eigen::ArrayXd kde = Eigen::ArrayXd::Zero(n_grid);
  for (Eigen::Index j = 0; j < n_grid; ++j) {
    if (counts(j) == 0.0) continue;
    const Eigen::Index from = std::max<Eigen::Index>(0, j - half);
    const Eigen::Index to = std::min<Eigen::Index>(n_grid - 1, j + half);
    kde.segment(from, to - from + 1) += counts(j) * kernel.segment(from - j + half, to - from + 1);
  }

  Eigen::ArrayXd dens(n_grid);
  for (Eigen::Index i = 0; i < n_grid; ++i) dens(i) = density_or_zero(f, lo + static_cast<double>(i) * dx);

  const Eigen::ArrayXd gap = (dens.sqrt() - kde.sqrt()).square();
  const double integral = dx * (gap.sum() - 0.5 * (gap(0) + gap(n_grid - 1)));
  return {clamp_unit(std::sqrt(std::max(0.5 * integral, 0.0))), HellingerMethod::SampleKde};
}

HellingerValue hellinger_joint(const JointSpec& a, const JointSpec& b) {
  if (a.m != b.m) throw std::invalid_argument("joint Hellinger distance needs equal numbers of coordinates");
  if (a.m == 0) throw std::invalid_argument("joint density needs m >= 1");
  const double lbc = static_cast<double>(a.m) * log_bhattacharyya(a.base, b.base);
  const double h2 = -std::expm1(lbc);
  return {clamp_unit(std::sqrt(std::max(h2, 0.0))), HellingerMethod::ClosedForm};
}

}  // namespace mdd
