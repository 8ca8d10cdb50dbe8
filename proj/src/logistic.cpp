#include "mdd/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "mdd/conjugate.hpp"
#include "mdd/errors.hpp"
#include "mdd/ess.hpp"
#include "mdd/rng.hpp"

namespace mdd::logistic {

namespace {

constexpr long kBlock = 1 << 14;
constexpr int kAutoStart = 64;

struct Moments {
  double sum_a = 0.0, sq_a = 0.0;
  double sum_b = 0.0, sq_b = 0.0;
};

// p(1-p) and x^2 p(1-p) at every design level.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> level_information(const DoseDesign& d, const Coefficients& at) {
  const Eigen::ArrayXd x = d.x.array();
  const Eigen::ArrayXd p = 1.0 / (1.0 + (-(at.intercept + at.slope * x)).exp());
  const Eigen::ArrayXd w = p * (1.0 - p);
  return {w, x.square() * w};
}

Moments simulate_block(const Eigen::ArrayXd& wa, const Eigen::ArrayXd& wb, long count, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  const auto levels = static_cast<int>(wa.size());
  std::uniform_int_distribution<int> pick(0, levels - 1);
  Moments mo;
  for (long t = 0; t < count; ++t) {
    double a = 0.0, b = 0.0;
    for (int i = 0; i < levels; ++i) {
      const int j = pick(rng);
      a += wa(j);
      b += wb(j);
    }
    a /= levels;
    b /= levels;
    mo.sum_a += a;
    mo.sq_a += a * a;
    mo.sum_b += b;
    mo.sq_b += b * b;
  }
  return mo;
}

double standard_error(double sum, double sq, long n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sq - n * mean * mean) / static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

std::string_view to_string(Standardization s) {
  switch (s) {
    case Standardization::Center: return "center";
    case Standardization::SampleSd: return "sample_sd";
    case Standardization::PopulationSd: return "population_sd";
  }
  return "unknown";
}

Standardization standardization_from_string(std::string_view name) {
  for (auto s : {Standardization::Center, Standardization::SampleSd, Standardization::PopulationSd})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown standardization '" + std::string(name) + "'");
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Informative: return "informative";
    case Variant::MddFlat: return "mdd-flat";
    case Variant::MddImproper: return "mdd-improper";
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  for (auto v : {Variant::Informative, Variant::MddFlat, Variant::MddImproper})
    if (to_string(v) == name) return v;
  throw ConfigError("unknown variant '" + std::string(name) + "'");
}

DoseDesign standardize_doses(std::span<const double> raw, Standardization s) {
  if (raw.size() < 2) throw InsufficientDataError("dose standardization needs at least 2 doses");
  for (double d : raw)
    if (!(d > 0.0) || !std::isfinite(d)) throw DomainError("doses must be positive and finite");

  DoseDesign design;
  design.standardization = s;
  design.raw = Eigen::Map<const Eigen::VectorXd>(raw.data(), static_cast<Eigen::Index>(raw.size()));
  const Eigen::ArrayXd logs = design.raw.array().log();
  const Eigen::ArrayXd centered = logs - logs.mean();
  const double ss = centered.square().sum();
  if (!(ss > 0.0)) throw DegenerateDataError("all doses are equal; log doses have zero variance");
  const auto n = static_cast<double>(raw.size());
  switch (s) {
    case Standardization::Center: design.x = centered.matrix(); break;
    case Standardization::SampleSd: design.x = (centered / std::sqrt(ss / (n - 1.0))).matrix(); break;
    case Standardization::PopulationSd: design.x = (centered / std::sqrt(ss / n)).matrix(); break;
  }
  return design;
}

DoseDesign default_design(Standardization s) {
  const std::vector<double> doses{100, 200, 300, 400, 500, 600};
  return standardize_doses(doses, s);
}

InfoPerObs info_per_obs_exact(const DoseDesign& design, const Coefficients& at) {
  const auto [wa, wb] = level_information(design, at);
  return {wa.mean(), wb.mean(), 0.0, 0.0, 0};
}

InfoPerObs info_per_obs(const DoseDesign& design, const Coefficients& at, long T, std::uint64_t seed,
                        unsigned threads) {
  if (T < 1) throw ConfigError("Monte Carlo size T must be >= 1");
  const auto [wa, wb] = level_information(design, at);
  const long blocks = (T + kBlock - 1) / kBlock;
  std::vector<Moments> partial(static_cast<std::size_t>(blocks));

  auto run = [&](long first, long stride) {
    for (long b = first; b < blocks; b += stride) {
      const long count = std::min(kBlock, T - b * kBlock);
      partial[static_cast<std::size_t>(b)] =
          simulate_block(wa, wb, count, derive_seed(seed, {static_cast<std::uint64_t>(b)}));
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  const long workers = std::min<long>(threads, blocks);
  std::vector<std::jthread> pool;
  for (long w = 1; w < workers; ++w) pool.emplace_back(run, w, workers);
  run(0, workers);
  pool.clear();

  Moments total;
  for (const auto& p : partial) {
    total.sum_a += p.sum_a;
    total.sq_a += p.sq_a;
    total.sum_b += p.sum_b;
    total.sq_b += p.sq_b;
  }
  const auto n = static_cast<double>(T);
  return {total.sum_a / n, total.sum_b / n, standard_error(total.sum_a, total.sq_a, T),
          standard_error(total.sum_b, total.sq_b, T), T};
}

double prior_curvature(Variant v, double sigma2, double psi, double c) {
  if (!(sigma2 > 0.0)) throw ConfigError("prior variance must be > 0");
  if (!(psi >= 0.0 && psi <= 1.0)) throw ConfigError("psi must lie in [0, 1]");
  const Family informative = Family::normal(0.0, sigma2);
  switch (v) {
    case Variant::Informative: return neg_log_curvature(informative, 0.0);
    case Variant::MddFlat:
      return neg_log_curvature(make_mixture(psi, Family::normal(0.0, c * sigma2), informative), 0.0);
    case Variant::MddImproper:
      return neg_log_curvature(make_mixture(psi, Family::improper_flat(), informative), 0.0);
  }
  return 0.0;
}

double baseline_curvature(Variant v, double sigma2, double c) {
  return v == Variant::MddImproper ? 0.0 : 1.0 / (c * sigma2);
}

EssResult ess(const PriorSpec& spec, const InfoPerObs& info) {
  if (!(spec.c >= 1.0)) throw ConfigError("c must be >= 1");
  if (!(info.intercept > 0.0 && info.slope > 0.0)) throw DomainError("information per observation must be > 0");

  const double d1 = prior_curvature(spec.variant, spec.sigma2_intercept, spec.psi, spec.c);
  const double d2 = prior_curvature(spec.variant, spec.sigma2_slope, spec.psi, spec.c);
  const double b1 = baseline_curvature(spec.variant, spec.sigma2_intercept, spec.c);
  const double b2 = baseline_curvature(spec.variant, spec.sigma2_slope, spec.c);

  EssResult r;
  r.draws = info.draws;
  if (!std::isfinite(d1) || !std::isfinite(d2)) {
    r.non_finite_curvature = true;
    return r;
  }
  const auto comp1 = interpolate_ess_auto(d1, [&](int m) { return b1 + m * info.intercept; }, kAutoStart);
  const auto comp2 = interpolate_ess_auto(d2, [&](int m) { return b2 + m * info.slope; }, kAutoStart);
  const auto global = interpolate_ess_auto(
      d1 + d2, [&](int m) { return b1 + b2 + m * (info.intercept + info.slope); }, kAutoStart);

  r.raw_intercept = comp1.raw;
  r.raw_slope = comp2.raw;
  r.raw = global.raw;
  r.ess_intercept = comp1.ess;
  r.ess_slope = comp2.ess;
  r.ess = global.ess;
  const auto best = std::min_element(global.curve.begin(), global.curve.end(),
                                     [](const CurvePoint& a, const CurvePoint& b) { return a.delta < b.delta; });
  r.ess_integer = std::max(1.0, static_cast<double>(best->m));
  r.se_intercept = std::abs(comp1.raw) * info.se_intercept / info.intercept;
  r.se_slope = std::abs(comp2.raw) * info.se_slope / info.slope;
  return r;
}

EssResult ess(const PriorSpec& spec, const DoseDesign& design, long T, std::uint64_t seed) {
  return ess(spec, info_per_obs(design, spec.mean, T, seed));
}

std::vector<TableRow> reproduce_tables(const DoseDesign& design, long T, std::uint64_t seed) {
  const Coefficients at;
  const InfoPerObs info = info_per_obs(design, at, T, seed);
  const double variances[] = {0.25, 1.0, 4.0, 9.0, 25.0};
  const double weights[] = {0.2, 0.5, 0.8};
  std::vector<TableRow> rows;
  auto add = [&](Variant v, double s2, double psi) {
    PriorSpec spec{v, s2, s2, psi, 1e4, at};
    rows.push_back({v, s2, psi, ess(spec, info)});
  };
  for (double s2 : variances) add(Variant::Informative, s2, 0.0);
  for (Variant v : {Variant::MddFlat, Variant::MddImproper})
    for (double s2 : variances)
      for (double psi : weights) add(v, s2, psi);
  return rows;
}

}  // namespace mdd::logistic
