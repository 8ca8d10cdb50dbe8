#include "mdd/family.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include "mdd/errors.hpp"

namespace mdd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_count(double y) { return y >= 0.0 && std::floor(y) == y; }

[[noreturn]] void unsupported(std::string_view what, const Family& f) {
  std::ostringstream os;
  os << what << " is not defined for family " << to_string(f.tag());
  throw UnsupportedError(os.str());
}

[[noreturn]] void outside_support(const Family& f, double y) {
  std::ostringstream os;
  os << "value " << y << " is outside the support of " << to_string(f.tag());
  throw DomainError(os.str());
}

void require(bool ok, std::string_view msg) {
  if (!ok) throw DomainError(std::string(msg));
}

}  // namespace

std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::Normal: return "normal";
    case FamilyTag::Gamma: return "gamma";
    case FamilyTag::Beta: return "beta";
    case FamilyTag::Exponential: return "exponential";
    case FamilyTag::Poisson: return "poisson";
    case FamilyTag::Binomial: return "binomial";
    case FamilyTag::ImproperFlat: return "improper_flat";
  }
  return "unknown";
}

FamilyTag family_tag_from_string(std::string_view name) {
  for (auto tag : {FamilyTag::Normal, FamilyTag::Gamma, FamilyTag::Beta, FamilyTag::Exponential,
                   FamilyTag::Poisson, FamilyTag::Binomial, FamilyTag::ImproperFlat}) {
    if (to_string(tag) == name) return tag;
  }
  throw ConfigError("unknown family '" + std::string(name) + "'");
}

Family Family::normal(double mean, double var) {
  require(std::isfinite(mean), "normal mean must be finite");
  require(std::isfinite(var) && var > 0.0, "normal variance must be > 0");
  return Family(FamilyTag::Normal, {mean, var}, 2);
}

Family Family::gamma(double shape, double rate) {
  require(std::isfinite(shape) && shape > 0.0, "gamma shape must be > 0");
  require(std::isfinite(rate) && rate > 0.0, "gamma rate must be > 0");
  return Family(FamilyTag::Gamma, {shape, rate}, 2);
}

Family Family::beta(double alpha, double beta) {
  require(std::isfinite(alpha) && alpha > 0.0, "beta alpha must be > 0");
  require(std::isfinite(beta) && beta > 0.0, "beta beta must be > 0");
  return Family(FamilyTag::Beta, {alpha, beta}, 2);
}

Family Family::exponential(double rate) {
  require(std::isfinite(rate) && rate > 0.0, "exponential rate must be > 0");
  return Family(FamilyTag::Exponential, {rate, 0.0}, 1);
}

Family Family::poisson(double rate) {
  require(std::isfinite(rate) && rate > 0.0, "poisson rate must be > 0");
  return Family(FamilyTag::Poisson, {rate, 0.0}, 1);
}

Family Family::binomial(int trials, double prob) {
  require(trials >= 1, "binomial trials must be >= 1");
  require(prob > 0.0 && prob < 1.0, "binomial prob must lie in (0, 1)");
  return Family(FamilyTag::Binomial, {static_cast<double>(trials), prob}, 2);
}

Family Family::improper_flat() { return Family(FamilyTag::ImproperFlat, {0.0, 0.0}, 0); }

double Family::mean() const {
  const double a = params_[0], b = params_[1];
  switch (tag_) {
    case FamilyTag::Normal: return a;
    case FamilyTag::Gamma: return a / b;
    case FamilyTag::Beta: return a / (a + b);
    case FamilyTag::Exponential: return 1.0 / a;
    case FamilyTag::Poisson: return a;
    case FamilyTag::Binomial: return a * b;
    case FamilyTag::ImproperFlat: break;
  }
  unsupported("mean", *this);
}

double Family::variance() const {
  const double a = params_[0], b = params_[1];
  switch (tag_) {
    case FamilyTag::Normal: return b;
    case FamilyTag::Gamma: return a / (b * b);
    case FamilyTag::Beta: return a * b / ((a + b) * (a + b) * (a + b + 1.0));
    case FamilyTag::Exponential: return 1.0 / (a * a);
    case FamilyTag::Poisson: return a;
    case FamilyTag::Binomial: return a * b * (1.0 - b);
    case FamilyTag::ImproperFlat: break;
  }
  unsupported("variance", *this);
}

bool in_support(const Family& f, double y) {
  if (std::isnan(y)) return false;
  switch (f.tag()) {
    case FamilyTag::Normal:
    case FamilyTag::ImproperFlat: return std::isfinite(y);
    case FamilyTag::Gamma:
    case FamilyTag::Exponential: return y >= 0.0 && std::isfinite(y);
    case FamilyTag::Beta: return y >= 0.0 && y <= 1.0;
    case FamilyTag::Poisson: return is_count(y) && std::isfinite(y);
    case FamilyTag::Binomial: return is_count(y) && y <= f.param(0);
  }
  return false;
}

double log_pdf(const Family& f, double y) {
  if (!in_support(f, y)) outside_support(f, y);
  const double a = f.param(0), b = f.param(1);
  switch (f.tag()) {
    case FamilyTag::Normal: {
      const double d = y - a;
      return -0.5 * std::log(2.0 * std::numbers::pi * b) - 0.5 * d * d / b;
    }
    case FamilyTag::Gamma: {
      if (y == 0.0) {
        if (a == 1.0) return std::log(b);
        return a < 1.0 ? kInf : -kInf;
      }
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(y) - b * y;
    }
    case FamilyTag::Beta: {
      const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
      auto term = [](double shape, double v) {
        if (v == 0.0) return shape == 1.0 ? 0.0 : (shape < 1.0 ? kInf : -kInf);
        return (shape - 1.0) * std::log(v);
      };
      return log_norm + term(a, y) + term(b, 1.0 - y);
    }
    case FamilyTag::Exponential: return std::log(a) - a * y;
    case FamilyTag::Poisson: return y * std::log(a) - a - std::lgamma(y + 1.0);
    case FamilyTag::Binomial: {
      const double n = a;
      return std::lgamma(n + 1.0) - std::lgamma(y + 1.0) - std::lgamma(n - y + 1.0) +
             y * std::log(b) + (n - y) * std::log1p(-b);
    }
    case FamilyTag::ImproperFlat: return 0.0;
  }
  return -kInf;
}

double pdf(const Family& f, double y) { return std::exp(log_pdf(f, y)); }

double sample_one(const Family& f, Rng& rng) {
  const double a = f.param(0), b = f.param(1);
  switch (f.tag()) {
    case FamilyTag::Normal: return std::normal_distribution<double>(a, std::sqrt(b))(rng);
    case FamilyTag::Gamma: return std::gamma_distribution<double>(a, 1.0 / b)(rng);
    case FamilyTag::Beta: {
      const double x = std::gamma_distribution<double>(a, 1.0)(rng);
      const double z = std::gamma_distribution<double>(b, 1.0)(rng);
      return x / (x + z);
    }
    case FamilyTag::Exponential: return std::exponential_distribution<double>(a)(rng);
    case FamilyTag::Poisson: return static_cast<double>(std::poisson_distribution<long long>(a)(rng));
    case FamilyTag::Binomial:
      return static_cast<double>(std::binomial_distribution<int>(static_cast<int>(a), b)(rng));
    case FamilyTag::ImproperFlat: break;
  }
  unsupported("sampling", f);
}

Sample sample(const Family& f, std::size_t m, Rng& rng) {
  if (!f.is_proper()) unsupported("sampling", f);
  Sample out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(sample_one(f, rng));
  return out;
}

double sample_mean(std::span<const double> data) {
  if (data.empty()) throw InsufficientDataError("mean of an empty sample");
  return std::accumulate(data.begin(), data.end(), 0.0) / static_cast<double>(data.size());
}

double sample_sd(std::span<const double> data) {
  if (data.size() < 2) throw InsufficientDataError("sample sd needs at least 2 observations");
  const double mu = sample_mean(data);
  double ss = 0.0;
  for (double y : data) ss += (y - mu) * (y - mu);
  return std::sqrt(ss / static_cast<double>(data.size() - 1));
}

Family ml_estimate(FamilyTag tag, std::span<const double> data, const Nuisance& fixed) {
  if (data.empty()) throw InsufficientDataError("ML estimate needs at least one observation");
  const double ybar = sample_mean(data);
  switch (tag) {
    case FamilyTag::Normal:
      if (!fixed.var) throw ConfigError("normal ML estimate needs the known variance");
      return Family::normal(ybar, *fixed.var);
    case FamilyTag::Exponential:
      if (!(ybar > 0.0)) throw DegenerateDataError("exponential ML rate is infinite (sample mean is 0)");
      return Family::exponential(1.0 / ybar);
    case FamilyTag::Poisson:
      if (!(ybar > 0.0)) throw DegenerateDataError("poisson ML rate is 0 (all counts are 0)");
      return Family::poisson(ybar);
    case FamilyTag::Binomial: {
      const int n = fixed.trials.value_or(1);
      const double p = ybar / n;
      if (!(p > 0.0 && p < 1.0)) throw DegenerateDataError("binomial ML probability is on the boundary");
      return Family::binomial(n, p);
    }
    case FamilyTag::Gamma:
    case FamilyTag::Beta:
    case FamilyTag::ImproperFlat: break;
  }
  throw UnsupportedError("no closed-form ML estimate for family " + std::string(to_string(tag)));
}

LogDerivs log_derivs(const Family& f, double x) {
  const double a = f.param(0), b = f.param(1);
  switch (f.tag()) {
    case FamilyTag::Normal: return {log_pdf(f, x), -(x - a) / b, 1.0 / b};
    case FamilyTag::Gamma:
      if (!(x > 0.0)) outside_support(f, x);
      return {log_pdf(f, x), (a - 1.0) / x - b, (a - 1.0) / (x * x)};
    case FamilyTag::Beta:
      if (!(x > 0.0 && x < 1.0)) outside_support(f, x);
      return {log_pdf(f, x), (a - 1.0) / x - (b - 1.0) / (1.0 - x),
              (a - 1.0) / (x * x) + (b - 1.0) / ((1.0 - x) * (1.0 - x))};
    case FamilyTag::Exponential:
      if (!(x > 0.0)) outside_support(f, x);
      return {log_pdf(f, x), -a, 0.0};
    case FamilyTag::ImproperFlat: return {0.0, 0.0, 0.0};
    case FamilyTag::Poisson:
    case FamilyTag::Binomial: break;
  }
  unsupported("log-density derivatives", f);
}

double neg_log_curvature(const Family& f, double theta) { return log_derivs(f, theta).curvature; }

}  // namespace mdd
