#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "../oracles.hpp"
#include "mdd/errors.hpp"
#include "mdd/experiments.hpp"
#include "mdd/family.hpp"

using namespace mdd;

namespace {

// Integral of a density over its support. Endpoint singularities of Gamma and
// Beta with shape < 1 are tamed by substitutions that vanish to fourth order.
double total_mass(const Family& f) {
  switch (f.tag()) {
    case FamilyTag::Normal: {
      const double mu = f.param(0), sd = std::sqrt(f.param(1));
      return oracle::simpson([&](double x) { return pdf(f, x); }, mu - 12 * sd, mu + 12 * sd);
    }
    case FamilyTag::Gamma:
    case FamilyTag::Exponential: {
      const double rate = f.tag() == FamilyTag::Gamma ? f.param(1) : f.param(0);
      const double hi = f.mean() + 40.0 * std::sqrt(f.variance()) + 10.0 / rate;
      return oracle::simpson(
          [&](double t) { return t > 0.0 ? pdf(f, t * t * t * t) * 4.0 * t * t * t : 0.0; }, 0.0,
          std::sqrt(std::sqrt(hi)), 200000);
    }
    case FamilyTag::Beta:
      // x = v^4 (35 - 84 v + 70 v^2 - 20 v^3), dx = 140 v^3 (1 - v)^3 dv
      return oracle::simpson(
          [&](double v) {
            const double x = v * v * v * v * (35 - 84 * v + 70 * v * v - 20 * v * v * v);
            if (x <= 0.0 || x >= 1.0) return 0.0;
            const double w = v * (1 - v);
            return pdf(f, x) * 140.0 * w * w * w;
          },
          0.0, 1.0, 200000);
    case FamilyTag::Poisson: {
      double s = 0.0;
      for (double k = 0; k < f.param(0) + 60.0 * std::sqrt(f.param(0)) + 60.0; ++k) s += pdf(f, k);
      return s;
    }
    case FamilyTag::Binomial: {
      double s = 0.0;
      for (double k = 0; k <= f.param(0); ++k) s += pdf(f, k);
      return s;
    }
    case FamilyTag::ImproperFlat: break;
  }
  return NAN;
}

Family random_family(FamilyTag tag, std::mt19937_64& g) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (tag) {
    case FamilyTag::Normal: return Family::normal(-10 + 20 * u(g), 0.05 + 20 * u(g));
    case FamilyTag::Gamma: return Family::gamma(0.5 + 20 * u(g), 0.1 + 10 * u(g));
    case FamilyTag::Beta: return Family::beta(0.5 + 20 * u(g), 0.5 + 20 * u(g));
    case FamilyTag::Exponential: return Family::exponential(0.1 + 10 * u(g));
    case FamilyTag::Poisson: return Family::poisson(0.1 + 50 * u(g));
    case FamilyTag::Binomial: return Family::binomial(1 + static_cast<int>(60 * u(g)), 0.01 + 0.98 * u(g));
    case FamilyTag::ImproperFlat: break;
  }
  return Family::improper_flat();
}

}  // namespace

TEST_CASE("log_pdf reference values") {
  CHECK(log_pdf(Family::normal(0, 1), 0.0) == doctest::Approx(-0.5 * std::log(2 * std::numbers::pi)).epsilon(1e-15));
  CHECK(log_pdf(Family::exponential(1), 0.0) == 0.0);
  CHECK(log_pdf(Family::poisson(2), 3.0) == doctest::Approx(3 * std::log(2.0) - 2 - std::log(6.0)).epsilon(1e-14));
  CHECK(log_pdf(Family::improper_flat(), 123.0) == 0.0);
  CHECK(pdf(Family::improper_flat(), -1e6) == 1.0);
}

TEST_CASE("log_pdf rejects values outside the support") {
  CHECK_THROWS_AS(log_pdf(Family::exponential(1), -0.1), DomainError);
  CHECK_THROWS_AS(log_pdf(Family::poisson(2), 1.5), DomainError);
  CHECK_THROWS_AS(log_pdf(Family::binomial(3, 0.5), 4.0), DomainError);
  CHECK_THROWS_AS(log_pdf(Family::beta(2, 2), 1.5), DomainError);
}

TEST_CASE("parameter domains are enforced on construction") {
  CHECK_THROWS_AS(Family::normal(0, 0), DomainError);
  CHECK_THROWS_AS(Family::gamma(-1, 1), DomainError);
  CHECK_THROWS_AS(Family::beta(1, 0), DomainError);
  CHECK_THROWS_AS(Family::exponential(0), DomainError);
  CHECK_THROWS_AS(Family::poisson(-2), DomainError);
  CHECK_THROWS_AS(Family::binomial(0, 0.5), DomainError);
  CHECK_THROWS_AS(Family::binomial(3, 1.0), DomainError);
}

TEST_CASE("sampling") {
  SUBCASE("normal mean within 4 standard errors") {
    Rng rng = make_rng(7);
    const auto s = sample(Family::normal(0, 1), 1'000'000, rng);
    CHECK(std::abs(sample_mean(s)) < 4.0 / 1000.0);
  }
  SUBCASE("near-certain binomial") {
    Rng rng = make_rng(8);
    const auto s = sample(Family::binomial(1, 1 - 1e-12), 100, rng);
    for (double y : s) CHECK(y == 1.0);
  }
  SUBCASE("gamma mean") {
    Rng rng = make_rng(9);
    const auto s = sample(Family::gamma(4, 8), 1'000'000, rng);
    CHECK(std::abs(sample_mean(s) - 0.5) < 0.001);
  }
  SUBCASE("improper prior has no sampler") {
    Rng rng = make_rng(1);
    CHECK_THROWS_AS(sample(Family::improper_flat(), 3, rng), UnsupportedError);
  }
  SUBCASE("identical seeds give byte-identical samples") {
    for (auto f : {Family::normal(1, 2), Family::gamma(2, 3), Family::beta(2, 5), Family::exponential(2),
                   Family::poisson(4), Family::binomial(10, 0.3)}) {
      Rng a = make_rng(derive_seed(42, {3})), b = make_rng(derive_seed(42, {3}));
      std::string sa, sb;
      for (double y : sample(f, 200, a)) sa += experiments::exact(y) + ",";
      for (double y : sample(f, 200, b)) sb += experiments::exact(y) + ",";
      CHECK(sa == sb);
    }
  }
}

TEST_CASE("ml_estimate closed forms") {
  CHECK(ml_estimate(FamilyTag::Exponential, std::vector<double>{2, 2, 2}).param(0) == 0.5);
  CHECK(ml_estimate(FamilyTag::Poisson, std::vector<double>{0, 1, 2, 3}).param(0) == 1.5);
  Rng rng = make_rng(11);
  const auto s = sample(Family::normal(15, 5), 100'000, rng);
  const auto fit = ml_estimate(FamilyTag::Normal, s, {.var = 5.0});
  CHECK(std::abs(fit.param(0) - 15) < 0.03);
  CHECK(fit.param(1) == 5.0);

  CHECK_THROWS_AS(ml_estimate(FamilyTag::Exponential, std::vector<double>{0, 0}), DegenerateDataError);
  CHECK_THROWS_AS(ml_estimate(FamilyTag::Normal, std::vector<double>{1.0}), ConfigError);
  CHECK_THROWS_AS(ml_estimate(FamilyTag::Poisson, std::vector<double>{}), InsufficientDataError);
}

TEST_CASE("neg_log_curvature reference values") {
  CHECK(neg_log_curvature(Family::normal(0, 4), 3.7) == 0.25);
  CHECK(neg_log_curvature(Family::gamma(4, 8), 0.5) == doctest::Approx(12));
  CHECK(neg_log_curvature(Family::beta(2, 2), 0.5) == doctest::Approx(8));
  CHECK(neg_log_curvature(Family::improper_flat(), 1.0) == 0.0);
  CHECK_THROWS_AS(neg_log_curvature(Family::gamma(4, 8), 0.0), DomainError);
  CHECK_THROWS_AS(neg_log_curvature(Family::beta(2, 2), 1.0), DomainError);
}

TEST_CASE("property: proper densities integrate to one") {
  std::mt19937_64 g(2024);
  for (auto tag : {FamilyTag::Normal, FamilyTag::Gamma, FamilyTag::Beta, FamilyTag::Exponential,
                   FamilyTag::Poisson, FamilyTag::Binomial}) {
    int failures = 0;
    for (int i = 0; i < 1000; ++i) {
      const Family f = random_family(tag, g);
      const double mass = total_mass(f);
      if (!(std::abs(mass - 1.0) < 1e-6)) {
        ++failures;
        MESSAGE(to_string(tag), " params ", f.param(0), ", ", f.param(1), " mass ", mass);
      }
    }
    CHECK_MESSAGE(failures == 0, to_string(tag));
  }
}

TEST_CASE("property: curvature matches finite differences of the log density") {
  std::mt19937_64 g(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto tag : {FamilyTag::Normal, FamilyTag::Gamma, FamilyTag::Beta, FamilyTag::Exponential}) {
    for (int i = 0; i < 100; ++i) {
      const Family f = random_family(tag, g);
      double x = 0.0;
      switch (tag) {
        case FamilyTag::Normal: x = f.mean() + 3 * (2 * u(g) - 1) * std::sqrt(f.variance()); break;
        case FamilyTag::Beta: x = 0.02 + 0.96 * u(g); break;
        default: x = f.mean() * (0.2 + 2.0 * u(g)); break;
      }
      const double h = 1e-3 * (tag == FamilyTag::Beta ? std::min(x, 1 - x) : std::abs(x) + 1e-2);
      const double fd = oracle::neg_second_derivative([&](double t) { return log_pdf(f, t); }, x, h);
      const double exact = neg_log_curvature(f, x);
      // absolute floor: rounding error of the difference quotient
      const double noise = 64 * 2.2e-16 * std::max(1.0, std::abs(log_pdf(f, x))) / (h * h);
      CHECK_MESSAGE(oracle::rel_close(exact, fd, 1e-5, 1e-6 + noise), to_string(tag), " x=", x, " exact=", exact, " fd=", fd);
    }
  }
}

TEST_CASE("property: ML estimates are local maxima of the log-likelihood") {
  std::mt19937_64 g(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto loglik = [](const Family& f, const std::vector<double>& data) {
    double s = 0.0;
    for (double y : data) s += log_pdf(f, y);
    return s;
  };
  for (int i = 0; i < 100; ++i) {
    Rng rng = make_rng(1000 + i);
    const int m = 2 + static_cast<int>(30 * u(g));
    {
      const double var = 0.5 + 5 * u(g);
      const auto d = sample(Family::normal(10 * u(g) - 5, var), m, rng);
      const double mu = ml_estimate(FamilyTag::Normal, d, {.var = var}).param(0);
      const double best = loglik(Family::normal(mu, var), d);
      CHECK(loglik(Family::normal(mu + 1e-3, var), d) <= best);
      CHECK(loglik(Family::normal(mu - 1e-3, var), d) <= best);
    }
    {
      const auto d = sample(Family::exponential(0.2 + 5 * u(g)), m, rng);
      const double r = ml_estimate(FamilyTag::Exponential, d).param(0);
      const double best = loglik(Family::exponential(r), d);
      CHECK(loglik(Family::exponential(r + 1e-3), d) <= best);
      CHECK(loglik(Family::exponential(r - 1e-3), d) <= best);
    }
    {
      auto d = sample(Family::poisson(1 + 20 * u(g)), m, rng);
      d[0] = std::max(d[0], 1.0);
      const double r = ml_estimate(FamilyTag::Poisson, d).param(0);
      const double best = loglik(Family::poisson(r), d);
      CHECK(loglik(Family::poisson(r + 1e-3), d) <= best);
      CHECK(loglik(Family::poisson(r - 1e-3), d) <= best);
    }
    {
      const int n = 5 + static_cast<int>(20 * u(g));
      auto d = sample(Family::binomial(n, 0.2 + 0.6 * u(g)), m, rng);
      d[0] = 1.0;
      d[1] = n - 1.0;
      const double p = ml_estimate(FamilyTag::Binomial, d, {.trials = n}).param(1);
      const double best = loglik(Family::binomial(n, p), d);
      CHECK(loglik(Family::binomial(n, p + 1e-3), d) <= best);
      CHECK(loglik(Family::binomial(n, p - 1e-3), d) <= best);
    }
  }
}
