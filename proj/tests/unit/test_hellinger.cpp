#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "mdd/errors.hpp"
#include "mdd/hellinger.hpp"

using namespace mdd;

namespace {

Family random_family(FamilyTag tag, std::mt19937_64& g, int trials = 0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  switch (tag) {
    case FamilyTag::Normal: return Family::normal(-5 + 10 * u(g), 0.1 + 10 * u(g));
    case FamilyTag::Gamma: return Family::gamma(0.5 + 20 * u(g), 0.2 + 5 * u(g));
    case FamilyTag::Beta: return Family::beta(0.5 + 20 * u(g), 0.5 + 20 * u(g));
    case FamilyTag::Exponential: return Family::exponential(0.1 + 10 * u(g));
    case FamilyTag::Poisson: return Family::poisson(0.1 + 50 * u(g));
    case FamilyTag::Binomial: return Family::binomial(trials, 0.02 + 0.96 * u(g));
    case FamilyTag::ImproperFlat: break;
  }
  return Family::improper_flat();
}

constexpr FamilyTag kTags[] = {FamilyTag::Normal,      FamilyTag::Gamma,   FamilyTag::Beta,
                               FamilyTag::Exponential, FamilyTag::Poisson, FamilyTag::Binomial};

// (1/2) * integral of (sqrt f - sqrt g)^2 by composite Simpson, normal pair.
double normal_h2_by_simpson(const Family& f, const Family& g) {
  const double lo = std::min(f.param(0), g.param(0)) - 14.0;
  const double hi = std::max(f.param(0), g.param(0)) + 14.0;
  return 0.5 * oracle::simpson(
                   [&](double x) {
                     const double d = std::sqrt(pdf(f, x)) - std::sqrt(pdf(g, x));
                     return d * d;
                   },
                   lo, hi, 400000);
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(hellinger_cf(Family::normal(0, 1), Family::normal(0, 1)).value == 0.0);
  CHECK(hellinger_cf(Family::normal(0, 1), Family::normal(2, 1)).value ==
        doctest::Approx(std::sqrt(1 - std::exp(-0.5))).epsilon(1e-14));
  CHECK(hellinger_cf(Family::exponential(1), Family::exponential(4)).value ==
        doctest::Approx(std::sqrt(0.2)).epsilon(1e-14));
  CHECK(hellinger_cf(Family::normal(0, 1), Family::normal(2, 1)).method == HellingerMethod::ClosedForm);

  // Quadrature oracle for the normal pair.
  const double h2 = normal_h2_by_simpson(Family::normal(0, 1), Family::normal(2, 1));
  CHECK(std::sqrt(h2) == doctest::Approx(std::sqrt(1 - std::exp(-0.5))).epsilon(1e-8));
}

TEST_CASE("closed forms reject mismatched families") {
  CHECK_THROWS_AS(hellinger_cf(Family::normal(0, 1), Family::gamma(1, 1)), UnsupportedError);
  CHECK_THROWS_AS(hellinger_cf(Family::binomial(3, 0.5), Family::binomial(4, 0.5)), UnsupportedError);
  CHECK_THROWS_AS(hellinger_cf(Family::improper_flat(), Family::improper_flat()), UnsupportedError);
}

TEST_CASE("quadrature") {
  for (auto f : {Family::normal(1, 3), Family::gamma(0.7, 2), Family::beta(0.6, 3), Family::poisson(4)})
    CHECK(hellinger_num(f, f).value < 1e-10);
  CHECK(hellinger_num(Family::normal(0, 1), Family::normal(2, 1)).value ==
        doctest::Approx(hellinger_cf(Family::normal(0, 1), Family::normal(2, 1)).value).epsilon(1e-6));
  const double d = std::sqrt(2.0) - std::sqrt(5.0);
  CHECK(std::abs(hellinger_num(Family::poisson(2), Family::poisson(5)).value -
                 std::sqrt(1 - std::exp(-d * d / 2))) < 1e-8);
  CHECK(hellinger_num(Family::normal(0, 1e-4), Family::normal(1000, 1e-4)).value == 1.0);
  CHECK(hellinger_num(Family::normal(0, 1), Family::normal(2, 1)).method == HellingerMethod::Quadrature);
}

TEST_CASE("density against a sample") {
  Rng rng = make_rng(3);
  const auto near = sample(Family::normal(0, 1), 100'000, rng);
  const auto far = sample(Family::normal(10, 1), 100'000, rng);
  const auto h_near = hellinger_sample(Family::normal(0, 1), near);
  CHECK(h_near.value < 0.05);
  CHECK(h_near.method == HellingerMethod::SampleKde);
  CHECK(hellinger_sample(Family::normal(0, 1), far).value > 0.99);
  CHECK_THROWS_AS(hellinger_sample(Family::normal(0, 1), std::vector<double>{0.3}), InsufficientDataError);
  CHECK_THROWS_AS(hellinger_sample(Family::normal(0, 1), std::vector<double>{1.0, 1.0}), InsufficientDataError);

  SUBCASE("discrete families use the empirical pmf") {
    const auto counts = sample(Family::poisson(3), 50'000, rng);
    const auto h = hellinger_sample(Family::poisson(3), counts);
    CHECK(h.method == HellingerMethod::SampleEmpirical);
    CHECK(h.value < 0.02);
    CHECK(hellinger_sample(Family::poisson(3), sample(Family::poisson(30), 1000, rng)).value > 0.95);
  }
  SUBCASE("bandwidth override is honoured") {
    const std::vector<double> few{-0.5, 0.1, 0.4};
    CHECK(hellinger_sample(Family::normal(0, 1), few, 0.2).value !=
          hellinger_sample(Family::normal(0, 1), few, 0.9).value);
  }
}

TEST_CASE("joint densities") {
  const JointSpec a{Family::normal(0, 1), 5};
  CHECK(hellinger_joint(a, a).value == 0.0);
  CHECK_THROWS_AS(hellinger_joint(a, JointSpec{Family::normal(0, 1), 4}), std::invalid_argument);

  const double h1 = hellinger_joint({Family::normal(0, 1), 7}, {Family::normal(1, 1), 7}).value;
  const double h2 = hellinger_joint({Family::normal(100, 1), 7}, {Family::normal(101, 1), 7}).value;
  CHECK(std::abs(h1 - h2) <= 1e-12);

  SUBCASE("small-shift limit scales with the Fisher information") {
    const double delta = 1e-3;
    const double h = hellinger_joint({Family::normal(0, 1), 1}, {Family::normal(delta, 1), 1}).value;
    // The constant is fixed independently by quadrature at a moderate shift.
    const double q = 0.1;
    const double c_quad = normal_h2_by_simpson(Family::normal(0, 1), Family::normal(q, 1)) / (q * q);
    CHECK(h * h / (delta * delta) == doctest::Approx(1.0 / 8.0).epsilon(0.01));
    CHECK(c_quad == doctest::Approx(1.0 / 8.0).epsilon(0.01));
  }
}

TEST_CASE("property: closed form agrees with quadrature") {
  std::mt19937_64 g(17);
  std::uniform_int_distribution<int> trials(1, 60);
  for (auto tag : kTags) {
    double worst = 0.0;
    for (int i = 0; i < 500; ++i) {
      const int n = trials(g);
      const Family f = random_family(tag, g, n), h = random_family(tag, g, n);
      const double cf = hellinger_cf(f, h).value;
      const double num = hellinger_num(f, h).value;
      worst = std::max(worst, std::abs(cf - num));
      if (std::abs(cf - num) > 1e-6)
        MESSAGE(to_string(tag), " (", f.param(0), ",", f.param(1), ") vs (", h.param(0), ",", h.param(1),
                ") cf=", cf, " num=", num);
    }
    CHECK_MESSAGE(worst <= 1e-6, to_string(tag), " worst deviation ", worst);
  }
}

TEST_CASE("property: range, symmetry and triangle inequality") {
  std::mt19937_64 g(23);
  std::uniform_int_distribution<int> trials(1, 40);
  for (auto tag : kTags) {
    for (int i = 0; i < 200; ++i) {
      const int n = trials(g);
      const Family a = random_family(tag, g, n), b = random_family(tag, g, n), c = random_family(tag, g, n);
      const double ab = hellinger_cf(a, b).value, bc = hellinger_cf(b, c).value, ac = hellinger_cf(a, c).value;
      for (double v : {ab, bc, ac}) CHECK((v >= 0.0 && v <= 1.0));
      CHECK(ab == hellinger_cf(b, a).value);
      CHECK(ac <= ab + bc + 1e-8);
      if (i < 20) {
        const double q_ab = hellinger_num(a, b).value, q_ba = hellinger_num(b, a).value;
        CHECK(std::abs(q_ab - q_ba) <= 1e-10);
        CHECK((q_ab >= 0.0 && q_ab <= 1.0));
      }
    }
  }
}

TEST_CASE("property: normal joint distance depends only on the shift") {
  std::mt19937_64 g(31);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double theta = -50 + 100 * u(g), shift = 3 * u(g), translate = -100 + 200 * u(g);
    const double var = 0.1 + 5 * u(g);
    const std::size_t m = 1 + static_cast<std::size_t>(30 * u(g));
    const double h1 = hellinger_joint({Family::normal(theta, var), m}, {Family::normal(theta + shift, var), m}).value;
    const double h2 = hellinger_joint({Family::normal(theta + translate, var), m},
                                      {Family::normal(theta + translate + shift, var), m})
                          .value;
    CHECK(std::abs(h1 - h2) <= 1e-12);
  }
}

TEST_CASE("property: quadratic bounds on the squared normal distance") {
  // H^2 = 1 - exp(-a D^2) with a = m / (8 sigma^2); on D in (0, 1]
  // (1 - e^{-a}) D^2 <= H^2 <= a D^2 since (1 - e^{-x})/x decreases.
  for (double var : {0.5, 1.0, 4.0}) {
    for (std::size_t m : {1u, 3u, 10u}) {
      const double a = static_cast<double>(m) / (8 * var);
      const double lower = 0.999 * (1 - std::exp(-a)), upper = a;
      for (double d = 0.01; d <= 1.0 + 1e-12; d += 0.01) {
        const double h = hellinger_joint({Family::normal(0, var), m}, {Family::normal(d, var), m}).value;
        CHECK(lower * d * d < h * h);
        CHECK(h * h < upper * d * d);
      }
    }
  }
}
