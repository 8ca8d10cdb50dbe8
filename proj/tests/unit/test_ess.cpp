#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "mdd/errors.hpp"
#include "mdd/ess.hpp"

using namespace mdd;

namespace {

const ConjugateModel kNN(ModelTag::NN, Family::normal(0, 1), 1e4, 4.0);
const ConjugateModel kGExp(ModelTag::GExp, Family::gamma(4, 8), 10);
const ConjugateModel kBB(ModelTag::BB, Family::beta(2, 3), 1e4);

}  // namespace

TEST_CASE("expected posterior curvature") {
  CHECK(expected_posterior_curvature(kNN, 3, 0.7) == doctest::Approx(0.75));
  CHECK(expected_posterior_curvature(kGExp, 2, 0.5) == doctest::Approx((0.4 + 1) / 0.25));
  const ConjugateModel gp(ModelTag::GP, Family::gamma(4, 8), 10);
  CHECK(expected_posterior_curvature(gp, 10, 0.5) == doctest::Approx((0.4 + 5 - 1) / 0.25));
  const ConjugateModel bb(ModelTag::BB, Family::beta(2, 3), 10, std::nullopt, 3);
  CHECK(expected_posterior_curvature(bb, 2, 0.4) ==
        doctest::Approx((0.2 + 2 * 3 * 0.4 - 1) / 0.16 + (0.3 + 2 * 3 * 0.6 - 1) / 0.36));
  CHECK_THROWS_AS(expected_posterior_curvature(kBB, 2, 1.0), DomainError);
  CHECK_THROWS_AS(expected_posterior_curvature(kGExp, 2, 0.0), DomainError);
}

TEST_CASE("informative ESS on the grid") {
  CHECK(delta(2, 0.0, kNN.informative(), kNN) == doctest::Approx(0.5));
  const auto nn = ess_grid(kNN.informative(), kNN, 0.0);
  CHECK(nn.ess == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(nn.method == EssMethod::GridInterpolated);

  const auto ge = ess_grid(kGExp.informative(), kGExp, 0.5);
  CHECK(ge.ess == doctest::Approx(3.6).epsilon(1e-12));

  const auto bb = ess_grid(kBB.informative(), kBB, 0.4);
  CHECK(bb.ess == doctest::Approx(5.0).epsilon(1e-3));

  CHECK(ess_closed_form(kNN).ess == 4.0);
  CHECK(ess_closed_form(kGExp).ess == doctest::Approx(3.6));
  CHECK(ess_closed_form(kBB).ess == 5.0);
  CHECK(ess_closed_form(kBB).method == EssMethod::ClosedForm);
}

TEST_CASE("mixture ESS endpoints") {
  CHECK(ess_mdd({0.0, kNN}).ess == doctest::Approx(4.0).epsilon(1e-12));
  const auto flat = ess_mdd({1.0, kNN});
  CHECK(flat.raw == doctest::Approx(4.0 / 1e4).epsilon(1e-9));
  CHECK(flat.ess == 1.0);
  CHECK(ess_mdd({0.5, kNN}).ess <= 4.0);
}

TEST_CASE("interpolation") {
  const auto r = interpolate_ess(2.5, [](int m) { return double(m); }, 10);
  CHECK(r.raw == doctest::Approx(2.5));
  CHECK(r.curve.size() >= 4);
  CHECK(r.curve.front().m == 0);

  const auto floored = interpolate_ess(0.3, [](int m) { return double(m); }, 10);
  CHECK(floored.raw == doctest::Approx(0.3));
  CHECK(floored.ess == 1.0);

  const auto at_min = interpolate_ess(0.5, [](int m) { return double(m); }, 10, 3);
  CHECK(at_min.raw == 3.0);

  CHECK_THROWS_AS(interpolate_ess(100.0, [](int m) { return double(m); }, 10), RangeExceededError);
  CHECK_THROWS_AS(interpolate_ess_auto(1.0, [](int) { return 0.0; }, 4, 64), RangeExceededError);
  CHECK(interpolate_ess_auto(1000.5, [](int m) { return double(m); }, 4).raw == doctest::Approx(1000.5));
}

TEST_CASE("property: mixture ESS never exceeds the informative ESS") {
  std::mt19937_64 g(21);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto tag : {ModelTag::NN, ModelTag::GP, ModelTag::GExp, ModelTag::BB}) {
    for (int i = 0; i < 20; ++i) {
      const double c = 2 + 500 * u(g);
      const ConjugateModel model = [&] {
        switch (tag) {
          case ModelTag::NN: return ConjugateModel(tag, Family::normal(20 * u(g) - 10, 0.1 + 4 * u(g)), c, 0.5 + 9 * u(g));
          case ModelTag::BB: return ConjugateModel(tag, Family::beta(1.5 + 20 * u(g), 1.5 + 20 * u(g)), c);
          default: return ConjugateModel(tag, Family::gamma(1.5 + 20 * u(g), 0.5 + 10 * u(g)), c);
        }
      }();
      const double informative = ess_mdd({0.0, model}).raw;
      double previous = informative;
      for (int k = 1; k <= 9; ++k) {
        const double w = 0.1 * k;
        const double raw = ess_mdd({w, model}).raw;
        CHECK_MESSAGE(raw <= informative + 1e-9, to_string(tag), " w=", w, " ", raw, " > ", informative);
        if (tag == ModelTag::NN) {
          // components share a mode, so more weight on the flat part always lowers the ESS
          CHECK(raw <= previous + 1e-9);
          previous = raw;
        }
      }
    }
  }
}

TEST_CASE("property: grid ESS agrees with the closed forms for large c") {
  std::mt19937_64 g(22);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double c = 1e6;
  for (int i = 0; i < 50; ++i) {
    const ConjugateModel models[] = {
        {ModelTag::NN, Family::normal(u(g), 0.05 + u(g)), c, 0.5 + 20 * u(g)},
        {ModelTag::GP, Family::gamma(1.5 + 30 * u(g), 0.5 + 10 * u(g)), c},
        {ModelTag::GExp, Family::gamma(1.5 + 30 * u(g), 0.5 + 10 * u(g)), c},
        {ModelTag::BB, Family::beta(1.5 + 30 * u(g), 1.5 + 30 * u(g)), c}};
    for (const auto& model : models) {
      const double grid = ess_mdd({0.0, model}).raw;
      const double closed = ess_closed_form(model).raw;
      CHECK_MESSAGE(oracle::rel_close(grid, closed, 1e-5), to_string(model.tag()), " ", grid, " vs ", closed);
    }
  }
}

TEST_CASE("property: the distance curve dips to the ESS and then rises") {
  for (const auto* model : {&kNN, &kGExp, &kBB}) {
    for (double w : {0.0, 0.3, 0.7}) {
      const auto r = ess_mdd({w, *model}, 400);
      std::size_t argmin = 0;
      for (std::size_t i = 1; i < r.curve.size(); ++i)
        if (r.curve[i].delta < r.curve[argmin].delta) argmin = i;
      CHECK(std::abs(r.curve[argmin].m - r.raw) <= 1.0);
      for (std::size_t i = argmin + 1; i < r.curve.size(); ++i) CHECK(r.curve[i].delta > r.curve[i - 1].delta);
      for (std::size_t i = 1; i <= argmin; ++i) CHECK(r.curve[i].delta < r.curve[i - 1].delta);
    }
  }
}

TEST_CASE("Jeffreys baseline") {
  const Family pi = Family::gamma(4, 8);
  const auto lj = jeffreys::prior_log_derivs(0.5);
  CHECK(lj.log_value == doctest::Approx(-std::log(0.5)));
  CHECK(lj.score == doctest::Approx(-2.0));
  CHECK(lj.curvature == doctest::Approx(-4.0));
  const double fd = oracle::neg_second_derivative([](double t) { return -std::log(t); }, 0.5, 1e-3);
  CHECK(lj.curvature == doctest::Approx(fd).epsilon(1e-6));

  CHECK(jeffreys::posterior_curvature(3, 0.5) == doctest::Approx(8.0));
  CHECK_THROWS_AS(jeffreys::posterior_curvature(0, 0.5), DomainError);

  const std::vector<double> weights{0.2, 0.5, 0.8};
  const auto d = jeffreys::deltas(2, pi, weights);
  CHECK(d.m == 2);
  CHECK(d.informative == doctest::Approx(8.0));
  CHECK(d.jeffreys == doctest::Approx(8.0));
  REQUIRE(d.mixture.size() == 3);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const double mix_fd = oracle::neg_second_derivative(
        [&](double t) { return std::log(w / t + (1 - w) * pdf(pi, t)); }, 0.5, 1e-3);
    CHECK(jeffreys::mixture_curvature(w, pi, 0.5) == doctest::Approx(mix_fd).epsilon(1e-6));
    CHECK(d.mixture[i] == doctest::Approx(std::abs(mix_fd - 4.0)).epsilon(1e-6));
  }

  CHECK(jeffreys::ess(0.0, pi).ess == doctest::Approx(4.0));
  CHECK(jeffreys::ess(1.0, pi).raw == 1.0);
  double previous = 4.0;
  for (double w : weights) {
    const double e = jeffreys::ess(w, pi).ess;
    CHECK(e >= 1.0);
    CHECK(e <= previous);
    previous = e;
  }
}
