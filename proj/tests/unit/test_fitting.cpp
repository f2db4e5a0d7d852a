#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "sin_trace_data.hpp"
#include "rkhs/errors.hpp"
#include "rkhs/fitting.hpp"

using namespace rkhs;

TEST_SUITE("fitting") {

TEST_CASE("linear saturating data") {
  std::vector<double> h, y;
  for (int i = 0; i < 8; ++i) {
    h.push_back(std::pow(0.5, i));
    y.push_back(9.0 - 2.0 * h.back());
  }
  const SaturatingFit fit = fit_saturating(h, y);
  CHECK(fit.c1 == doctest::Approx(9.0).epsilon(1e-6));
  CHECK(fit.c1_prime == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(fit.beta1 == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(fit.residual_rms < 1e-10);
  CHECK(evaluate(fit, 0.3) == doctest::Approx(9.0 - 0.6).epsilon(1e-6));
}

TEST_CASE("saturating fit on the sin(2 pi x) Matern 0 norms") {
  const SaturatingFit fit = fit_saturating(sin_trace::h, sin_trace::norms, {.burn_in = 2});
  CHECK(std::abs(fit.c1 - 4.504) <= 0.01);
  CHECK(std::abs(fit.c1_prime - 4.194) <= 0.01);
  CHECK(std::abs(fit.beta1 - 0.968) <= 0.01);
  CHECK(fit.points_used == 8);
}

TEST_CASE("noisy saturating data") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> noise(-1e-9, 1e-9);
  std::vector<double> h, y;
  for (int i = 0; i < 10; ++i) {
    h.push_back(0.5 * std::pow(0.6, i));
    y.push_back(5.0 - 3.0 * std::pow(h.back(), 1.5) + noise(rng));
  }
  const SaturatingFit fit = fit_saturating(h, y);
  CHECK(std::abs(fit.c1 - 5.0) < 1e-4);
  CHECK(std::abs(fit.c1_prime - 3.0) < 1e-4);
  CHECK(std::abs(fit.beta1 - 1.5) < 1e-4);
}

TEST_CASE("power-law fits") {
  std::vector<double> h, y;
  for (int i = 0; i < 6; ++i) {
    h.push_back(0.3 * std::pow(0.5, i));
    y.push_back(2.0 * std::sqrt(h.back()));
  }
  for (const PowerLawIntercept intercept : {PowerLawIntercept::least_squares, PowerLawIntercept::envelope}) {
    const PowerLawFit fit = fit_powerlaw(h, y, {.intercept = intercept});
    CHECK(std::abs(fit.c2 - 2.0) < 1e-10);
    CHECK(std::abs(fit.beta2 - 0.5) < 1e-10);
    CHECK(evaluate(fit, 0.25) == doctest::Approx(1.0));
  }

  const PowerLawFit flat = fit_powerlaw({0.5, 0.25, 0.125}, {1, 1, 1});
  CHECK(std::abs(flat.beta2) < 1e-14);
  CHECK(flat.c2 == doctest::Approx(1.0));
}

TEST_CASE("power law fit on the sin(2 pi x) Matern 0 increments") {
  const PowerLawFit fit = fit_powerlaw(sin_trace::increment_h, sin_trace::increments,
                                     {.burn_in = 2, .intercept = PowerLawIntercept::envelope});
  CHECK(std::abs(fit.c2 - 3.845) <= 0.01);
  CHECK(std::abs(fit.beta2 - 0.498) <= 0.01);
}

TEST_CASE("envelope intercept lies on or above every point") {
  const std::vector<double> h{0.5, 0.25, 0.125, 0.0625, 0.03125};
  const std::vector<double> y{1.1, 0.7, 0.52, 0.33, 0.26};
  const PowerLawFit ls = fit_powerlaw(h, y);
  const PowerLawFit env = fit_powerlaw(h, y, {.intercept = PowerLawIntercept::envelope});
  CHECK(env.beta2 == doctest::Approx(ls.beta2));
  CHECK(env.c2 >= ls.c2);
  for (std::size_t i = 0; i < h.size(); ++i) CHECK(evaluate(env, h[i]) >= y[i] * (1 - 1e-12));
}

TEST_CASE("equivariance") {
  std::vector<double> h, y;
  for (int i = 0; i < 8; ++i) {
    h.push_back(0.4 * std::pow(0.7, i));
    y.push_back(3.0 - 1.2 * std::pow(h.back(), 0.8) + 0.01 * std::sin(7.0 * i));
  }
  const SaturatingFit base = fit_saturating(h, y);
  std::vector<double> scaled = y;
  for (double& v : scaled) v *= 10.0;
  const SaturatingFit s = fit_saturating(h, scaled);
  CHECK(s.c1 == doctest::Approx(10 * base.c1).epsilon(1e-6));
  CHECK(s.beta1 == doctest::Approx(base.beta1).epsilon(1e-6));

  std::vector<double> h2 = h;
  for (double& v : h2) v *= 2.0;
  const SaturatingFit t = fit_saturating(h2, y);
  CHECK(t.c1 == doctest::Approx(base.c1).epsilon(1e-6));
  CHECK(t.beta1 == doctest::Approx(base.beta1).epsilon(1e-6));
  CHECK(t.c1_prime == doctest::Approx(base.c1_prime * std::pow(2.0, -base.beta1)).epsilon(1e-6));

  const PowerLawFit p = fit_powerlaw(h, y);
  const PowerLawFit p2 = fit_powerlaw(h2, y);
  CHECK(p2.beta2 == doctest::Approx(p.beta2));
  CHECK(p2.c2 == doctest::Approx(p.c2 * std::pow(2.0, -p.beta2)));
}

TEST_CASE("profile and constraint") {
  const SaturatingFit fit = fit_saturating(sin_trace::h, sin_trace::norms);
  CHECK(fit.profile.size() == 64);
  CHECK(fit.c1 >= *std::max_element(sin_trace::norms.begin(), sin_trace::norms.end()));
}

TEST_CASE("invalid inputs") {
  CHECK_THROWS_AS(fit_saturating({0.5, 0.25}, {1, 2}), fit_error);
  CHECK_THROWS_AS(fit_saturating({0.5, 0.25, 0.1}, {1, 2}), invalid_argument);
  CHECK_THROWS_AS(fit_powerlaw({0.5, 0.25}, {1, -2}), fit_error);
  CHECK_THROWS_AS(fit_powerlaw({0.5}, {1}), fit_error);
  // Decreasing data cannot saturate from below.
  CHECK_THROWS_AS(fit_saturating({0.5, 0.25, 0.125, 0.0625}, {4, 3, 2, 1}), fit_error);
}

}
