#include <cmath>

#include <doctest.h>

#include "rkhs/errors.hpp"
#include "rkhs/oracle.hpp"

using namespace rkhs;

TEST_SUITE("oracle") {

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  for (int order : {1, 2, 5, 10, 20}) {
    const QuadratureRule rule = gauss_legendre(order, -1.0, 2.0);
    CHECK(rule.nodes.size() == static_cast<std::size_t>(order));
    for (int p = 0; p < 2 * order; ++p) {
      const double exact = (std::pow(2.0, p + 1) - std::pow(-1.0, p + 1)) / (p + 1);
      CHECK(rule.integrate([p](double x) { return std::pow(x, p); }) ==
            doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("composite rule converges on a smooth integrand") {
  const double exact = std::sin(3.0) - std::sin(-1.0);
  double prev = 1.0;
  for (int order : {2, 3, 4, 5}) {
    const double err = std::abs(composite_gauss_legendre(-1.0, 3.0, {}, 2, order)
                                    .integrate([](double x) { return std::cos(x); }) - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-6);
  const double kinked = composite_gauss_legendre(-1.0, 1.0, {0.0}).integrate([](double x) { return std::abs(x); });
  CHECK(kinked == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("analytic Matérn 0 norms") {
  const auto abs = [](double x) { return std::abs(x); };
  const auto dabs = [](double x) { return x > 0 ? 1.0 : -1.0; };
  CHECK(exp_kernel_norm(abs, dabs, -1, 1, 1.0, 20, {0.0}) == doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(1e-12));
  CHECK(exp_kernel_norm([](double x) { return x * x; }, [](double x) { return 2 * x; }, -1, 1, 1.0) ==
        doctest::Approx(std::sqrt(38.0 / 15.0)).epsilon(1e-12));

  for (double a : {-1.0, 0.3}) {
    const auto k = [a](double x) { return std::exp(-std::abs(x - a)); };
    const auto dk = [a](double x) { return x > a ? -std::exp(-(x - a)) : std::exp(x - a); };
    CHECK(exp_kernel_norm(k, dk, a, 2.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto k3 = [](double x) { return std::exp(-std::abs(x - 0.3)); };
  const auto dk3 = [](double x) { return x > 0.3 ? -std::exp(-(x - 0.3)) : std::exp(x - 0.3); };
  CHECK(exp_kernel_norm(k3, dk3, -1, 1, 1.0, 20, {0.3}) == doctest::Approx(1.0).epsilon(1e-12));

  // Two-term expansion: |f|^2 = c^T A c.
  const double e = std::exp(-0.5);
  const auto f = [](double x) { return 2 * std::exp(-std::abs(x)) - std::exp(-std::abs(x - 0.5)); };
  const auto df = [](double x) {
    const double a = x > 0 ? -std::exp(-x) : std::exp(x);
    const double b = x > 0.5 ? -std::exp(-(x - 0.5)) : std::exp(x - 0.5);
    return 2 * a - b;
  };
  CHECK(exp_kernel_norm(f, df, -1, 1, 1.0, 20, {0.0, 0.5}) ==
        doctest::Approx(std::sqrt(4 + 1 - 4 * e)).epsilon(1e-10));
}

TEST_CASE("dense reference approaches the analytic norm from below") {
  const Sampler abs = [](PointRef x) { return std::abs(x[0]); };
  const DenseReference r = dense_reference_norm(KernelSpec(0), abs, BoxDomain::interval(-1, 1), 2049);
  const double exact = std::sqrt(7.0 / 3.0);
  CHECK(r.points == 2049);
  CHECK(r.norm <= exact);
  CHECK(r.norm >= 0.995 * exact);
  CHECK(r.half_resolution_norm <= r.norm);
}

TEST_CASE("invalid arguments") {
  CHECK_THROWS_AS(gauss_legendre(0), invalid_argument);
  CHECK_THROWS_AS(exp_kernel_norm(nullptr, nullptr, 0, 1, 1.0), invalid_argument);
  CHECK_THROWS_AS(exp_kernel_norm([](double) { return 1.0; }, [](double) { return 0.0; }, 1, 0, 1.0),
                  invalid_argument);
}

}
