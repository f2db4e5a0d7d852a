#include <doctest.h>

#include "rkhs/errors.hpp"
#include "rkhs/serialization.hpp"

using namespace rkhs;

TEST_SUITE("serialization") {

TEST_CASE("kernel spec round trip") {
  const json j = KernelSpec(2, 0.75);
  CHECK(j.at("family") == "matern");
  CHECK(j.at("order") == 2);
  CHECK(j.get<KernelSpec>() == KernelSpec(2, 0.75));
  CHECK_THROWS(json::parse(R"({"family":"gauss","order":0,"shape":1})").get<KernelSpec>());
}

TEST_CASE("interpolant round trip") {
  const TestFunction& fn = find_test_function("franke");
  const PointSet grid = tensor_grid(fn.domain, {5, 4});
  Vector values(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) values[static_cast<Eigen::Index>(i)] = fn.f(grid.point(i));
  const Interpolant s = interpolate(KernelSpec(1, 2.0), grid, values);
  const Interpolant back = interpolant_from_json(json::parse(json(s).dump()));
  CHECK(back.spec() == s.spec());
  CHECK(back.norm_squared() == s.norm_squared());
  CHECK(back.coefficients() == s.coefficients());
  CHECK(back.centers().domain() == s.centers().domain());
  CHECK_FALSE(back.factorization());
  Matrix eval(2, 3);
  eval << 0.1, 0.5, 0.93, 0.7, 0.2, 0.01;
  CHECK(evaluate_batch(back, eval) == evaluate_batch(s, eval));
  // Power functions of restored interpolants refactorize.
  CHECK((PowerFunction(back).batch(eval) - PowerFunction(s).batch(eval)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("reports serialize") {
  const TestFunction& fn = find_test_function("exp");
  const NormTrace trace = build_trace(KernelSpec(0), make_dyadic_schedule(fn.domain, 3, 6), fn.f);
  const EstimateSummary summary = estimate_norm(trace);
  const json j = summary;
  CHECK(j.at("membership").at("classification") == "converging");
  CHECK(j.at("alg1").at("norm_estimate").get<double>() == summary.alg1->norm_estimate);
  CHECK(j.at("alg2").at("fit").at("beta2").get<double>() == summary.alg2->powerlaw->beta2);
  const json t = trace;
  CHECK(t.at("levels").size() == 6);
  CHECK(t.at("levels")[0].at("increment_norm").is_null());
}

TEST_CASE("domain parsing") {
  const BoxDomain d = domain_from_json(json::parse(R"({"lo":[0,-1],"hi":[1,2]})"));
  CHECK(d.dim() == 2);
  CHECK(d.hi()[1] == 2.0);
  CHECK_THROWS(domain_from_json(json::parse(R"({"lo":[0],"hi":[1,2]})")));
}

}
