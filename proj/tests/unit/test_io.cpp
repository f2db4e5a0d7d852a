#include <fstream>
#include <iterator>
#include <sstream>

#include <doctest.h>

#include "rkhs/errors.hpp"
#include "rkhs/io.hpp"
#include "rkhs/testbed.hpp"

using namespace rkhs;

namespace {

std::size_t schema_line(const std::string& text) {
  std::istringstream in(text);
  try {
    read_samples_csv(in);
  } catch (const schema_error& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("samples round trip") {
  const TestFunction& fn = find_test_function("franke");
  const NestedSchedule schedule = make_dyadic_schedule(fn.domain, 3, 3);
  const SampleSet samples = make_samples(fn, schedule);
  std::ostringstream out;
  write_samples_csv(out, schedule.levels, samples.values);
  std::istringstream in("# produced by a test\n" + out.str());
  const SampleSet back = read_samples_csv(in);
  REQUIRE(back.num_levels() == 3);
  CHECK(back.dim == 2);
  for (std::size_t l = 0; l < 3; ++l) {
    CHECK(back.points[l] == samples.points[l]);
    CHECK(back.values[l] == samples.values[l]);
  }
  const auto levels = sample_levels(back, fn.domain);
  CHECK(levels.back().size() == 81);
}

TEST_CASE("schema errors carry line numbers") {
  CHECK(schema_line("") == 0);
  CHECK(schema_line("level,x,value\n") == 1);
  CHECK(schema_line("dim,0\n") == 1);
  CHECK(schema_line("# c\ndim,1\n0,0.5,1\n0,0.5\n") == 4);
  CHECK(schema_line("dim,1\n0,abc,1\n") == 2);
  CHECK(schema_line("dim,1\n0,0.5,1\n2,0.25,1\n") > 0);
  CHECK(schema_line("dim,1\n-1,0.5,1\n") == 2);
  CHECK(schema_line("dim,1\n0,0.5,nan\n") == 2);
  std::istringstream empty_rows("dim,1\n");
  CHECK_THROWS_AS(read_samples_csv(empty_rows), schema_error);
  CHECK_THROWS_AS(read_samples_csv(std::filesystem::path("/nonexistent/samples.csv")), invalid_argument);
}

TEST_CASE("nesting and consistency of sample levels") {
  std::istringstream not_nested("dim,1\n0,0,1\n0,1,1\n1,0,1\n1,0.5,1\n");
  const SampleSet a = read_samples_csv(not_nested);
  CHECK_THROWS_AS(sample_levels(a, bounding_box(a)), invalid_argument);

  std::istringstream inconsistent("dim,1\n0,0,1\n1,0,2\n1,1,1\n");
  const SampleSet b = read_samples_csv(inconsistent);
  CHECK_THROWS_AS(sample_levels(b, bounding_box(b)), invalid_argument);

  std::istringstream fine("dim,1\n0,0,1\n1,0,1\n1,1,1\n");
  const SampleSet c = read_samples_csv(fine);
  const BoxDomain box = bounding_box(c);
  CHECK(box.lo()[0] == 0.0);
  CHECK(box.hi()[0] == 1.0);
  CHECK_THROWS_AS(sample_levels(c, BoxDomain::interval(0.5, 1)), invalid_argument);
}

TEST_CASE("holdout round trip") {
  const Holdout h = make_holdout(find_test_function("f2"), 4);
  CHECK(h.points.cols() == 16);
  std::ostringstream out;
  write_holdout_csv(out, h.points, h.values);
  std::istringstream in(out.str());
  const Holdout back = read_holdout_csv(in);
  CHECK(back.points == h.points);
  CHECK(back.values == h.values);
  std::istringstream bad("dim,2\n0.1,0.2\n");
  CHECK_THROWS_AS(read_holdout_csv(bad), schema_error);
}

TEST_CASE("trace round trip") {
  const TestFunction& fn = find_test_function("exp");
  const NormTrace trace = build_trace(KernelSpec(1), make_dyadic_schedule(fn.domain, 3, 5), fn.f);
  std::ostringstream out;
  out << config_header("test run");
  trace.write_csv(out);
  CHECK(out.str().rfind("# config: test run\n", 0) == 0);
  std::istringstream in(out.str());
  const NormTrace back = read_trace_csv(in, KernelSpec(1));
  REQUIRE(back.size() == trace.size());
  CHECK(back.nested);
  for (std::size_t i = 0; i < trace.size(); ++i) {
    CHECK(back.levels[i].fill_distance == trace.levels[i].fill_distance);
    CHECK(back.levels[i].norm_squared == trace.levels[i].norm_squared);
    CHECK(back.levels[i].increment_norm == trace.levels[i].increment_norm);
    CHECK(back.levels[i].num_points == trace.levels[i].num_points);
  }
  const EstimateSummary a = estimate_norm(trace);
  const EstimateSummary b = estimate_norm(back);
  CHECK(a.alg1->norm_estimate == b.alg1->norm_estimate);
  CHECK(a.alg2->norm_estimate == b.alg2->norm_estimate);

  std::istringstream bad("level,h,norm_squared,increment_norm,num_points\n1,0.5,1,,3\n");
  CHECK_THROWS_AS(read_trace_csv(bad, KernelSpec(0)), schema_error);
}

TEST_CASE("atomic writes") {
  const auto dir = std::filesystem::temp_directory_path() / "rkhs_norm_io_test";
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  std::ifstream in(dir / "a.txt");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(content == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& entry : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
  CHECK(config_header("").empty());
}

}
