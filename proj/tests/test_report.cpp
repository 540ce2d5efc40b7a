#include <cmath>
#include <sstream>

#include "doctest.h"
#include "gpk/format.hpp"
#include "gpk/random.hpp"
#include "gpk/report.hpp"
#include "gpk/stats.hpp"

using namespace gpk;
using doctest::Approx;

TEST_CASE("round-trip number formatting") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5e-17}) {
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
}

TEST_CASE("csv and json tables") {
  Table t({"n", "value", "label", "ok"});
  t.meta("subcommand", "demo");
  t.meta("seed", "1");
  t.meta("seed", "2");
  t.add_row({std::int64_t{3}, 0.25, std::string("a,b"), true});
  t.add_row({std::int64_t{4}, NAN, std::string("plain"), false});
  std::ostringstream csv;
  t.write_csv(csv);
  CHECK(csv.str() == "# subcommand=demo; seed=2\nn,value,label,ok\n3,0.25,\"a,b\",true\n4,nan,plain,false\n");

  std::ostringstream js;
  t.write_json(js);
  const std::string j = js.str();
  CHECK(j.front() == '{');
  CHECK(j.find("\"meta\"") < j.find("\"rows\""));
  CHECK(j.find("\"value\": \"nan\"") != std::string::npos);
  CHECK(j.find("\"label\": \"a,b\"") != std::string::npos);
  CHECK_THROWS(t.add_row({std::int64_t{1}}));
}

TEST_CASE("statistics helpers") {
  CHECK(mean({1.0, 2.0, 3.0}) == 2.0);
  CHECK(sample_variance({1.0, 2.0, 3.0}) == 1.0);
  CHECK(median({3.0, 1.0, 2.0, 10.0}) == 2.5);
  CHECK(ols_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == Approx(2.0));
  // Top-half fit ignores the pre-asymptotic start of the ladder.
  CHECK(loglog_slope_top_half({2, 4, 8, 16, 32, 64}, {5.0, 4.0, 1.0 / 64, 1.0 / 256, 1.0 / 1024, 1.0 / 4096}) ==
        Approx(-2.0));
  std::vector<double> v(1001, 0.1);
  CHECK(tree_sum(v) == Approx(100.1).epsilon(1e-15));
}

TEST_CASE("replicate streams") {
  const RngSpec base{42, 0};
  CHECK(base.replicate(3).seed == base.replicate(3).seed);
  CHECK(base.replicate(3).stream == base.replicate(3).stream);
  CHECK(base.replicate(3).stream != base.replicate(4).stream);
  auto a = make_engine(base.replicate(1)), b = make_engine(base.replicate(1));
  CHECK(standard_normals(a, 5) == standard_normals(b, 5));
}
