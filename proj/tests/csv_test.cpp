#include <cmath>
#include <sstream>
#include <string>

#include <doctest.h>

#include "mdi/csv.hpp"
#include "mdi/error.hpp"
#include "mdi/rng.hpp"
#include "mdi/scenario.hpp"

namespace {

std::string render(const mdi::Dataset& d, bool oracle) {
  std::ostringstream os;
  mdi::csv::write_dataset(os, d, oracle);
  return os.str();
}

mdi::Dataset parse(const std::string& text, std::string_view na = "") {
  std::istringstream is(text);
  return mdi::csv::read_dataset(is, na);
}

}  // namespace

TEST_CASE("dataset round-trips byte-identically") {
  mdi::RngStream rng(51, 0);
  const auto d = mdi::generate(mdi::ScenarioParams{}, 50, rng);
  for (bool oracle : {false, true}) {
    const std::string first = render(d, oracle);
    const auto reread = parse(first);
    CHECK(reread.n == d.n);
    CHECK(reread.has_oracle() == oracle);
    CHECK(render(reread, oracle) == first);
  }
}

TEST_CASE("format_real survives a parse round trip") {
  mdi::RngStream rng(52, 0);
  for (int i = 0; i < 2000; ++i) {
    const double v = mdi::draw_normal(rng, 0.0, 100.0);
    const double back = std::stod(mdi::csv::format_real(v));
    CHECK(back == v);
  }
}

TEST_CASE("missing markers") {
  const auto d = parse("z,x_obs,y\n1,,2.5\n0,0.25,1.0\n");
  CHECK(d.n == 2);
  CHECK(d.r_x[0] == 1);
  CHECK(std::isnan(d.x_obs[0]));
  CHECK(d.r_x[1] == 0);
  CHECK(d.x_obs[1] == 0.25);

  const auto e = parse("z,x_obs,y\n1,NA,2.5\n0,0.25,1.0\n", "NA");
  CHECK(e.r_x[0] == 1);
  CHECK(e.r_x[1] == 0);
}

TEST_CASE("column order only matters through the header") {
  const auto d = parse("y,z,x_obs\n2.5,1,\n1.0,0,0.25\n");
  CHECK(d.n == 2);
  CHECK(d.z[0] == 1);
  CHECK(d.y[0] == 2.5);
  CHECK(d.r_x[0] == 1);
}

TEST_CASE("parse errors carry line diagnostics") {
  auto check_message = [](const std::string& text, const char* needle) {
    try {
      parse(text);
      FAIL("expected ParseError for: " << text);
    } catch (const mdi::ParseError& e) {
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  check_message("z,x_obs,y,w\n", "unknown column 'w'");
  check_message("z,x_obs\n", "must name columns");
  check_message("z,x_obs,y,x_full\n", "must appear together");
  check_message("z,x_obs,y\n2,0.5,1.0\n", "line 2");
  check_message("z,x_obs,y\n1,abc,1.0\n", "x_obs");
  check_message("z,x_obs,y\n1,0.5\n", "expected 3 fields");
  check_message("z,x_obs,y\n1,0.5,\n", "'y'");
  check_message("z,x_obs,y,x_full,r_x\n1,,2.0,0.5,0\n", "disagrees");
  check_message("", "missing header");
}
