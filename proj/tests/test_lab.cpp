#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cspi/error.hpp"
#include "cspi/hamiltonian_core.hpp"
#include "cspi/lab.hpp"

using namespace cspi;
using json = nlohmann::json;

namespace {
std::string field_of_error(const lab::RunConfig& c) {
  try {
    c.validate();
  } catch (const LabError& e) {
    CHECK(e.kind() == ErrorKind::ConfigInvalid);
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("config validation names the field") {
  lab::RunConfig c;
  CHECK(field_of_error(c).empty());
  c.beta = -1;
  CHECK(field_of_error(c).find("model.beta") != std::string::npos);
  c = {};
  c.s_values = {0.0, 2.0};
  CHECK(field_of_error(c).find("s:") != std::string::npos);
  c = {};
  c.samples = 10;
  CHECK(field_of_error(c).find("mc.samples") != std::string::npos);
  c = {};
  c.format = "xml";
  CHECK(field_of_error(c).find("output.format") != std::string::npos);
  c = {};
  c.scheme = "midpoint";
  CHECK(field_of_error(c).find("scheme") != std::string::npos);
  CHECK_THROWS_AS(lab::run("nonsense", lab::RunConfig{}), LabError);
}

TEST_CASE("transfer report round-trips bit-exactly") {
  lab::RunConfig c;
  c.n_values = {16, 32, 64, 128};
  const auto report = lab::run("transfer", c);
  CHECK(report.pass);
  REQUIRE(report.fitted_order);
  CHECK(*report.fitted_order == doctest::Approx(1.0).epsilon(0.05));

  const json j = json::parse(lab::render_json(report));
  CHECK(j["command"] == "transfer");
  for (const char* key : {"command", "config", "rows", "meta"}) CHECK(j.contains(key));
  for (const char* key : {"seed", "wall_ms", "pass"}) CHECK(j["meta"].contains(key));
  REQUIRE(j["rows"].size() == 4);
  const double z = exact_partition(NormalHamiltonian::bose_hubbard(-0.5, 1.0), 1.0, {}).value;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& row = j["rows"][i];
    for (const char* key : {"sweep", "value", "reference", "abs_error", "rel_error", "tail_bound", "stat_error"})
      CHECK(row.contains(key));
    CHECK(row["value"].get<double>() == *report.rows[i].value);
    CHECK(row["reference"].get<double>() == z);
    CHECK(row["rel_error"].get<double>() == *report.rows[i].rel_error);
    CHECK(row["stat_error"].is_null());
    CHECK(row["sweep"]["N"] == c.n_values[i]);
  }
}

TEST_CASE("empty reports") {
  lab::Report empty;
  empty.command = "exact";
  const json j = json::parse(lab::render_json(empty));
  CHECK(j["rows"].is_array());
  CHECK(j["rows"].empty());
  CHECK(lab::render_csv(empty) == "sweep,value,reference,abs_error,rel_error,tail_bound,stat_error\n");
}

TEST_CASE("s-sweep rows are sorted by s then N") {
  lab::RunConfig c;
  c.s_values = {1.0, -1.0, 0.0};
  c.n_values = {256, 64};
  const auto report = lab::run("s-sweep", c);
  REQUIRE(report.rows.size() == 6);
  std::vector<std::pair<double, long>> keys;
  for (const auto& row : report.rows)
    keys.push_back({std::get<double>(row.sweep[0].second), std::get<long>(row.sweep[1].second)});
  CHECK(std::is_sorted(keys.begin(), keys.end()));
  // 256 is too coarse for s = -1 to reach 1e-2, so the gate fails.
  CHECK_FALSE(report.pass);
  const std::string csv = lab::render_csv(report);
  CHECK(csv.find("\ns=-1;N=64,") != std::string::npos);
}

TEST_CASE("ito-compare") {
  lab::RunConfig c;
  c.n_values = {64};
  const auto report = lab::run("ito-compare", c);
  REQUIRE(report.rows.size() == 3);
  CHECK(report.pass);
  CHECK(*report.rows[0].value == doctest::Approx(1.42019));
  CHECK(*report.rows[1].value == doctest::Approx(1.75331));
  CHECK(*report.rows[2].value > *report.rows[0].value);
  CHECK(*report.rows[2].value < *report.rows[1].value);
}

TEST_CASE("errors fail the gate without aborting the report") {
  lab::RunConfig c;
  c.mu = 0.0;
  c.u = 0.0;
  const auto report = lab::run("exact", c);
  CHECK_FALSE(report.pass);
  REQUIRE(report.errors.size() == 1);
  CHECK(report.errors[0].find("DivergentSum") != std::string::npos);
}

TEST_CASE("seeded Monte Carlo reports are byte-identical") {
  lab::RunConfig c;
  c.mu = -1.0;
  c.samples = 20000;
  c.seed = 99;
  c.timing = false;
  const auto a = lab::render_json(lab::run("hs-mc", c));
  const auto b = lab::render_json(lab::run("hs-mc", c));
  CHECK(a == b);
  c.seed = 100;
  CHECK(lab::render_json(lab::run("hs-mc", c)) != a);
}

TEST_CASE("write_report") {
  lab::RunConfig c;
  c.format = "csv";
  c.path = "lab_test_report.csv";
  const auto report = lab::run("exact", c);
  lab::write_report(report);
  std::ifstream in(c.path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == lab::render_csv(report));
  std::remove(c.path.c_str());

  lab::Report bad = report;
  bad.config.path = "/nonexistent-dir/report.json";
  CHECK_THROWS_AS(lab::write_report(bad), LabError);
}

TEST_CASE("ordering and generating-function commands pass") {
  lab::RunConfig c;
  c.fock_n = 12;
  CHECK(lab::run("ordering-check", c).pass);
  c.n_values = {2, 8};
  c.s_values = {0.0, 1.0};
  CHECK(lab::run("fs-check", c).pass);
}
