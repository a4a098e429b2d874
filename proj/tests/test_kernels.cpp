#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "cspi/error.hpp"
#include "cspi/kernels.hpp"

using namespace cspi::kernels;

TEST_CASE("chunked reductions are bitwise reproducible") {
  auto f = [](std::size_t i) { return std::sin(0.1 * i) / (1.0 + i); };
  for (std::size_t n : {0ul, 1ul, 1023ul, 1024ul, 1025ul, 100000ul}) {
    const double serial = chunked_reduce_serial<double>(n, f);
    const double parallel = chunked_reduce_omp<double>(n, f);
    CHECK(serial == parallel);
  }
}

TEST_CASE("first failing index wins") {
  auto f = [](std::size_t i) -> double {
    if (i == 5000 || i == 90000) throw std::runtime_error(std::to_string(i));
    return 1.0;
  };
  for (auto exec : {Execution::Serial, Execution::Parallel}) {
    try {
      chunked_reduce<double>(exec, 100000, f);
      FAIL("no exception");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()) == "5000");
    }
  }
}

TEST_CASE("map keeps index order") {
  const auto out = map_indexed<int>(Execution::Parallel, 500, [](std::size_t i) { return int(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == int(i * i));
}

TEST_CASE("thread cap from the environment") {
  setenv("CSPI_LAB_THREADS", "1", 1);
  apply_thread_limit_from_env();
  CHECK(max_threads() == 1);
  setenv("CSPI_LAB_THREADS", "two", 1);
  CHECK_THROWS_AS(apply_thread_limit_from_env(), cspi::LabError);
  unsetenv("CSPI_LAB_THREADS");
}
