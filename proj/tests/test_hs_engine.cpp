#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "cspi/error.hpp"
#include "cspi/hs_engine.hpp"
#include "frozen_values.hpp"

using namespace cspi;

namespace {
const NormalHamiltonian kRef = NormalHamiltonian::bose_hubbard(-0.5, 1.0);
const NormalHamiltonian kDeep = NormalHamiltonian::bose_hubbard(-1.0, 1.0);
constexpr SliceFactorScheme kExact = SliceFactorScheme::ExactProduct;
constexpr SliceFactorScheme kNaive = SliceFactorScheme::NaiveExponential;
constexpr SliceFactorScheme kIto = SliceFactorScheme::ItoCorrected;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const LabError& e) {
    return e.kind();
  }
  FAIL("expected a LabError");
  return ErrorKind::InvalidArgument;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST_CASE("decoupling") {
  const auto normal = hs_decouple(kRef, OrderingIndex::normal());
  CHECK(normal.mu_eff == doctest::Approx(-0.5));
  CHECK(normal.const_shift == doctest::Approx(0.0));
  CHECK(normal.quad_coeff == doctest::Approx(0.5));
  const auto weyl = hs_decouple(kRef, OrderingIndex::weyl());
  CHECK(weyl.mu_eff == doctest::Approx(0.5));
  CHECK(weyl.const_shift == doctest::Approx(0.0));
  const auto anti = hs_decouple(kRef, OrderingIndex::anti_normal());
  CHECK(anti.mu_eff == doctest::Approx(1.5));
  CHECK(anti.const_shift == doctest::Approx(0.5));
  CHECK(kind_of([] { hs_decouple(NormalHamiltonian({{1, 0.5}, {3, 1.0}}), OrderingIndex::weyl()); }) ==
        ErrorKind::UnsupportedDegree);
  CHECK(parse_scheme("ito") == kIto);
  CHECK(parse_scheme(to_string(kNaive)) == kNaive);
  CHECK(kind_of([] { parse_scheme("euler"); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("slice factors") {
  const TimeGrid grid(1.0, 10);
  const auto noise = NoiseModel::for_grid(1.0, grid);
  CHECK(noise.variance_per_slice == doctest::Approx(10.0));
  const auto s1 = OrderingIndex::normal();
  CHECK(slice_factor(0, kExact, noise, -0.5, 0.1, s1) == Complex(1.0));
  CHECK(std::abs(slice_factor(2, kExact, noise, -0.5, 0.1, s1) - 0.8025) < 1e-15);
  CHECK(std::abs(slice_factor(1, kNaive, noise, -0.5, 0.1, s1) - std::exp(-0.05 - 0.05)) < 1e-15);

  SUBCASE("closed moments and quadrature agree") {
    const TimeGrid fine(1.0, 64);
    const auto nz = NoiseModel::for_grid(1.0, fine);
    for (int n = 0; n <= 40; ++n) {
      const Complex closed = slice_factor_closed(n, kExact, nz, -0.5, fine.epsilon(), s1);
      const Complex quad = slice_factor_quadrature(n, kExact, nz, -0.5, fine.epsilon(), s1, 128);
      CHECK(std::abs(closed - quad) < 1e-10 * std::max(1.0, std::abs(closed)));
      for (auto scheme : {kNaive, kIto})
        for (double s : {-1.0, 0.0, 1.0}) {
          const Complex c = slice_factor_closed(n, scheme, nz, 0.2, fine.epsilon(), OrderingIndex(s));
          const Complex q =
              slice_factor_quadrature(n, scheme, nz, 0.2, fine.epsilon(), OrderingIndex(s), 128);
          CHECK(std::abs(c - q) < 1e-10 * std::max(1.0, std::abs(c)));
        }
    }
  }

  CHECK(kind_of([] {
          const TimeGrid g(1.0, 1);
          slice_factor(1, kExact, NoiseModel::for_grid(1.0, g), 1.0, 1.0, OrderingIndex::anti_normal());
        }) == ErrorKind::DenominatorPole);
  CHECK(kind_of([&] { slice_factor_closed(1, kExact, noise, -0.5, 0.1, OrderingIndex::weyl()); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("series identities") {
  for (int n : {1, 4, 16, 64, 256}) {
    const TimeGrid grid(1.0, n);
    for (double s : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
      const auto ito = hs_partition_series(kRef, grid, OrderingIndex(s), kIto);
      CHECK(rel(ito.value, frozen::kExactZ) < 1e-10);
      CHECK(ito.imag_residue < 1e-10);
    }
    const auto naive = hs_partition_series(kRef, grid, OrderingIndex::normal(), kNaive);
    CHECK(rel(naive.value, frozen::kNaiveZ) < 1e-10);
  }
  HsOptions forced;
  forced.force_quadrature = true;
  const auto ito_q = hs_partition_series(kRef, TimeGrid(1.0, 4), OrderingIndex::weyl(), kIto,
                                         hs_series_policy(), forced);
  CHECK(rel(ito_q.value, frozen::kExactZ) < 1e-10);
}

TEST_CASE("exact product converges at first order") {
  const auto z64 = hs_partition_series(kRef, TimeGrid(1, 64), OrderingIndex::normal(), kExact);
  const auto z128 = hs_partition_series(kRef, TimeGrid(1, 128), OrderingIndex::normal(), kExact);
  CHECK(std::abs(z64.value - frozen::kTransferN64) < 1e-12);
  const double ratio =
      std::abs(z64.value - frozen::kExactZ) / std::abs(z128.value - frozen::kExactZ);
  CHECK(ratio > 1.8);
  CHECK(ratio < 2.2);
  for (double s : {-1.0, -0.5, 0.0, 0.5}) {
    double previous = 1.0;
    for (int n : {64, 256, 1024}) {
      const auto est = hs_partition_series(kRef, TimeGrid(1, n), OrderingIndex(s), kExact);
      const double err = rel(est.value, frozen::kExactZ);
      CHECK(err < previous);
      CHECK(est.imag_residue < 1e-10);
      previous = err;
    }
    CHECK(previous < 1e-2);
  }
  CHECK(kind_of([] { hs_partition_series(kRef, TimeGrid(1, 1), OrderingIndex::normal(), kExact); }) ==
        ErrorKind::SeriesNotDecaying);
}

TEST_CASE("contour restriction") {
  const auto warm = NormalHamiltonian::bose_hubbard(0.3, 1.0);
  CHECK(kind_of([&] { hs_partition_series(warm, TimeGrid(1, 8), OrderingIndex::normal(), kIto); }) ==
        ErrorKind::ContourDeformationRequired);
  HsOptions allow;
  allow.allow_positive_mu = true;
  const auto est =
      hs_partition_series(warm, TimeGrid(1, 8), OrderingIndex::normal(), kIto, hs_series_policy(), allow);
  CHECK(est.value > 0.0);
  CHECK(contour_drift(kExact, OrderingIndex::normal(), -0.5, 1.0) == doctest::Approx(0.0));
  CHECK(contour_drift(kNaive, OrderingIndex::normal(), -0.5, 1.0) == doctest::Approx(-0.5));
}

TEST_CASE("Monte Carlo") {
  const TimeGrid grid(1.0, 64);
  const auto s1 = OrderingIndex::normal();
  const auto a = hs_partition_mc(kDeep, grid, s1, kExact, 100000, 11);
  CHECK(std::abs(a.value - frozen::kSeriesMuMinus1N64) < 3.0 * *a.stat_error);
  CHECK(a.imag_residue < 5.0 * *a.stat_error);

  HsOptions serial;
  serial.execution = kernels::Execution::Serial;
  const auto b = hs_partition_mc(kDeep, grid, s1, kExact, 100000, 11, serial);
  CHECK(a.value == b.value);
  CHECK(*a.stat_error == *b.stat_error);
  const auto c = hs_partition_mc(kDeep, grid, s1, kExact, 100000, 12);
  CHECK(c.value != a.value);

  SUBCASE("zero interaction is deterministic") {
    const auto free = NormalHamiltonian::bose_hubbard(-0.5, 0.0);
    const auto est = hs_partition_mc(free, grid, s1, kExact, 1000, 3);
    CHECK(*est.stat_error == 0.0);
    CHECK(est.value == doctest::Approx(1.0 / (1.0 - std::pow(1.0 - 0.5 / 64, 64))).epsilon(1e-12));
  }

  CHECK(kind_of([&] { hs_partition_mc(kRef, grid, s1, kExact, 1000, 1); }) ==
        ErrorKind::ContourDeformationRequired);
  CHECK(kind_of([&] { hs_partition_mc(kDeep, grid, s1, kExact, 999, 1); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("small-N expectation of 1/det matches the series") {
  HsOptions opt;
  opt.nodes = 32;
  for (int n : {1, 2, 3}) {
    const TimeGrid grid(1.0, n);
    const auto naive_q = hs_expectation_quadrature(kRef, grid, OrderingIndex::normal(), kNaive, 1e-8, opt);
    CHECK(rel(naive_q.value, frozen::kNaiveZ) < 1e-6);
    const auto ito_q = hs_expectation_quadrature(kDeep, grid, OrderingIndex::normal(), kIto, 1e-8, opt);
    const auto ito_s = hs_partition_series(kDeep, grid, OrderingIndex::normal(), kIto);
    CHECK(rel(ito_q.value, ito_s.value) < 1e-6);
    const auto cold = NormalHamiltonian::bose_hubbard(-3.0, 1.0);
    const auto ex_q = hs_expectation_quadrature(cold, grid, OrderingIndex::anti_normal(), kExact, 1e-8, opt);
    const auto ex_s = hs_partition_series(cold, grid, OrderingIndex::anti_normal(), kExact);
    CHECK(rel(ex_q.value, ex_s.value) < 1e-6);
  }
  CHECK(kind_of([] { hs_expectation_quadrature(kRef, TimeGrid(1, 4), OrderingIndex::normal(), kNaive); }) ==
        ErrorKind::InvalidArgument);
}

TEST_CASE("generalized determinant") {
  const double mu = -0.5, omega = 0.2;
  for (double s : {-1.0, 0.0, 1.0}) {
    double previous = 1.0;
    for (int n : {64, 128, 256, 512}) {
      const auto d = generalized_determinant_check(OrderingIndex(s), {omega}, mu, TimeGrid(1, n));
      if (s == 1.0) CHECK(d.closed == doctest::Approx(1.0 - std::exp(mu + omega)));
      if (s == -1.0) CHECK(d.closed == doctest::Approx(std::exp(-(mu + omega)) - 1.0));
      if (s != 0.0) {
        CHECK(d.residual < previous);
        CHECK(d.residual < previous / 1.8);
      }
      CHECK(d.residual < 1e-1 / n * 10);
      previous = d.residual;
    }
  }
  const auto flat = generalized_determinant_check(OrderingIndex::weyl(), {0.5}, -0.5, TimeGrid(1, 64));
  CHECK(flat.closed == 0.0);
  CHECK(std::abs(flat.numeric) < 1e-12);
}
