// Acceptance suite: one PASS/FAIL line per criterion, plus indented info
// lines. Exit status is nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cspi/error.hpp"
#include "cspi/fock.hpp"
#include "cspi/gaussian_oracle.hpp"
#include "cspi/hamiltonian_core.hpp"
#include "cspi/hs_engine.hpp"
#include "cspi/lab.hpp"
#include "cspi/numeric.hpp"
#include "cspi/ordering_rules.hpp"

using namespace cspi;

namespace {

const NormalHamiltonian kRef = NormalHamiltonian::bose_hubbard(-0.5, 1.0);
const std::vector<double> kSGrid = {-1.0, -0.5, 0.0, 0.5, 1.0};
constexpr double kBeta = 1.0;

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> info;
};

double reference_z() { return exact_partition(kRef, kBeta, {}).value; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

Outcome c1() {
  Outcome o;
  TruncationPolicy p;
  const auto base = exact_partition(kRef, kBeta, p);
  p.n_max += 10;
  const auto more = exact_partition(kRef, kBeta, p);
  const double shift = std::abs(more.value - base.value);
  o.pass = shift < 1e-12 && std::abs(base.value - 1.75331) < 1e-5;
  o.summary = fmt("Z* = %.15f, tail %.1e, n_max+10 shift %.1e", base.value, base.tail_bound, shift);
  return o;
}

Outcome c2() {
  Outcome o;
  const double z = reference_z();
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> logn, logerr, errs;
  for (int n = 16; n <= 1024; n *= 2) {
    const double e = rel(transfer_partition(kRef, TimeGrid(kBeta, n), {}).value, z);
    logn.push_back(std::log(n));
    logerr.push_back(std::log(e));
    errs.push_back(e);
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double slope = -least_squares_slope(logn, logerr);
  o.pass = std::abs(slope - 1.0) <= 0.2 && secs < 10.0;
  o.summary = fmt("log-log slope %.4f (median pairwise %.4f), rel err %.3e at N=1024, %.3f s",
                  slope, median_pairwise_order(errs), errs.back(), secs);
  return o;
}

Outcome c3() {
  Outcome o;
  const double z = reference_z();
  double worst = 0;
  for (int n : {1, 4, 16, 64, 256}) {
    const auto est = hs_partition_series(kRef, TimeGrid(kBeta, n), OrderingIndex::normal(),
                                         SliceFactorScheme::ItoCorrected);
    worst = std::max(worst, rel(est.value, z));
  }
  o.pass = worst < 1e-8;
  o.summary = fmt("Ito-corrected vs Z*, worst rel err %.2e over N in {1,4,16,64,256}", worst);
  return o;
}

Outcome c4() {
  Outcome o;
  CompensatedSum<double> formula;
  for (int n = 0; n < 200; ++n) formula.add(std::exp(-kBeta * (0.5 * n + 0.5 * n * n)));
  double worst = 0;
  for (int n : {1, 4, 16, 64, 256}) {
    const auto est = hs_partition_series(kRef, TimeGrid(kBeta, n), OrderingIndex::normal(),
                                         SliceFactorScheme::NaiveExponential);
    worst = std::max(worst, rel(est.value, formula.value()));
  }
  o.pass = worst < 1e-8;
  o.summary = fmt("naive exponential = %.12f, worst rel err %.2e over N in {1,4,16,64,256}",
                  formula.value(), worst);
  o.info.push_back("the frequently quoted 1.42021 is a rounding of this sum; it is 1.420191 to 7 digits");
  return o;
}

Outcome c5() {
  Outcome o;
  const double z = reference_z();
  std::vector<double> errs;
  for (int n = 64; n <= 1024; n *= 2)
    errs.push_back(rel(hs_partition_series(kRef, TimeGrid(kBeta, n), OrderingIndex::normal(),
                                           SliceFactorScheme::ExactProduct)
                           .value,
                       z));
  const double order = median_pairwise_order(errs);
  double worst = 0;
  for (int n : {64, 256, 1024}) {
    const TimeGrid grid(kBeta, n);
    const auto noise = NoiseModel::for_grid(1.0, grid);
    for (int k = 0; k <= 40; ++k) {
      const Complex closed = slice_factor_closed(k, SliceFactorScheme::ExactProduct, noise, -0.5,
                                                 grid.epsilon(), OrderingIndex::normal());
      const Complex quad = slice_factor_quadrature(k, SliceFactorScheme::ExactProduct, noise, -0.5,
                                                   grid.epsilon(), OrderingIndex::normal(), 128);
      worst = std::max(worst, std::abs(closed - quad) / std::max(1.0, std::abs(closed)));
    }
  }
  o.pass = std::abs(order - 1.0) <= 0.2 && worst < 1e-10;
  o.summary = fmt("order %.4f over N=64..1024, closed vs quadrature E(n) max diff %.1e", order, worst);
  return o;
}

Outcome c6() {
  Outcome o;
  double worst_f = 0, worst_abc = 0;
  int points = 0;
  for (double s : kSGrid)
    for (int n : {1, 2, 3, 4, 8, 16, 64, 256})
      for (double ae : {0.01, 0.1, 0.5, 0.9})
        for (auto [x, y] : {std::pair{0.0, 0.0}, {0.2, 0.0}, {0.0, 0.2}, {0.1, 0.3}, {-0.005, 0.01}}) {
          GeneratingProbe p;
          p.n = n;
          p.epsilon = ae;
          p.s = OrderingIndex(s);
          p.x = x;
          p.y = y;
          worst_f = std::max(worst_f, rel(f_numeric(p), f_closed(p)));
          ++points;
          if (x == 0.0 && y == 0.0) {
            const auto closed = closed_form_abc(p);
            const auto fd = abc_from_source_derivatives(p);
            const double scale = std::abs(closed.a);
            worst_abc = std::max({worst_abc, std::abs(fd.a - closed.a) / scale,
                                  std::abs(fd.b - closed.b) / std::max(std::abs(closed.b), scale),
                                  std::abs(fd.c - closed.c) / std::max(std::abs(closed.c), scale)});
          }
        }
  o.pass = worst_f < 1e-9 && worst_abc < 1e-6;
  o.summary = fmt("f_closed vs LU over %d points: %.1e; A,B,C from source derivatives: %.1e",
                  points, worst_f, worst_abc);
  return o;
}

Outcome c7() {
  Outcome o;
  const std::vector<int> ns = {16, 32, 64, 128, 256, 512, 1024};
  double lo = 1e9, hi = 0, far = 0;
  for (auto [p, q] : {std::pair{1, 2}, {2, 3}})
    for (double s : kSGrid) {
      const auto rows = replacement_limit_check(p, q, OrderingIndex(s), ns, kBeta);
      const double target = factorial(q) / factorial(q - p);
      far = std::max(far, std::abs(rows.back().ratio - target) / target);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const double h = rows[i - 1].deviation / rows[i].deviation;
        lo = std::min(lo, h);
        hi = std::max(hi, h);
      }
      if (s == 0.0)
        o.info.push_back(fmt("(p,q)=(%d,%d) s=0: ratio %.6f at N=1024 (target %g)", p, q,
                             rows.back().ratio, target));
    }
  o.pass = lo >= 1.6 && hi <= 2.4 && far < 0.01;
  o.summary = fmt("deviation halving factors in [%.3f, %.3f], rel distance at N=1024 <= %.1e", lo,
                  hi, far);
  return o;
}

Outcome c8() {
  Outcome o;
  double worst = 0, anti = 0;
  for (double s : kSGrid)
    for (int q = 0; q <= 4; ++q) worst = std::max(worst, verify_ordering_identity(q, OrderingIndex(s), 30));
  const fock::FockSpace space(36);
  for (int m = 0; m <= 4; ++m) {
    const fock::Matrix diff =
        space.s_ordered_power(m, OrderingIndex::anti_normal()) - space.antinormal_power(m);
    anti = std::max(anti, static_cast<double>(fock::max_abs_block(diff, 30)));
  }
  o.pass = worst < 1e-10 && anti < 1e-10;
  o.summary = fmt("max Fock residual %.1e (q<=4, n<=30), s=-1 vs a^m a^dag^m %.1e", worst, anti);
  return o;
}

Outcome c9() {
  Outcome o;
  const double z = reference_z();
  std::ostringstream at1024;
  for (double s : kSGrid) {
    double previous = INFINITY;
    for (int n : {64, 256, 1024}) {
      const auto est = hs_partition_series(kRef, TimeGrid(kBeta, n), OrderingIndex(s),
                                           SliceFactorScheme::ExactProduct);
      const double e = rel(est.value, z);
      if (!(e < previous) || est.imag_residue >= 1e-10) o.pass = false;
      previous = e;
    }
    if (!(previous < 1e-2)) o.pass = false;
    at1024 << fmt(" s=%g:%.1e", s, previous);
  }
  o.summary = "rel err at N=1024," + at1024.str() + "; strictly decreasing over 64/256/1024";
  return o;
}

Outcome c10() {
  Outcome o;
  std::vector<std::string> parts;
  // (a) direct integration against the transfer sum, N <= 2
  bool direct_ok = true;
  for (int n : {1, 2}) {
    const TimeGrid grid(kBeta, n);
    std::string q_text, t_text;
    double qv = NAN, tv = NAN;
    try {
      qv = quadrature_partition_small_n(kRef, grid).value;
      q_text = fmt("%.10f", qv);
    } catch (const LabError& e) {
      q_text = to_string(e.kind());
      o.info.push_back(fmt("N=%d quadrature: %s", n, e.what()));
    }
    try {
      tv = transfer_partition(kRef, grid, {}).value;
      t_text = fmt("%.10f", tv);
    } catch (const LabError& e) {
      t_text = to_string(e.kind());
      o.info.push_back(fmt("N=%d transfer: %s", n, e.what()));
    }
    const bool ok = std::isfinite(qv) && std::isfinite(tv) && rel(qv, tv) < 1e-4;
    direct_ok = direct_ok && ok;
    parts.push_back(fmt("N=%d quad %s vs transfer %s", n, q_text.c_str(), t_text.c_str()));
  }
  // (b) tensor Gauss-Hermite of E[1/det] against the series, N <= 3
  double worst_hs = 0;
  HsOptions opt;
  opt.nodes = 32;
  struct Case {
    SliceFactorScheme scheme;
    double s, mu;
  };
  for (Case c : {Case{SliceFactorScheme::NaiveExponential, 1.0, -0.5},
                 Case{SliceFactorScheme::ItoCorrected, 1.0, -1.0},
                 Case{SliceFactorScheme::ExactProduct, -1.0, -3.0}})
    for (int n : {1, 2, 3}) {
      const auto h = NormalHamiltonian::bose_hubbard(c.mu, 1.0);
      const TimeGrid grid(kBeta, n);
      const auto q = hs_expectation_quadrature(h, grid, OrderingIndex(c.s), c.scheme, 1e-8, opt);
      const auto s = hs_partition_series(h, grid, OrderingIndex(c.s), c.scheme);
      worst_hs = std::max(worst_hs, rel(q.value, s.value));
    }
  o.info.push_back(
      "E[1/det] cases: naive s=1 mu=-0.5, Ito s=1 mu=-1, exact-product s=-1 mu=-3 "
      "(each has a pole-free real noise axis)");
  // (c) closed cyclic determinant against LU
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(2, 64);
  std::normal_distribution<double> entry;
  double worst_det = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = size(rng);
    std::vector<Complex> d(n), sub(n);
    for (int k = 0; k < n; ++k) d[k] = {entry(rng), entry(rng)}, sub[k] = {entry(rng), entry(rng)};
    const CyclicBidiagonalSystem sys(d, sub);
    const Complex closed = det_cyclic_closed(sys);
    worst_det = std::max(worst_det, std::abs(closed - det_lu(sys.densify()).value) / std::abs(closed));
  }
  o.pass = direct_ok && worst_hs < 1e-6 && worst_det < 1e-10;
  o.summary = parts[0] + "; " + parts[1] +
              fmt("; E[1/det] vs series %.1e; cyclic det vs LU %.1e", worst_hs, worst_det);
  return o;
}

Outcome c11() {
  Outcome o;
  lab::RunConfig cfg;
  cfg.n_values = {64};
  cfg.samples = 100000;
  cfg.timing = false;
  // The reference parameters sit on mu + U/2 = 0, where the exact-product
  // determinant has zeros on the real noise axis; the override lets the
  // sampler run there anyway.
  cfg.allow_unsafe_contour = true;
  const auto first = lab::run("hs-mc", cfg);
  const auto second = lab::run("hs-mc", cfg);
  const bool identical = lab::render_json(first) == lab::render_json(second);
  const auto& row = first.rows.at(0);
  double sigmas = NAN;
  if (row.value && row.reference && row.stat_error)
    sigmas = (*row.value - *row.reference) / *row.stat_error;
  o.pass = identical && std::abs(sigmas) <= 3.0;
  o.summary = fmt("mu=-0.5: MC %.6f +- %.6f vs series %.6f (%.1f sigma); same seed byte-identical: %s",
                  row.value.value_or(NAN), row.stat_error.value_or(NAN),
                  row.reference.value_or(NAN), sigmas, identical ? "yes" : "no");
  lab::RunConfig deep = cfg;
  deep.mu = -1.0;
  deep.allow_unsafe_contour = false;
  const auto d = lab::run("hs-mc", deep);
  const auto& dr = d.rows.at(0);
  o.info.push_back(fmt("mu=-1 (contour condition holds): MC %.6f +- %.6f vs series %.6f (%.1f sigma)",
                       dr.value.value_or(NAN), dr.stat_error.value_or(NAN),
                       dr.reference.value_or(NAN),
                       (dr.value.value_or(NAN) - dr.reference.value_or(NAN)) /
                           dr.stat_error.value_or(NAN)));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"C1  exact reference", c1},
      {"C2  transfer discretization order", c2},
      {"C3  Ito identity", c3},
      {"C4  naive-exponential regression", c4},
      {"C5  exact-product convergence", c5},
      {"C6  generating-function closed forms", c6},
      {"C7  replacement rule", c7},
      {"C8  ordering identities", c8},
      {"C9  s-sweep", c9},
      {"C10 small-N oracle agreement", c10},
      {"C11 Monte Carlo validity", c11},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    std::printf("%s  %-38s %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.summary.c_str());
    for (const auto& line : o.info) std::printf("      info: %s\n", line.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
