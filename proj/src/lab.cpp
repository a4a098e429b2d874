#include "cspi/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "cspi/error.hpp"
#include "cspi/fock.hpp"
#include "cspi/gaussian_oracle.hpp"
#include "cspi/hamiltonian_core.hpp"
#include "cspi/hs_engine.hpp"
#include "cspi/kernels.hpp"
#include "cspi/numeric.hpp"
#include "cspi/ordering_rules.hpp"

namespace cspi::lab {
namespace {

using Sweep = std::vector<std::pair<std::string, SweepValue>>;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw LabError(ErrorKind::ConfigInvalid, field + ": " + why);
}

std::string sweep_label(const Sweep& sweep) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [key, value] : sweep) {
    if (!first) out << ';';
    first = false;
    out << key << '=';
    std::visit([&](const auto& v) { out << v; }, value);
  }
  return out.str();
}

struct Point {
  Row row;
  std::optional<std::string> error;
};

void fill_errors(Row& row) {
  if (row.value && row.reference) {
    row.abs_error = std::abs(*row.value - *row.reference);
    if (*row.reference != 0.0) row.rel_error = *row.abs_error / std::abs(*row.reference);
  }
}

// Runs one sweep point, turning module errors into a failed row.
Point guarded(Sweep sweep, const std::function<void(Row&)>& body) {
  Point p;
  p.row.sweep = std::move(sweep);
  try {
    body(p.row);
    fill_errors(p.row);
  } catch (const LabError& e) {
    p.row.pass = false;
    const std::string where = p.row.sweep.empty() ? "point" : sweep_label(p.row.sweep);
    p.error = where + ": " + e.what();
  }
  return p;
}

void collect(Report& report, std::vector<Point> points) {
  for (auto& p : points) {
    if (p.error) report.errors.push_back(*p.error);
    report.rows.push_back(std::move(p.row));
  }
}

std::vector<Point> dispatch(std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks) {
  return kernels::map_indexed<Point>(kernels::Execution::Parallel, tasks.size(),
                                     [&](std::size_t i) { return guarded(tasks[i].first, tasks[i].second); });
}

NormalHamiltonian model(const RunConfig& c) { return NormalHamiltonian::bose_hubbard(c.mu, c.u); }

TruncationPolicy policy(const RunConfig& c) {
  TruncationPolicy p;
  p.n_max = c.n_max;
  p.tol = c.tol;
  p.high_precision = c.high_precision;
  return p;
}

TruncationPolicy series_policy(const RunConfig& c) {
  TruncationPolicy p = hs_series_policy();
  p.tol = c.tol;
  return p;
}

HsOptions hs_options(const RunConfig& c) {
  HsOptions o;
  o.nodes = c.nodes;
  o.allow_positive_mu = c.allow_unsafe_contour;
  return o;
}

std::vector<int> ns_or(const RunConfig& c, std::vector<int> fallback) {
  auto ns = c.n_values.empty() ? fallback : c.n_values;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  return ns;
}

std::vector<double> ss_or(const RunConfig& c, std::vector<double> fallback) {
  auto ss = c.s_values.empty() ? fallback : c.s_values;
  std::sort(ss.begin(), ss.end());
  ss.erase(std::unique(ss.begin(), ss.end()), ss.end());
  return ss;
}

const std::vector<double> kSGrid = {-1.0, -0.5, 0.0, 0.5, 1.0};

std::optional<double> reference_z(const RunConfig& c, Report& report) {
  try {
    return exact_partition(model(c), c.beta, policy(c)).value;
  } catch (const LabError& e) {
    report.errors.push_back(std::string("reference: ") + e.what());
    return std::nullopt;
  }
}

// sum_n exp(-beta(-mu n + U n^2 / 2)), the value the naive exponential gives at s = 1.
double naive_formula(const RunConfig& c) {
  CompensatedSum<double> sum;
  for (long n = 0; n < 100000; ++n) {
    const double term = std::exp(-c.beta * (-c.mu * n + 0.5 * c.u * n * n));
    sum.add(term);
    if (n > 2 && term < 1e-18 * sum.value()) break;
  }
  return sum.value();
}

// Fitted order from rows with positive relative error, in sweep order.
std::optional<double> fitted_order(const std::vector<int>& ns, const std::vector<Row>& rows) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    if (!rows[i].rel_error || !rows[i + 1].rel_error) continue;
    if (!(*rows[i].rel_error > 0.0 && *rows[i + 1].rel_error > 0.0)) continue;
    orders.push_back(std::log2(*rows[i].rel_error / *rows[i + 1].rel_error) /
                     std::log2(static_cast<double>(ns[i + 1]) / ns[i]));
  }
  if (orders.empty()) return std::nullopt;
  std::sort(orders.begin(), orders.end());
  const std::size_t m = orders.size() / 2;
  return orders.size() % 2 ? orders[m] : 0.5 * (orders[m - 1] + orders[m]);
}

void run_exact(Report& r) {
  const RunConfig& c = r.config;
  collect(r, {guarded({}, [&](Row& row) {
    const auto est = exact_partition(model(c), c.beta, policy(c));
    row.value = est.value;
    row.tail_bound = est.tail_bound;
  })});
}

void run_transfer(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {16, 32, 64, 128, 256, 512, 1024});
  const auto z = reference_z(c, r);
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (int n : ns)
    tasks.push_back({{{"N", long{n}}}, [&, n](Row& row) {
                       const auto est = transfer_partition(model(c), TimeGrid(c.beta, n), policy(c));
                       row.value = est.value;
                       row.tail_bound = est.tail_bound;
                       row.reference = z;
                       row.pass = z.has_value();
                     }});
  collect(r, dispatch(std::move(tasks)));
  r.fitted_order = fitted_order(ns, r.rows);
  if (ns.size() >= 2 && (!r.fitted_order || std::abs(*r.fitted_order - 1.0) > 0.2)) r.pass = false;
}

void run_hs_series(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {64});
  const auto ss = ss_or(c, {1.0});
  const auto scheme = parse_scheme(c.scheme);
  const auto z = reference_z(c, r);
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int n : ns)
      tasks.push_back({{{"s", s}, {"N", long{n}}}, [&, s, n](Row& row) {
                         const auto est = hs_partition_series(model(c), TimeGrid(c.beta, n),
                                                              OrderingIndex(s), scheme,
                                                              series_policy(c), hs_options(c));
                         row.value = est.value;
                         row.tail_bound = est.tail_bound;
                         row.reference = z;
                         row.pass = est.imag_residue < 1e-10;
                       }});
  collect(r, dispatch(std::move(tasks)));
  if (ss.size() == 1) r.fitted_order = fitted_order(ns, r.rows);
}

void run_hs_mc(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {64});
  const auto ss = ss_or(c, {1.0});
  const auto scheme = parse_scheme(c.scheme);
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int n : ns)
      tasks.push_back({{{"s", s}, {"N", long{n}}}, [&, s, n](Row& row) {
                         const TimeGrid grid(c.beta, n);
                         const auto series = hs_partition_series(model(c), grid, OrderingIndex(s),
                                                                 scheme, series_policy(c),
                                                                 hs_options(c));
                         const auto est = hs_partition_mc(model(c), grid, OrderingIndex(s), scheme,
                                                          c.samples, c.seed, hs_options(c));
                         row.value = est.value;
                         row.stat_error = est.stat_error;
                         row.reference = series.value;
                         row.tail_bound = series.tail_bound;
                         row.pass = std::abs(est.value - series.value) <= 3.0 * *est.stat_error;
                       }});
  collect(r, dispatch(std::move(tasks)));
}

void run_ito_compare(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {64});
  const auto ss = ss_or(c, {1.0});
  const auto z = reference_z(c, r);
  const double naive = naive_formula(c);
  const SliceFactorScheme order[] = {SliceFactorScheme::NaiveExponential,
                                     SliceFactorScheme::ItoCorrected,
                                     SliceFactorScheme::ExactProduct};
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int n : ns)
      for (auto scheme : order)
        tasks.push_back({{{"s", s}, {"N", long{n}}, {"scheme", std::string(to_string(scheme))}},
                         [&, s, n, scheme](Row& row) {
                           const auto est = hs_partition_series(
                               model(c), TimeGrid(c.beta, n), OrderingIndex(s), scheme,
                               series_policy(c), hs_options(c));
                           row.value = est.value;
                           row.tail_bound = est.tail_bound;
                           row.reference = z;
                           if (!z) {
                             row.pass = false;
                             return;
                           }
                           const double rel = std::abs(est.value - *z) / *z;
                           if (scheme == SliceFactorScheme::ItoCorrected) row.pass = rel < 1e-8;
                           if (scheme == SliceFactorScheme::NaiveExponential && s == 1.0)
                             row.pass = std::abs(est.value - naive) < 1e-8 * naive;
                           if (scheme == SliceFactorScheme::ExactProduct && s == 1.0)
                             row.pass = est.value > std::min(naive, *z) &&
                                        est.value < std::max(naive, *z);
                         }});
  collect(r, dispatch(std::move(tasks)));
}

void run_s_sweep(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {64, 256, 1024});
  const auto ss = ss_or(c, kSGrid);
  const auto scheme = parse_scheme(c.scheme);
  const auto z = reference_z(c, r);
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int n : ns)
      tasks.push_back({{{"s", s}, {"N", long{n}}}, [&, s, n](Row& row) {
                         const auto est = hs_partition_series(model(c), TimeGrid(c.beta, n),
                                                              OrderingIndex(s), scheme,
                                                              series_policy(c), hs_options(c));
                         row.value = est.value;
                         row.tail_bound = est.tail_bound;
                         row.reference = z;
                         row.pass = z.has_value() && est.imag_residue < 1e-10;
                       }});
  collect(r, dispatch(std::move(tasks)));
  // Per s: error strictly decreasing in N and below 1e-2 at the largest N.
  for (std::size_t i = 0; i < ss.size(); ++i) {
    for (std::size_t j = 0; j < ns.size(); ++j) {
      const Row& row = r.rows[i * ns.size() + j];
      if (!row.rel_error) {
        r.pass = false;
        continue;
      }
      if (j > 0) {
        const Row& prev = r.rows[i * ns.size() + j - 1];
        if (!prev.rel_error || !(*row.rel_error < *prev.rel_error)) r.pass = false;
      }
      if (j + 1 == ns.size() && !(*row.rel_error < 1e-2)) r.pass = false;
    }
  }
}

void run_fs_check(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {1, 2, 4, 8, 16, 64});
  const auto ss = ss_or(c, kSGrid);
  const double a_eps[] = {0.05, 0.25, 0.5};
  const std::pair<double, double> sources[] = {{0.0, 0.0}, {0.1, 0.0}, {0.0, 0.1}, {0.2, 0.05}};
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int n : ns)
      for (double ae : a_eps) {
        for (auto [x, y] : sources)
          tasks.push_back({{{"check", std::string("f")}, {"s", s}, {"N", long{n}}, {"a_eps", ae},
                            {"x", x}, {"y", y}},
                           [=](Row& row) {
                             GeneratingProbe probe;
                             probe.n = n;
                             probe.epsilon = ae;
                             probe.s = OrderingIndex(s);
                             probe.x = x;
                             probe.y = y;
                             row.value = f_numeric(probe);
                             row.reference = f_closed(probe);
                             row.pass = std::abs(*row.value - *row.reference) <
                                        1e-9 * std::abs(*row.reference);
                           }});
        for (int k = 0; k < 3; ++k)
          tasks.push_back({{{"check", std::string("abc")}, {"s", s}, {"N", long{n}},
                            {"a_eps", ae}, {"component", std::string(1, "ABC"[k])}},
                           [=](Row& row) {
                             GeneratingProbe probe;
                             probe.n = n;
                             probe.epsilon = ae;
                             probe.s = OrderingIndex(s);
                             const auto closed = closed_form_abc(probe);
                             const auto fd = abc_from_source_derivatives(probe);
                             const double want[] = {closed.a, closed.b, closed.c};
                             const double got[] = {fd.a, fd.b, fd.c};
                             row.value = got[k];
                             row.reference = want[k];
                             row.pass = std::abs(got[k] - want[k]) <=
                                        1e-6 * std::max(std::abs(want[k]), std::abs(closed.a));
                           }});
      }
  collect(r, dispatch(std::move(tasks)));

  // Replacement rule: the ratio tends to q!/(q-p)! with an O(eps) deviation.
  const std::vector<int> doubling = {16, 32, 64, 128, 256, 512, 1024};
  const std::pair<int, int> cases[] = {{1, 2}, {2, 3}};
  for (auto [p, q] : cases)
    for (double s : ss) {
      const auto rows = replacement_limit_check(p, q, OrderingIndex(s), doubling, c.beta);
      const double target = factorial(q) / factorial(q - p);
      for (std::size_t i = 0; i < rows.size(); ++i) {
        Row row;
        row.sweep = {{"check", std::string("replacement")}, {"p", long{p}}, {"q", long{q}},
                     {"s", s}, {"N", long{rows[i].n}}};
        row.value = rows[i].ratio;
        row.reference = target;
        fill_errors(row);
        if (i > 0) {
          const double halving = rows[i - 1].deviation / rows[i].deviation;
          row.pass = std::abs(halving - 2.0) <= 0.4;
        }
        r.rows.push_back(std::move(row));
      }
    }
}

void run_ordering_check(Report& r) {
  const RunConfig& c = r.config;
  const auto ss = ss_or(c, kSGrid);
  const int n = c.fock_n;
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (double s : ss)
    for (int q = 0; q <= 4; ++q) {
      tasks.push_back({{{"check", std::string("identity")}, {"s", s}, {"q", long{q}}},
                       [=](Row& row) {
                         row.value = verify_ordering_identity(q, OrderingIndex(s), n);
                         row.reference = 0.0;
                         row.pass = *row.value < 1e-10;
                       }});
      tasks.push_back({{{"check", std::string("closed-inverse")}, {"s", s}, {"q", long{q}}},
                       [=](Row& row) {
                         const fock::FockSpace space(n + q + 1);
                         const fock::Matrix diff = space.s_ordered_power(q, OrderingIndex(s)) -
                                           space.s_ordered_power_closed(q, OrderingIndex(s));
                         row.value = static_cast<double>(fock::max_abs_block(diff, n));
                         row.reference = 0.0;
                         row.pass = *row.value < 1e-10;
                       }});
      if (s == -1.0 || s == 0.0)
        tasks.push_back({{{"check", std::string(s == -1.0 ? "anti-normal" : "weyl")},
                          {"s", s}, {"q", long{q}}},
                         [=](Row& row) {
                           const fock::FockSpace space(n + q + 1);
                           const fock::Matrix direct =
                               s == -1.0 ? space.antinormal_power(q) : space.weyl_power(q);
                           const fock::Matrix diff = space.s_ordered_power(q, OrderingIndex(s)) - direct;
                           row.value = static_cast<double>(fock::max_abs_block(diff, n));
                           row.reference = 0.0;
                           row.pass = *row.value < 1e-10;
                         }});
    }
  collect(r, dispatch(std::move(tasks)));
}

void run_oracle_smalln(Report& r) {
  const RunConfig& c = r.config;
  const auto ns = ns_or(c, {1, 2, 3});
  const double s = ss_or(c, {1.0}).front();
  const auto scheme = parse_scheme(c.scheme);
  std::vector<std::pair<Sweep, std::function<void(Row&)>>> tasks;
  for (int n : ns) {
    if (n <= 2)
      tasks.push_back({{{"check", std::string("direct")}, {"N", long{n}}}, [&, n](Row& row) {
                         const TimeGrid grid(c.beta, n);
                         row.value = quadrature_partition_small_n(model(c), grid).value;
                         const auto t = transfer_partition(model(c), grid, policy(c));
                         row.reference = t.value;
                         row.tail_bound = t.tail_bound;
                         row.pass = std::abs(*row.value - t.value) < 1e-4 * t.value;
                       }});
    if (n <= 3)
      tasks.push_back({{{"check", std::string("hs-expectation")}, {"s", s}, {"N", long{n}}},
                       [&, n](Row& row) {
                         const TimeGrid grid(c.beta, n);
                         HsOptions opt = hs_options(c);
                         opt.nodes = std::min(opt.nodes, 32);
                         opt.execution = kernels::Execution::Serial;
                         row.value = hs_expectation_quadrature(model(c), grid, OrderingIndex(s),
                                                               scheme, 1e-8, opt).value;
                         const auto series = hs_partition_series(
                             model(c), grid, OrderingIndex(s), scheme, series_policy(c), opt);
                         row.reference = series.value;
                         row.tail_bound = series.tail_bound;
                         row.pass = std::abs(*row.value - series.value) < 1e-6 * series.value;
                       }});
  }
  tasks.push_back({{{"check", std::string("cyclic-det")}, {"systems", long{200}}}, [&](Row& row) {
    std::mt19937_64 rng(c.seed);
    std::uniform_int_distribution<int> size(2, 64);
    std::normal_distribution<double> entry(0.0, 1.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int m = size(rng);
      std::vector<Complex> d(m), o(m);
      for (int k = 0; k < m; ++k) {
        d[k] = {entry(rng), entry(rng)};
        o[k] = {entry(rng), entry(rng)};
      }
      const CyclicBidiagonalSystem sys(d, o);
      const Complex closed = det_cyclic_closed(sys);
      const Complex lu = det_lu(sys.densify()).value;
      worst = std::max(worst, std::abs(closed - lu) / std::abs(closed));
    }
    row.value = worst;
    row.reference = 0.0;
    row.pass = worst < 1e-10;
  }});
  collect(r, dispatch(std::move(tasks)));
}

const std::vector<std::pair<std::string, void (*)(Report&)>>& table() {
  static const std::vector<std::pair<std::string, void (*)(Report&)>> t = {
      {"exact", run_exact},
      {"transfer", run_transfer},
      {"hs-series", run_hs_series},
      {"hs-mc", run_hs_mc},
      {"ito-compare", run_ito_compare},
      {"s-sweep", run_s_sweep},
      {"fs-check", run_fs_check},
      {"ordering-check", run_ordering_check},
      {"oracle-smalln", run_oracle_smalln},
  };
  return t;
}

std::string number(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string number(const std::optional<double>& v) { return v ? number(*v) : "null"; }

std::string quoted(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

template <class T, class F>
std::string list(const std::vector<T>& xs, F render) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + render(xs[i]);
  return out + "]";
}

std::string sweep_json(const Sweep& sweep) {
  std::string out = "{";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    out += (i ? ", " : "") + quoted(sweep[i].first) + ": ";
    out += std::visit(
        [](const auto& v) -> std::string {
          using V = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<V, std::string>) return quoted(v);
          else if constexpr (std::is_same_v<V, double>) return number(v);
          else return std::to_string(v);
        },
        sweep[i].second);
  }
  return out + "}";
}

}  // namespace

void RunConfig::validate() const {
  if (!(std::isfinite(beta) && beta > 0.0)) bad_field("model.beta", "must be positive and finite");
  if (!std::isfinite(mu)) bad_field("model.mu", "must be finite");
  if (!(std::isfinite(u) && u >= 0.0)) bad_field("model.u", "must be >= 0 and finite");
  for (int n : n_values)
    if (n < 1 || n > (1 << 20)) bad_field("grid.N", "each N must be in [1, 2^20]");
  for (double s : s_values)
    if (!(s >= -1.0 && s <= 1.0)) bad_field("s", "each s must lie in [-1, 1]");
  try {
    parse_scheme(scheme);
  } catch (const LabError&) {
    bad_field("scheme", "unknown scheme '" + scheme + "'");
  }
  if (n_max < 1) bad_field("truncation.n_max", "must be >= 1");
  if (!(tol > 0.0 && tol < 1.0)) bad_field("truncation.tol", "must be in (0, 1)");
  if (nodes < 2 || nodes > 2048) bad_field("quadrature.nodes", "must be in [2, 2048]");
  if (fock_n < 0 || fock_n > 200) bad_field("quadrature.fock_n", "must be in [0, 200]");
  if (samples < 1000) bad_field("mc.samples", "must be >= 1000");
  if (format != "json" && format != "csv") bad_field("output.format", "must be json or csv");
}

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : table()) out.push_back(name);
    return out;
  }();
  return names;
}

bool is_command(std::string_view name) {
  return std::find(commands().begin(), commands().end(), name) != commands().end();
}

Report run(std::string_view command, const RunConfig& config) {
  config.validate();
  auto it = std::find_if(table().begin(), table().end(),
                         [&](const auto& e) { return e.first == command; });
  if (it == table().end())
    throw LabError(ErrorKind::ConfigInvalid, "command: unknown subcommand '" + std::string(command) + "'");
  kernels::apply_thread_limit_from_env();
  Report report;
  report.command = std::string(command);
  report.config = config;
  const auto start = std::chrono::steady_clock::now();
  it->second(report);
  const auto stop = std::chrono::steady_clock::now();
  report.wall_ms =
      config.timing ? std::chrono::duration<double, std::milli>(stop - start).count() : 0.0;
  for (const auto& row : report.rows) report.pass = report.pass && row.pass;
  return report;
}

std::string render_json(const Report& r) {
  const RunConfig& c = r.config;
  std::ostringstream out;
  out << "{\n";
  out << "  \"command\": " << quoted(r.command) << ",\n";
  out << "  \"config\": {\"model\": {\"beta\": " << number(c.beta) << ", \"mu\": " << number(c.mu)
      << ", \"u\": " << number(c.u) << "}, \"grid\": "
      << list(c.n_values, [](int n) { return std::to_string(n); })
      << ", \"s\": " << list(c.s_values, [](double s) { return number(s); })
      << ", \"scheme\": " << quoted(c.scheme) << ", \"truncation\": {\"n_max\": " << c.n_max
      << ", \"tol\": " << number(c.tol)
      << ", \"high_precision\": " << (c.high_precision ? "true" : "false")
      << "}, \"quadrature\": {\"nodes\": " << c.nodes << ", \"fock_n\": " << c.fock_n
      << "}, \"mc\": {\"samples\": " << c.samples << ", \"seed\": " << c.seed
      << ", \"allow_unsafe_contour\": " << (c.allow_unsafe_contour ? "true" : "false")
      << "}, \"output\": {\"format\": " << quoted(c.format) << ", \"path\": " << quoted(c.path)
      << "}},\n";
  out << "  \"rows\": [";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const Row& row = r.rows[i];
    out << (i ? ",\n    " : "\n    ") << "{\"sweep\": " << sweep_json(row.sweep)
        << ", \"value\": " << number(row.value) << ", \"reference\": " << number(row.reference)
        << ", \"abs_error\": " << number(row.abs_error)
        << ", \"rel_error\": " << number(row.rel_error)
        << ", \"tail_bound\": " << number(row.tail_bound)
        << ", \"stat_error\": " << number(row.stat_error)
        << ", \"pass\": " << (row.pass ? "true" : "false") << "}";
  }
  out << (r.rows.empty() ? "],\n" : "\n  ],\n");
  out << "  \"meta\": {\"seed\": " << c.seed << ", \"wall_ms\": " << number(r.wall_ms)
      << ", \"pass\": " << (r.pass ? "true" : "false") << ", \"version\": " << quoted(kVersion)
      << ", \"fitted_order\": " << number(r.fitted_order)
      << ", \"errors\": " << list(r.errors, [](const std::string& e) { return quoted(e); })
      << "}\n";
  out << "}\n";
  return out.str();
}

std::string render_csv(const Report& r) {
  auto cell = [](const std::optional<double>& v) { return v && std::isfinite(*v) ? number(*v) : ""; };
  std::ostringstream out;
  out << "sweep,value,reference,abs_error,rel_error,tail_bound,stat_error\n";
  for (const Row& row : r.rows) {
    out << sweep_label(row.sweep) << ',' << cell(row.value) << ',' << cell(row.reference) << ','
        << cell(row.abs_error) << ',' << cell(row.rel_error) << ',' << cell(row.tail_bound) << ','
        << cell(row.stat_error) << '\n';
  }
  return out.str();
}

void write_report(const Report& report) {
  const std::string text =
      report.config.format == "csv" ? render_csv(report) : render_json(report);
  if (report.config.path.empty()) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream file(report.config.path, std::ios::binary | std::ios::trunc);
  if (!file) throw LabError(ErrorKind::IoError, "cannot open '" + report.config.path + "' for writing");
  file << text;
  if (!file.flush()) throw LabError(ErrorKind::IoError, "write to '" + report.config.path + "' failed");
}

}  // namespace cspi::lab
