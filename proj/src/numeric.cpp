#include "cspi/numeric.hpp"

#include <algorithm>

#include "cspi/error.hpp"

namespace cspi {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

std::vector<double> pairwise_orders(std::span<const double> errors) {
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    orders.push_back(std::log2(errors[i] / errors[i + 1]));
  return orders;
}

double median_pairwise_order(std::span<const double> errors) {
  auto orders = pairwise_orders(errors);
  if (orders.empty())
    throw LabError(ErrorKind::InvalidArgument, "need at least two errors to fit an order");
  std::sort(orders.begin(), orders.end());
  const std::size_t m = orders.size() / 2;
  return orders.size() % 2 ? orders[m] : 0.5 * (orders[m - 1] + orders[m]);
}

}  // namespace cspi
