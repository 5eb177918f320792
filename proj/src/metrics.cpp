#include "rotorsim/metrics.hpp"

#include "rotorsim/error.hpp"

#include <cmath>
#include <limits>

namespace rotorsim {

double rmse(const ResultsTable& table, const std::vector<std::string>& a, const std::vector<std::string>& b,
            double t_start) {
  if (a.size() != b.size() || a.empty()) throw Error("rmse: column lists must be non-empty and equal length");
  std::vector<std::size_t> ia, ib;
  for (const auto& n : a) ia.push_back(table.index(n));
  for (const auto& n : b) ib.push_back(table.index(n));
  const std::size_t it = table.index("t");

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r < table.rows(); ++r) {
    if (table.at(r, it) < t_start) continue;
    double e2 = 0.0;
    bool valid = true;
    for (std::size_t k = 0; k < ia.size(); ++k) {
      const double d = table.at(r, ia[k]) - table.at(r, ib[k]);
      if (std::isnan(d)) {
        valid = false;
        break;
      }
      e2 += d * d;
    }
    if (!valid) continue;
    sum += e2;
    ++count;
  }
  return count ? std::sqrt(sum / static_cast<double>(count)) : std::numeric_limits<double>::quiet_NaN();
}

double mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y) {
  double u = 0.0;
  for (double xi : x)
    for (double yj : y) u += xi > yj ? 1.0 : (xi == yj ? 0.5 : 0.0);
  return u;
}

double mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t m = x.size(), n = y.size();
  if (m == 0 || n == 0) throw Error("mann_whitney_greater: empty sample");
  // counts[k][u]: number of ways to choose k of the first i ranks with U = u,
  // built with the recurrence over the largest rank.
  const std::size_t umax = m * n;
  std::vector<std::vector<double>> f(m + 1, std::vector<double>(umax + 1, 0.0));
  f[0][0] = 1.0;
  // f_{i}[k][u] for i items total; adding item i (largest so far) to the x
  // group contributes (i - k) y-items below it.
  for (std::size_t i = 1; i <= m + n; ++i) {
    for (std::size_t k = std::min(i, m); k >= 1; --k) {
      const std::size_t below = i - k;  // y items among the first i - 1 when this one joins x
      if (below > n) continue;
      for (std::size_t u = umax; u + 1 > below; --u) f[k][u] += f[k - 1][u - below];
    }
  }
  const double u_obs = mann_whitney_u(x, y);
  double total = 0.0, tail = 0.0;
  for (std::size_t u = 0; u <= umax; ++u) {
    total += f[m][u];
    if (static_cast<double>(u) >= u_obs - 1e-9) tail += f[m][u];
  }
  return tail / total;
}

}  // namespace rotorsim
