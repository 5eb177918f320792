#pragma once

#include "rotorsim/results.hpp"

#include <string>
#include <vector>

namespace rotorsim {

/// sqrt(mean ||a - b||^2) over rows with t >= t_start, where a and b are
/// vectors assembled from the named columns. Rows with any NaN are skipped.
/// Returns NaN when no row qualifies.
double rmse(const ResultsTable& table, const std::vector<std::string>& a, const std::vector<std::string>& b,
            double t_start = 0.0);

/// Exact one-sided Mann-Whitney p-value for H1: values in `x` tend to be
/// larger than values in `y`. The null distribution of U is enumerated
/// exactly assuming no ties; tied pairs count one half in the statistic.
double mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y);

/// U statistic of x over y (count of pairs with x > y, ties count one half).
double mann_whitney_u(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rotorsim
