#pragma once

#include <vector>

namespace tcf {

// Upper-tail probability P(X > x) of a chi-square variable with `dof` degrees
// of freedom.
double chi_square_sf(double x, double dof);

// Median of a copy; NaN for an empty input.
double median(std::vector<double> v);
double mean(const std::vector<double>& v);
double stddev(const std::vector<double>& v);  // population

}  // namespace tcf
