#pragma once

#include <span>

namespace mibci {

double mean_of(std::span<const double> v);
// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_stddev(std::span<const double> v);

// I_x(a, b) by Lentz's continued fraction, |error| ~ 1e-15.
double regularized_incomplete_beta(double a, double b, double x);

double student_t_cdf(double t, double df);

struct TTestResult {
  double t{0.0};
  double p{1.0};
  int df{0};
  double mean_difference{0.0};
};

// Two-tailed paired t-test on a - b, df = n - 1. When the differences have zero
// variance, p is 0 if their mean is nonzero (t = +-inf) and 1 otherwise (t = 0).
// Throws ConfigError for unequal lengths or n < 2.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace mibci
