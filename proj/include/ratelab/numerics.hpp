#pragma once

#include <vector>

namespace ratelab {

// log(sum exp(t)) over terms that may contain -inf (ignored); empty or
// all -inf input yields -inf. Shifts by the max term before exponentiating.
double log_sum_exp(const std::vector<double>& terms);
double log_sum_exp(double a, double b);

// log(1 - exp(x)) for x < 0; returns -inf at x == 0 and throws for x > 0.
double log1mexp(double x);

// log((exp(u) - 1) / u), the log of the mean of exp over a unit interval
// with exponent slope u; continuous through u == 0.
double log_expm1_ratio(double u);

// log of the standard normal upper tail probability log P(Z > z),
// accurate over the whole real line (asymptotic expansion for large z).
double log_normal_upper(double z);

}  // namespace ratelab
