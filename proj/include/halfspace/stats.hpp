#ifndef HALFSPACE_STATS_HPP
#define HALFSPACE_STATS_HPP

namespace halfspace {

double normal_pdf(double x);
double normal_cdf(double x);
/// Inverse of normal_cdf on (0, 1), solved by bisection to machine precision.
double normal_quantile(double prob);

/// Standard error of a Bernoulli proportion estimated from n draws.
double binomial_stderr(double rate, double n);

}  // namespace halfspace

#endif  // HALFSPACE_STATS_HPP
