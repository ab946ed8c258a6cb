#pragma once

namespace flvr {

/// I_x(a, b), the regularized incomplete beta function, by Lentz's continued
/// fraction. a, b > 0, 0 <= x <= 1.
double incomplete_beta(double a, double b, double x);

double student_t_pdf(double x, double df);
double student_t_cdf(double x, double df);

/// x with student_t_cdf(x, df) = p, found by safeguarded Newton on the
/// incomplete-beta CDF. 0 < p < 1, df > 0.
double student_t_quantile(double p, double df);

}  // namespace flvr
