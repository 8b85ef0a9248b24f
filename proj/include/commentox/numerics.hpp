#pragma once

namespace ctox {

// Regularized incomplete beta function I_x(a, b), a,b > 0, x in [0,1].
// Continued-fraction evaluation (modified Lentz), accurate to ~1e-14.
double betainc(double a, double b, double x);

// Two-sided p-value of a Student-t statistic with df degrees of freedom:
// P(|T| >= |t|) = I_{df/(df+t^2)}(df/2, 1/2).
double student_t_two_sided_p(double t, double df);

}  // namespace ctox
