#pragma once

namespace sliceattrib {

// Regularized incomplete beta function I_x(a, b), continued-fraction
// evaluation (modified Lentz), 1e-12 convergence, 200-iteration cap.
// Supports the real-valued degrees of freedom produced by the
// moment-matched test statistics.
double regularized_incomplete_beta(double a, double b, double x);

// CDF of the F distribution with real-valued dofs (d1, d2) at x >= 0.
double f_cdf(double x, double d1, double d2);

// Upper tail 1 - CDF, computed without cancellation.
double f_sf(double x, double d1, double d2);

}  // namespace sliceattrib
