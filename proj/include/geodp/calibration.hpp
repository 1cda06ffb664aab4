#pragma once

// Calibration constants frozen by `geodp-calibrate` (tools/calibrate.cpp).
// The tool measures each quantity on the desk corpus against the
// brute-force oracles and prints the values to commit here; the test suite
// then asserts the committed bounds. Regenerate only via the tool.

namespace geodp::cal {

// Near-optimality: analytic Gaussian error / specLB brute force, divided by
// (1 + log2 d)^2 * ln(1/delta), maximum over the corpus, with headroom.
inline constexpr double kRatioCal = 5.7;

// herdisc sandwich: lower_estimate <= kSandwichLower * herdisc_exact and
// herdisc_exact <= kSandwichUpper * upper_estimate on the corpus.
inline constexpr double kSandwichLower = 2.0;
inline constexpr double kSandwichUpper = 0.96;

// Median l_inf mechanism: E||error||_inf <= kMedianConst * sqrt(2 ln d) * max RMS.
inline constexpr double kMedianConst = 0.6;

// Spherical-noise least squares: total squared error versus the analytic
// yardstick 8 n r^2 c(eps,delta) sqrt(ln N).
inline constexpr double kSimpleLseSafety = 0.1;

// Empirical reverse ratio of the computable sandwich direction:
// dec_lowerbound(dense) <= kSandwich * speclb_bruteforce(A, d).
inline constexpr double kSandwich = 2.0;

}  // namespace geodp::cal
