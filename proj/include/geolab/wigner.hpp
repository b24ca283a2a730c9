#pragma once

#include <vector>

namespace geolab {

// Wigner small-d values d^l_{mn}(theta) for fixed (m, n) and
// l = max(|m|,|n|) .. L, by upward three-term recursion with a single-term
// closed-form seed (log-factorials, no cancellation).
void wigner_d_column(int m, int n, int L, double theta, std::vector<double>& out);

// single value, for oracles
double wigner_d(int l, int m, int n, double theta);

}  // namespace geolab
