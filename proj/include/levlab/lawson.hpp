#pragma once

#include "levlab/core.hpp"

#include <vector>

namespace levlab {

struct WeightedFit {
    std::vector<Complex> coeffs;
    double residual = 0.0; // max_i w_i |y_i - (A c)_i|
    bool regularized = false;
    std::size_t rank = 0;
    int iterations = 0;
};

/// Near-minimax weighted fit by Lawson's reweighted least squares.
/// A is rows x cols, row-major. The best iterate (smallest weighted sup residual)
/// is returned, and a warm start for the leading columns is taken as a candidate too.
WeightedFit lawson_fit(std::size_t rows, std::size_t cols, const std::vector<Complex>& A,
                       const std::vector<Complex>& y, const std::vector<double>& w, int iterations,
                       const std::vector<Complex>& warm_start = {});

} // namespace levlab
