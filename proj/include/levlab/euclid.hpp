#pragma once

#include "levlab/grid.hpp"
#include "levlab/weights.hpp"

#include <functional>
#include <span>
#include <vector>

namespace levlab::euclid {

/// F(xi) = sum over the box of f(x) e^{-i x.xi} (trapezoid), no prefactor.
/// Throws SupportError if f is not negligible on the faces of its box.
GridFunction fourier_forward(const GridFunction& f, const std::vector<UniformAxis>& freq_axes);

/// f(x) = (2 pi)^{-d} sum over the frequency box of F(xi) e^{i x.xi}.
GridFunction fourier_inverse(const GridFunction& F, const std::vector<UniformAxis>& space_axes);

/// Hyperplane integrals of a radial function; output on [-R, R] with the profile's spacing.
EvenProfile radon_radial(const RadialProfile& f);

/// d-dimensional Fourier transform of a radial profile at the given radii |xi|.
std::vector<Complex> radial_fourier(const RadialProfile& f, std::span<const double> lambdas);

/// One-dimensional transform of an even profile, 2 int_0^R g(s) cos(lambda s) ds.
std::vector<Complex> even_fourier(const EvenProfile& g, std::span<const double> lambdas);

/// (2 pi)^{-d} |S^{d-1}| int_0^Lambda G(lambda) j_d(lambda r) lambda^{d-1} d lambda at each radius,
/// for a transform known in closed form. d = 1 gives the inverse cosine transform.
std::vector<Complex> radial_inverse_fourier(int d, const std::function<Complex(double)>& G, double bandwidth,
                                            const UniformAxis& radii);

struct RadonInverseOptions {
    /// Spectral cutoff; 0 picks it from the decay of the one-dimensional transform.
    double bandwidth = 0.0;
    /// Relative tail level used by the automatic cutoff.
    double tail_tol = 1e-12;
    /// Relative level above which samples past l count as a support leak.
    double support_tol = kSupportTolerance;
};

struct RadonInverseResult {
    RadialProfile profile;
    double bandwidth;
    double leak; // largest |f| past l + one cell, relative to sup|f|
};

/// The radial f with hyperplane integrals g, via the slice identity and a radial inverse transform.
RadonInverseResult radon_inverse_radial_report(const EvenProfile& g, int d, double l,
                                               const RadonInverseOptions& opts = {});
RadialProfile radon_inverse_radial(const EvenProfile& g, int d, double l, const RadonInverseOptions& opts = {});

/// Max discrepancy between the radial d-dimensional transform and the one-dimensional
/// transform of the hyperplane profile, on lambdas (default: 201 points on [0, 40]).
double slice_projection_check(const RadialProfile& f, std::span<const double> lambdas = {});

struct SpanSpec {
    double L = 1.0;
    std::vector<std::vector<double>> nodes;
    int dim() const { return nodes.empty() ? 0 : int(nodes.front().size()); }
    /// Throws ArgumentError unless every node lies strictly inside the cube |lambda_i| < L / sqrt(d).
    void validate() const;
};

struct SpanOptions {
    int lawson_iterations = 40;
    /// Coefficients for a leading subset of the nodes; the result is never worse than this start.
    std::vector<Complex> warm_start;
};

struct SpanProjection {
    std::vector<Complex> coeffs;
    double residual = 0.0; // exact grid psi-norm of target - sum c_j e^{i lambda_j . x}
    bool regularized = false;
    std::size_t rank = 0;
    int iterations = 0;
};

SpanProjection span_project(const GridFunction& target, const SpanSpec& span, const WeightFunction& psi,
                            const SpanOptions& opts = {});

/// Evaluate sum_j c_j e^{i lambda_j . x} on the grid of `like`.
GridFunction span_evaluate(const GridFunction& like, const SpanSpec& span, const std::vector<Complex>& coeffs);

} // namespace levlab::euclid
