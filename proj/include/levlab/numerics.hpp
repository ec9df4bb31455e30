#pragma once

#include "levlab/core.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace levlab {

/// Nodes and weights of a quadrature rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre rule on [-1, 1]; cached, safe to call concurrently.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Composite Gauss-Legendre rule with equal panels on [a, b].
QuadratureRule composite_gauss(double a, double b, std::size_t panels, std::size_t order = 16);

/// Trapezoid weights for n equispaced samples with spacing h.
std::vector<double> trapezoid_weights(std::size_t n, double h);

/// Panel count so that panels are no wider than max_width.
std::size_t panels_for(double a, double b, double max_width);

enum class Extension { Zero, Even, Clamp };

/// Local Lagrange interpolation on a uniform grid (8-point stencil by default).
/// The left/right extensions say what the function does past the sampled range:
/// Even reflects about the first sample, Zero treats it as vanishing.
class UniformInterpolant {
public:
    UniformInterpolant(std::vector<Complex> values, double x0, double step,
                       Extension left, Extension right, int stencil = 8);

    Complex operator()(double x) const;
    double lo() const { return x0_; }
    double hi() const { return x0_ + step_ * double(values_.size() - 1); }

private:
    Complex sample(long i) const;

    std::vector<Complex> values_;
    double x0_, step_;
    Extension left_, right_;
    int stencil_;
    std::vector<double> bary_;
};

/// Integrate a vector-valued integrand by Gauss-Legendre with doubling order
/// until successive estimates agree to abs_tol. Returns the achieved change.
double adaptive_gauss(const std::function<void(double x, double w, std::vector<Complex>& acc)>& add,
                      double a, double b, std::size_t count, std::vector<Complex>& out,
                      double abs_tol, std::size_t n0 = 16, std::size_t n_max = 8192);

/// Surface area of the unit sphere S^{n-1} in R^n (|S^0| = 2).
double sphere_area(int n);

/// Normalized radial kernel of the d-dimensional Fourier transform:
/// Gamma(d/2) (2/z)^{d/2-1} J_{d/2-1}(z), equal to 1 at z = 0.
double radial_kernel(int d, double z);

/// Deterministic parallel loop over [0, n); respects LEVLAB_THREADS.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Number of worker threads parallel_for will use.
unsigned worker_count();

} // namespace levlab
