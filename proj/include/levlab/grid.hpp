#pragma once

#include "levlab/core.hpp"
#include "levlab/numerics.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace levlab {

class WeightFunction;

/// Equispaced samples lo, ..., hi (both endpoints included).
struct UniformAxis {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 2;

    double step() const { return (hi - lo) / double(n - 1); }
    double operator[](std::size_t i) const { return i + 1 == n ? hi : lo + step() * double(i); }
    std::vector<double> points() const;
    bool operator==(const UniformAxis&) const = default;

    /// Symmetric axis [-R, R] with 2m+1 samples.
    static UniformAxis symmetric(double R, std::size_t m) { return {-R, R, 2 * m + 1}; }
};

/// Complex function sampled on a tensor grid, row-major (last axis fastest).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<UniformAxis> axes, std::vector<Complex> values,
                 std::optional<double> support_radius = std::nullopt);

    /// Sample fn at every grid point.
    static GridFunction sample(std::vector<UniformAxis> axes,
                               const std::function<Complex(std::span<const double>)>& fn,
                               std::optional<double> support_radius = std::nullopt);

    int dim() const { return int(axes_.size()); }
    const std::vector<UniformAxis>& axes() const { return axes_; }
    const std::vector<Complex>& values() const { return values_; }
    std::vector<Complex>& mutable_values() { return values_; }
    std::optional<double> support_radius() const { return support_radius_; }
    std::size_t size() const { return values_.size(); }

    /// Coordinates of flat index i.
    void point(std::size_t i, std::span<double> x) const;
    /// Euclidean norm of each grid point, in flat order.
    std::vector<double> radii() const;
    double sup_norm() const;
    /// Trapezoid quadrature of |f|^2.
    double l2_norm_squared() const;
    /// Multilinear interpolation, zero outside the box.
    Complex interpolate(std::span<const double> x) const;

private:
    void validate() const;

    std::vector<UniformAxis> axes_;
    std::vector<Complex> values_;
    std::optional<double> support_radius_;
};

/// Radial function on R^d sampled on [0, R]; zero past its support bound.
class RadialProfile {
public:
    RadialProfile(int dim, UniformAxis radii, std::vector<Complex> values, double support);

    static RadialProfile sample(int dim, double R, std::size_t n, const std::function<Complex(double)>& fn,
                                double support);

    int dim() const { return dim_; }
    const UniformAxis& radii() const { return radii_; }
    const std::vector<Complex>& values() const { return values_; }
    double support() const { return support_; }
    /// Smooth interpolant with even extension through r = 0.
    UniformInterpolant interpolant() const;
    double sup_norm() const;

private:
    int dim_;
    UniformAxis radii_;
    std::vector<Complex> values_;
    double support_;
};

/// Even function on [-R, R] with 2m+1 samples; symmetric by construction.
class EvenProfile {
public:
    /// From the m+1 samples on [0, R].
    static EvenProfile from_half(double R, std::vector<Complex> half);
    /// From the full symmetric grid; mismatched mirror samples beyond tol * sup raise SymmetryError.
    static EvenProfile from_full(double R, const std::vector<Complex>& full, double tol = 1e-10);
    static EvenProfile sample(double R, std::size_t m, const std::function<Complex(double)>& fn);

    double half_width() const { return R_; }
    std::size_t half_count() const { return half_.size(); }
    UniformAxis axis() const { return UniformAxis::symmetric(R_, half_.size() - 1); }
    double step() const { return R_ / double(half_.size() - 1); }
    /// Samples on [0, R].
    const std::vector<Complex>& half() const { return half_; }
    /// Samples on the full grid [-R, R].
    std::vector<Complex> full() const;
    UniformInterpolant interpolant() const;
    double sup_norm() const;

private:
    EvenProfile(double R, std::vector<Complex> half) : R_(R), half_(std::move(half)) {}
    double R_;
    std::vector<Complex> half_;
};

/// Largest grid position whose sample exceeds rel_tol * sup (0 for the zero profile).
double effective_support(const UniformAxis& axis, const std::vector<Complex>& values, double rel_tol);

/// psi-norm of grid samples.
double psi_norm(const GridFunction& f, const WeightFunction& psi);

} // namespace levlab
