#include "levlab/grid.hpp"
#include "levlab/weights.hpp"

#include <algorithm>
#include <cmath>

namespace levlab {

std::vector<double> UniformAxis::points() const {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = (*this)[i];
    return p;
}

GridFunction::GridFunction(std::vector<UniformAxis> axes, std::vector<Complex> values,
                           std::optional<double> support_radius)
    : axes_(std::move(axes)), values_(std::move(values)), support_radius_(support_radius) {
    validate();
}

void GridFunction::validate() const {
    if (axes_.empty()) throw RepresentationError("grid function: no axes");
    std::size_t total = 1;
    for (const auto& a : axes_) {
        if (!(a.lo < a.hi)) throw RepresentationError("grid function: degenerate box");
        if (a.n < 2) throw RepresentationError("grid function: each axis needs two samples");
        total *= a.n;
    }
    if (values_.size() != total) throw RepresentationError("grid function: value count does not match shape");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RepresentationError("grid function: non-finite value");
    if (support_radius_) {
        if (!(*support_radius_ > 0.0)) throw RepresentationError("grid function: support radius must be positive");
        const double tol = kSupportTolerance * sup_norm();
        const auto r = radii();
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (r[i] > *support_radius_ && std::abs(values_[i]) > tol)
                throw SupportError("grid function: nonzero sample outside the declared support radius");
    }
}

GridFunction GridFunction::sample(std::vector<UniformAxis> axes,
                                  const std::function<Complex(std::span<const double>)>& fn,
                                  std::optional<double> support_radius) {
    std::size_t total = 1;
    for (const auto& a : axes) total *= a.n;
    std::vector<Complex> v(total);
    GridFunction shape(axes, std::vector<Complex>(total));
    std::vector<double> x(axes.size());
    for (std::size_t i = 0; i < total; ++i) {
        shape.point(i, x);
        v[i] = fn(x);
    }
    return GridFunction(std::move(axes), std::move(v), support_radius);
}

void GridFunction::point(std::size_t i, std::span<double> x) const {
    for (std::size_t k = axes_.size(); k-- > 0;) {
        const std::size_t n = axes_[k].n;
        x[k] = axes_[k][i % n];
        i /= n;
    }
}

std::vector<double> GridFunction::radii() const {
    std::vector<double> r(values_.size());
    std::vector<double> x(axes_.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        point(i, x);
        double s = 0.0;
        for (double c : x) s += c * c;
        r[i] = std::sqrt(s);
    }
    return r;
}

double GridFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

double GridFunction::l2_norm_squared() const {
    std::vector<std::vector<double>> w;
    for (const auto& a : axes_) w.push_back(trapezoid_weights(a.n, a.step()));
    double total = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        double wt = 1.0;
        std::size_t rem = i;
        for (std::size_t k = axes_.size(); k-- > 0;) {
            wt *= w[k][rem % axes_[k].n];
            rem /= axes_[k].n;
        }
        total += wt * std::norm(values_[i]);
    }
    return total;
}

Complex GridFunction::interpolate(std::span<const double> x) const {
    const std::size_t d = axes_.size();
    std::vector<std::size_t> base(d);
    std::vector<double> frac(d);
    for (std::size_t k = 0; k < d; ++k) {
        const auto& a = axes_[k];
        if (x[k] < a.lo || x[k] > a.hi) return {};
        const double u = (x[k] - a.lo) / a.step();
        std::size_t b = std::min<std::size_t>(std::size_t(u), a.n - 2);
        base[k] = b;
        frac[k] = u - double(b);
    }
    Complex acc{};
    for (std::size_t corner = 0; corner < (std::size_t(1) << d); ++corner) {
        double wt = 1.0;
        std::size_t flat = 0;
        for (std::size_t k = 0; k < d; ++k) {
            const bool up = (corner >> k) & 1u;
            wt *= up ? frac[k] : 1.0 - frac[k];
            flat = flat * axes_[k].n + base[k] + (up ? 1 : 0);
        }
        if (wt != 0.0) acc += wt * values_[flat];
    }
    return acc;
}

RadialProfile::RadialProfile(int dim, UniformAxis radii, std::vector<Complex> values, double support)
    : dim_(dim), radii_(radii), values_(std::move(values)), support_(support) {
    if (dim_ < 1) throw RepresentationError("radial profile: dimension must be positive");
    if (radii_.lo != 0.0 || !(radii_.hi > 0.0) || radii_.n < 2)
        throw RepresentationError("radial profile: radii must start at 0 and increase");
    if (values_.size() != radii_.n) throw RepresentationError("radial profile: value count mismatch");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RepresentationError("radial profile: non-finite value");
    if (!(support_ > 0.0) || support_ > radii_.hi * (1.0 + 1e-12))
        throw RepresentationError("radial profile: support bound must lie in (0, R]");
}

RadialProfile RadialProfile::sample(int dim, double R, std::size_t n, const std::function<Complex(double)>& fn,
                                    double support) {
    UniformAxis ax{0.0, R, n};
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = ax[i] <= support ? fn(ax[i]) : Complex{};
    return RadialProfile(dim, ax, std::move(v), support);
}

UniformInterpolant RadialProfile::interpolant() const {
    return UniformInterpolant(values_, 0.0, radii_.step(), Extension::Even, Extension::Zero);
}

double RadialProfile::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

EvenProfile EvenProfile::from_half(double R, std::vector<Complex> half) {
    if (!(R > 0.0)) throw RepresentationError("even profile: half-width must be positive");
    if (half.size() < 2) throw RepresentationError("even profile: need at least two samples on [0, R]");
    for (const auto& v : half)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw RepresentationError("even profile: non-finite value");
    return EvenProfile(R, std::move(half));
}

EvenProfile EvenProfile::from_full(double R, const std::vector<Complex>& full, double tol) {
    if (full.size() < 3 || full.size() % 2 == 0)
        throw RepresentationError("even profile: full grid needs an odd sample count");
    const std::size_t m = full.size() / 2;
    double sup = 0.0;
    for (const auto& v : full) sup = std::max(sup, std::abs(v));
    std::vector<Complex> half(m + 1);
    for (std::size_t i = 0; i <= m; ++i) {
        const Complex a = full[m + i], b = full[m - i];
        if (std::abs(a - b) > tol * std::max(sup, 1e-300))
            throw SymmetryError("even profile: samples at +/-s differ beyond tolerance");
        half[i] = 0.5 * (a + b);
    }
    return from_half(R, std::move(half));
}

EvenProfile EvenProfile::sample(double R, std::size_t m, const std::function<Complex(double)>& fn) {
    std::vector<Complex> half(m + 1);
    for (std::size_t i = 0; i <= m; ++i) half[i] = fn(i == m ? R : R * double(i) / double(m));
    return from_half(R, std::move(half));
}

std::vector<Complex> EvenProfile::full() const {
    const std::size_t m = half_.size() - 1;
    std::vector<Complex> out(2 * m + 1);
    for (std::size_t i = 0; i <= m; ++i) out[m + i] = out[m - i] = half_[i];
    return out;
}

UniformInterpolant EvenProfile::interpolant() const {
    return UniformInterpolant(half_, 0.0, step(), Extension::Even, Extension::Zero);
}

double EvenProfile::sup_norm() const {
    double m = 0.0;
    for (const auto& v : half_) m = std::max(m, std::abs(v));
    return m;
}

double effective_support(const UniformAxis& axis, const std::vector<Complex>& values, double rel_tol) {
    double sup = 0.0;
    for (const auto& v : values) sup = std::max(sup, std::abs(v));
    if (sup == 0.0) return 0.0;
    double last = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (std::abs(values[i]) > rel_tol * sup) last = std::max(last, std::abs(axis[i]));
    return last;
}

double psi_norm(const GridFunction& f, const WeightFunction& psi) {
    const auto r = f.radii();
    return psi_norm(std::span<const Complex>(f.values()), std::span<const double>(r), psi);
}

} // namespace levlab
