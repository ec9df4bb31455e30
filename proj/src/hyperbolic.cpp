#include "levlab/hyperbolic.hpp"
#include "levlab/euclid.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>

namespace levlab::hyperbolic {

namespace {

constexpr double kPhiTarget = 1e-10;
constexpr double kPhiLimit = 1e-9;
constexpr std::size_t kPhiMaxOrder = 16384;

double log_sinh(double x) {
    if (x > 20.0) return x - std::log(2.0) + std::log1p(-std::exp(-2.0 * x));
    return std::log(std::sinh(x));
}

// 1 / sinh t without overflow, t > 0
double inv_sinh(double t) { return std::exp(-log_sinh(t)); }

std::size_t pow2_at_least(double x) {
    std::size_t n = 16;
    while (double(n) < x && n < kPhiMaxOrder) n *= 2;
    return n;
}

// Gauss rule for phi_lambda(t) = sum_i w_i cos(lambda s_i), over the boundary angle beta in [0, pi/2]
// with s = t cos(beta).
struct BoundaryRule {
    std::vector<double> s, w;
};

BoundaryRule boundary_rule(const HyperbolicModel& m, double t, std::size_t n) {
    const int d = m.dim();
    const double e = 0.5 * (d - 3);
    const double area = std::sqrt(kPi) * std::tgamma(0.5 * (d - 1)) / std::tgamma(0.5 * d);
    const double log_k = e * std::log(2.0) - std::log(area) - (d - 2) * log_sinh(t);
    const QuadratureRule& gl = gauss_legendre(n);
    const double half = 0.25 * kPi;
    BoundaryRule r;
    r.s.resize(n);
    r.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = half + half * gl.nodes[i];
        const double sh = std::sin(0.5 * beta), ch = std::cos(0.5 * beta);
        // cosh t - cosh s = 2 sinh(t sin^2(beta/2)) sinh(t cos^2(beta/2))
        const double log_gap = std::log(2.0) + log_sinh(t * sh * sh) + log_sinh(t * ch * ch);
        r.s[i] = t * std::cos(beta);
        r.w[i] = 2.0 * half * gl.weights[i] * t * std::sin(beta) * std::exp(log_k + e * log_gap);
    }
    return r;
}

template <class L>
std::vector<Complex> boundary_sum(const BoundaryRule& r, std::span<const L> lambdas) {
    std::vector<Complex> out(lambdas.size());
    for (std::size_t k = 0; k < lambdas.size(); ++k) {
        if constexpr (std::is_same_v<L, double>) {
            double acc = 0.0;
            for (std::size_t i = 0; i < r.s.size(); ++i) acc += r.w[i] * std::cos(lambdas[k] * r.s[i]);
            out[k] = acc;
        } else {
            Complex acc{};
            for (std::size_t i = 0; i < r.s.size(); ++i) acc += r.w[i] * std::cos(lambdas[k] * r.s[i]);
            out[k] = acc;
        }
    }
    return out;
}

template <class L>
std::vector<Complex> phi_by_quadrature(const HyperbolicModel& m, std::span<const L> lambdas, double t, double* error) {
    if (t == 0.0) {
        if (error) *error = 0.0;
        return std::vector<Complex>(lambdas.size(), Complex{1.0});
    }
    double top = 0.0;
    for (const auto& l : lambdas) top = std::max(top, std::abs(l));
    std::size_t n = pow2_at_least(0.5 * top * t + 16.0);
    auto prev = boundary_sum(boundary_rule(m, t, n), lambdas);
    while (true) {
        auto cur = boundary_sum(boundary_rule(m, t, 2 * n), lambdas);
        double change = 0.0;
        for (std::size_t k = 0; k < cur.size(); ++k)
            change = std::max(change, std::abs(cur[k] - prev[k]) / std::max(1.0, std::abs(cur[k])));
        n *= 2;
        if (change <= kPhiTarget || 2 * n > kPhiMaxOrder) {
            if (change > kPhiLimit)
                throw PrecisionError("phi_lambda: boundary quadrature did not converge at t = " + std::to_string(t),
                                     change);
            if (error) *error = change;
            return cur;
        }
        prev = std::move(cur);
    }
}

Complex phi_closed_form(Complex lambda, double t) {
    if (t == 0.0) return 1.0;
    const double ratio = t < 1e-8 ? 1.0 : t * inv_sinh(t);
    const Complex z = lambda * t;
    if (std::abs(z) < 1e-4) return ratio * (1.0 - z * z / 6.0 + z * z * z * z / 120.0);
    return std::sin(z) / lambda * inv_sinh(t);
}

double spectral_tail(const std::vector<Complex>& v, const std::vector<double>& dens) {
    double top = 0.0, tail = 0.0;
    const std::size_t start = v.size() - std::max<std::size_t>(1, v.size() / 10);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double a = std::abs(v[k]) * dens[k];
        top = std::max(top, a);
        if (k >= start) tail = std::max(tail, a);
    }
    return top > 0.0 ? tail / top : 0.0;
}

// Uniform grid on [0, bandwidth] with spacing at most `spacing`.
UniformAxis lambda_axis(double bandwidth, double spacing) {
    const auto n = std::size_t(std::ceil(bandwidth / spacing - 1e-9)) + 1;
    return {0.0, bandwidth, std::max<std::size_t>(n, 3)};
}

std::vector<Complex> forward_on(const BiinvariantFunction& f, const std::vector<double>& lambdas) {
    const auto& m = f.model();
    const double Lf = std::min(f.extent(), f.radii().hi);
    const double top = lambdas.empty() ? 0.0 : *std::max_element(lambdas.begin(), lambdas.end());
    const double width = std::min(2.0 * f.radii().step(), top > 0.0 ? 4.0 / top : 1.0);
    const auto rule = composite_gauss(0.0, Lf, panels_for(0.0, Lf, width), 16);
    const auto interp = f.interpolant();
    std::vector<double> nodes;
    std::vector<Complex> weights;
    for (std::size_t i = 0; i < rule.size(); ++i) {
        const double t = rule.nodes[i];
        const Complex v = interp(t);
        if (v == Complex{}) continue;
        nodes.push_back(t);
        weights.push_back(v * rule.weights[i] * m.volume_density(t));
    }
    // fixed chunks reduced in order keep the sum deterministic under threading
    constexpr std::size_t chunk = 32;
    const std::size_t chunks = (nodes.size() + chunk - 1) / chunk;
    std::vector<std::vector<Complex>> partial(chunks, std::vector<Complex>(lambdas.size()));
    parallel_for(chunks, [&](std::size_t c) {
        for (std::size_t i = c * chunk; i < std::min(nodes.size(), (c + 1) * chunk); ++i) {
            const auto row = phi_row(m, lambdas, nodes[i]);
            for (std::size_t k = 0; k < lambdas.size(); ++k) partial[c][k] += weights[i] * row[k];
        }
    });
    std::vector<Complex> out(lambdas.size());
    for (const auto& p : partial)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
    return out;
}

// Auto-bandwidth loop shared by the forward transforms.
template <class Eval>
SpectralFunction adaptive_spectrum(const HyperbolicModel& m, double spacing, double cap, const SpectralOptions& opts,
                                   Eval&& eval) {
    double bandwidth = opts.bandwidth > 0.0 ? opts.bandwidth : std::min(16.0, cap);
    while (true) {
        const auto axis = lambda_axis(bandwidth, spacing);
        auto F = SpectralFunction::make(m, axis, eval(axis.points()));
        if (opts.bandwidth > 0.0 || F.tail() < opts.tail_tol || bandwidth >= cap) return F;
        bandwidth = std::min(2.0 * bandwidth, cap);
    }
}

} // namespace

HyperbolicModel::HyperbolicModel(int d) : d_(d) {
    if (d < 2) throw ArgumentError("hyperbolic model: dimension must be at least 2");
}

HyperbolicModel HyperbolicModel::parse(const std::string& name) {
    if (name.size() < 2 || (name[0] != 'H' && name[0] != 'h')) throw ArgumentError("unknown space '" + name + "'");
    try {
        std::size_t used = 0;
        const int d = std::stoi(name.substr(1), &used);
        if (used + 1 != name.size()) throw ArgumentError("unknown space '" + name + "'");
        return HyperbolicModel(d);
    } catch (const std::logic_error&) {
        throw ArgumentError("unknown space '" + name + "'");
    }
}

double HyperbolicModel::volume_density(double t) const {
    if (t <= 0.0) return 0.0;
    return sphere_area(d_) * std::exp((d_ - 1) * log_sinh(t));
}

double HyperbolicModel::plancherel(double lambda) const {
    lambda = std::abs(lambda);
    const double l2 = lambda * lambda;
    double p = 1.0;
    if (d_ % 2 == 1) {
        // prod_{j=0}^{rho-1} (lambda^2 + j^2)
        for (int j = 0; j < (d_ - 1) / 2; ++j) p *= l2 + double(j) * j;
        return p;
    }
    for (int j = 1; j <= (d_ - 2) / 2; ++j) p *= l2 + (j - 0.5) * (j - 0.5);
    return p * lambda * std::tanh(kPi * lambda);
}

double HyperbolicModel::inversion_constant() const { return sphere_area(d_) / std::pow(2.0 * kPi, d_); }

double c_density(const HyperbolicModel& model, double lambda) {
    if (!(lambda > 0.0)) throw ArgumentError("c_density: lambda must be positive");
    return model.plancherel(lambda);
}

PhiValue phi_quadrature(const HyperbolicModel& model, Complex lambda, double t) {
    if (!(t >= 0.0)) throw ArgumentError("phi_lambda: t must be nonnegative");
    double err = 0.0;
    std::vector<Complex> v;
    if (lambda.imag() == 0.0) {
        const double l = lambda.real();
        v = phi_by_quadrature(model, std::span<const double>(&l, 1), t, &err);
    } else {
        v = phi_by_quadrature(model, std::span<const Complex>(&lambda, 1), t, &err);
    }
    return {v[0], err};
}

Complex phi_lambda(const HyperbolicModel& model, Complex lambda, double t) {
    if (!(t >= 0.0)) throw ArgumentError("phi_lambda: t must be nonnegative");
    if (t == 0.0) return 1.0;
    if (model.dim() == 3) return phi_closed_form(lambda, t);
    return phi_quadrature(model, lambda, t).value;
}

double phi_lambda(const HyperbolicModel& model, double lambda, double t) {
    return phi_lambda(model, Complex{lambda}, t).real();
}

std::vector<double> phi_row(const HyperbolicModel& model, std::span<const double> lambdas, double t) {
    std::vector<double> out(lambdas.size());
    if (!(t >= 0.0)) throw ArgumentError("phi_lambda: t must be nonnegative");
    if (model.dim() == 3) {
        for (std::size_t k = 0; k < lambdas.size(); ++k) out[k] = phi_closed_form(lambdas[k], t).real();
        return out;
    }
    const auto v = phi_by_quadrature(model, lambdas, t, nullptr);
    for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].real();
    return out;
}

BiinvariantFunction::BiinvariantFunction(HyperbolicModel model, UniformAxis t, std::vector<Complex> values,
                                         std::optional<double> support)
    : model_(model), t_(t), values_(std::move(values)), support_(support) {
    if (t_.lo != 0.0 || !(t_.hi > 0.0) || t_.n < 2) throw RepresentationError("biinvariant function: grid must be [0, T]");
    if (values_.size() != t_.n) throw RepresentationError("biinvariant function: sample count differs from the grid");
    for (const auto& v : values_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw RepresentationError("biinvariant function: non-finite sample");
    if (support_) {
        if (!(*support_ > 0.0) || *support_ > t_.hi + 1e-12)
            throw RepresentationError("biinvariant function: support bound must lie in (0, T]");
        const double tol = kSupportTolerance * sup_norm();
        for (std::size_t i = 0; i < t_.n; ++i)
            if (t_[i] > *support_ + 1e-12 && std::abs(values_[i]) > tol)
                throw SupportError("biinvariant function: samples past the declared support");
    }
}

BiinvariantFunction BiinvariantFunction::sample(HyperbolicModel model, double T, std::size_t n,
                                                const std::function<Complex(double)>& fn,
                                                std::optional<double> support) {
    const UniformAxis axis{0.0, T, n};
    std::vector<Complex> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = fn(axis[i]);
    return BiinvariantFunction(model, axis, std::move(v), support);
}

UniformInterpolant BiinvariantFunction::interpolant() const {
    return UniformInterpolant(values_, 0.0, t_.step(), Extension::Even, Extension::Zero);
}

double BiinvariantFunction::sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
}

Complex BiinvariantFunction::volume_integral() const {
    const double end = std::min(extent(), t_.hi);
    const auto rule = composite_gauss(0.0, end, panels_for(0.0, end, 2.0 * t_.step()), 16);
    const auto f = interpolant();
    Complex acc{};
    for (std::size_t i = 0; i < rule.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]) * model_.volume_density(rule.nodes[i]);
    return acc;
}

double BiinvariantFunction::volume_mass() const {
    const double end = std::min(extent(), t_.hi);
    const auto rule = composite_gauss(0.0, end, panels_for(0.0, end, 2.0 * t_.step()), 16);
    const auto f = interpolant();
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i)
        acc += rule.weights[i] * std::abs(f(rule.nodes[i])) * model_.volume_density(rule.nodes[i]);
    return acc;
}

SpectralFunction SpectralFunction::make(HyperbolicModel model, UniformAxis lambdas, std::vector<Complex> values) {
    if (lambdas.lo != 0.0 || lambdas.n < 2) throw RepresentationError("spectral function: grid must start at 0");
    if (values.size() != lambdas.n) throw RepresentationError("spectral function: sample count differs from the grid");
    SpectralFunction F{model, lambdas, std::move(values), {}};
    F.density.resize(lambdas.n);
    for (std::size_t k = 0; k < lambdas.n; ++k) F.density[k] = model.plancherel(lambdas[k]);
    return F;
}

double SpectralFunction::tail() const { return spectral_tail(values, density); }

double SpectralFunction::energy() const {
    const auto w = trapezoid_weights(lambdas.n, lambdas.step());
    double acc = 0.0;
    for (std::size_t k = 0; k < lambdas.n; ++k) acc += w[k] * std::norm(values[k]) * density[k];
    return acc;
}

double spectral_spacing(const HyperbolicModel& model, double support, double reach) {
    // The integrand has exponential type support + reach in lambda; for even d the density
    // also has poles at distance 1/2 from the real axis, whose aliases decay like e^{-s/2}.
    if (model.dim() % 2 == 1) return kPi / (support + reach);
    return 2.0 * kPi / (support + reach + 50.0);
}

SpectralFunction sft_forward(const BiinvariantFunction& f, const SpectralOptions& opts) {
    const double reach = opts.reach > 0.0 ? opts.reach : f.radii().hi;
    const double spacing = opts.spacing > 0.0 ? opts.spacing : spectral_spacing(f.model(), f.extent(), reach);
    const double cap = opts.max_bandwidth > 0.0 ? opts.max_bandwidth : kPi / f.radii().step();
    if (f.model().dim() == 3) {
        return adaptive_spectrum(f.model(), spacing, cap, opts,
                                 [&](const std::vector<double>& l) { return forward_on(f, l); });
    }
    // through the Abel integral: f^ = F(Af)
    const auto A = abel_direct(f);
    return adaptive_spectrum(f.model(), spacing, cap, opts,
                             [&](const std::vector<double>& l) { return euclid::even_fourier(A, l); });
}

std::vector<Complex> sft_at(const BiinvariantFunction& f, std::span<const Complex> lambdas) {
    const auto& m = f.model();
    const double Lf = std::min(f.extent(), f.radii().hi);
    double top = 0.0;
    for (const auto& l : lambdas) top = std::max(top, std::abs(l.real()));
    const double width = std::min(2.0 * f.radii().step(), top > 0.0 ? 4.0 / top : 1.0);
    const auto rule = composite_gauss(0.0, Lf, panels_for(0.0, Lf, width), 16);
    const auto interp = f.interpolant();
    std::vector<Complex> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t k) {
        Complex acc{};
        for (std::size_t i = 0; i < rule.size(); ++i) {
            const double t = rule.nodes[i];
            const Complex v = interp(t);
            if (v == Complex{}) continue;
            acc += rule.weights[i] * v * m.volume_density(t) * phi_lambda(m, -lambdas[k], t);
        }
        out[k] = acc;
    });
    return out;
}

BiinvariantFunction sft_inverse(const SpectralFunction& F, const UniformAxis& t, double tail_tol) {
    const double tail = F.tail();
    if (tail > tail_tol)
        throw TruncationError("sft_inverse: spectrum has not decayed at lambda = " + std::to_string(F.lambdas.hi), tail);
    const auto lambdas = F.lambdas.points();
    const auto w = trapezoid_weights(lambdas.size(), F.lambdas.step());
    std::vector<Complex> weighted(lambdas.size());
    const double kappa = F.model.inversion_constant();
    for (std::size_t k = 0; k < lambdas.size(); ++k) weighted[k] = kappa * w[k] * F.values[k] * F.density[k];
    std::vector<Complex> out(t.n);
    if (F.model.dim() == 3) {
        parallel_for(t.n, [&](std::size_t i) {
            const auto row = phi_row(F.model, lambdas, t[i]);
            Complex acc{};
            for (std::size_t k = 0; k < lambdas.size(); ++k) acc += weighted[k] * row[k];
            out[i] = acc;
        });
        return BiinvariantFunction(F.model, t, std::move(out));
    }
    // G(s) = kappa int F |c|^-2 cos(lambda s) on a fine grid, then phi's boundary rule applied to G
    const double bandwidth = F.lambdas.hi;
    const double hs = std::min(t.step(), kPi / (8.0 * bandwidth));
    // a few cells past T so the interpolation stencil never leaves the grid
    const auto cells = std::size_t(std::ceil(t.hi / hs));
    const double step = t.hi / double(cells);
    const std::size_t ns = cells + 9;
    std::vector<Complex> G(ns);
    parallel_for(ns, [&](std::size_t j) {
        const double s = step * double(j);
        Complex acc{};
        for (std::size_t k = 0; k < lambdas.size(); ++k) acc += weighted[k] * std::cos(lambdas[k] * s);
        G[j] = acc;
    });
    double scale = 0.0;
    for (const auto& g : G) scale = std::max(scale, std::abs(g));
    const UniformInterpolant Gi(G, 0.0, step, Extension::Even, Extension::Clamp);
    parallel_for(t.n, [&](std::size_t i) {
        const double x = t[i];
        if (x == 0.0) {
            out[i] = G[0];
            return;
        }
        auto apply = [&](std::size_t n) {
            const auto r = boundary_rule(F.model, x, n);
            Complex acc{};
            for (std::size_t q = 0; q < n; ++q) acc += r.w[q] * Gi(r.s[q]);
            return acc;
        };
        std::size_t n = pow2_at_least(0.5 * bandwidth * x + 16.0);
        Complex prev = apply(n);
        while (true) {
            const Complex cur = apply(2 * n);
            const double change = std::abs(cur - prev);
            n *= 2;
            if (change <= kPhiTarget * scale || 2 * n > kPhiMaxOrder) {
                if (change > kPhiLimit * scale)
                    throw PrecisionError("sft_inverse: boundary quadrature did not converge at t = " + std::to_string(x),
                                         change / scale);
                out[i] = cur;
                return;
            }
            prev = cur;
        }
    });
    return BiinvariantFunction(F.model, t, std::move(out));
}

EvenProfile abel_forward(const BiinvariantFunction& f, const SpectralOptions& opts) {
    if (!f.support()) throw SupportError("abel_forward: the function needs a declared support");
    const auto F = sft_forward(f, opts);
    const auto lambdas = F.lambdas.points();
    const auto w = trapezoid_weights(lambdas.size(), F.lambdas.step());
    const auto& t = f.radii();
    std::vector<Complex> half(t.n);
    parallel_for(t.n, [&](std::size_t j) {
        Complex acc{};
        for (std::size_t k = 0; k < lambdas.size(); ++k) acc += w[k] * F.values[k] * std::cos(lambdas[k] * t[j]);
        half[j] = acc / kPi;
    });
    return EvenProfile::from_half(t.hi, std::move(half));
}

EvenProfile abel_direct(const BiinvariantFunction& f) {
    const auto& m = f.model();
    const int d = m.dim();
    const double e = 0.5 * (d - 3);
    // A(s) = c int_s^L f(t) sinh t (cosh t - cosh s)^e dt, with t = s + w^2 removing the endpoint singularity
    const double c = sphere_area(d) * std::pow(2.0, e) * std::tgamma(0.5 * d) / (std::sqrt(kPi) * std::tgamma(0.5 * (d - 1)));
    const auto& t = f.radii();
    const double Lf = std::min(f.extent(), t.hi);
    const auto interp = f.interpolant();
    bool complex_valued = false;
    for (const auto& v : f.values()) complex_valued = complex_valued || v.imag() != 0.0;
    std::vector<Complex> half(t.n);
    constexpr std::size_t chunk = 16;
    parallel_for((t.n + chunk - 1) / chunk, [&](std::size_t b) {
        boost::math::quadrature::tanh_sinh<double> ts(12);
        for (std::size_t j = b * chunk; j < std::min(t.n, (b + 1) * chunk); ++j) {
            const double s = t[j];
            if (s >= Lf) continue;
            auto kernel = [&](double w) {
                if (w < 1e-100) return 0.0; // the integrand is bounded near w = 0
                const double x = s + w * w;
                const double log_gap = std::log(2.0) + log_sinh(0.5 * (x + s)) + log_sinh(0.5 * w * w);
                return std::exp(log_sinh(x) + e * log_gap) * 2.0 * w;
            };
            const double top = std::sqrt(Lf - s);
            const double re = ts.integrate([&](double w) { return kernel(w) == 0.0 ? 0.0 : interp(s + w * w).real() * kernel(w); },
                                           0.0, top, 1e-12);
            double im = 0.0;
            if (complex_valued)
                im = ts.integrate([&](double w) { return kernel(w) == 0.0 ? 0.0 : interp(s + w * w).imag() * kernel(w); },
                                  0.0, top, 1e-12);
            half[j] = c * Complex{re, im};
        }
    });
    return EvenProfile::from_half(t.hi, std::move(half));
}

AbelInverseResult abel_inverse_report(const EvenProfile& g, const HyperbolicModel& model, double L,
                                      const SpectralOptions& opts, double support_tol) {
    if (!(L > 0.0)) throw ArgumentError("abel_inverse: L must be positive");
    const double R = g.half_width(), h = g.step();
    const UniformAxis s{0.0, R, g.half_count()};
    if (effective_support(s, g.half(), support_tol) > L + 1e-12)
        throw SupportError("abel_inverse: profile is not supported in [-L, L]");
    const double reach = opts.reach > 0.0 ? opts.reach : R;
    const double spacing = opts.spacing > 0.0 ? opts.spacing : spectral_spacing(model, L, reach);
    const double cap = opts.max_bandwidth > 0.0 ? opts.max_bandwidth : kPi / h;
    const auto F = adaptive_spectrum(model, spacing, cap, opts, [&](const std::vector<double>& l) {
        return euclid::even_fourier(g, l);
    });
    auto f = sft_inverse(F, s, opts.tail_tol);
    auto values = f.values();
    const double sup = f.sup_norm();
    double leak = 0.0;
    for (std::size_t i = 0; i < s.n; ++i)
        if (s[i] > L + h + 1e-12) leak = std::max(leak, std::abs(values[i]));
    leak = sup > 0.0 ? leak / sup : 0.0;
    if (leak > support_tol) throw CertificationError("support", "abel_inverse: support leaks past L", leak);
    for (std::size_t i = 0; i < s.n; ++i)
        if (s[i] > L + 1e-12) values[i] = 0.0;
    return {BiinvariantFunction(model, s, std::move(values), std::min(L, R)), F.lambdas.hi, leak};
}

BiinvariantFunction abel_inverse(const EvenProfile& g, const HyperbolicModel& model, double L,
                                 const SpectralOptions& opts) {
    return abel_inverse_report(g, model, L, opts).function;
}

SpectralFunction heat_hat(const HyperbolicModel& model, double t, const UniformAxis& lambdas) {
    if (!(t > 0.0)) throw ArgumentError("heat_hat: t must be positive");
    const double rho2 = model.rho() * model.rho();
    std::vector<Complex> v(lambdas.n);
    for (std::size_t k = 0; k < lambdas.n; ++k) v[k] = std::exp(-t * (lambdas[k] * lambdas[k] + rho2));
    return SpectralFunction::make(model, lambdas, std::move(v));
}

BiinvariantFunction heat_kernel(const HyperbolicModel& model, double t, double T, std::size_t n) {
    if (!(t > 0.0)) throw ArgumentError("heat_kernel: t must be positive");
    // Gaussian in lambda; the Abel side is Gaussian of width sqrt(4t) and is not compactly supported
    const double spread = 12.0 * std::sqrt(t);
    const double spacing = spectral_spacing(model, spread + T, T);
    auto weight = [&](double l) { return std::exp(-t * l * l) * model.plancherel(l); };
    double peak = 0.0;
    for (int k = 1; k <= 200; ++k) peak = std::max(peak, weight(0.1 * k / std::sqrt(t)));
    double bandwidth = 4.0;
    while (weight(bandwidth) > 1e-13 * peak || bandwidth * std::sqrt(t) < 1.0) bandwidth *= 1.25;
    const auto F = heat_hat(model, t, lambda_axis(bandwidth, spacing));
    return sft_inverse(F, UniformAxis{0.0, T, n});
}

BiinvariantFunction heat_apply(const BiinvariantFunction& f, double t, const SpectralOptions& opts) {
    const auto F = sft_forward(f, opts);
    return sft_inverse(convolve_spectral(F, heat_hat(f.model(), t, F.lambdas)), f.radii(), opts.tail_tol);
}

SpectralFunction convolve_spectral(const SpectralFunction& F, const SpectralFunction& G) {
    if (!(F.model == G.model) || !(F.lambdas == G.lambdas))
        throw ArgumentError("convolve_spectral: spectral grids differ");
    SpectralFunction out = F;
    for (std::size_t k = 0; k < out.values.size(); ++k) out.values[k] = F.values[k] * G.values[k];
    return out;
}

PaleyWienerReport paley_wiener_check(const BiinvariantFunction& f, double L, double mu_max, std::size_t count) {
    if (!(L > 0.0) || !(mu_max > 0.0) || count < 3) throw ArgumentError("paley_wiener_check: bad range");
    PaleyWienerReport r;
    r.L = L;
    std::vector<Complex> lambdas(count);
    for (std::size_t k = 0; k < count; ++k) {
        r.mu.push_back(mu_max * double(k) / double(count - 1));
        lambdas[k] = Complex{0.0, r.mu.back()};
    }
    const auto v = sft_at(f, lambdas);
    // int |f| phi_0 J dt bounds |f^(i mu)| e^{-L mu} when f lives in [0, L]
    std::vector<Complex> weighted(f.values().size());
    for (std::size_t i = 0; i < weighted.size(); ++i) weighted[i] = std::abs(f.values()[i]) * phi_lambda(f.model(), 0.0, f.radii()[i]);
    r.bound = BiinvariantFunction(f.model(), f.radii(), weighted, f.support()).volume_integral().real();
    for (std::size_t k = 0; k < count; ++k) {
        const double ratio = std::abs(v[k]) * std::exp(-L * r.mu[k]);
        r.ratio.push_back(ratio);
        r.c_full = std::max(r.c_full, ratio);
        if (r.mu[k] <= 0.5 * mu_max + 1e-12) r.c_half = std::max(r.c_half, ratio);
        if (ratio > r.bound * (1.0 + 1e-6) + 1e-300) r.bounded = false;
    }
    r.drift = r.c_half > 0.0 ? r.c_full / r.c_half - 1.0 : 0.0;
    return r;
}

} // namespace levlab::hyperbolic
