#include "levlab/euclid.hpp"
#include "levlab/lawson.hpp"

#include <algorithm>
#include <cmath>

namespace levlab::euclid {

namespace {

// Contract axis k of a row-major array with an (m x n) kernel.
std::vector<Complex> apply_axis(const std::vector<Complex>& in, const std::vector<std::size_t>& shape,
                                std::size_t k, const std::vector<Complex>& kernel, std::size_t m) {
    std::size_t outer = 1, inner = 1;
    for (std::size_t a = 0; a < k; ++a) outer *= shape[a];
    for (std::size_t a = k + 1; a < shape.size(); ++a) inner *= shape[a];
    const std::size_t n = shape[k];
    std::vector<Complex> out(outer * m * inner);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t j = 0; j < m; ++j) {
            Complex* dst = &out[(o * m + j) * inner];
            for (std::size_t i = 0; i < n; ++i) {
                const Complex kji = kernel[j * n + i];
                if (kji == Complex{}) continue;
                const Complex* src = &in[(o * n + i) * inner];
                for (std::size_t q = 0; q < inner; ++q) dst[q] += kji * src[q];
            }
        }
    return out;
}

double face_max(const GridFunction& f) {
    const auto& axes = f.axes();
    const auto& v = f.values();
    double m = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t rem = i;
        bool face = false;
        for (std::size_t k = axes.size(); k-- > 0;) {
            const std::size_t idx = rem % axes[k].n;
            rem /= axes[k].n;
            face = face || idx == 0 || idx + 1 == axes[k].n;
        }
        if (face) m = std::max(m, std::abs(v[i]));
    }
    return m;
}

GridFunction separable_transform(const GridFunction& f, const std::vector<UniformAxis>& out_axes, double sign,
                                 double scale) {
    if (out_axes.size() != f.axes().size()) throw ArgumentError("transform: output grid has the wrong dimension");
    std::vector<Complex> data = f.values();
    std::vector<std::size_t> shape;
    for (const auto& a : f.axes()) shape.push_back(a.n);
    for (std::size_t k = 0; k < shape.size(); ++k) {
        const UniformAxis& src = f.axes()[k];
        const UniformAxis& dst = out_axes[k];
        const auto w = trapezoid_weights(src.n, src.step());
        std::vector<Complex> kernel(dst.n * src.n);
        for (std::size_t j = 0; j < dst.n; ++j)
            for (std::size_t i = 0; i < src.n; ++i)
                kernel[j * src.n + i] = w[i] * std::polar(1.0, sign * src[i] * dst[j]) * (k == 0 ? scale : 1.0);
        data = apply_axis(data, shape, k, kernel, dst.n);
        shape[k] = dst.n;
    }
    return GridFunction(out_axes, std::move(data));
}

} // namespace

GridFunction fourier_forward(const GridFunction& f, const std::vector<UniformAxis>& freq_axes) {
    const double sup = f.sup_norm();
    if (face_max(f) > kSupportTolerance * sup)
        throw SupportError("fourier_forward: function does not vanish on the boundary of its box");
    return separable_transform(f, freq_axes, -1.0, 1.0);
}

GridFunction fourier_inverse(const GridFunction& F, const std::vector<UniformAxis>& space_axes) {
    const double sup = F.sup_norm();
    if (face_max(F) > kSupportTolerance * sup)
        throw SupportError("fourier_inverse: transform has not decayed at the edge of its frequency box");
    const double scale = std::pow(2.0 * kPi, -double(F.dim()));
    return separable_transform(F, space_axes, 1.0, scale);
}

EvenProfile radon_radial(const RadialProfile& f) {
    const int d = f.dim();
    const UniformAxis& ax = f.radii();
    const std::size_t m = ax.n - 1;
    const double R = ax.hi, S = f.support(), h = ax.step();
    std::vector<Complex> half(m + 1);
    if (d == 1) {
        for (std::size_t i = 0; i <= m; ++i) half[i] = ax[i] < S ? f.values()[i] : Complex{};
        return EvenProfile::from_half(R, std::move(half));
    }
    const auto interp = f.interpolant();
    const double area = sphere_area(d - 1);
    parallel_for(m + 1, [&](std::size_t i) {
        const double s = ax[i];
        if (s >= S) return;
        const double umax = std::sqrt(S * S - s * s);
        const auto rule = composite_gauss(0.0, umax, panels_for(0.0, umax, 2.0 * h), 16);
        Complex acc{};
        for (std::size_t q = 0; q < rule.size(); ++q) {
            const double u = rule.nodes[q];
            acc += rule.weights[q] * std::pow(u, d - 2) * interp(std::sqrt(s * s + u * u));
        }
        half[i] = area * acc;
    });
    return EvenProfile::from_half(R, std::move(half));
}

std::vector<Complex> radial_fourier(const RadialProfile& f, std::span<const double> lambdas) {
    const int d = f.dim();
    const double S = f.support(), h = f.radii().step();
    double lmax = 0.0;
    for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
    const double width = std::min(2.0 * h, 2.0 / std::max(lmax, 1e-300));
    const auto rule = composite_gauss(0.0, S, panels_for(0.0, S, width), 16);
    const auto interp = f.interpolant();
    std::vector<Complex> fr(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        fr[q] = rule.weights[q] * interp(rule.nodes[q]) * std::pow(rule.nodes[q], d - 1);
    const double area = sphere_area(d);
    std::vector<Complex> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t j) {
        Complex acc{};
        for (std::size_t q = 0; q < rule.size(); ++q) acc += fr[q] * radial_kernel(d, lambdas[j] * rule.nodes[q]);
        out[j] = area * acc;
    });
    return out;
}

std::vector<Complex> even_fourier(const EvenProfile& g, std::span<const double> lambdas) {
    const double R = g.half_width(), h = g.step();
    double lmax = 0.0;
    for (double l : lambdas) lmax = std::max(lmax, std::abs(l));
    const double width = std::min(2.0 * h, 2.0 / std::max(lmax, 1e-300));
    const auto rule = composite_gauss(0.0, R, panels_for(0.0, R, width), 16);
    const auto interp = g.interpolant();
    std::vector<Complex> gv(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q) gv[q] = 2.0 * rule.weights[q] * interp(rule.nodes[q]);
    std::vector<Complex> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t j) {
        Complex acc{};
        for (std::size_t q = 0; q < rule.size(); ++q) acc += gv[q] * std::cos(lambdas[j] * rule.nodes[q]);
        out[j] = acc;
    });
    return out;
}

std::vector<Complex> radial_inverse_fourier(int d, const std::function<Complex(double)>& G, double bandwidth,
                                            const UniformAxis& radii) {
    if (d < 1) throw ArgumentError("radial_inverse_fourier: dimension must be positive");
    if (!(bandwidth > 0.0)) throw ArgumentError("radial_inverse_fourier: bandwidth must be positive");
    const double R = std::max(std::abs(radii.lo), std::abs(radii.hi));
    const double width = std::min(bandwidth / 8.0, 2.0 / std::max(R, 1e-300));
    const auto rule = composite_gauss(0.0, bandwidth, panels_for(0.0, bandwidth, width), 16);
    std::vector<Complex> weighted(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        weighted[q] = rule.weights[q] * G(rule.nodes[q]) * std::pow(rule.nodes[q], d - 1);
    const double prefactor = sphere_area(d) / std::pow(2.0 * kPi, d);
    std::vector<Complex> out(radii.n);
    parallel_for(radii.n, [&](std::size_t i) {
        const double r = radii[i];
        Complex acc{};
        for (std::size_t q = 0; q < rule.size(); ++q) acc += weighted[q] * radial_kernel(d, rule.nodes[q] * r);
        out[i] = prefactor * acc;
    });
    return out;
}

namespace {

// Smallest power-of-two multiple of lambda0 past which |G| lambda^{d-1} stays below tol * max.
double auto_bandwidth(const EvenProfile& g, int d, double tol) {
    const double nyquist = kPi / g.step();
    double L = std::min(16.0, nyquist);
    while (true) {
        std::vector<double> probe;
        const std::size_t n = 256;
        for (std::size_t i = 0; i <= n; ++i) probe.push_back(L * double(i) / double(n));
        const auto G = even_fourier(g, probe);
        double peak = 0.0, tail = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            const double v = std::abs(G[i]) * std::pow(std::max(probe[i], 1.0), d - 1);
            peak = std::max(peak, v);
            if (i >= n / 2) tail = std::max(tail, v);
        }
        if (peak == 0.0 || tail <= tol * peak || L >= nyquist) return L;
        L = std::min(2.0 * L, nyquist);
    }
}

} // namespace

RadonInverseResult radon_inverse_radial_report(const EvenProfile& g, int d, double l, const RadonInverseOptions& opts) {
    if (d < 1) throw ArgumentError("radon_inverse_radial: dimension must be positive");
    if (!(l > 0.0)) throw ArgumentError("radon_inverse_radial: support radius must be positive");
    const double R = g.half_width(), h = g.step();
    const std::size_t m = g.half_count() - 1;
    const UniformAxis radii{0.0, R, m + 1};
    const double gsup = g.sup_norm();
    for (std::size_t i = 0; i <= m; ++i)
        if (radii[i] > l + 1e-12 * l && std::abs(g.half()[i]) > kSupportTolerance * gsup)
            throw SupportError("radon_inverse_radial: profile is not supported in [-l, l]");
    const double support = std::min(l, R);

    if (d == 1) {
        RadialProfile f(1, radii, g.half(), support);
        return {f, 0.0, 0.0};
    }
    if (gsup == 0.0) return {RadialProfile(d, radii, std::vector<Complex>(m + 1), support), 0.0, 0.0};

    const double Lam = opts.bandwidth > 0.0 ? opts.bandwidth : auto_bandwidth(g, d, opts.tail_tol);
    const double width = std::min(Lam / 8.0, 4.0 / (R + support));
    const auto rule = composite_gauss(0.0, Lam, panels_for(0.0, Lam, width), 16);
    const auto G = even_fourier(g, rule.nodes);
    std::vector<Complex> weighted(rule.size());
    for (std::size_t q = 0; q < rule.size(); ++q)
        weighted[q] = rule.weights[q] * G[q] * std::pow(rule.nodes[q], d - 1);
    const double prefactor = sphere_area(d) / std::pow(2.0 * kPi, d);
    std::vector<Complex> values(m + 1);
    parallel_for(m + 1, [&](std::size_t i) {
        const double r = radii[i];
        Complex acc{};
        for (std::size_t q = 0; q < rule.size(); ++q) acc += weighted[q] * radial_kernel(d, rule.nodes[q] * r);
        values[i] = prefactor * acc;
    });

    double sup = 0.0, leak = 0.0;
    for (const auto& v : values) sup = std::max(sup, std::abs(v));
    for (std::size_t i = 0; i <= m; ++i)
        if (radii[i] > support + h * (1.0 + 1e-9)) leak = std::max(leak, std::abs(values[i]));
    leak = sup > 0.0 ? leak / sup : 0.0;
    if (leak > opts.support_tol)
        throw CertificationError("support", "reconstruction leaks past the support radius", leak);
    // zero the exterior so the returned profile honours its declared support
    for (std::size_t i = 0; i <= m; ++i)
        if (radii[i] > support) values[i] = Complex{};
    return {RadialProfile(d, radii, std::move(values), support), Lam, leak};
}

RadialProfile radon_inverse_radial(const EvenProfile& g, int d, double l, const RadonInverseOptions& opts) {
    return radon_inverse_radial_report(g, d, l, opts).profile;
}

double slice_projection_check(const RadialProfile& f, std::span<const double> lambdas) {
    std::vector<double> own;
    if (lambdas.empty()) {
        for (int i = 0; i <= 200; ++i) own.push_back(40.0 * i / 200.0);
        lambdas = own;
    }
    const auto lhs = radial_fourier(f, lambdas);
    const auto rhs = even_fourier(radon_radial(f), lambdas);
    double m = 0.0;
    for (std::size_t i = 0; i < lhs.size(); ++i) m = std::max(m, std::abs(lhs[i] - rhs[i]));
    return m;
}

void SpanSpec::validate() const {
    if (nodes.empty()) throw ArgumentError("span: empty node list");
    if (!(L > 0.0)) throw ArgumentError("span: L must be positive");
    const std::size_t d = nodes.front().size();
    if (d == 0) throw ArgumentError("span: nodes need at least one coordinate");
    const double edge = L / std::sqrt(double(d));
    for (const auto& v : nodes) {
        if (v.size() != d) throw ArgumentError("span: nodes have inconsistent dimension");
        for (double c : v)
            if (!(std::abs(c) < edge)) throw ArgumentError("span: node outside the open cube of half-side L/sqrt(d)");
    }
}

namespace {

std::vector<Complex> design_matrix(const GridFunction& like, const SpanSpec& span) {
    const std::size_t rows = like.size(), cols = span.nodes.size();
    std::vector<Complex> A(rows * cols);
    std::vector<double> x(std::size_t(like.dim()));
    for (std::size_t i = 0; i < rows; ++i) {
        like.point(i, x);
        for (std::size_t j = 0; j < cols; ++j) {
            double phase = 0.0;
            for (std::size_t k = 0; k < x.size(); ++k) phase += span.nodes[j][k] * x[k];
            A[i * cols + j] = std::polar(1.0, phase);
        }
    }
    return A;
}

} // namespace

GridFunction span_evaluate(const GridFunction& like, const SpanSpec& span, const std::vector<Complex>& coeffs) {
    span.validate();
    if (span.dim() != like.dim()) throw ArgumentError("span: dimension differs from the grid");
    const auto A = design_matrix(like, span);
    const std::size_t cols = span.nodes.size();
    std::vector<Complex> v(like.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) v[i] += A[i * cols + j] * coeffs[j];
    return GridFunction(like.axes(), std::move(v));
}

SpanProjection span_project(const GridFunction& target, const SpanSpec& span, const WeightFunction& psi,
                            const SpanOptions& opts) {
    span.validate();
    if (span.dim() != target.dim()) throw ArgumentError("span_project: node dimension differs from the grid");
    const auto A = design_matrix(target, span);
    const auto r = target.radii();
    std::vector<double> w(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) w[i] = std::exp(-psi(r[i]));
    const auto fit = lawson_fit(target.size(), span.nodes.size(), A, target.values(), w, opts.lawson_iterations,
                                opts.warm_start);
    SpanProjection out;
    out.coeffs = fit.coeffs;
    out.regularized = fit.regularized;
    out.rank = fit.rank;
    out.iterations = fit.iterations;
    const auto approx = span_evaluate(target, span, fit.coeffs);
    std::vector<Complex> resid(target.size());
    for (std::size_t i = 0; i < resid.size(); ++i) resid[i] = target.values()[i] - approx.values()[i];
    out.residual = psi_norm(std::span<const Complex>(resid), std::span<const double>(r), psi);
    return out;
}

} // namespace levlab::euclid
