#include "levlab/dichotomy.hpp"

#include "levlab/dyadic.hpp"
#include "levlab/euclid.hpp"
#include "levlab/lawson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace levlab::dichotomy {

using hyperbolic::SpectralOptions;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> weights_of(const WeightFunction& psi, std::span<const double> lambdas) {
    std::vector<double> w(lambdas.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-psi(lambdas[i]));
    return w;
}

double weighted_sup(std::span<const Complex> a, std::span<const Complex> b, std::span<const double> w) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]) * w[i]);
    return m;
}

double sup_abs(std::span<const Complex> v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

// log(sin(x)/x) without cancellation near 0
double log_sinc(double x) {
    x = std::abs(x);
    if (x < 1e-3) {
        const double x2 = x * x;
        return -x2 / 6.0 - x2 * x2 / 180.0;
    }
    const double s = std::abs(std::sin(x));
    return s == 0.0 ? -kInf : std::log(s / x);
}

double sinc_sign(double x) {
    x = std::abs(x);
    if (x < 1.0) return 1.0;
    return std::sin(x) < 0.0 ? -1.0 : 1.0;
}

} // namespace

// ---------------------------------------------------------------- spans

PhiSpan PhiSpan::uniform(HyperbolicModel model, double L, std::size_t n) {
    if (!(L > 0.0) || n == 0) throw ArgumentError("phi span: need L > 0 and at least one point");
    PhiSpan s{model, L, {}, {}};
    for (std::size_t j = 0; j < n; ++j) s.points.push_back(L * double(j) / double(n));
    return s;
}

PhiSpan PhiSpan::refined() const {
    PhiSpan out{model, L, points, {}};
    std::vector<double> sorted = points;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        const double next = j + 1 < sorted.size() ? sorted[j + 1] : L;
        out.points.push_back(0.5 * (sorted[j] + next));
    }
    return out;
}

void PhiSpan::validate() const {
    if (!(L > 0.0)) throw ArgumentError("phi span: L must be positive");
    if (points.empty()) throw ArgumentError("phi span: no points");
    for (double t : points)
        if (!(t >= 0.0 && t < L)) throw ArgumentError("phi span: point outside [0, L)");
    if (!coeffs.empty() && coeffs.size() != points.size())
        throw ArgumentError("phi span: coefficient count differs from the point count");
}

std::vector<Complex> span_evaluate(const PhiSpan& span, std::span<const Complex> coeffs,
                                   std::span<const double> lambdas) {
    if (coeffs.size() != span.points.size()) throw ArgumentError("span_evaluate: coefficient count mismatch");
    std::vector<Complex> out(lambdas.size());
    // one row per point, accumulated in point order
    std::vector<std::vector<double>> rows(span.points.size());
    parallel_for(span.points.size(), [&](std::size_t j) {
        if (coeffs[j] != Complex{}) rows[j] = hyperbolic::phi_row(span.model, lambdas, span.points[j]);
    });
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (rows[j].empty()) continue;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += coeffs[j] * rows[j][i];
    }
    return out;
}

std::string to_string(Pipeline p) { return p == Pipeline::Constructive ? "constructive" : "least-squares"; }

// ---------------------------------------------------------------- projection

namespace {

DensityReport finish(const SpectralFunction& target, const WeightFunction& psi, DensityReport r) {
    const auto lambdas = target.lambdas.points();
    const auto w = weights_of(psi, lambdas);
    const auto u = span_evaluate(r.span, r.span.coeffs, lambdas);
    r.residual = weighted_sup(target.values, u, w);
    double csum = 0.0;
    for (const auto& c : r.span.coeffs) csum += std::abs(c);
    r.tail_bound = (sup_abs(target.values) + csum) * std::exp(-psi(target.lambdas.hi));
    r.nodes = r.span.size();
    return r;
}

DensityReport least_squares(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                            const ProjectOptions& opts) {
    const auto lambdas = target.lambdas.points();
    const std::size_t rows = lambdas.size(), cols = span.size();
    std::vector<std::vector<double>> columns(cols);
    parallel_for(cols, [&](std::size_t j) { columns[j] = hyperbolic::phi_row(span.model, lambdas, span.points[j]); });
    std::vector<Complex> A(rows * cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) A[i * cols + j] = columns[j][i];
    const auto fit = lawson_fit(rows, cols, A, target.values, weights_of(psi, lambdas), opts.lawson_iterations,
                                opts.warm_start);
    DensityReport r;
    r.target_id = opts.target_id;
    r.pipeline = Pipeline::LeastSquares;
    r.span = span;
    r.span.coeffs = fit.coeffs;
    r.iterations = fit.iterations;
    r.regularized = fit.regularized;
    r.rank = fit.rank;
    return finish(target, psi, std::move(r));
}

// Smallest tau with psi(tau) > level (psi nondecreasing and unbounded).
double crossing(const WeightFunction& psi, double level) {
    if (psi(0.0) > level) return 0.0;
    double hi = 1.0;
    while (!(psi(hi) > level)) {
        hi *= 2.0;
        if (hi > 1e300) throw ArgumentError("weight never exceeds the requested level");
    }
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (psi(mid) > level ? hi : lo) = mid;
    }
    return hi;
}

DensityReport constructive(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                           const ProjectOptions& opts) {
    const auto& model = span.model;
    const double L = span.L, eps = opts.eps;
    const double type = opts.target_type > 0.0 ? opts.target_type : L;
    if (!(eps > 0.0)) throw ArgumentError("constructive projection: eps must be positive");
    if (type > L * (1.0 + 1e-12)) throw ArgumentError("constructive projection: target type exceeds L");
    const auto lambdas = target.lambdas.points();
    const std::size_t R = lambdas.size();
    const auto w = weights_of(psi, lambdas);

    DensityReport r;
    r.target_id = opts.target_id;
    r.pipeline = Pipeline::Constructive;
    r.span = PhiSpan{model, L, {}, {}};
    ConstructiveTrace tr;
    tr.cutoff = "unit-bump exp(-1/(1-t^2)), normalized to phi^(0) = 1";
    auto stop = [&](std::string why) {
        tr.failure = std::move(why);
        r.converged = false;
        r.trace = tr;
        DensityReport out = r;
        out.residual = weighted_sup(target.values, std::vector<Complex>(R), w);
        out.tail_bound = sup_abs(target.values) * std::exp(-psi(target.lambdas.hi));
        return out;
    };

    // dilation
    const UniformInterpolant interp(target.values, 0.0, target.lambdas.step(), Extension::Even, Extension::Zero);
    std::vector<Complex> f_nu(R);
    for (int k = 1; k <= 40; ++k) {
        tr.nu = 1.0 - std::ldexp(1.0, -k);
        for (std::size_t i = 0; i < R; ++i) f_nu[i] = interp(tr.nu * lambdas[i]);
        tr.dilation_error = weighted_sup(target.values, f_nu, w);
        if (tr.dilation_error < eps) break;
    }
    if (!(tr.dilation_error < eps)) return stop("no dilation reaches eps");

    // cutoff phi^(h lambda)
    const auto cut = BiinvariantFunction::sample(
        model, 1.0, 801, [](double t) { return Complex{t < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0}; }, 1.0);
    const double room = L - tr.nu * type;
    if (!(room > 0.0)) return stop("no room for the cutoff");
    SpectralOptions co;
    co.bandwidth = 0.5 * room * target.lambdas.hi + 1.0;
    co.spacing = 0.02;
    const auto cut_hat = hyperbolic::sft_forward(cut, co);
    const Complex cut_mass = cut_hat.values[0];
    std::vector<Complex> cut_vals(cut_hat.values.size());
    for (std::size_t i = 0; i < cut_vals.size(); ++i) cut_vals[i] = cut_hat.values[i] / cut_mass;
    const UniformInterpolant cut_interp(cut_vals, 0.0, cut_hat.lambdas.step(), Extension::Even, Extension::Zero);
    std::vector<Complex> g1(R);
    tr.h = 0.5 * room;
    for (int k = 0; k < 60; ++k) {
        for (std::size_t i = 0; i < R; ++i) g1[i] = f_nu[i] * cut_interp(tr.h * lambdas[i]);
        tr.cutoff_error = weighted_sup(f_nu, g1, w);
        if (tr.cutoff_error < eps) break;
        tr.h *= 0.5;
    }
    if (!(tr.cutoff_error < eps)) return stop("no cutoff scale reaches eps");

    // the function whose transform is g1, on [0, L]
    const auto G1 = SpectralFunction::make(model, target.lambdas, g1);
    std::optional<BiinvariantFunction> F;
    try {
        F = hyperbolic::sft_inverse(G1, UniformAxis{0.0, L, opts.time_samples}, opts.inverse_tail_tol);
    } catch (const TruncationError& e) {
        return stop(std::string("inverse transform: ") + e.what() + " (tail " + std::to_string(e.tail()) + ")");
    }
    {
        SpectralOptions fo;
        fo.bandwidth = target.lambdas.hi;
        fo.spacing = target.lambdas.step();
        const auto back = hyperbolic::sft_forward(*F, fo);
        tr.inversion_error = back.values.size() == R ? weighted_sup(g1, back.values, w) : kInf;
    }
    const double F_mass = F->volume_mass(), F_sup = F->sup_norm(), g1_sup = sup_abs(g1);
    if (F_sup == 0.0) {
        r.span = PhiSpan{model, L, {0.0}, {Complex{}}};
        tr.chained = tr.dilation_error + tr.cutoff_error;
        r.converged = tr.chained < 4.0 * eps;
        r.trace = tr;
        return finish(target, psi, std::move(r));
    }

    // past tau the weight alone controls g1 - g_N
    tr.tau = crossing(psi, std::log((g1_sup + F_mass) / eps));
    tr.tail_error = (g1_sup + F_mass) * std::exp(-psi(tr.tau));

    const double rho = model.rho();
    const auto Fi = F->interpolant();
    const dyadic::FieldFn field = [&](std::span<const double> x) { return Fi(std::abs(x[0])); };
    const auto mu = dyadic::RadonMeasureRep::density(
        1, [&](std::span<const double> x) { return 0.5 * model.volume_density(std::abs(x[0])); }, "half-volume");
    dyadic::KernelFunction kernel;
    kernel.eval = [&](std::span<const double> x, std::span<const double> lam) {
        return Complex{hyperbolic::phi_lambda(model, lam[0], std::abs(x[0]))};
    };
    kernel.gradient_bound = [rho](double tau, double) { return std::sqrt(tau * tau + rho * rho); };
    kernel.label = "spherical";

    const double eps_d = eps / F_sup;
    int n = std::max(1, dyadic::minimal_level(L, 1, mu, 0.5 * eps_d, opts.max_level));
    std::optional<dyadic::NodeWeights> nw;
    dyadic::ApproxOptions ao;
    ao.probes = opts.probes;
    ao.seed = opts.seed;
    ao.verify = false;
    for (; n <= opts.max_level; ++n) {
        try {
            auto cand = dyadic::approximate(field, L, mu, kernel, n, tr.tau, eps_d, ao);
            if (cand.certified_bound < eps) {
                nw = std::move(cand);
                break;
            }
        } catch (const LevelTooCoarseError&) {
            continue;
        }
    }
    if (!nw) {
        tr.level = opts.max_level;
        return stop("dyadic level cap reached before the certificate fell below eps");
    }
    if (opts.verify) {
        ao.verify = true;
        nw = dyadic::approximate(field, L, mu, kernel, n, tr.tau, eps_d, ao);
    }
    tr.level = n;
    tr.gradient = nw->gradient;
    tr.quadrature_error = nw->certified_bound;
    tr.empirical = nw->empirical_error;
    tr.cubes = nw->size();
    tr.chained = tr.dilation_error + tr.cutoff_error + tr.quadrature_error + tr.tail_error;

    // nodes +-v give the same spherical function
    std::map<double, Complex> merged;
    for (std::size_t k = 0; k < nw->size(); ++k) merged[std::abs(nw->node(k)[0])] += nw->coeffs[k];
    for (const auto& [t, c] : merged) {
        r.span.points.push_back(t);
        r.span.coeffs.push_back(c);
    }
    r.span.validate();
    r.converged = tr.dilation_error < eps && tr.cutoff_error < eps && tr.quadrature_error < eps && tr.tail_error < eps &&
                  tr.inversion_error < eps;
    r.trace = tr;
    return finish(target, psi, std::move(r));
}

} // namespace

DensityReport phi_span_project(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                               Pipeline mode, const ProjectOptions& opts) {
    if (target.values.size() != target.lambdas.n) throw ArgumentError("phi_span_project: malformed target");
    if (!(target.model == span.model)) throw ArgumentError("phi_span_project: target and span live on different spaces");
    for (const auto& v : target.values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw ArgumentError("phi_span_project: target is not bounded");
    if (mode == Pipeline::Constructive) {
        if (!(span.L > 0.0)) throw ArgumentError("phi span: L must be positive");
        return constructive(target, span, psi, opts);
    }
    span.validate();
    return least_squares(target, span, psi, opts);
}

std::vector<double> refinement_study(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                                     int refinements, const ProjectOptions& opts) {
    std::vector<double> out;
    PhiSpan s = span;
    ProjectOptions o = opts;
    for (int k = 0; k <= refinements; ++k) {
        const auto r = phi_span_project(target, s, psi, Pipeline::LeastSquares, o);
        out.push_back(r.residual);
        o.warm_start = r.span.coeffs;
        s = s.refined();
    }
    return out;
}

// ---------------------------------------------------------------- vanishing argument

EnergyBound vanishing_energy_bound(const SpectralFunction& fhat, const PhiSpan& span, const WeightFunction& psi,
                                   const BiinvariantFunction* f, const ProjectOptions& opts) {
    const auto lambdas = fhat.lambdas.points();
    const auto tw = trapezoid_weights(lambdas.size(), fhat.lambdas.step());
    EnergyBound b;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double a = std::abs(fhat.values[i]);
        b.energy += tw[i] * a * a * fhat.density[i];
        if (a > 0.0 && fhat.density[i] > 0.0 && tw[i] > 0.0)
            b.weighted_mass += std::exp(std::log(tw[i] * a * fhat.density[i]) + psi(lambdas[i]));
    }
    if (!std::isfinite(b.weighted_mass))
        throw HypothesisViolation("weighted mass int |f^| e^psi |c|^-2 is not finite on the grid");

    std::vector<Complex> conj_values(fhat.values.size());
    for (std::size_t i = 0; i < conj_values.size(); ++i) conj_values[i] = std::conj(fhat.values[i]);
    const auto target = SpectralFunction::make(fhat.model, fhat.lambdas, conj_values);
    b.projection = phi_span_project(target, span, psi, Pipeline::LeastSquares, opts);
    b.residual = b.projection.residual;

    const auto& ps = b.projection.span;
    const auto u = span_evaluate(ps, ps.coeffs, lambdas);
    Complex pair{};
    for (std::size_t i = 0; i < lambdas.size(); ++i) pair += tw[i] * fhat.values[i] * u[i] * fhat.density[i];
    b.pairing_spectral = std::abs(pair);
    if (f) {
        const auto fi = f->interpolant();
        Complex s{};
        for (std::size_t j = 0; j < ps.size(); ++j) s += ps.coeffs[j] * fi(ps.points[j]);
        b.pairing_time = std::abs(s) / fhat.model.inversion_constant();
        b.time_domain = true;
    }
    b.pairing = b.time_domain ? b.pairing_time : b.pairing_spectral;
    const double rounding = 1e-12 * (b.energy + b.residual * b.weighted_mass + b.pairing_spectral);
    b.slack = std::abs(b.pairing_spectral - b.pairing) + rounding;
    b.chain_holds = b.energy <= b.residual * b.weighted_mass + b.pairing + b.slack;
    if (!b.chain_holds)
        throw CertificationError("step-2 chain", "energy exceeds residual * weighted mass + pairing + slack",
                                 b.energy - (b.residual * b.weighted_mass + b.pairing + b.slack));
    return b;
}

LadderReport step2_ladder(const BiinvariantFunction& f, double L, const WeightFunction& psi, const LadderOptions& opts) {
    if (!(L > 0.0)) throw ArgumentError("step2_ladder: L must be positive");
    LadderReport rep;
    rep.L = L;
    auto transform = [&](double bandwidth) {
        SpectralOptions o;
        o.bandwidth = bandwidth;
        o.spacing = opts.spacing;
        return hyperbolic::sft_forward(f, o);
    };
    rep.scale = sup_abs(transform(opts.bandwidth0).values);
    if (rep.scale == 0.0) rep.scale = 1.0;
    std::vector<Complex> scaled(f.values().size());
    for (std::size_t i = 0; i < scaled.size(); ++i) scaled[i] = f.values()[i] / rep.scale;
    const BiinvariantFunction fs(f.model(), f.radii(), scaled, f.support());

    double bandwidth = opts.bandwidth0;
    std::size_t n = opts.span0;
    rep.passed = true;
    for (double eps : opts.eps) {
        LadderRung rung;
        rung.eps = eps;
        rung.span_size = n;
        std::optional<SpectralFunction> F;
        while (true) {
            auto G = transform(bandwidth);
            for (auto& v : G.values) v /= rep.scale;
            const auto lambdas = G.lambdas.points();
            const auto tw = trapezoid_weights(lambdas.size(), G.lambdas.step());
            double energy = 0.0, mass = 0.0;
            for (std::size_t i = 0; i < lambdas.size(); ++i) {
                const double a = std::abs(G.values[i]);
                energy += tw[i] * a * a * G.density[i];
                mass += tw[i] * a * std::exp(psi(lambdas[i])) * G.density[i];
            }
            rung.ratio = mass > 0.0 ? energy / mass : 0.0;
            F = std::move(G);
            if (rung.ratio < eps || bandwidth >= opts.max_bandwidth) break;
            bandwidth = std::min(2.0 * bandwidth, opts.max_bandwidth);
        }
        rung.bandwidth = bandwidth;
        ProjectOptions po = opts.project;
        po.target_id = "conj-transform";
        try {
            rung.bound = vanishing_energy_bound(*F, PhiSpan::uniform(f.model(), L, n), psi, &fs, po);
        } catch (const CertificationError&) {
            rung.bound.chain_holds = false;
        }
        rung.passed = rung.ratio < eps && rung.bound.chain_holds;
        rep.passed = rep.passed && rung.passed;
        rep.rungs.push_back(std::move(rung));
        n *= 2;
    }
    return rep;
}

// ---------------------------------------------------------------- sinc products

double SincProduct::type() const {
    double s = 0.0;
    for (const auto& b : blocks) s += b.width * double(b.count);
    return s;
}

double SincProduct::log_abs(double xi) const {
    double s = 0.0;
    for (const auto& b : blocks) {
        const double l = log_sinc(b.width * xi);
        if (l == -kInf) return -kInf;
        s += double(b.count) * l;
    }
    return s;
}

double SincProduct::operator()(double xi) const {
    const double l = log_abs(xi);
    if (l == -kInf) return 0.0;
    double sign = 1.0;
    for (const auto& b : blocks)
        if (b.count % 2 == 1) sign *= sinc_sign(b.width * xi);
    return sign * std::exp(l);
}

namespace {

// Cumulative multiplicities N_i for i = first..last.
std::vector<std::uint64_t> cumulative_counts(const WeightFunction& psi, int first, int last, double mult,
                                             std::uint64_t start = 0) {
    std::vector<std::uint64_t> N;
    std::uint64_t prev = start;
    for (int i = first; i <= last; ++i) {
        const double delta = psi(std::ldexp(1.0, i + 2)) - psi(std::ldexp(1.0, i + 1));
        const auto need = std::uint64_t(std::ceil(mult * std::max(delta, 0.0) / std::log(2.0)));
        prev = std::max(prev, need);
        N.push_back(prev);
    }
    return N;
}

} // namespace

SincProduct SincProduct::for_weight(const WeightFunction& psi, double type, double multiplicity, double min_width) {
    if (!(type > 0.0)) throw ArgumentError("sinc product: type must be positive");
    if (!(multiplicity >= 1.0)) throw ArgumentError("sinc product: multiplicity must be at least 1");
    const int last = int(std::floor(-std::log2(min_width)));
    for (int k0 = 0; k0 + 4 <= last; ++k0) {
        const auto N = cumulative_counts(psi, k0, last, multiplicity);
        double budget = 0.0;
        for (int i = k0; i <= last; ++i) {
            const std::uint64_t n = N[std::size_t(i - k0)] - (i > k0 ? N[std::size_t(i - k0 - 1)] : 0);
            budget += double(n) * std::ldexp(1.0, -i);
        }
        if (budget == 0.0 || budget > type) continue;
        SincProduct p;
        p.first = k0;
        p.scale = type / budget;
        for (int i = k0; i <= last; ++i) {
            const std::uint64_t n = N[std::size_t(i - k0)] - (i > k0 ? N[std::size_t(i - k0 - 1)] : 0);
            if (n > 0) p.blocks.push_back({i, p.scale * std::ldexp(1.0, -i), n});
        }
        p.bound = std::exp(multiplicity * psi(std::ldexp(1.0, k0 + 1)));
        return p;
    }
    throw ArgumentError("sinc product: the weight does not fit the type budget");
}

SincProduct SincProduct::extended(int extra, const WeightFunction& psi) const {
    SincProduct p = *this;
    if (extra <= 0 || blocks.empty()) return p;
    std::uint64_t total = 0;
    for (const auto& b : blocks) total += b.count;
    const int last = blocks.back().index;
    // multiplicity is recovered from the construction bound
    const double mult = std::log(bound) / std::max(psi(std::ldexp(1.0, first + 1)), 1e-300);
    const auto N = cumulative_counts(psi, last + 1, last + extra, std::max(1.0, mult), total);
    std::uint64_t prev = total;
    for (int i = last + 1; i <= last + extra; ++i) {
        const std::uint64_t n = N[std::size_t(i - last - 1)] - prev;
        prev = N[std::size_t(i - last - 1)];
        if (n > 0) p.blocks.push_back({i, scale * std::ldexp(1.0, -i), n});
    }
    return p;
}

// ---------------------------------------------------------------- witnesses

std::string to_string(Domain d) {
    switch (d) {
        case Domain::RealLine: return "real-line";
        case Domain::EuclideanRadial: return "euclidean-radial";
        case Domain::Hyperbolic: return "hyperbolic";
    }
    return "?";
}

Space Space::parse(const std::string& name) {
    if (name.empty()) throw ArgumentError("empty space name");
    const char c = name[0];
    if (c != 'R' && c != 'H' && c != 'r' && c != 'h') throw ArgumentError("unknown space '" + name + "'");
    int d = 1;
    if (name.size() > 1) {
        try {
            std::size_t used = 0;
            d = std::stoi(name.substr(1), &used);
            if (used + 1 != name.size()) throw ArgumentError("unknown space '" + name + "'");
        } catch (const std::logic_error&) {
            throw ArgumentError("unknown space '" + name + "'");
        }
    } else if (c == 'H' || c == 'h') {
        throw ArgumentError("hyperbolic space needs a dimension, e.g. H3");
    }
    if (d < 1) throw ArgumentError("unknown space '" + name + "'");
    if (c == 'H' || c == 'h') {
        HyperbolicModel m(d);
        return {Domain::Hyperbolic, m.dim()};
    }
    return {d == 1 ? Domain::RealLine : Domain::EuclideanRadial, d};
}

std::string Space::name() const { return (domain == Domain::Hyperbolic ? "H" : "R") + std::to_string(dim); }

double WitnessFunction::transform(double lambda) const {
    double v = decay_factor(lambda) * smooth_factor(lambda);
    if (bump_factor) v *= (*bump_factor)(lambda);
    return v;
}

std::vector<Complex> even_part(std::span<const Complex> full) {
    if (full.size() % 2 == 0) throw ArgumentError("even_part: need an odd number of symmetric samples");
    std::vector<Complex> out(full.size());
    for (std::size_t i = 0; i < full.size(); ++i) out[i] = 0.5 * (full[i] + full[full.size() - 1 - i]);
    return out;
}

NontrivialityCertificate certify_nontrivial(std::span<const Complex> values, double scale) {
    NontrivialityCertificate c;
    c.sup = sup_abs(values);
    c.scale = scale;
    c.threshold = 1e-6 * scale;
    c.passed = c.sup > c.threshold && c.sup > 0.0;
    if (!c.passed) throw CertificationError("nontriviality", "witness is numerically zero", c.sup);
    return c;
}

namespace {

double log_transform(const WitnessFunction& w, double xi) {
    double l = w.decay_factor.log_abs(xi) + w.smooth_factor.log_abs(xi);
    if (w.bump_factor) l += w.bump_factor->log_abs(xi);
    return l;
}

// log of the spectral measure density: |S^{d-1}| lambda^{d-1} on R^d, |c|^-2 on H^d
double log_measure(const Space& s, double lambda) {
    if (s.domain == Domain::Hyperbolic) {
        const double p = HyperbolicModel(s.dim).plancherel(lambda);
        return p > 0.0 ? std::log(p) : -kInf;
    }
    if (s.dim == 1) return std::log(2.0);
    return lambda > 0.0 ? std::log(sphere_area(s.dim)) + double(s.dim - 1) * std::log(lambda) : -kInf;
}

DecayCertificate certify_decay(const WitnessFunction& w, const WeightFunction& psi, const WitnessOptions& o) {
    DecayCertificate c;
    c.xi_lo = o.xi_lo;
    c.xi_hi = o.xi_hi;
    c.samples = std::size_t(std::floor((o.xi_hi - o.xi_lo) / o.xi_step + 1e-9)) + 1;
    c.constant = w.decay_factor.bound;
    std::vector<double> r(c.samples);
    parallel_for(c.samples, [&](std::size_t k) {
        const double xi = std::min(o.xi_lo + o.xi_step * double(k), o.xi_hi);
        const double l = log_transform(w, xi);
        r[k] = l == -kInf ? 0.0 : std::exp(l + psi(xi));
    });
    for (std::size_t k = 0; k < r.size(); ++k)
        if (r[k] > c.sampled_max) {
            c.sampled_max = r[k];
            c.worst_xi = std::min(o.xi_lo + o.xi_step * double(k), o.xi_hi);
        }
    const double l1 = log_transform(w, 1.0);
    c.fitted_at_one = l1 == -kInf ? 0.0 : std::exp(l1 + psi(1.0));
    c.passed = c.sampled_max <= c.constant * (1.0 + 1e-12);
    return c;
}

MassCertificate certify_mass(const WitnessFunction& w, const WeightFunction& psi, const WitnessOptions& o) {
    MassCertificate m;
    m.tol = o.mass_tol;
    auto piece = [&](double a, double b) {
        const auto rule = composite_gauss(a, b, panels_for(a, b, 0.5), 16);
        std::vector<double> v(rule.size());
        parallel_for(rule.size(), [&](std::size_t q) {
            const double x = rule.nodes[q];
            const double l = log_transform(w, x) + psi(x) + log_measure(w.space, x);
            v[q] = l == -kInf ? 0.0 : rule.weights[q] * std::exp(l);
        });
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    };
    double total = piece(0.0, 64.0), Lam = 64.0;
    m.bandwidths.push_back(Lam);
    m.partial.push_back(total);
    while (Lam < 65536.0) {
        total += piece(Lam, 2.0 * Lam);
        Lam *= 2.0;
        m.bandwidths.push_back(Lam);
        m.partial.push_back(total);
        const double prev = m.partial[m.partial.size() - 2];
        m.last_change = total > 0.0 ? (total - prev) / total : 0.0;
        if (!std::isfinite(total)) break;
        // stable over two consecutive doublings
        if (m.partial.size() >= 3 && m.last_change < m.tol) {
            const double before = m.partial[m.partial.size() - 3];
            if ((prev - before) / total < m.tol) break;
        }
    }
    m.passed = std::isfinite(total) && m.last_change < m.tol && m.partial.size() >= 3;
    return m;
}

// Bandwidth past which the transform times the measure is negligible for the time-domain synthesis.
double synthesis_bandwidth(const WitnessFunction& w) {
    double peak = 0.0;
    for (int i = 0; i <= 256; ++i) {
        const double x = 64.0 * i / 256.0;
        const double l = log_transform(w, x) + log_measure(w.space, std::max(x, 1.0));
        if (l > -kInf) peak = std::max(peak, std::exp(l));
    }
    double Lam = 64.0;
    while (Lam < 65536.0) {
        double tail = 0.0;
        for (int i = 0; i <= 256; ++i) {
            const double x = Lam * (0.5 + 0.5 * i / 256.0);
            const double l = log_transform(w, x) + log_measure(w.space, x);
            if (l > -kInf) tail = std::max(tail, std::exp(l));
        }
        if (tail * Lam <= 1e-15 * peak) break;
        Lam *= 2.0;
    }
    return Lam;
}

SupportCertificate support_of(const UniformAxis& axis, const std::vector<Complex>& v, double radius, double tol,
                              const std::function<double(double)>& measure) {
    SupportCertificate s;
    s.radius = radius;
    s.tol = tol;
    const auto tw = trapezoid_weights(axis.n, axis.step());
    for (std::size_t i = 0; i < axis.n; ++i) {
        const double x = axis[i];
        const double m = tw[i] * std::abs(v[i]) * measure(x);
        s.total += m;
        if (x > radius * (1.0 + 1e-12)) s.outside += m;
    }
    s.relative = s.total > 0.0 ? s.outside / s.total : 0.0;
    s.passed = s.relative < tol;
    return s;
}

void require(bool ok, const std::string& name, const std::string& detail, double value) {
    if (!ok) throw CertificationError(name, detail, value);
}

WitnessFunction build_factors(const WeightFunction& psi, double L, const Space& space, double mult,
                              const WitnessOptions& o) {
    WitnessFunction w;
    w.space = space;
    w.psi = psi.name();
    w.L = L;
    w.multiplicity = mult;
    w.decay_factor = SincProduct::for_weight(psi, 0.5 * L, mult).extended(o.extra_blocks, psi);
    w.smooth_factor = SincProduct::for_weight(WeightFunction::power(0.5), 0.5 * L);
    w.target_radius = L;
    if (space.domain == Domain::Hyperbolic) {
        w.bump_factor = SincProduct::for_weight(WeightFunction::power(0.5), L);
        w.target_radius = 2.0 * L;
    }
    return w;
}

WitnessFunction certified_factors(const WeightFunction& psi, double L, const Space& space, const WitnessOptions& o) {
    const auto verdict = classify_levinson(psi);
    if (verdict.verdict != Verdict::Convergent)
        throw PreconditionError("witness needs a convergent weight; " + psi.name() + " is " +
                                to_string(verdict.verdict));
    if (!(L > 0.0)) throw ArgumentError("witness: L must be positive");
    double mult = 1.0;
    for (int attempt = 0;; ++attempt) {
        auto w = build_factors(psi, L, space, mult, o);
        w.decay = certify_decay(w, psi, o);
        if (w.decay.passed) return w;
        if (attempt >= o.retries)
            throw CertificationError("decay", "|F| e^psi exceeds the construction bound at xi = " +
                                                  std::to_string(w.decay.worst_xi), w.decay.worst_xi);
        mult *= 2.0;
    }
}

} // namespace

WitnessFunction ingham_witness(const WeightFunction& psi, double L, const WitnessOptions& o) {
    auto w = certified_factors(psi, L, Space{Domain::RealLine, 1}, o);
    const double X = 1.5 * L;
    const UniformAxis axis{0.0, X, o.samples};
    const auto g = euclid::radial_inverse_fourier(
        1, [&](double xi) { return Complex{w.transform(xi)}; }, synthesis_bandwidth(w), axis);
    w.support = support_of(axis, g, L, o.support_tol, [](double) { return 1.0; });
    require(w.support.passed, "support", "mass outside [-L, L] above tolerance", w.support.relative);
    w.mass = certify_mass(w, psi, o);
    require(w.mass.passed, "weighted-mass", "weighted mass did not settle under doubling", w.mass.last_change);
    w.nontrivial = certify_nontrivial(g, std::abs(w.transform(0.0)) / (2.0 * L));
    w.line = EvenProfile::from_half(X, g);
    return w;
}

WitnessFunction witness_on_space(const WeightFunction& psi, double L, const Space& space, const WitnessOptions& o) {
    if (space.domain == Domain::RealLine) return ingham_witness(psi, L, o);
    auto w = certified_factors(psi, L, space, o);
    const double R = 1.5 * w.target_radius;
    const UniformAxis axis{0.0, R, o.samples};
    const double Lam = synthesis_bandwidth(w);
    const int d = space.dim;
    if (space.domain == Domain::EuclideanRadial) {
        // the radial inverse of the line witness, through the transform it shares with its hyperplane profile
        const auto h0 = euclid::radial_inverse_fourier(d, [&](double x) { return Complex{w.transform(x)}; }, Lam, axis);
        w.support = support_of(axis, h0, L, o.support_tol, [d](double r) { return std::pow(r, d - 1); });
        require(w.support.passed, "support", "mass outside B(0, L) above tolerance", w.support.relative);
        w.mass = certify_mass(w, psi, o);
        require(w.mass.passed, "weighted-mass", "weighted mass did not settle under doubling", w.mass.last_change);
        const double vol = sphere_area(d) * std::pow(L, d) / d;
        w.nontrivial = certify_nontrivial(h0, std::abs(w.transform(0.0)) / vol);
        w.radial = RadialProfile(d, axis, h0, R);
        w.slice_check = euclid::slice_projection_check(*w.radial);
        return w;
    }
    // H^d: f = h * phi with h^ = F (Abel identity) and phi^ the bump factor
    const HyperbolicModel model(d);
    const double spacing = hyperbolic::spectral_spacing(model, w.target_radius, R);
    const auto lam_axis = UniformAxis{0.0, Lam, std::size_t(std::ceil(Lam / spacing - 1e-9)) + 1};
    std::vector<Complex> fh(lam_axis.n);
    for (std::size_t i = 0; i < fh.size(); ++i) fh[i] = w.transform(lam_axis[i]);
    const auto F = SpectralFunction::make(model, lam_axis, fh);
    auto f = hyperbolic::sft_inverse(F, axis);
    w.support = support_of(axis, f.values(), w.target_radius, o.support_tol,
                           [&](double t) { return model.volume_density(t); });
    require(w.support.passed, "support", "mass outside B(o, 2L) above tolerance", w.support.relative);
    w.mass = certify_mass(w, psi, o);
    require(w.mass.passed, "weighted-mass", "weighted mass did not settle under doubling", w.mass.last_change);
    const auto vol_rule = composite_gauss(0.0, w.target_radius, 64, 16);
    double vol = 0.0;
    for (std::size_t q = 0; q < vol_rule.size(); ++q) vol += vol_rule.weights[q] * model.volume_density(vol_rule.nodes[q]);
    w.nontrivial = certify_nontrivial(f.values(), std::abs(w.transform(0.0)) / vol);
    w.biinvariant = std::move(f);
    return w;
}

// ---------------------------------------------------------------- estimate

std::string to_string(EstimateVerdict v) {
    switch (v) {
        case EstimateVerdict::Finite: return "finite";
        case EstimateVerdict::InfiniteTrend: return "infinite-trend";
        case EstimateVerdict::Undecided: return "undecided";
    }
    return "?";
}

EstimateReport verify_estimate(const SpectralFunction& fhat, const WeightFunction& psi, double p, int rungs) {
    if (!(p >= 1.0)) throw ArgumentError("verify_estimate: p must be at least 1");
    if (rungs < 3) throw ArgumentError("verify_estimate: need at least three rungs");
    EstimateReport r;
    r.p = p;
    const auto lambdas = fhat.lambdas.points();
    const double h = fhat.lambdas.step();
    std::vector<double> integrand(lambdas.size());
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const double a = std::abs(fhat.values[i]);
        const double ps = psi(lambdas[i]);
        if (a > 0.0) {
            const double s = std::exp(std::log(a) + ps);
            if (s > r.sup_weighted) {
                r.sup_weighted = s;
                r.sup_at = lambdas[i];
            }
        }
        integrand[i] = (a > 0.0 && fhat.density[i] > 0.0)
                           ? std::exp(p * std::log(a) + ps + std::log(fhat.density[i]))
                           : 0.0;
    }
    for (int k = 0; k < rungs; ++k) {
        const double Lam = fhat.lambdas.hi * std::ldexp(1.0, k - (rungs - 1));
        const auto m = std::min<std::size_t>(lambdas.size() - 1, std::size_t(std::floor(Lam / h + 1e-9)));
        double s = 0.0;
        for (std::size_t i = 0; i <= m; ++i) s += ((i == 0 || i == m) ? 0.5 : 1.0) * h * integrand[i];
        r.bandwidths.push_back(Lam);
        r.partial.push_back(m == 0 ? 0.0 : s);
    }
    const std::size_t n = r.partial.size();
    const double last = r.partial[n - 1];
    const double d1 = last - r.partial[n - 2], d0 = r.partial[n - 2] - r.partial[n - 3];
    if (!std::isfinite(last)) r.verdict = EstimateVerdict::InfiniteTrend;
    else if (last == 0.0 || d1 <= 1e-6 * last) r.verdict = EstimateVerdict::Finite;
    else if (d1 >= d0 && d1 >= 0.05 * last) r.verdict = EstimateVerdict::InfiniteTrend;
    else r.verdict = EstimateVerdict::Undecided;
    return r;
}

} // namespace levlab::dichotomy
