#include "levlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace levlab::dyadic {

namespace {

// Visit every k in [-K, K-1]^d in lexicographic order.
template <class Fn>
void for_each_cell(int d, std::int64_t K, Fn&& fn) {
    std::vector<std::int64_t> k(static_cast<std::size_t>(d), -K);
    while (true) {
        fn(std::span<const std::int64_t>(k));
        int a = d - 1;
        while (a >= 0) {
            if (++k[std::size_t(a)] < K) break;
            k[std::size_t(a)] = -K;
            --a;
        }
        if (a < 0) return;
    }
}

double far_norm2(std::span<const std::int64_t> k, double side) {
    double s = 0.0;
    for (auto c : k) {
        const double m = std::max(std::abs(double(c)), std::abs(double(c + 1))) * side;
        s += m * m;
    }
    return s;
}

double near_norm2(std::span<const std::int64_t> k, double side) {
    double s = 0.0;
    for (auto c : k) {
        if (c <= 0 && c + 1 > 0) continue;
        const double m = std::min(std::abs(double(c)), std::abs(double(c + 1))) * side;
        s += m * m;
    }
    return s;
}

std::int64_t half_count(double L, int n) { return std::int64_t(std::ceil(L * std::ldexp(1.0, n) - 1e-12)); }

double ball_volume(int d, double L) { return std::pow(kPi, 0.5 * d) * std::pow(L, d) / std::tgamma(0.5 * d + 1.0); }

// Midpoint sub-samples of a cube: calls fn(x, weight).
template <class Fn>
void cube_midpoints(std::span<const std::int64_t> k, double side, int s, Fn&& fn) {
    const int d = int(k.size());
    const double h = side / s;
    const double w = std::pow(h, d);
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    std::vector<double> x(static_cast<std::size_t>(d));
    while (true) {
        for (int a = 0; a < d; ++a) x[std::size_t(a)] = double(k[std::size_t(a)]) * side + (idx[std::size_t(a)] + 0.5) * h;
        fn(std::span<const double>(x), w);
        int a = d - 1;
        while (a >= 0) {
            if (++idx[std::size_t(a)] < s) break;
            idx[std::size_t(a)] = 0;
            --a;
        }
        if (a < 0) return;
    }
}

double norm2(std::span<const double> x) {
    double s = 0.0;
    for (double c : x) s += c * c;
    return s;
}

bool in_cube(std::span<const double> x, std::span<const std::int64_t> k, double side) {
    for (std::size_t a = 0; a < x.size(); ++a) {
        const double lo = double(k[a]) * side;
        if (x[a] < lo || x[a] >= lo + side) return false;
    }
    return true;
}

double halton(std::uint64_t index, unsigned base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * double(index % base);
        index /= base;
    }
    return r;
}

constexpr unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

} // namespace

bool DyadicCover::contains(std::span<const double> x) const {
    const double s = side();
    for (std::size_t i = 0; i < size(); ++i)
        if (in_cube(x, cube(i), s)) return true;
    return false;
}

DyadicCover build_cover(double L, int n, int d) {
    if (!(L > 0.0)) throw ArgumentError("build_cover: L must be positive");
    if (n < 1) throw ArgumentError("build_cover: level must be at least 1");
    if (d < 1) throw ArgumentError("build_cover: dimension must be positive");
    DyadicCover c;
    c.dim = d;
    c.level = n;
    c.radius = L;
    const double side = c.side();
    const double L2 = L * L;
    for_each_cell(d, half_count(L, n), [&](std::span<const std::int64_t> k) {
        if (far_norm2(k, side) < L2) c.cells.insert(c.cells.end(), k.begin(), k.end());
    });
    c.empty = c.cells.empty();
    return c;
}

RadonMeasureRep RadonMeasureRep::lebesgue(int d) {
    if (d < 1) throw ArgumentError("measure: dimension must be positive");
    RadonMeasureRep m;
    m.dim_ = d;
    return m;
}

RadonMeasureRep RadonMeasureRep::density(int d, PointFn rho, std::string label) {
    if (d < 1) throw ArgumentError("measure: dimension must be positive");
    if (!rho) throw ArgumentError("measure: empty density");
    RadonMeasureRep m;
    m.dim_ = d;
    m.unit_ = false;
    m.rho_ = std::move(rho);
    m.label_ = std::move(label);
    return m;
}

RadonMeasureRep RadonMeasureRep::density_grid(const GridFunction& rho) {
    for (const auto& v : rho.values())
        if (v.imag() != 0.0 || v.real() < 0.0) throw RepresentationError("measure: density must be real and nonnegative");
    auto shared = std::make_shared<GridFunction>(rho);
    return density(rho.dim(), [shared](std::span<const double> x) { return shared->interpolate(x).real(); },
                   "grid density");
}

RadonMeasureRep RadonMeasureRep::atoms(std::vector<std::vector<double>> points, std::vector<double> masses) {
    if (points.size() != masses.size()) throw RepresentationError("measure: atom and mass counts differ");
    if (points.empty()) throw RepresentationError("measure: no atoms");
    const std::size_t d = points.front().size();
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (points[i].size() != d || d == 0) throw RepresentationError("measure: atoms have inconsistent dimension");
        if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) throw RepresentationError("measure: masses must be nonnegative");
    }
    RadonMeasureRep m;
    m.kind_ = Kind::Atomic;
    m.dim_ = int(d);
    m.unit_ = false;
    m.points_ = std::move(points);
    m.masses_ = std::move(masses);
    m.label_ = "atoms";
    return m;
}

double RadonMeasureRep::density_at(std::span<const double> x) const {
    if (kind_ == Kind::Atomic) return 0.0;
    if (unit_) return 1.0;
    const double v = rho_(x);
    if (!(v >= 0.0)) throw RepresentationError("measure: density evaluated negative or NaN");
    return v;
}

KernelFunction KernelFunction::exponential() {
    KernelFunction g;
    g.eval = [](std::span<const double> x, std::span<const double> lambda) {
        double phase = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) phase += x[i] * lambda[i];
        return std::polar(1.0, phase);
    };
    g.gradient_bound = [](double tau, double) { return tau; };
    g.label = "exponential";
    return g;
}

std::vector<std::vector<double>> ball_probes(int d, double tau, std::size_t count, std::uint64_t seed) {
    if (d > int(std::size(kPrimes))) throw ArgumentError("ball_probes: dimension too large");
    std::vector<std::vector<double>> out;
    out.push_back(std::vector<double>(std::size_t(d), 0.0));
    for (int a = 0; a < d && out.size() < count; ++a)
        for (double s : {tau, -tau, 0.5 * tau, -0.5 * tau}) {
            std::vector<double> v(static_cast<std::size_t>(d), 0.0);
            v[std::size_t(a)] = s;
            out.push_back(v);
        }
    std::uint64_t index = seed + 1;
    while (out.size() < count) {
        std::vector<double> v(static_cast<std::size_t>(d));
        for (int a = 0; a < d; ++a) v[std::size_t(a)] = tau * (2.0 * halton(index, kPrimes[a]) - 1.0);
        ++index;
        if (norm2(v) <= tau * tau) out.push_back(std::move(v));
    }
    out.resize(count);
    return out;
}

GradientBound gradient_bound(const KernelFunction& g, int d, double tau, double L, std::uint64_t seed) {
    if (g.gradient_bound) return {g.gradient_bound(tau, L), false};
    if (!g.eval || !g.allow_estimate)
        throw KernelContractError("kernel '" + g.label + "' provides no gradient bound");
    const auto lambdas = ball_probes(d, tau, 64, seed);
    const auto xs = ball_probes(d, L, 64, seed + 7);
    const double h = 1e-6 * std::max(L, 1.0);
    double best = 0.0;
    for (const auto& x : xs)
        for (const auto& lam : lambdas) {
            double s = 0.0;
            for (int a = 0; a < d; ++a) {
                auto xp = x, xm = x;
                xp[std::size_t(a)] += h;
                xm[std::size_t(a)] -= h;
                s += std::norm((g.eval(xp, lam) - g.eval(xm, lam)) / (2.0 * h));
            }
            best = std::max(best, std::sqrt(s));
        }
    return {2.0 * best, true};
}

double deficit(const DyadicCover& cover, const RadonMeasureRep& mu, int sub_samples) {
    const int d = cover.dim;
    const double L = cover.radius, side = cover.side();
    if (mu.dim() != d) throw ArgumentError("deficit: measure dimension differs from the cover");
    if (mu.kind() == RadonMeasureRep::Kind::Atomic) {
        double m = 0.0;
        for (std::size_t j = 0; j < mu.atom_points().size(); ++j) {
            const auto& x = mu.atom_points()[j];
            if (norm2(x) < L * L && !cover.contains(x)) m += mu.atom_masses()[j];
        }
        return m;
    }
    if (mu.unit_density()) return std::max(0.0, ball_volume(d, L) - double(cover.size()) * std::pow(side, d));
    double m = 0.0;
    for_each_cell(d, half_count(L, cover.level), [&](std::span<const std::int64_t> k) {
        if (near_norm2(k, side) >= L * L || far_norm2(k, side) < L * L) return;
        cube_midpoints(k, side, sub_samples, [&](std::span<const double> x, double w) {
            if (norm2(x) < L * L) m += w * mu.density_at(x);
        });
    });
    return m;
}

int minimal_level(double L, int d, const RadonMeasureRep& mu, double target, int n_cap) {
    // keep the enumeration below ~2^24 cells
    const int cap = std::min(n_cap, int(std::floor(24.0 / d - std::log2(2.0 * L))));
    auto ok = [&](int n) { return deficit(build_cover(L, n, d), mu) < target; };
    int hi = 1;
    while (hi <= cap && !ok(hi)) hi *= 2;
    if (hi > cap) {
        if (cap >= 1 && ok(cap)) hi = cap;
        else return cap + 1;
    }
    int lo = hi / 2; // known inadequate (or 0)
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        if (ok(mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

std::vector<Complex> evaluate_nodes(const NodeWeights& w, const KernelFunction& g,
                                    const std::vector<std::vector<double>>& lambdas) {
    std::vector<Complex> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        Complex acc{};
        for (std::size_t j = 0; j < w.size(); ++j) acc += w.coeffs[j] * g.eval(w.node(j), lambdas[i]);
        out[i] = acc;
    });
    return out;
}

std::vector<Complex> reference_integral(const FieldFn& f, double L, const RadonMeasureRep& mu,
                                        const KernelFunction& g, int n, int order,
                                        const std::vector<std::vector<double>>& lambdas) {
    const int d = mu.dim();
    std::vector<std::vector<double>> pts;
    std::vector<Complex> wf;
    if (mu.kind() == RadonMeasureRep::Kind::Atomic) {
        for (std::size_t j = 0; j < mu.atom_points().size(); ++j) {
            const auto& x = mu.atom_points()[j];
            if (norm2(x) >= L * L) continue;
            const Complex v = f(x) * mu.atom_masses()[j];
            if (v != Complex{}) {
                pts.push_back(x);
                wf.push_back(v);
            }
        }
    } else {
        // panels are level-min(n, 4) cubes; the order grows with the largest frequency
        const int level = std::min(n, 4);
        const double side = std::ldexp(1.0, -level);
        double top = 0.0;
        for (const auto& l : lambdas) top = std::max(top, std::sqrt(norm2(l)));
        order = std::max(order, int(std::ceil(top * side)) + 4);
        const QuadratureRule& gl = gauss_legendre(std::size_t(order));
        std::vector<double> x(static_cast<std::size_t>(d));
        std::vector<int> idx(static_cast<std::size_t>(d));
        for_each_cell(d, half_count(L, level), [&](std::span<const std::int64_t> k) {
            if (near_norm2(k, side) >= L * L) return;
            std::fill(idx.begin(), idx.end(), 0);
            while (true) {
                double w = 1.0;
                for (int a = 0; a < d; ++a) {
                    const auto i = std::size_t(idx[std::size_t(a)]);
                    x[std::size_t(a)] = (double(k[std::size_t(a)]) + 0.5 + 0.5 * gl.nodes[i]) * side;
                    w *= 0.5 * side * gl.weights[i];
                }
                if (norm2(x) < L * L) {
                    const Complex v = f(x);
                    if (v != Complex{}) {
                        pts.push_back(x);
                        wf.push_back(v * w * mu.density_at(x));
                    }
                }
                int a = d - 1;
                while (a >= 0) {
                    if (++idx[std::size_t(a)] < order) break;
                    idx[std::size_t(a)] = 0;
                    --a;
                }
                if (a < 0) break;
            }
        });
    }
    std::vector<Complex> out(lambdas.size());
    parallel_for(lambdas.size(), [&](std::size_t i) {
        Complex acc{};
        for (std::size_t j = 0; j < pts.size(); ++j) acc += wf[j] * g.eval(pts[j], lambdas[i]);
        out[i] = acc;
    });
    return out;
}

NodeWeights approximate(const FieldFn& f, double L, const RadonMeasureRep& mu, const KernelFunction& g, int n,
                        double tau, double eps, const ApproxOptions& opts) {
    const int d = mu.dim();
    if (!(tau > 0.0) || !(eps > 0.0)) throw ArgumentError("approximate: tau and eps must be positive");
    if (!g.eval) throw KernelContractError("approximate: kernel has no evaluator");
    const auto cover = build_cover(L, n, d);
    const int s = std::max(1, opts.sub_samples);
    const double def = deficit(cover, mu, s);
    if (def >= 0.5 * eps) {
        const int nmin = minimal_level(L, d, mu, 0.5 * eps);
        throw LevelTooCoarseError("approximate: level " + std::to_string(n) + " leaves measure " + std::to_string(def) +
                                      " outside the cover; need level " + std::to_string(nmin),
                                  nmin);
    }
    const auto grad = gradient_bound(g, d, tau, L, opts.seed);

    NodeWeights out;
    out.dim = d;
    out.level = n;
    out.tau = tau;
    out.eps = eps;
    out.deficit = def;
    out.gradient = grad.value;
    out.gradient_estimated = grad.estimated;
    const double side = cover.side();
    const std::size_t count = cover.size();
    out.coeffs.assign(count, Complex{});
    out.nodes.resize(count * std::size_t(d));
    std::vector<double> abs_mass(count, 0.0), sup_part(count, 0.0);

    parallel_for(count, [&](std::size_t i) {
        const auto k = cover.cube(i);
        for (int a = 0; a < d; ++a) out.nodes[i * std::size_t(d) + std::size_t(a)] = double(k[std::size_t(a)]) * side;
        Complex c{};
        double m = 0.0, sup = 0.0;
        if (mu.kind() == RadonMeasureRep::Kind::Atomic) {
            for (std::size_t j = 0; j < mu.atom_points().size(); ++j) {
                const auto& x = mu.atom_points()[j];
                if (!in_cube(x, k, side)) continue;
                const Complex v = f(x);
                c += v * mu.atom_masses()[j];
                m += std::abs(v) * mu.atom_masses()[j];
                sup = std::max(sup, std::abs(v));
            }
        } else {
            cube_midpoints(k, side, s, [&](std::span<const double> x, double w) {
                const Complex v = f(x);
                const double rho = mu.density_at(x);
                c += v * (w * rho);
                m += std::abs(v) * (w * rho);
                sup = std::max(sup, std::abs(v));
            });
        }
        out.coeffs[i] = c;
        abs_mass[i] = m;
        sup_part[i] = sup;
    });

    double mass = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        mass += abs_mass[i];
        sup = std::max(sup, sup_part[i]);
    }
    // the part of the ball outside the cover
    if (mu.kind() == RadonMeasureRep::Kind::Atomic) {
        for (std::size_t j = 0; j < mu.atom_points().size(); ++j) {
            const auto& x = mu.atom_points()[j];
            if (norm2(x) < L * L && !cover.contains(x)) {
                const double v = std::abs(f(x));
                mass += v * mu.atom_masses()[j];
                sup = std::max(sup, v);
            }
        }
    } else {
        for_each_cell(d, half_count(L, n), [&](std::span<const std::int64_t> k) {
            if (near_norm2(k, side) >= L * L || far_norm2(k, side) < L * L) return;
            cube_midpoints(k, side, s, [&](std::span<const double> x, double w) {
                if (norm2(x) >= L * L) return;
                const double v = std::abs(f(x));
                mass += v * w * mu.density_at(x);
                sup = std::max(sup, v);
            });
        });
    }
    // guard against rounding in the per-cube sums so that sum |C_k| <= mass_bound holds exactly
    out.mass_bound = mass * (1.0 + 1e-12);
    out.sup_f = sup;
    out.deficit_term = 0.5 * eps * sup;
    out.resolution_term = grad.value * std::sqrt(double(d)) * side * out.mass_bound;
    out.certified_bound = out.deficit_term + out.resolution_term;

    if (opts.verify) {
        const auto probes = ball_probes(d, tau, opts.probes, opts.seed);
        for (std::size_t j = 0; j < std::min<std::size_t>(count, 32); ++j)
            for (std::size_t p = 0; p < std::min<std::size_t>(probes.size(), 32); ++p)
                if (g.bounded_by_one && std::abs(g.eval(out.node(j * std::max<std::size_t>(1, count / 32)), probes[p])) > 1.0 + 1e-12)
                    throw KernelContractError("approximate: kernel exceeds 1 in modulus");
        const auto h = evaluate_nodes(out, g, probes);
        const auto F = reference_integral(f, L, mu, g, n, opts.oracle_order, probes);
        double err = 0.0;
        for (std::size_t p = 0; p < probes.size(); ++p) err = std::max(err, std::abs(F[p] - h[p]));
        out.empirical_error = err;
        if (err > out.certified_bound)
            throw CertificationError("certified-bound", "probe error exceeds the certified bound", err);
    }
    return out;
}

NodeWeights approximate(const GridFunction& f, double L, const RadonMeasureRep& mu, const KernelFunction& g, int n,
                        double tau, double eps, const ApproxOptions& opts) {
    const auto r = f.radii();
    const double tol = kSupportTolerance * f.sup_norm();
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] >= L && std::abs(f.values()[i]) > tol)
            throw SupportError("approximate: function is not supported in the open ball");
    auto shared = std::make_shared<GridFunction>(f);
    return approximate([shared](std::span<const double> x) { return shared->interpolate(x); }, L, mu, g, n, tau, eps,
                       opts);
}

} // namespace levlab::dyadic
