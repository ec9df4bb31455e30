#include "levlab/dichotomy.hpp"
#include "levlab/euclid.hpp"
#include "oracles.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <doctest.h>

#include <cmath>

using namespace levlab;
using namespace levlab::dichotomy;
namespace hy = levlab::hyperbolic;

namespace {

const HyperbolicModel H3(3);

// phi_lambda(t) on H^3 from its closed form
double phi3(double l, double t) {
    if (t == 0.0) return 1.0;
    if (l == 0.0) return t / std::sinh(t);
    return std::sin(l * t) / (l * std::sinh(t));
}

double psi_residual(const SpectralFunction& target, const PhiSpan& s, const WeightFunction& psi) {
    double m = 0.0;
    for (std::size_t i = 0; i < target.lambdas.n; ++i) {
        const double l = target.lambdas[i];
        Complex u{};
        for (std::size_t j = 0; j < s.size(); ++j) u += s.coeffs[j] * phi3(l, s.points[j]);
        m = std::max(m, std::abs(target.values[i] - u) * std::exp(-psi(l)));
    }
    return m;
}

// conj of the transform of a bump supported in [0, 0.5], normalized to sup 1
SpectralFunction small_bump_target(double bandwidth = 40.0) {
    const auto f = BiinvariantFunction::sample(H3, 0.5, 201, [](double t) { return Complex{oracle::bump(t, 0.5)}; }, 0.5);
    hy::SpectralOptions o;
    o.bandwidth = bandwidth;
    o.spacing = 0.1;
    auto F = hy::sft_forward(f, o);
    double s = 0.0;
    for (const auto& v : F.values) s = std::max(s, std::abs(v));
    for (auto& v : F.values) v = std::conj(v) / s;
    return F;
}

BiinvariantFunction shell_bump() {
    // vanishes on B(o, 1)
    return BiinvariantFunction::sample(H3, 2.0, 801, [](double t) { return Complex{oracle::bump_on(t, 1.0, 1.5)}; });
}

bool strictly_decreasing(const std::vector<double>& v) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (!(v[i] < v[i - 1])) return false;
    return true;
}

} // namespace

TEST_CASE("phi span construction") {
    const auto s = PhiSpan::uniform(H3, 2.0, 4);
    REQUIRE(s.size() == 4);
    CHECK(s.points[1] == doctest::Approx(0.5));
    const auto r = s.refined();
    REQUIRE(r.size() == 8);
    for (std::size_t j = 0; j < 4; ++j) CHECK(r.points[j] == s.points[j]);
    for (double t : r.points) CHECK(t < 2.0);
    CHECK_NOTHROW(r.validate());
    CHECK_THROWS_AS(PhiSpan::uniform(H3, 1.0, 0), ArgumentError);
    PhiSpan bad{H3, 1.0, {0.2, 1.0}, {}};
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
}

TEST_CASE("span member is reproduced exactly") {
    const auto span = PhiSpan::uniform(H3, 1.0, 8);
    const double t0 = span.points[3];
    const UniformAxis ax{0.0, 20.0, 201};
    std::vector<Complex> v(ax.n);
    for (std::size_t i = 0; i < ax.n; ++i) v[i] = phi3(ax[i], t0);
    const auto target = SpectralFunction::make(H3, ax, v);
    const auto psi = WeightFunction::parse("lin-log:1");
    const auto r = phi_span_project(target, span, psi);
    CHECK(r.residual < 1e-12);
    CHECK(r.pipeline == Pipeline::LeastSquares);
    CHECK(r.nodes == 8);
    CHECK(psi_residual(target, r.span, psi) < 1e-12);
}

TEST_CASE("least squares residual falls under refinement for a divergent weight") {
    const auto psi = WeightFunction::parse("lin-log:1");
    SUBCASE("bump transform") {
        const auto target = small_bump_target();
        const auto st = refinement_study(target, PhiSpan::uniform(H3, 1.0, 4), psi, 3);
        CHECK(strictly_decreasing(st));
        // the residual is the true grid psi-norm
        const auto r = phi_span_project(target, PhiSpan::uniform(H3, 1.0, 8), psi);
        CHECK(psi_residual(target, r.span, psi) == doctest::Approx(r.residual).epsilon(1e-8));
    }
    SUBCASE("heat multiplier, L = 2, 8 to 64 points") {
        const auto target = hy::heat_hat(H3, 1.0, UniformAxis{0.0, 20.0, 401});
        const auto st = refinement_study(target, PhiSpan::uniform(H3, 2.0, 8), psi, 3);
        CHECK(strictly_decreasing(st));
        CHECK(st[2] < 1e-2); // 32 points
        CHECK(st[3] < 1e-2);
    }
}

TEST_CASE("refinement never increases the residual") {
    const auto target = hy::heat_hat(H3, 0.5, UniformAxis{0.0, 20.0, 201});
    for (const char* w : {"lin-log:1", "lin-log:2", "sqrt"}) {
        const auto st = refinement_study(target, PhiSpan::uniform(H3, 1.0, 3), WeightFunction::parse(w), 3);
        for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i] <= st[i - 1]);
    }
}

TEST_CASE("witness transform as target under a convergent weight") {
    const auto psi = WeightFunction::parse("lin-log:2");
    const auto w = witness_on_space(psi, 1.0, Space::parse("H3"));
    const UniformAxis ax{0.0, 40.0, 801};
    std::vector<Complex> v(ax.n);
    for (std::size_t i = 0; i < ax.n; ++i) v[i] = w.transform(ax[i]);
    const auto st = refinement_study(SpectralFunction::make(H3, ax, v), PhiSpan::uniform(H3, 1.0, 4), psi, 3);
    for (std::size_t i = 1; i < st.size(); ++i) CHECK(st[i] <= st[i - 1]);
    // regression floor after three refinements
    CHECK(st.back() == doctest::Approx(1.607e-8).epsilon(0.5));
}

TEST_CASE("constructive projection follows the density proof") {
    const auto psi = WeightFunction::parse("lin-log:1");
    const auto target = small_bump_target();
    ProjectOptions o;
    o.eps = 0.1;
    o.target_type = 0.5;
    o.target_id = "bump-0.5";
    const auto r = phi_span_project(target, PhiSpan::uniform(H3, 1.0, 1), psi, Pipeline::Constructive, o);
    REQUIRE(r.trace);
    const auto& t = *r.trace;
    CHECK(r.converged);
    CHECK(t.failure.empty());
    CHECK(r.pipeline == Pipeline::Constructive);
    CHECK(r.target_id == "bump-0.5");
    // the four proof parameters
    CHECK(t.nu > 0.0);
    CHECK(t.nu < 1.0);
    CHECK(t.h > 0.0);
    CHECK(!t.cutoff.empty());
    CHECK(t.level >= 1);
    CHECK(t.dilation_error < o.eps);
    CHECK(t.cutoff_error < o.eps);
    CHECK(t.quadrature_error < o.eps);
    CHECK(t.tail_error < o.eps);
    CHECK(t.chained < 4.0 * o.eps);
    CHECK(t.chained == doctest::Approx(t.dilation_error + t.cutoff_error + t.quadrature_error + t.tail_error));
    CHECK(t.empirical >= 0.0);
    CHECK(t.empirical <= t.quadrature_error);
    CHECK(t.inversion_error < o.eps);
    // nodes are radii in [0, L) from the dyadic cover
    CHECK(r.nodes == r.span.size());
    CHECK(r.nodes > 0);
    for (double p : r.span.points) CHECK(p < 1.0);
    CHECK(psi_residual(target, r.span, psi) == doctest::Approx(r.residual).epsilon(1e-6));
    CHECK(r.residual < 4.0 * o.eps);
}

TEST_CASE("constructive projection reports an unconverged run") {
    const auto psi = WeightFunction::parse("lin-log:1");
    ProjectOptions o;
    o.eps = 0.01;
    o.target_type = 0.5;
    o.max_level = 3;
    const auto r = phi_span_project(small_bump_target(), PhiSpan::uniform(H3, 1.0, 1), psi, Pipeline::Constructive, o);
    CHECK_FALSE(r.converged);
    REQUIRE(r.trace);
    CHECK(!r.trace->failure.empty());
    CHECK(r.residual >= 0.0);
    o.target_type = 2.0;
    CHECK_THROWS_AS(phi_span_project(small_bump_target(), PhiSpan::uniform(H3, 1.0, 1), psi, Pipeline::Constructive, o),
                    ArgumentError);
}

TEST_CASE("zero function gives a zero energy bound") {
    const UniformAxis ax{0.0, 20.0, 201};
    const auto zero = SpectralFunction::make(H3, ax, std::vector<Complex>(ax.n));
    const auto f = BiinvariantFunction::sample(H3, 2.0, 101, [](double) { return Complex{}; });
    const auto b = vanishing_energy_bound(zero, PhiSpan::uniform(H3, 1.0, 8), WeightFunction::parse("lin-log:1"), &f);
    CHECK(b.energy == 0.0);
    CHECK(b.residual == 0.0);
    CHECK(b.weighted_mass == 0.0);
    CHECK(b.pairing == 0.0);
    CHECK(b.chain_holds);
}

TEST_CASE("non-integrable weighted mass is a hypothesis violation") {
    const UniformAxis ax{0.0, 800.0, 801};
    const auto one = SpectralFunction::make(H3, ax, std::vector<Complex>(ax.n, Complex{1.0}));
    CHECK_THROWS_AS(vanishing_energy_bound(one, PhiSpan::uniform(H3, 1.0, 4), WeightFunction::power(1.0)),
                    HypothesisViolation);
}

TEST_CASE("step-2 ladder on H3 with psi = r / (1 + log r)") {
    const auto rep = step2_ladder(shell_bump(), 1.0, WeightFunction::parse("lin-log:1"));
    REQUIRE(rep.rungs.size() == 3);
    CHECK(rep.passed);
    std::size_t n = 8;
    for (const auto& r : rep.rungs) {
        CHECK(r.span_size == n);
        CHECK(r.ratio < r.eps);
        CHECK(r.bound.chain_holds);
        CHECK(r.bound.time_domain);
        CHECK(r.bound.energy <= r.bound.residual * r.bound.weighted_mass + r.bound.pairing + r.bound.slack);
        CHECK(r.bound.pairing_time < 1e-12); // f vanishes at every span point
        n *= 2;
    }
    for (std::size_t i = 1; i < rep.rungs.size(); ++i) CHECK(rep.rungs[i].ratio < rep.rungs[i - 1].ratio);
}

TEST_CASE("energy bound for a witness that does not vanish on the ball") {
    const auto psi = WeightFunction::parse("lin-log:2");
    const auto w = witness_on_space(psi, 0.5, Space::parse("H3"));
    REQUIRE(w.biinvariant);
    const UniformAxis ax{0.0, 40.0, 801};
    std::vector<Complex> v(ax.n);
    for (std::size_t i = 0; i < ax.n; ++i) v[i] = w.transform(ax[i]);
    const auto b = vanishing_energy_bound(SpectralFunction::make(H3, ax, v), PhiSpan::uniform(H3, 1.0, 16), psi,
                                          &*w.biinvariant);
    CHECK(std::isfinite(b.weighted_mass));
    CHECK(b.energy > 0.0);
    CHECK(b.pairing > 0.0);
    CHECK(b.chain_holds);
}

TEST_CASE("sinc products") {
    const auto psi = WeightFunction::power(0.5);
    const auto p = SincProduct::for_weight(psi, 1.0);
    CHECK(p.type() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.scale >= 1.0);
    CHECK(p.blocks.back().width >= 1e-12);
    for (double xi : {0.0, 0.3, 1.0, 2.5, 17.0, 123.4, 999.0}) {
        double naive = 1.0;
        for (const auto& b : p.blocks) {
            const double x = b.width * xi;
            naive *= std::pow(x == 0.0 ? 1.0 : std::sin(x) / x, double(b.count));
        }
        CHECK(p(xi) == doctest::Approx(naive).epsilon(1e-9).scale(1e-300));
    }
    // the construction bound holds far past the certified range
    for (double xi = 1.0; xi < 1e7; xi *= 1.37) CHECK(p.log_abs(xi) + psi(xi) <= std::log(p.bound) + 1e-9);
    CHECK_THROWS_AS(SincProduct::for_weight(psi, 0.0), ArgumentError);
}

TEST_CASE("line witness for sqrt weight, L = 2") {
    const auto psi = WeightFunction::parse("sqrt");
    const auto w = ingham_witness(psi, 2.0);
    CHECK(w.decay.passed);
    CHECK(w.decay.xi_lo == 1.0);
    CHECK(w.decay.xi_hi == 1e4);
    CHECK(w.decay.sampled_max <= w.decay.constant);
    CHECK(w.decay.fitted_at_one > 0.0);
    CHECK(w.support.relative < 1e-8);
    CHECK(w.mass.passed);
    CHECK(w.mass.last_change < 1e-6);
    CHECK(w.nontrivial.passed);
    CHECK(w.decay_factor.type() + w.smooth_factor.type() == doctest::Approx(2.0));
    REQUIRE(w.line);
    // integral of the witness is its transform at 0
    const auto& g = w.line->half();
    const double h = w.line->step();
    double integral = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) integral += (i == 0 ? 1.0 : 2.0) * (i + 1 == g.size() ? 0.5 : 1.0) * h * g[i].real();
    CHECK(integral == doctest::Approx(w.transform(0.0)).epsilon(1e-6));
    // inverse cosine transform from an independent fixed-order rule on unit panels
    const double xs[] = {0.0, 0.7, 1.5, 1.9};
    double ref[4] = {};
    for (int j = 0; j < 4; ++j) {
        double s = 0.0;
        for (int k = 0; k < 400; ++k)
            s += boost::math::quadrature::gauss<double, 30>::integrate(
                [&](double xi) { return w.transform(xi) * std::cos(xi * xs[j]); }, double(k), k + 1.0);
        ref[j] = s / kPi;
        CHECK(std::abs(w.line->interpolant()(xs[j]).real() - ref[j]) < 1e-7 * std::abs(ref[j]) + 1e-12);
    }
}

TEST_CASE("witness gate and truncation stability") {
    CHECK_THROWS_AS(ingham_witness(WeightFunction::power(1.0), 2.0), PreconditionError);
    CHECK_THROWS_AS(ingham_witness(WeightFunction::parse("lin-log:1"), 2.0), PreconditionError);
    const auto psi = WeightFunction::parse("lin-log:2");
    WitnessOptions o;
    o.xi_hi = 1e3;
    const auto a = ingham_witness(psi, 2.0, o);
    o.extra_blocks = 8;
    const auto b = ingham_witness(psi, 2.0, o);
    CHECK(b.decay_factor.blocks.size() >= a.decay_factor.blocks.size());
    CHECK(std::abs(a.decay.sampled_max - b.decay.sampled_max) < 1e-6 * a.decay.sampled_max);
    for (double xi = 1.0; xi <= 1e3; xi *= 1.7)
        CHECK(std::abs(a.transform(xi) - b.transform(xi)) <= 1e-6 * std::exp(-psi(xi)) * a.decay.constant);
}

TEST_CASE("witnesses on R, R3 and H3") {
    for (const char* name : {"lin-log:2", "sqrt"}) {
        CAPTURE(name);
        const auto psi = WeightFunction::parse(name);
        SUBCASE("real line") {
            const auto w = witness_on_space(psi, 1.0, Space::parse("R"));
            CHECK(w.space.domain == Domain::RealLine);
            CHECK(w.decay.passed);
            CHECK(w.support.relative < 1e-8);
            CHECK(w.mass.passed);
            CHECK(w.nontrivial.passed);
        }
        SUBCASE("radial R3") {
            const auto w = witness_on_space(psi, 1.0, Space::parse("R3"));
            REQUIRE(w.radial);
            CHECK(w.decay.passed);
            CHECK(w.support.relative < 1e-8);
            CHECK(w.mass.passed);
            CHECK(w.nontrivial.passed);
            CHECK(w.slice_check >= 0.0);
            CHECK(w.slice_check < 1e-5);
            // radial Fourier transform of the profile recovers the line transform
            const auto hi = w.radial->interpolant();
            for (double l : {0.0, 1.0, 3.0, 7.0}) {
                const double ref = 4.0 * kPi * oracle::integrate([&](double r) {
                    const double s = l == 0.0 ? 1.0 : std::sin(l * r) / (l * r);
                    return hi(r).real() * r * r * s;
                }, 0.0, 1.0, 1e-13);
                CHECK(ref == doctest::Approx(w.transform(l)).epsilon(1e-6).scale(1e-8));
            }
        }
        SUBCASE("hyperbolic H3") {
            const auto w = witness_on_space(psi, 1.0, Space::parse("H3"));
            REQUIRE(w.biinvariant);
            CHECK(w.target_radius == 2.0);
            CHECK(w.decay.passed);
            CHECK(w.support.relative < 1e-8);
            CHECK(w.mass.passed);
            CHECK(w.mass.partial.size() >= 3);
            CHECK(w.nontrivial.passed);
            // spherical transform through the closed-form spherical function
            const auto fi = w.biinvariant->interpolant();
            for (double l : {0.0, 0.5, 2.0, 6.0}) {
                const double ref = oracle::integrate([&](double t) {
                    return fi(t).real() * phi3(l, t) * 4.0 * kPi * std::sinh(t) * std::sinh(t);
                }, 0.0, 2.0, 1e-13);
                CHECK(ref == doctest::Approx(w.transform(l)).epsilon(1e-6).scale(1e-8));
            }
        }
    }
}

TEST_CASE("witness and ladder are deterministic") {
    const auto psi = WeightFunction::parse("sqrt");
    const auto a = witness_on_space(psi, 1.0, Space::parse("H3"));
    const auto b = witness_on_space(psi, 1.0, Space::parse("H3"));
    CHECK(a.biinvariant->values() == b.biinvariant->values());
    CHECK(a.decay.sampled_max == b.decay.sampled_max);
    CHECK(a.mass.partial == b.mass.partial);
    LadderOptions o;
    o.eps = {1e-1};
    const auto r1 = step2_ladder(shell_bump(), 1.0, WeightFunction::parse("lin-log:1"), o);
    const auto r2 = step2_ladder(shell_bump(), 1.0, WeightFunction::parse("lin-log:1"), o);
    CHECK(r1.rungs[0].ratio == r2.rungs[0].ratio);
    CHECK(r1.rungs[0].bound.projection.span.coeffs == r2.rungs[0].bound.projection.span.coeffs);
}

TEST_CASE("estimate verdicts") {
    const UniformAxis ax{0.0, 64.0, 1281};
    const auto lin = WeightFunction::parse("lin-log:1");
    SUBCASE("heat multiplier is finite") {
        const auto r = verify_estimate(hy::heat_hat(H3, 1.0, ax), lin);
        CHECK(r.verdict == EstimateVerdict::Finite);
        CHECK(r.partial.size() == 6);
        CHECK(r.bandwidths.back() == 64.0);
        CHECK(r.sup_weighted > 0.0);
    }
    SUBCASE("transform equal to e^-psi grows like the density") {
        std::vector<Complex> v(ax.n);
        for (std::size_t i = 0; i < ax.n; ++i) v[i] = std::exp(-lin(ax[i]));
        const auto F = SpectralFunction::make(H3, ax, v);
        const auto r = verify_estimate(F, lin);
        CHECK(r.verdict == EstimateVerdict::InfiniteTrend);
        CHECK(r.sup_weighted == doctest::Approx(1.0));
        // p = 2 never exceeds p = 1 when |f^| <= 1
        const auto r2 = verify_estimate(F, lin, 2.0);
        for (std::size_t k = 0; k < r.partial.size(); ++k) CHECK(r2.partial[k] <= r.partial[k]);
    }
    SUBCASE("zero") {
        const auto r = verify_estimate(SpectralFunction::make(H3, ax, std::vector<Complex>(ax.n)), lin);
        CHECK(r.verdict == EstimateVerdict::Finite);
    }
    CHECK_THROWS_AS(verify_estimate(hy::heat_hat(H3, 1.0, ax), lin, 0.5), ArgumentError);
}

TEST_CASE("even part and nontriviality guard") {
    const std::vector<Complex> full{1.0, 2.0, 5.0, 4.0, 3.0};
    const auto e = even_part(full);
    CHECK(e[0] == Complex{2.0});
    CHECK(e[1] == Complex{3.0});
    CHECK(e[2] == Complex{5.0});
    CHECK(e[4] == e[0]);
    CHECK_THROWS_AS(even_part(std::vector<Complex>{1.0, 2.0}), ArgumentError);
    CHECK_THROWS_AS(certify_nontrivial(std::vector<Complex>(10), 1.0), CertificationError);
    CHECK(certify_nontrivial(std::vector<Complex>{0.0, 1e-3}, 1.0).passed);
}

TEST_CASE("space names") {
    CHECK(Space::parse("R").domain == Domain::RealLine);
    CHECK(Space::parse("R1").domain == Domain::RealLine);
    const auto r3 = Space::parse("R3");
    CHECK(r3.domain == Domain::EuclideanRadial);
    CHECK(r3.dim == 3);
    CHECK(Space::parse("H2").domain == Domain::Hyperbolic);
    CHECK(Space::parse("H3").name() == "H3");
    CHECK_THROWS_AS(Space::parse("H"), ArgumentError);
    CHECK_THROWS_AS(Space::parse("X3"), ArgumentError);
    CHECK_THROWS_AS(Space::parse("R3a"), ArgumentError);
    CHECK_THROWS_AS(Space::parse("H1"), ArgumentError);
}
