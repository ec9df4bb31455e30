#include "levlab/grid.hpp"
#include "levlab/weights.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace levlab;

namespace {

WeightFunction as_closure(const WeightFunction& w) {
    return WeightFunction::closure([w](double r) { return w(r); }, w.name());
}

} // namespace

TEST_CASE("builtin verdicts follow the closed-form rules") {
    CHECK(classify_levinson(WeightFunction::lin_log(1)).verdict == Verdict::Divergent);
    CHECK(classify_levinson(WeightFunction::lin_log(2)).verdict == Verdict::Convergent);
    CHECK(classify_levinson(WeightFunction::power(1)).verdict == Verdict::Divergent);
    CHECK(classify_levinson(WeightFunction::power(0.5)).verdict == Verdict::Convergent);
    CHECK(classify_levinson(WeightFunction::log_plus(1)).verdict == Verdict::Convergent);
    for (double a : {0.1, 0.5, 0.9, 0.99, 0.999}) {
        const auto v = classify_levinson(WeightFunction::power(a));
        CHECK(v.verdict == Verdict::Convergent);
        CHECK(v.method == VerdictMethod::ClosedForm);
    }
}

TEST_CASE("numeric route agrees with the closed form on wrapped builtins") {
    const WeightFunction cases[] = {WeightFunction::lin_log(1), WeightFunction::lin_log(2),
                                    WeightFunction::power(1), WeightFunction::power(0.5)};
    for (const auto& w : cases) {
        const auto closed = classify_levinson(w);
        const auto numeric = classify_levinson(as_closure(w));
        CHECK(numeric.method != VerdictMethod::ClosedForm);
        CHECK(numeric.verdict == closed.verdict);
    }
}

TEST_CASE("heavy but summable tails are left undecided") {
    // the raw formula dips on [1, e^0.2) and is rejected; use the monotone chord below the knee
    CHECK_THROWS_AS(WeightFunction::closure([](double r) { return r < 1.0 ? r : r / std::pow(1.0 + std::log(r), 1.2); }),
                    RepresentationError);
    const double knee = std::exp(0.2);
    const double slope = 1.0 / std::pow(1.2, 1.2);
    const auto mono = WeightFunction::closure([=](double r) {
        return r < knee ? r * slope : r / std::pow(1.0 + std::log(r), 1.2);
    });
    CHECK(classify_levinson(mono).verdict == Verdict::Undecided);
}

TEST_CASE("verdicts are scale invariant") {
    for (const auto& base : {WeightFunction::lin_log(1), WeightFunction::lin_log(2), WeightFunction::power(0.5)}) {
        const auto ref = classify_levinson(as_closure(base)).verdict;
        for (double c : {1e-3, 0.5, 7.0, 1e3}) {
            CHECK(classify_levinson(base.scaled(c)).verdict == ref);
            CHECK(classify_levinson(as_closure(base.scaled(c))).verdict == ref);
        }
    }
}

TEST_CASE("partial integral matches the antiderivative") {
    const double R = 1e6;
    CHECK(levinson_partial_integral(WeightFunction::power(1), R) == doctest::Approx(std::log(R)).epsilon(1e-10));
    CHECK(levinson_partial_integral(WeightFunction::power(0.5), R) ==
          doctest::Approx((1.0 - std::pow(R, -0.5)) / 0.5).epsilon(1e-10));
    CHECK(levinson_partial_integral(WeightFunction::lin_log(1), R) ==
          doctest::Approx(std::log(1.0 + std::log(R))).epsilon(1e-10));
    // knee of lin-log:2 sits at e, so the oracle integrates the two pieces separately
    const auto w = WeightFunction::lin_log(2);
    const double ref = oracle::integrate([](double r) { return 0.25 / r; }, 1.0, std::exp(1.0)) +
                       (1.0 / 2.0 - 1.0 / (1.0 + std::log(R)));
    CHECK(levinson_partial_integral(w, R) == doctest::Approx(ref).epsilon(1e-8));
}

TEST_CASE("divergent estimates grow with the horizon") {
    for (const auto& w : {WeightFunction::lin_log(1), WeightFunction::power(1)}) {
        const double a = classify_levinson(w, 0x1p16).numeric_estimate;
        const double b = classify_levinson(w, 0x1p32).numeric_estimate;
        const double c = classify_levinson(w, 0x1p64).numeric_estimate;
        CHECK(a < b);
        CHECK(b < c);
    }
}

TEST_CASE("argument and representation errors") {
    CHECK_THROWS_AS(classify_levinson(WeightFunction::power(1), 1.5), ArgumentError);
    CHECK_THROWS_AS(WeightFunction::table({1, 2, 3}, {1, 3, 2}), RepresentationError);
    CHECK_THROWS_AS(WeightFunction::table({1, 1, 3}, {1, 2, 3}), RepresentationError);
    CHECK_THROWS_AS(WeightFunction::table({1, 2}, {-1, 2}), RepresentationError);
    CHECK_THROWS_AS(WeightFunction::table({1, 2}, {1, 2}, 5.0), RepresentationError);
    CHECK_THROWS_AS(WeightFunction::power(1.5), ArgumentError);
    CHECK_THROWS_AS(WeightFunction::parse("bogus:1"), ArgumentError);
    CHECK_THROWS_AS(WeightFunction::closure([](double r) { return -r; }), RepresentationError);
}

TEST_CASE("tables interpolate, clamp and extend") {
    const auto w = WeightFunction::table({1, 2, 4}, {1, 2, 3});
    CHECK(w(0.0) == 1.0);
    CHECK(w(1.5) == doctest::Approx(1.5));
    CHECK(w(3.0) == doctest::Approx(2.5));
    // log-log continuation of the last segment: exponent log(3/2)/log 2
    CHECK(w(8.0) == doctest::Approx(3.0 * std::pow(2.0, std::log(1.5) / std::log(2.0))));
    double prev = 0.0;
    for (double r = 0.0; r < 20.0; r += 0.01) {
        CHECK(w(r) >= prev);
        prev = w(r);
    }
}

TEST_CASE("tables classify within their data range") {
    std::vector<double> r, sq, lin;
    for (int k = 0; k <= 48; ++k) {
        const double x = std::ldexp(1.0, k);
        r.push_back(x);
        sq.push_back(std::sqrt(x));
        lin.push_back(x);
    }
    const auto a = classify_levinson(WeightFunction::table(r, sq));
    CHECK(a.verdict == Verdict::Convergent);
    CHECK(a.probed_radius == doctest::Approx(0x1p48));
    CHECK(classify_levinson(WeightFunction::table(r, lin)).verdict == Verdict::Divergent);
}

TEST_CASE("csv tables load and reject malformed input") {
    const auto dir = std::filesystem::temp_directory_path();
    const auto good = dir / "levlab_weights_good.csv";
    const auto bad = dir / "levlab_weights_bad.csv";
    std::ofstream(good) << "r,psi\n1,1\n2,2\n4,3\n";
    std::ofstream(bad) << "r,psi\n1,1\n2,0.5\n";
    CHECK(WeightFunction::load_csv(good.string())(3.0) == doctest::Approx(2.5));
    CHECK_THROWS_AS(WeightFunction::load_csv(bad.string()), RepresentationError);
    CHECK_THROWS_AS(WeightFunction::parse("table:" + bad.string()), RepresentationError);
}

TEST_CASE("lin-log weights are monotone and pass through known values") {
    for (double k : {1.0, 1.5, 2.0, 3.0}) {
        const auto w = WeightFunction::lin_log(k);
        double prev = 0.0;
        for (double r = 0.0; r < 200.0; r += 0.003) {
            CHECK(w(r) >= prev);
            prev = w(r);
        }
    }
    CHECK(WeightFunction::lin_log(1)(1.0) == 1.0);
    CHECK(WeightFunction::lin_log(2)(std::exp(3.0)) == doctest::Approx(std::exp(3.0) / 16.0));
}

TEST_CASE("psi_norm examples and norm axioms") {
    const auto lin = WeightFunction::power(1);
    const std::vector<UniformAxis> axes{{-2, 2, 21}, {-2, 2, 21}};
    const auto zero = GridFunction::sample(axes, [](auto) { return Complex{}; });
    CHECK(psi_norm(zero, lin) == 0.0);
    const auto one = GridFunction::sample(axes, [](auto) { return Complex{1.0}; });
    CHECK(psi_norm(one, lin) == 1.0);
    const auto grow = GridFunction::sample(axes, [&](auto x) { return Complex{std::exp(lin(std::hypot(x[0], x[1])))}; });
    CHECK(psi_norm(grow, lin) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(psi_norm(std::span<const Complex>{}, std::span<const double>{}, lin), ArgumentError);

    const auto f = GridFunction::sample(axes, [](auto x) { return Complex{std::sin(3 * x[0]), x[1] * x[1]}; });
    const auto g = GridFunction::sample(axes, [](auto x) { return Complex{std::cos(x[0] * x[1]), -x[0]}; });
    std::vector<Complex> sum(f.size()), scaled(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        sum[i] = f.values()[i] + g.values()[i];
        scaled[i] = Complex{-2.5, 1.0} * f.values()[i];
    }
    const GridFunction fs(axes, sum), fc(axes, scaled);
    CHECK(psi_norm(fs, lin) <= psi_norm(f, lin) + psi_norm(g, lin));
    CHECK(psi_norm(fc, lin) == doctest::Approx(std::abs(Complex{-2.5, 1.0}) * psi_norm(f, lin)).epsilon(1e-15));
    CHECK(psi_norm(f, lin) <= f.sup_norm());

    // a delta at the origin attains the sup norm when psi(0) = 0
    std::vector<Complex> delta(f.size());
    delta[f.size() / 2] = 3.0;
    CHECK(psi_norm(GridFunction(axes, delta), lin) == 3.0);
}

TEST_CASE("psi_scale divides pointwise and keeps the class") {
    const auto w = psi_scale(WeightFunction::power(1), 2);
    CHECK(w(3.0) == 1.5);
    CHECK(psi_scale(WeightFunction::lin_log(1), 3)(1.0) == doctest::Approx(1.0 / 3.0));
    for (int d : {1, 2, 5})
        for (const auto& base : {WeightFunction::lin_log(1), WeightFunction::lin_log(2), WeightFunction::power(0.5)}) {
            CHECK(classify_levinson(psi_scale(base, d)).verdict == classify_levinson(base).verdict);
            CHECK(classify_levinson(as_closure(psi_scale(base, d))).verdict == classify_levinson(base).verdict);
        }
    CHECK_THROWS_AS(psi_scale(WeightFunction::power(1), 0), ArgumentError);
}
