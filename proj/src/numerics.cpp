#include "levlab/numerics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <thread>

namespace levlab {

namespace {

QuadratureRule compute_gauss_legendre(std::size_t n) {
    QuadratureRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double x = std::cos(kPi * (double(i) + 0.75) / (double(n) + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // final derivative at the converged node
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * double(k) - 1.0) * x * p1 - (double(k) - 1.0) * p0) / double(k);
            p0 = p1;
            p1 = p2;
        }
        dp = double(n) * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
    if (n == 0) throw ArgumentError("gauss_legendre: order must be positive");
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<QuadratureRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<QuadratureRule>(compute_gauss_legendre(n));
    return *slot;
}

QuadratureRule composite_gauss(double a, double b, std::size_t panels, std::size_t order) {
    if (panels == 0) throw ArgumentError("composite_gauss: need at least one panel");
    const QuadratureRule& base = gauss_legendre(order);
    QuadratureRule out;
    out.nodes.reserve(panels * order);
    out.weights.reserve(panels * order);
    const double width = (b - a) / double(panels);
    for (std::size_t p = 0; p < panels; ++p) {
        const double lo = a + width * double(p);
        const double mid = lo + 0.5 * width;
        for (std::size_t i = 0; i < order; ++i) {
            out.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
            out.weights.push_back(0.5 * width * base.weights[i]);
        }
    }
    return out;
}

std::vector<double> trapezoid_weights(std::size_t n, double h) {
    std::vector<double> w(n, h);
    if (n > 0) {
        w.front() *= 0.5;
        w.back() *= 0.5;
    }
    if (n == 1) w[0] = 0.0;
    return w;
}

std::size_t panels_for(double a, double b, double max_width) {
    const double len = std::abs(b - a);
    return std::max<std::size_t>(1, std::size_t(std::ceil(len / max_width - 1e-12)));
}

UniformInterpolant::UniformInterpolant(std::vector<Complex> values, double x0, double step,
                                       Extension left, Extension right, int stencil)
    : values_(std::move(values)), x0_(x0), step_(step), left_(left), right_(right), stencil_(stencil) {
    if (values_.empty()) throw ArgumentError("interpolant: no samples");
    if (!(step_ > 0.0)) throw ArgumentError("interpolant: step must be positive");
    stencil_ = std::max(2, std::min<int>(stencil_, int(values_.size()) * 2));
    bary_.resize(std::size_t(stencil_));
    // barycentric weights for equispaced nodes: (-1)^j binom(m-1, j)
    double c = 1.0;
    for (int j = 0; j < stencil_; ++j) {
        bary_[std::size_t(j)] = (j % 2 == 0 ? 1.0 : -1.0) * c;
        c = c * double(stencil_ - 1 - j) / double(j + 1);
    }
}

Complex UniformInterpolant::sample(long i) const {
    const long n = long(values_.size());
    if (i < 0) {
        switch (left_) {
            case Extension::Zero: return {};
            case Extension::Clamp: return values_.front();
            case Extension::Even: {
                const long r = -i;
                return r < n ? values_[std::size_t(r)] : Complex{};
            }
        }
    }
    if (i >= n) {
        switch (right_) {
            case Extension::Zero: return {};
            case Extension::Clamp: return values_.back();
            case Extension::Even: {
                const long r = 2 * (n - 1) - i;
                return r >= 0 ? values_[std::size_t(r)] : Complex{};
            }
        }
    }
    return values_[std::size_t(i)];
}

Complex UniformInterpolant::operator()(double x) const {
    const double u = (x - x0_) / step_;
    const long n = long(values_.size());
    if (right_ == Extension::Zero && u > double(n - 1) + 0.5 * stencil_) return {};
    if (left_ == Extension::Zero && u < -0.5 * stencil_) return {};
    const double fl = std::floor(u);
    const long base = long(fl);
    if (u == fl) return sample(base);
    const long first = base - (stencil_ / 2 - 1);
    double den = 0.0;
    Complex num{};
    for (int j = 0; j < stencil_; ++j) {
        const double t = bary_[std::size_t(j)] / (u - double(first + j));
        den += t;
        num += t * sample(first + j);
    }
    return num / den;
}

double adaptive_gauss(const std::function<void(double, double, std::vector<Complex>&)>& add,
                      double a, double b, std::size_t count, std::vector<Complex>& out,
                      double abs_tol, std::size_t n0, std::size_t n_max) {
    auto run = [&](std::size_t n) {
        std::vector<Complex> acc(count);
        const QuadratureRule& r = gauss_legendre(n);
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < n; ++i) add(mid + half * r.nodes[i], half * r.weights[i], acc);
        return acc;
    };
    std::size_t n = n0;
    std::vector<Complex> prev = run(n);
    double change = 0.0;
    while (true) {
        const std::size_t next = 2 * n;
        std::vector<Complex> cur = run(next);
        change = 0.0;
        for (std::size_t i = 0; i < count; ++i) change = std::max(change, std::abs(cur[i] - prev[i]));
        out = std::move(cur);
        n = next;
        if (change <= abs_tol || 2 * n > n_max) break;
        prev = out;
    }
    return change;
}

double sphere_area(int n) {
    if (n < 1) throw ArgumentError("sphere_area: dimension must be positive");
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double radial_kernel(int d, double z) {
    z = std::abs(z);
    switch (d) {
        case 1: return std::cos(z);
        case 3: return z < 1e-4 ? 1.0 - z * z / 6.0 + z * z * z * z / 120.0 : std::sin(z) / z;
        default: break;
    }
    const double nu = 0.5 * d - 1.0;
    if (z < 1e-4) {
        // two-term series of Gamma(nu+1) (2/z)^nu J_nu(z)
        return 1.0 - z * z / (4.0 * (nu + 1.0));
    }
    if (d == 2) return ::j0(z);
    if (d == 4) return 2.0 * ::j1(z) / z;
    const double scale = std::tgamma(nu + 1.0) * std::pow(2.0 / z, nu);
    if (d % 2 == 0) return scale * ::jn(d / 2 - 1, z);
    return scale * std::sqrt(2.0 * z / kPi) * std::sph_bessel(unsigned(d / 2 - 1), z);
}

unsigned worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("LEVLAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1) hw = std::min<unsigned>(hw, unsigned(cap));
    }
    return hw;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mu;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace levlab
