#pragma once

#include "levlab/grid.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace levlab::dyadic {

/// Half-open cubes prod_j [k_j/2^n, (k_j+1)/2^n) whose closures lie inside the open ball B(0, L).
struct DyadicCover {
    int dim = 1;
    int level = 1;
    double radius = 1.0;
    std::vector<std::int64_t> cells; // dim integers per cube, lexicographic
    bool empty = true;

    std::size_t size() const { return cells.size() / std::size_t(dim); }
    double side() const { return std::ldexp(1.0, -level); }
    std::span<const std::int64_t> cube(std::size_t i) const {
        return {cells.data() + i * std::size_t(dim), std::size_t(dim)};
    }
    bool contains(std::span<const double> x) const;
};

DyadicCover build_cover(double L, int n, int d);

using PointFn = std::function<double(std::span<const double>)>;
using FieldFn = std::function<Complex(std::span<const double>)>;

/// A Radon measure given by a nonnegative density or by finitely many atoms.
class RadonMeasureRep {
public:
    enum class Kind { LebesgueDensity, Atomic };

    static RadonMeasureRep lebesgue(int d);
    static RadonMeasureRep density(int d, PointFn rho, std::string label = "density");
    /// Density samples on a grid; must be real and nonnegative. Evaluated multilinearly.
    static RadonMeasureRep density_grid(const GridFunction& rho);
    static RadonMeasureRep atoms(std::vector<std::vector<double>> points, std::vector<double> masses);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool unit_density() const { return unit_; }
    double density_at(std::span<const double> x) const;
    const std::vector<std::vector<double>>& atom_points() const { return points_; }
    const std::vector<double>& atom_masses() const { return masses_; }
    const std::string& label() const { return label_; }

private:
    Kind kind_ = Kind::LebesgueDensity;
    int dim_ = 1;
    bool unit_ = true;
    PointFn rho_;
    std::vector<std::vector<double>> points_;
    std::vector<double> masses_;
    std::string label_ = "lebesgue";
};

/// Kernel g(x, lambda) with |g| <= 1 and a bound on its x-gradient for |lambda| <= tau.
struct KernelFunction {
    std::function<Complex(std::span<const double> x, std::span<const double> lambda)> eval;
    /// Analytic bound M_tau on |grad_x g| over B(0, L) x B(0, tau); may be empty.
    std::function<double(double tau, double L)> gradient_bound;
    bool bounded_by_one = true;
    bool allow_estimate = true;
    std::string label = "kernel";

    /// e^{i lambda . x}, with M_tau = tau.
    static KernelFunction exponential();
};

struct GradientBound {
    double value;
    bool estimated;
};

/// Analytic bound when available, else twice the largest finite-difference gradient on a probe.
GradientBound gradient_bound(const KernelFunction& g, int d, double tau, double L, std::uint64_t seed);

/// Deterministic probe of B(0, tau): Halton points (offset by seed) plus the origin and axis points.
std::vector<std::vector<double>> ball_probes(int d, double tau, std::size_t count, std::uint64_t seed);

/// mu(B(0, L) minus the cover).
double deficit(const DyadicCover& cover, const RadonMeasureRep& mu, int sub_samples = 4);

/// Smallest n with deficit < target, by doubling then bisection (n <= n_cap).
int minimal_level(double L, int d, const RadonMeasureRep& mu, double target, int n_cap = 24);

struct NodeWeights {
    int dim = 1;
    std::vector<double> nodes; // dim coordinates per node
    std::vector<Complex> coeffs;
    int level = 0;
    double tau = 0.0;
    double certified_bound = 0.0;
    double mass_bound = 0.0;

    // components of the certificate
    double eps = 0.0;
    double sup_f = 0.0;
    double gradient = 0.0;
    bool gradient_estimated = false;
    double deficit = 0.0;
    double deficit_term = 0.0;   // (eps/2) sup|f|
    double resolution_term = 0.0; // M_tau sqrt(d) 2^-n |f|_1
    double empirical_error = -1.0; // sup over the probe of |F - h_n|, negative if not verified

    std::size_t size() const { return coeffs.size(); }
    std::span<const double> node(std::size_t j) const {
        return {nodes.data() + j * std::size_t(dim), std::size_t(dim)};
    }
};

struct ApproxOptions {
    int sub_samples = 4;        // midpoint samples per cube per axis for the masses
    std::size_t probes = 1000;  // probe count in B(0, tau)
    std::uint64_t seed = 1;
    bool verify = true;         // compare against the reference integral on the probe
    int oracle_order = 6;       // Gauss points per cube side for the reference integral
};

/// Replace F(lambda) = int_{B(0,L)} f g dmu by sum_k g(k/2^n, lambda) C_k with C_k = int_{I_k} f dmu.
NodeWeights approximate(const FieldFn& f, double L, const RadonMeasureRep& mu, const KernelFunction& g, int n,
                        double tau, double eps, const ApproxOptions& opts = {});
NodeWeights approximate(const GridFunction& f, double L, const RadonMeasureRep& mu, const KernelFunction& g, int n,
                        double tau, double eps, const ApproxOptions& opts = {});

/// sum_j C_j g(v_j, lambda) in node order.
std::vector<Complex> evaluate_nodes(const NodeWeights& w, const KernelFunction& g,
                                    const std::vector<std::vector<double>>& lambdas);

/// Reference value of int_{B(0,L)} f g dmu on each lambda: tensor Gauss rule on dyadic panels of level
/// min(n, 4), with at least `order` points per panel side and more for large |lambda|.
std::vector<Complex> reference_integral(const FieldFn& f, double L, const RadonMeasureRep& mu,
                                        const KernelFunction& g, int n, int order,
                                        const std::vector<std::vector<double>>& lambdas);

} // namespace levlab::dyadic
