#pragma once

#include "levlab/grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levlab::hyperbolic {

/// Real hyperbolic space H^d as a rank-one symmetric space.
class HyperbolicModel {
public:
    explicit HyperbolicModel(int d = 3);
    /// "H2", "H3", ...
    static HyperbolicModel parse(const std::string& name);

    int dim() const { return d_; }
    int root_multiplicity() const { return d_ - 1; }
    double rho() const { return 0.5 * (d_ - 1); }
    int weyl_order() const { return 2; }
    int nilpotent_dim() const { return d_ - 1; }
    std::string name() const { return "H" + std::to_string(d_); }

    /// Volume density in geodesic polar coordinates, |S^{d-1}| sinh^{d-1} t.
    double volume_density(double t) const;
    /// |c(lambda)|^-2 for lambda >= 0 (zero at the origin).
    double plancherel(double lambda) const;
    /// Prefactor of the inversion integral over [0, inf): |S^{d-1}| / (2 pi)^d.
    double inversion_constant() const;

    bool operator==(const HyperbolicModel&) const = default;

private:
    int d_;
};

/// |c(lambda)|^-2; throws ArgumentError unless lambda > 0.
double c_density(const HyperbolicModel& model, double lambda);

struct PhiValue {
    Complex value;
    double error; // change between the last two Gauss orders, relative to max(1, |value|)
};

/// The spherical function by Gauss-Legendre quadrature of its boundary integral, for any d.
/// Throws PrecisionError when the estimate stays above 1e-9.
PhiValue phi_quadrature(const HyperbolicModel& model, Complex lambda, double t);

/// phi_lambda(a_t). Closed form for d = 3, quadrature otherwise.
Complex phi_lambda(const HyperbolicModel& model, Complex lambda, double t);
double phi_lambda(const HyperbolicModel& model, double lambda, double t);

/// phi_lambda(t) for many real lambda at one t, sharing the quadrature.
std::vector<double> phi_row(const HyperbolicModel& model, std::span<const double> lambdas, double t);

/// K-biinvariant function sampled in the polar radius t on [0, T].
class BiinvariantFunction {
public:
    BiinvariantFunction(HyperbolicModel model, UniformAxis t, std::vector<Complex> values,
                        std::optional<double> support = std::nullopt);
    static BiinvariantFunction sample(HyperbolicModel model, double T, std::size_t n,
                                      const std::function<Complex(double)>& fn,
                                      std::optional<double> support = std::nullopt);

    const HyperbolicModel& model() const { return model_; }
    const UniformAxis& radii() const { return t_; }
    const std::vector<Complex>& values() const { return values_; }
    std::optional<double> support() const { return support_; }
    double extent() const { return support_ ? *support_ : t_.hi; }
    /// Even through t = 0, zero past the end of the grid.
    UniformInterpolant interpolant() const;
    double sup_norm() const;
    /// int f J dt and int |f| J dt over the grid.
    Complex volume_integral() const;
    double volume_mass() const;

private:
    HyperbolicModel model_;
    UniformAxis t_;
    std::vector<Complex> values_;
    std::optional<double> support_;
};

/// Spectral samples on [0, Lambda] with the Plancherel density attached.
struct SpectralFunction {
    HyperbolicModel model;
    UniformAxis lambdas;
    std::vector<Complex> values;
    std::vector<double> density;

    static SpectralFunction make(HyperbolicModel model, UniformAxis lambdas, std::vector<Complex> values);
    /// Largest |F| |c|^-2 over the last tenth of the grid, relative to its maximum (0 for F = 0).
    double tail() const;
    /// int |F|^2 |c|^-2 d lambda over the grid (trapezoid).
    double energy() const;
};

struct SpectralOptions {
    double bandwidth = 0.0;     // 0: double from 16 until the tail criterion holds
    double max_bandwidth = 0.0; // 0: Nyquist limit of the input grid
    double tail_tol = 1e-10;
    /// Radius up to which the inverse will be evaluated; 0 means the grid end of the input.
    double reach = 0.0;
    /// Frequency spacing; 0 derives it from the support and the reach.
    double spacing = 0.0;
};

/// Frequency spacing that keeps the trapezoid inversion free of aliasing up to radius `reach`
/// for data of exponential type `support`.
double spectral_spacing(const HyperbolicModel& model, double support, double reach);

/// f^(lambda) = int f(t) phi_{-lambda}(t) J(t) dt on a uniform grid. Direct quadrature for d = 3;
/// otherwise the one-dimensional transform of the Abel integral (the same integral after Fubini).
SpectralFunction sft_forward(const BiinvariantFunction& f, const SpectralOptions& opts = {});
/// The same integral at arbitrary complex lambda.
std::vector<Complex> sft_at(const BiinvariantFunction& f, std::span<const Complex> lambdas);

/// f(t) = kappa int_0^Lambda F(lambda) phi_lambda(t) |c(lambda)|^-2 d lambda.
/// Throws TruncationError when F has not decayed at the end of its grid.
BiinvariantFunction sft_inverse(const SpectralFunction& F, const UniformAxis& t, double tail_tol = 1e-10);

/// Abel transform through the identity F(Af) = f^, on [-T, T] with the spacing of f.
/// Needs a declared support.
EvenProfile abel_forward(const BiinvariantFunction& f, const SpectralOptions& opts = {});
/// Direct Abel integral c_d int_{|s|}^T f(t) sinh t (cosh t - cosh s)^{(d-3)/2} dt
/// (2 pi int_{|s|}^T f sinh t dt for d = 3), on the grid of f.
EvenProfile abel_direct(const BiinvariantFunction& f);

struct AbelInverseResult {
    BiinvariantFunction function;
    double bandwidth;
    double leak; // largest |f| past L plus one cell, relative to sup|f|
};

/// f with Af = g: one-dimensional transform of g followed by spherical inversion.
/// Support past L beyond tolerance raises CertificationError.
AbelInverseResult abel_inverse_report(const EvenProfile& g, const HyperbolicModel& model, double L,
                                      const SpectralOptions& opts = {}, double support_tol = kSupportTolerance);
BiinvariantFunction abel_inverse(const EvenProfile& g, const HyperbolicModel& model, double L,
                                 const SpectralOptions& opts = {});

/// e^{-t(lambda^2 + rho^2)} on the given grid.
SpectralFunction heat_hat(const HyperbolicModel& model, double t, const UniformAxis& lambdas);
/// Heat kernel h_t sampled on [0, T].
BiinvariantFunction heat_kernel(const HyperbolicModel& model, double t, double T, std::size_t n);
/// Multiply f^ by the heat multiplier and invert on the grid of f.
BiinvariantFunction heat_apply(const BiinvariantFunction& f, double t, const SpectralOptions& opts = {});

/// Pointwise product; the grids and models must agree.
SpectralFunction convolve_spectral(const SpectralFunction& F, const SpectralFunction& G);

struct PaleyWienerReport {
    double L = 0.0;
    std::vector<double> mu;
    std::vector<double> ratio; // |f^(i mu)| e^{-L mu}
    double c_half = 0.0;       // max ratio over mu <= mu_max / 2
    double c_full = 0.0;       // max ratio over the whole range
    double drift = 0.0;        // c_full / c_half - 1
    double bound = 0.0;        // int |f| phi_0 J dt
    bool bounded = true;       // every ratio <= bound
};

/// Growth of f^ along the imaginary axis against e^{L mu}.
PaleyWienerReport paley_wiener_check(const BiinvariantFunction& f, double L, double mu_max = 2.0,
                                     std::size_t count = 21);

} // namespace levlab::hyperbolic
