#pragma once

#include "levlab/grid.hpp"
#include "levlab/hyperbolic.hpp"
#include "levlab/weights.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace levlab::dichotomy {

using hyperbolic::BiinvariantFunction;
using hyperbolic::HyperbolicModel;
using hyperbolic::SpectralFunction;

/// Radial positions t_j in [0, L) of points in the ball B(o, L); chi_j(lambda) = phi_lambda(t_j).
struct PhiSpan {
    HyperbolicModel model;
    double L = 1.0;
    std::vector<double> points;
    std::vector<Complex> coeffs; // optional, same length as points when present

    /// t_j = L j / n, j = 0..n-1.
    static PhiSpan uniform(HyperbolicModel model, double L, std::size_t n);
    /// Same points followed by the midpoints, so earlier points keep their positions.
    PhiSpan refined() const;
    std::size_t size() const { return points.size(); }
    /// Throws ArgumentError unless every point lies in [0, L).
    void validate() const;
};

/// sum_j c_j phi_lambda(t_j) on each lambda.
std::vector<Complex> span_evaluate(const PhiSpan& span, std::span<const Complex> coeffs,
                                   std::span<const double> lambdas);

enum class Pipeline { Constructive, LeastSquares };
std::string to_string(Pipeline p);

/// The quantities the constructive route fixes along the way.
struct ConstructiveTrace {
    double nu = 0.0;        // dilation f(nu lambda)
    double h = 0.0;         // cutoff scale phi^(h lambda)
    std::string cutoff;     // which cutoff function
    int level = 0;          // dyadic level
    double tau = 0.0;       // frequency past which the weight alone controls the error
    double gradient = 0.0;  // kernel gradient bound used by the certificate
    double dilation_error = 0.0;   // |f - f_nu|_psi
    double cutoff_error = 0.0;     // |f_nu - g1|_psi
    double quadrature_error = 0.0; // certified sup |g1 - g_N| on [0, tau]
    double tail_error = 0.0;       // (|g1|_inf + |F|_1) e^{-psi(tau)}
    double chained = 0.0;          // sum of the four pieces above
    double inversion_error = 0.0;  // |g1 - F^|_psi for the sampled F
    double empirical = -1.0;       // sup over probes of |g1 - g_N|, negative if not verified
    std::size_t cubes = 0;
    std::string failure;           // why the run stopped early, empty if it did not
};

struct DensityReport {
    std::string target_id;
    Pipeline pipeline = Pipeline::LeastSquares;
    double residual = 0.0;   // grid psi-norm of target - u
    double tail_bound = 0.0; // (sup|target| + sum|c_j|) e^{-psi(Lambda)}, bounds both past the grid
    std::size_t nodes = 0;
    bool converged = true;
    PhiSpan span;            // points and coefficients of u
    int iterations = 0;
    bool regularized = false;
    std::size_t rank = 0;
    std::optional<ConstructiveTrace> trace;
};

struct ProjectOptions {
    std::string target_id = "target";
    int lawson_iterations = 40;
    /// Least squares: coefficients for the leading points; the residual never exceeds this start.
    std::vector<Complex> warm_start;
    /// Constructive: the target accuracy eps (the chained bound is 4 eps).
    double eps = 0.1;
    /// Constructive: exponential type of the target; 0 means span.L.
    double target_type = 0.0;
    int max_level = 14;
    std::size_t time_samples = 401;
    double inverse_tail_tol = 1e-1;
    bool verify = true;
    std::size_t probes = 400;
    std::uint64_t seed = 1;
};

/// Approximate a bounded even target in the psi-norm by elements of the span.
/// Least squares fits the given points; the constructive route builds its own points through
/// dilation, a cutoff and the dyadic quadrature of the inverse transform.
DensityReport phi_span_project(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                               Pipeline mode = Pipeline::LeastSquares, const ProjectOptions& opts = {});

/// Least-squares residuals on span, span.refined(), ... (refinements + 1 values), warm-started.
std::vector<double> refinement_study(const SpectralFunction& target, const PhiSpan& span, const WeightFunction& psi,
                                     int refinements = 3, const ProjectOptions& opts = {});

struct EnergyBound {
    double energy = 0.0;           // int |f^|^2 |c|^-2
    double residual = 0.0;         // |conj f^ - u|_psi
    double weighted_mass = 0.0;    // int |f^| e^psi |c|^-2
    double pairing = 0.0;          // reported pairing: time domain when f is given, else spectral
    double pairing_spectral = 0.0; // |int f^ u |c|^-2| on the grid
    double pairing_time = 0.0;     // |sum_j c_j f(t_j)| / kappa
    bool time_domain = false;
    double slack = 0.0;            // |pairing_spectral - pairing| plus rounding
    bool chain_holds = false;
    DensityReport projection;
};

/// Bound the energy of f^ by residual * weighted_mass + pairing + slack.
/// Throws HypothesisViolation if the weighted mass is not finite, CertificationError if the chain fails.
EnergyBound vanishing_energy_bound(const SpectralFunction& fhat, const PhiSpan& span, const WeightFunction& psi,
                                   const BiinvariantFunction* f = nullptr, const ProjectOptions& opts = {});

struct LadderRung {
    double eps = 0.0;
    std::size_t span_size = 0;
    double bandwidth = 0.0;
    double ratio = 0.0; // energy / weighted_mass
    EnergyBound bound;
    bool passed = false;
};

struct LadderOptions {
    std::vector<double> eps{1e-1, 1e-2, 1e-3};
    std::size_t span0 = 8;
    double bandwidth0 = 10.0;
    double max_bandwidth = 640.0;
    double spacing = 0.05;
    ProjectOptions project;
};

struct LadderReport {
    double L = 0.0;
    double scale = 0.0; // f is divided by this so that sup |f^| = 1 on the first grid
    std::vector<LadderRung> rungs;
    bool passed = false;
};

/// For f vanishing on B(o, L): per rung, double the span and the bandwidth until energy / weighted_mass < eps.
LadderReport step2_ladder(const BiinvariantFunction& f, double L, const WeightFunction& psi,
                          const LadderOptions& opts = {});

/// prod over blocks of sinc(width xi)^count, sinc(x) = sin(x)/x.
struct SincProduct {
    struct Block {
        int index = 0;
        double width = 0.0;
        std::uint64_t count = 0;
    };
    std::vector<Block> blocks;
    int first = 0;       // smallest block index k0
    double scale = 1.0;  // widths are scale * 2^-index
    double bound = 1.0;  // |P(xi)| <= bound e^{-psi(xi)} for xi up to 2^(last index + 1)

    /// Sum of width * count: the exponential type.
    double type() const;
    /// log |P(xi)|, -inf at a zero.
    double log_abs(double xi) const;
    double operator()(double xi) const;
    /// Same product with extra dyadic blocks past the last one (same scale and multiplicity rule).
    SincProduct extended(int extra, const WeightFunction& psi) const;

    /// Dyadic block construction for a convergent weight with total type `type`:
    /// block i holds N_i - N_{i-1} factors of width scale * 2^-i, N_i = max(N_{i-1}, ceil(mult * (psi(2^{i+2}) - psi(2^{i+1})) / ln 2)).
    static SincProduct for_weight(const WeightFunction& psi, double type, double multiplicity = 1.0,
                                  double min_width = 1e-12);
};

struct DecayCertificate {
    double xi_lo = 1.0, xi_hi = 1e4;
    std::size_t samples = 0;
    double constant = 0.0;     // the construction bound C
    double fitted_at_one = 0.0; // |F(1)| e^{psi(1)}
    double sampled_max = 0.0;  // max |F| e^psi over the samples
    double worst_xi = 0.0;
    bool passed = false;
};

struct SupportCertificate {
    double radius = 0.0;   // target radius
    double outside = 0.0;  // mass past the radius
    double total = 0.0;
    double relative = 0.0;
    double tol = 1e-8;
    bool passed = false;
};

struct MassCertificate {
    std::vector<double> bandwidths;
    std::vector<double> partial; // int_0^Lambda |f^| e^psi dm
    double last_change = 0.0;   // relative change on the last doubling
    double tol = 1e-6;
    bool passed = false;
};

struct NontrivialityCertificate {
    double sup = 0.0;
    double scale = 0.0; // |f^(0)| / volume of the target ball
    double threshold = 0.0;
    bool passed = false;
};

enum class Domain { RealLine, EuclideanRadial, Hyperbolic };
std::string to_string(Domain d);

struct Space {
    Domain domain = Domain::RealLine;
    int dim = 1;
    /// "R", "R3", "H3", ...
    static Space parse(const std::string& name);
    std::string name() const;
};

struct WitnessOptions {
    double xi_lo = 1.0;
    double xi_hi = 1e4;
    double xi_step = 0.05;
    double support_tol = 1e-8;
    double mass_tol = 1e-6;
    int retries = 3;
    int extra_blocks = 0;
    std::size_t samples = 1201; // time-domain samples on [0, 1.5 * target radius]
};

struct WitnessFunction {
    Space space;
    std::string psi;
    double L = 0.0;
    double target_radius = 0.0;
    double multiplicity = 1.0; // block multiplicity factor after retries
    SincProduct decay_factor;  // carries the weight
    SincProduct smooth_factor; // smoothing of type L/2
    std::optional<SincProduct> bump_factor; // transform of the smoothing bump on H^d
    std::optional<EvenProfile> line;
    std::optional<RadialProfile> radial;
    std::optional<BiinvariantFunction> biinvariant;
    DecayCertificate decay;
    SupportCertificate support;
    MassCertificate mass;
    NontrivialityCertificate nontrivial;
    double slice_check = -1.0; // Euclidean radial only

    /// The transform of the witness at |lambda|.
    double transform(double lambda) const;
};

/// One-dimensional witness: even, supported in [-L, L], |F(xi)| <= C e^{-psi(xi)}.
/// Throws PreconditionError unless psi is convergent, CertificationError naming a failed certificate.
WitnessFunction ingham_witness(const WeightFunction& psi, double L, const WitnessOptions& opts = {});

/// Lift the line witness: radial on R^d (support L), or K-biinvariant on H^d (support 2L).
WitnessFunction witness_on_space(const WeightFunction& psi, double L, const Space& space,
                                 const WitnessOptions& opts = {});

/// Even part (g(x) + g(-x)) / 2 of samples on a symmetric grid.
std::vector<Complex> even_part(std::span<const Complex> full);
/// Throws CertificationError("nontriviality") when sup|values| <= 1e-6 * scale.
NontrivialityCertificate certify_nontrivial(std::span<const Complex> values, double scale);

enum class EstimateVerdict { Finite, InfiniteTrend, Undecided };
std::string to_string(EstimateVerdict v);

struct EstimateReport {
    EstimateVerdict verdict = EstimateVerdict::Undecided;
    double p = 1.0;
    std::vector<double> bandwidths;
    std::vector<double> partial; // int_0^Lambda |f^|^p e^psi |c|^-2
    double sup_weighted = 0.0;   // max |f^| e^psi
    double sup_at = 0.0;
};

/// Partial integrals on a doubling ladder ending at the grid end, with a trend verdict.
EstimateReport verify_estimate(const SpectralFunction& fhat, const WeightFunction& psi, double p = 1.0,
                               int rungs = 6);

} // namespace levlab::dichotomy
