#pragma once

#include "levlab/core.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace levlab {

/// A nondecreasing, unbounded, nonnegative weight psi on [0, inf).
///
/// Builtins: power r^a (0 < a <= 1), linear-over-log r/(1+log r)^k (k >= 1),
/// constant-plus-log c + log(1+r), or a user closure. Tables interpolate
/// piecewise-linearly and extend log-log past the last sample.
class WeightFunction {
public:
    enum class Family { Power, LinLog, Log, Closure, Table };

    static WeightFunction power(double a);
    static WeightFunction lin_log(double k);
    static WeightFunction log_plus(double c);
    /// User closure; monotonicity is spot-checked on a dyadic probe.
    static WeightFunction closure(std::function<double(double)> fn, std::string name = "closure");
    /// Table with strictly increasing r; the last psi must exceed psi_bound.
    static WeightFunction table(std::vector<double> r, std::vector<double> psi, double psi_bound = 0.0);
    /// Two-column CSV (r, psi). Lines starting with '#' and a non-numeric header are skipped.
    static WeightFunction load_csv(const std::string& path, double psi_bound = 0.0);
    /// "power:a", "lin-log:k", "log:c", "sqrt" or "table:path".
    static WeightFunction parse(const std::string& desc);

    double operator()(double r) const;

    Family family() const { return family_; }
    double parameter() const { return param_; }
    double scale() const { return scale_; }
    /// Largest r backed by data (infinity for builtins and closures).
    double data_limit() const;
    std::string name() const;

    WeightFunction scaled(double c) const;

    const std::vector<double>& table_r() const { return tr_; }
    const std::vector<double>& table_psi() const { return tpsi_; }

private:
    double raw(double r) const;

    Family family_ = Family::Power;
    double param_ = 1.0;
    double scale_ = 1.0;
    std::shared_ptr<const std::function<double(double)>> fn_;
    std::string label_;
    std::vector<double> tr_, tpsi_;
    double tail_exponent_ = 0.0;
};

enum class Verdict { Divergent, Convergent, Undecided };
enum class VerdictMethod { ClosedForm, DyadicCondensation, NumericExtrapolation };

std::string to_string(Verdict v);
std::string to_string(VerdictMethod m);

struct LevinsonVerdict {
    Verdict verdict = Verdict::Undecided;
    VerdictMethod method = VerdictMethod::NumericExtrapolation;
    /// Integral of psi(r)/r^2 over [1, R] at the largest R probed.
    double numeric_estimate = 0.0;
    double probed_radius = 0.0;
    /// Dyadic condensation terms psi(2^k)/2^k, k = 0..K.
    std::vector<double> dyadic_terms;
    /// Fitted decay exponent p of the terms in k (terms ~ k^-p), NaN if not fitted.
    double tail_exponent = 0.0;
    std::string note;
};

inline constexpr double kDefaultDivergenceThreshold = 1e6;
inline constexpr double kDefaultHorizon = 18446744073709551616.0; // 2^64

LevinsonVerdict classify_levinson(const WeightFunction& psi, double horizon = kDefaultHorizon,
                                  double threshold = kDefaultDivergenceThreshold);

/// Integral of psi(r)/r^2 over [1, R] by dyadic panels.
double levinson_partial_integral(const WeightFunction& psi, double R);

/// max |f(x_i)| exp(-psi(|x_i|)) over samples with radii |x_i|.
double psi_norm(std::span<const Complex> values, std::span<const double> radii, const WeightFunction& psi);

/// psi / d.
WeightFunction psi_scale(const WeightFunction& psi, int d);

} // namespace levlab
