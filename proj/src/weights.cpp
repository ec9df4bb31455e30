#include "levlab/weights.hpp"
#include "levlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace levlab {

namespace {

double parse_number(const std::string& text, const std::string& desc) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (const std::exception&) {
        throw ArgumentError("weight '" + desc + "': bad number '" + text + "'");
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace

WeightFunction WeightFunction::power(double a) {
    if (!(a > 0.0 && a <= 1.0)) throw ArgumentError("power weight needs 0 < a <= 1");
    WeightFunction w;
    w.family_ = Family::Power;
    w.param_ = a;
    return w;
}

WeightFunction WeightFunction::lin_log(double k) {
    if (!(k >= 1.0) || !std::isfinite(k)) throw ArgumentError("lin-log weight needs k >= 1");
    WeightFunction w;
    w.family_ = Family::LinLog;
    w.param_ = k;
    return w;
}

WeightFunction WeightFunction::log_plus(double c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw ArgumentError("log weight needs c >= 0");
    WeightFunction w;
    w.family_ = Family::Log;
    w.param_ = c;
    return w;
}

WeightFunction WeightFunction::closure(std::function<double(double)> fn, std::string name) {
    if (!fn) throw ArgumentError("closure weight: empty callable");
    WeightFunction w;
    w.family_ = Family::Closure;
    w.fn_ = std::make_shared<const std::function<double(double)>>(std::move(fn));
    w.label_ = std::move(name);
    // spot-check the invariants on a dyadic probe plus a fine grid near 0
    double prev = -1.0;
    std::vector<double> probe;
    for (int i = 0; i <= 64; ++i) probe.push_back(4.0 * i / 64.0);
    for (int k = 3; k <= 80; ++k) probe.push_back(std::ldexp(1.0, k));
    for (double r : probe) {
        const double v = (*w.fn_)(r);
        if (!std::isfinite(v) || v < 0.0)
            throw RepresentationError("closure weight: negative or non-finite value at r=" + std::to_string(r));
        if (v < prev) throw RepresentationError("closure weight: decreasing near r=" + std::to_string(r));
        prev = v;
    }
    return w;
}

WeightFunction WeightFunction::table(std::vector<double> r, std::vector<double> psi, double psi_bound) {
    if (r.size() != psi.size()) throw RepresentationError("weight table: column lengths differ");
    if (r.size() < 2) throw RepresentationError("weight table: need at least two samples");
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (!std::isfinite(r[i]) || !std::isfinite(psi[i]))
            throw RepresentationError("weight table: non-finite entry at row " + std::to_string(i));
        if (r[i] < 0.0) throw RepresentationError("weight table: negative radius at row " + std::to_string(i));
        if (psi[i] < 0.0) throw RepresentationError("weight table: negative psi at row " + std::to_string(i));
        if (i > 0 && !(r[i] > r[i - 1]))
            throw RepresentationError("weight table: radii not strictly increasing at row " + std::to_string(i));
        if (i > 0 && psi[i] < psi[i - 1])
            throw RepresentationError("weight table: psi decreases at row " + std::to_string(i));
    }
    if (!(psi.back() > psi_bound))
        throw RepresentationError("weight table: last psi does not exceed the declared bound");
    WeightFunction w;
    w.family_ = Family::Table;
    w.tr_ = std::move(r);
    w.tpsi_ = std::move(psi);
    const std::size_t n = w.tr_.size();
    const double r0 = w.tr_[n - 2], r1 = w.tr_[n - 1];
    const double p0 = w.tpsi_[n - 2], p1 = w.tpsi_[n - 1];
    w.tail_exponent_ = (p0 > 0.0 && r0 > 0.0) ? std::log(p1 / p0) / std::log(r1 / r0) : 1.0;
    return w;
}

WeightFunction WeightFunction::load_csv(const std::string& path, double psi_bound) {
    std::ifstream in(path);
    if (!in) throw RepresentationError("weight table: cannot open " + path);
    std::vector<double> r, psi;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ';', ',');
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw RepresentationError("weight table: line " + std::to_string(lineno) + " needs two columns");
        const std::string a = trim(line.substr(0, comma)), b = trim(line.substr(comma + 1));
        char* end = nullptr;
        const double x = std::strtod(a.c_str(), &end);
        if (end == a.c_str() || *end != '\0') {
            if (r.empty()) continue; // header
            throw RepresentationError("weight table: bad number on line " + std::to_string(lineno));
        }
        const double y = std::strtod(b.c_str(), &end);
        if (end == b.c_str() || *end != '\0')
            throw RepresentationError("weight table: bad number on line " + std::to_string(lineno));
        r.push_back(x);
        psi.push_back(y);
    }
    return table(std::move(r), std::move(psi), psi_bound);
}

WeightFunction WeightFunction::parse(const std::string& desc) {
    const std::string s = trim(desc);
    if (s == "sqrt") return power(0.5);
    if (s == "linear") return power(1.0);
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ArgumentError("weight '" + desc + "': expected family:parameter");
    const std::string fam = s.substr(0, colon), arg = s.substr(colon + 1);
    if (fam == "table") return load_csv(arg);
    const double v = parse_number(arg, desc);
    if (fam == "power") return power(v);
    if (fam == "lin-log") return lin_log(v);
    if (fam == "log") return log_plus(v);
    throw ArgumentError("weight '" + desc + "': unknown family '" + fam + "'");
}

double WeightFunction::raw(double r) const {
    r = std::max(r, 0.0);
    switch (family_) {
        case Family::Power: return std::pow(r, param_);
        case Family::LinLog: {
            // r/(1+log r)^k only increases past e^{k-1}; below that we use the chord
            // through the origin, which joins continuously and keeps psi monotone
            const double k = param_;
            const double knee = std::exp(k - 1.0);
            if (r < knee) return r / std::pow(k, k);
            return r / std::pow(1.0 + std::log(r), k);
        }
        case Family::Log: return param_ + std::log1p(r);
        case Family::Closure: return (*fn_)(r);
        case Family::Table: {
            if (r <= tr_.front()) return tpsi_.front();
            if (r >= tr_.back()) return tpsi_.back() * std::pow(r / tr_.back(), tail_exponent_);
            const auto it = std::upper_bound(tr_.begin(), tr_.end(), r);
            const std::size_t i = std::size_t(it - tr_.begin());
            const double t = (r - tr_[i - 1]) / (tr_[i] - tr_[i - 1]);
            return tpsi_[i - 1] + t * (tpsi_[i] - tpsi_[i - 1]);
        }
    }
    return 0.0;
}

double WeightFunction::operator()(double r) const { return scale_ * raw(r); }

double WeightFunction::data_limit() const {
    return family_ == Family::Table ? tr_.back() : std::numeric_limits<double>::infinity();
}

std::string WeightFunction::name() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case Family::Power: os << "power:" << param_; break;
        case Family::LinLog: os << "lin-log:" << param_; break;
        case Family::Log: os << "log:" << param_; break;
        case Family::Closure: os << "closure:" << label_; break;
        case Family::Table: os << "table[" << tr_.size() << "]"; break;
    }
    if (scale_ != 1.0) os << "*" << scale_;
    return os.str();
}

WeightFunction WeightFunction::scaled(double c) const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ArgumentError("weight scale must be positive");
    WeightFunction w = *this;
    w.scale_ *= c;
    return w;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Divergent: return "divergent";
        case Verdict::Convergent: return "convergent";
        case Verdict::Undecided: return "undecided";
    }
    return "undecided";
}

std::string to_string(VerdictMethod m) {
    switch (m) {
        case VerdictMethod::ClosedForm: return "closed-form rule";
        case VerdictMethod::DyadicCondensation: return "dyadic condensation";
        case VerdictMethod::NumericExtrapolation: return "numeric extrapolation";
    }
    return "";
}

double levinson_partial_integral(const WeightFunction& psi, double R) {
    if (R <= 1.0) return 0.0;
    const QuadratureRule& g = gauss_legendre(24);
    // kinks of the representation become panel edges
    std::vector<double> breaks;
    if (psi.family() == WeightFunction::Family::LinLog) breaks.push_back(std::exp(psi.parameter() - 1.0));
    if (psi.family() == WeightFunction::Family::Table) breaks = psi.table_r();
    double total = 0.0;
    double lo = 1.0;
    while (lo < R) {
        double hi = std::min(2.0 * lo, R);
        const auto next = std::upper_bound(breaks.begin(), breaks.end(), lo * (1.0 + 1e-15));
        if (next != breaks.end() && *next < hi) hi = *next;
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        double s = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double r = mid + half * g.nodes[i];
            s += g.weights[i] * psi(r) / (r * r);
        }
        total += half * s;
        lo = hi;
    }
    return total;
}

LevinsonVerdict classify_levinson(const WeightFunction& psi, double horizon, double threshold) {
    if (!(horizon >= 2.0)) throw ArgumentError("classify_levinson: horizon must be at least 2");
    if (!(threshold > 0.0)) throw ArgumentError("classify_levinson: threshold must be positive");

    LevinsonVerdict out;
    const double R = std::min(horizon, psi.data_limit());
    out.probed_radius = R;
    out.numeric_estimate = levinson_partial_integral(psi, R);
    const int K = R >= 2.0 ? int(std::floor(std::log2(R) + 1e-12)) : 0;
    for (int k = 0; k <= K; ++k) out.dyadic_terms.push_back(psi(std::ldexp(1.0, k)) / std::ldexp(1.0, k));
    out.tail_exponent = std::numeric_limits<double>::quiet_NaN();

    switch (psi.family()) {
        case WeightFunction::Family::Power:
            out.method = VerdictMethod::ClosedForm;
            out.verdict = psi.parameter() >= 1.0 ? Verdict::Divergent : Verdict::Convergent;
            out.note = "integral of r^(a-2) diverges iff a >= 1";
            return out;
        case WeightFunction::Family::LinLog:
            out.method = VerdictMethod::ClosedForm;
            out.verdict = psi.parameter() <= 1.0 ? Verdict::Divergent : Verdict::Convergent;
            out.note = "integral of 1/(r (1+log r)^k) diverges iff k <= 1";
            return out;
        case WeightFunction::Family::Log:
            out.method = VerdictMethod::ClosedForm;
            out.verdict = Verdict::Convergent;
            out.note = "(c + log(1+r))/r^2 is integrable at infinity";
            return out;
        default: break;
    }

    if (K < 4) {
        out.note = "data range too short for condensation";
        return out;
    }
    const auto& a = out.dyadic_terms;
    double S = 0.0, amax = 0.0;
    for (double t : a) {
        S += t;
        amax = std::max(amax, t);
    }
    if (amax <= 0.0) {
        out.note = "weight vanishes on the probed range";
        return out;
    }
    if (S / amax > threshold) {
        out.verdict = Verdict::Divergent;
        out.method = VerdictMethod::DyadicCondensation;
        out.note = "normalized condensation sum exceeds the divergence threshold";
        return out;
    }

    out.method = VerdictMethod::NumericExtrapolation;
    const int w = std::min(16, K / 2);
    const double aK = a[std::size_t(K)], aW = a[std::size_t(K - w)];
    if (aK >= aW) {
        out.verdict = Verdict::Divergent;
        out.tail_exponent = 0.0;
        out.note = "condensation terms do not decay";
        return out;
    }
    if (aK > 0.0) {
        const double q = std::pow(aK / aW, 1.0 / w);
        if (q <= 0.95 && aK * q / (1.0 - q) <= 0.05 * S) {
            out.verdict = Verdict::Convergent;
            out.note = "condensation terms decay geometrically";
            out.tail_exponent = std::numeric_limits<double>::infinity();
            return out;
        }
        const double p = -std::log(aK / aW) / std::log(double(K + 1) / double(K + 1 - w));
        out.tail_exponent = p;
        if (p >= 1.5 && aK * double(K + 1) / (p - 1.0) <= 0.05 * S) {
            out.verdict = Verdict::Convergent;
            out.note = "power-law tail of the condensation terms is summable";
            return out;
        }
        if (p <= 1.0) {
            out.verdict = Verdict::Divergent;
            out.note = "power-law tail of the condensation terms is not summable";
            return out;
        }
    }
    out.note = "tail behavior inconclusive at this horizon";
    return out;
}

double psi_norm(std::span<const Complex> values, std::span<const double> radii, const WeightFunction& psi) {
    if (values.empty()) throw ArgumentError("psi_norm: empty grid");
    if (values.size() != radii.size()) throw ArgumentError("psi_norm: values and radii differ in length");
    double best = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double m = std::abs(values[i]);
        if (m == 0.0) continue;
        const double p = psi(radii[i]);
        best = std::max(best, p < 700.0 ? m * std::exp(-p) : std::exp(std::log(m) - p));
    }
    return best;
}

WeightFunction psi_scale(const WeightFunction& psi, int d) {
    if (d < 1) throw ArgumentError("psi_scale: d must be at least 1");
    return psi.scaled(1.0 / double(d));
}

} // namespace levlab
