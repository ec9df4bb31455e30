#include "levlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace levlab::io {

std::uint64_t fnv1a(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const Json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(config.dump())));
    return buf;
}

Json header(const std::string& command, const Json& config, std::uint64_t seed) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["config"] = config;
    j["config_hash"] = config_hash(config);
    j["seed"] = seed;
    return j;
}

Json number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    return x;
}

std::string format_double(double x) {
    if (!std::isfinite(x)) return number(x).get<std::string>();
    return Json(x).dump();
}

namespace {

Json numbers(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(number(x));
    return a;
}

Json complexes(const std::vector<Complex>& v) {
    Json a = Json::array();
    for (const auto& c : v) a.push_back(Json::array({number(c.real()), number(c.imag())}));
    return a;
}

} // namespace

Json to_json(const LevinsonVerdict& v) {
    Json j;
    j["verdict"] = to_string(v.verdict);
    j["method"] = to_string(v.method);
    j["numeric_estimate"] = number(v.numeric_estimate);
    j["probed_radius"] = number(v.probed_radius);
    j["tail_exponent"] = number(v.tail_exponent);
    j["dyadic_terms"] = numbers(v.dyadic_terms);
    j["note"] = v.note;
    return j;
}

Json to_json(const dichotomy::DensityReport& r, bool with_span) {
    Json j;
    j["target_id"] = r.target_id;
    j["pipeline"] = dichotomy::to_string(r.pipeline);
    j["residual"] = number(r.residual);
    j["tail_bound"] = number(r.tail_bound);
    j["nodes"] = r.nodes;
    j["converged"] = r.converged;
    j["L"] = r.span.L;
    j["iterations"] = r.iterations;
    j["regularized"] = r.regularized;
    j["rank"] = r.rank;
    if (r.trace) {
        const auto& t = *r.trace;
        j["constructive"] = {{"nu", number(t.nu)},
                             {"h", number(t.h)},
                             {"cutoff", t.cutoff},
                             {"level", t.level},
                             {"tau", number(t.tau)},
                             {"gradient", number(t.gradient)},
                             {"dilation_error", number(t.dilation_error)},
                             {"cutoff_error", number(t.cutoff_error)},
                             {"quadrature_error", number(t.quadrature_error)},
                             {"tail_error", number(t.tail_error)},
                             {"chained", number(t.chained)},
                             {"inversion_error", number(t.inversion_error)},
                             {"empirical", number(t.empirical)},
                             {"cubes", t.cubes},
                             {"failure", t.failure}};
    }
    if (with_span) {
        j["points"] = numbers(r.span.points);
        j["coeffs"] = complexes(r.span.coeffs);
    }
    return j;
}

Json to_json(const dichotomy::EnergyBound& b) {
    return {{"energy", number(b.energy)},
            {"residual", number(b.residual)},
            {"weighted_mass", number(b.weighted_mass)},
            {"pairing", number(b.pairing)},
            {"pairing_spectral", number(b.pairing_spectral)},
            {"pairing_time", number(b.pairing_time)},
            {"time_domain", b.time_domain},
            {"slack", number(b.slack)},
            {"chain_holds", b.chain_holds},
            {"projection", to_json(b.projection)}};
}

Json to_json(const dichotomy::LadderReport& r) {
    Json rungs = Json::array();
    for (const auto& g : r.rungs)
        rungs.push_back({{"eps", number(g.eps)},
                         {"span_size", g.span_size},
                         {"bandwidth", number(g.bandwidth)},
                         {"ratio", number(g.ratio)},
                         {"passed", g.passed},
                         {"bound", to_json(g.bound)}});
    return {{"L", r.L}, {"scale", number(r.scale)}, {"passed", r.passed}, {"rungs", rungs}};
}

Json to_json(const dichotomy::SincProduct& p) {
    Json blocks = Json::array();
    for (const auto& b : p.blocks) blocks.push_back({{"index", b.index}, {"width", number(b.width)}, {"count", b.count}});
    return {{"first", p.first}, {"scale", number(p.scale)}, {"bound", number(p.bound)}, {"type", number(p.type())},
            {"blocks", blocks}};
}

Json to_json(const dichotomy::WitnessFunction& w) {
    Json j;
    j["space"] = w.space.name();
    j["domain"] = dichotomy::to_string(w.space.domain);
    j["psi"] = w.psi;
    j["L"] = w.L;
    j["target_radius"] = w.target_radius;
    j["multiplicity"] = w.multiplicity;
    j["decay_factor"] = to_json(w.decay_factor);
    j["smooth_factor"] = to_json(w.smooth_factor);
    if (w.bump_factor) j["bump_factor"] = to_json(*w.bump_factor);
    const auto& d = w.decay;
    j["decay"] = {{"xi_lo", d.xi_lo},
                  {"xi_hi", d.xi_hi},
                  {"samples", d.samples},
                  {"constant", number(d.constant)},
                  {"fitted_at_one", number(d.fitted_at_one)},
                  {"sampled_max", number(d.sampled_max)},
                  {"worst_xi", number(d.worst_xi)},
                  {"passed", d.passed}};
    const auto& s = w.support;
    j["support"] = {{"radius", s.radius},         {"outside", number(s.outside)}, {"total", number(s.total)},
                    {"relative", number(s.relative)}, {"tol", s.tol},         {"passed", s.passed}};
    const auto& m = w.mass;
    j["mass"] = {{"bandwidths", numbers(m.bandwidths)}, {"partial", numbers(m.partial)},
                 {"last_change", number(m.last_change)}, {"tol", m.tol}, {"passed", m.passed}};
    const auto& n = w.nontrivial;
    j["nontrivial"] = {{"sup", number(n.sup)}, {"scale", number(n.scale)}, {"threshold", number(n.threshold)},
                       {"passed", n.passed}};
    if (w.slice_check >= 0.0) j["slice_check"] = number(w.slice_check);
    return j;
}

Json to_json(const dichotomy::EstimateReport& r) {
    return {{"verdict", dichotomy::to_string(r.verdict)}, {"p", r.p},
            {"bandwidths", numbers(r.bandwidths)},       {"partial", numbers(r.partial)},
            {"sup_weighted", number(r.sup_weighted)},    {"sup_at", number(r.sup_at)}};
}

Json to_json(const dyadic::NodeWeights& w) {
    return {{"dim", w.dim},
            {"level", w.level},
            {"nodes", w.size()},
            {"tau", number(w.tau)},
            {"eps", number(w.eps)},
            {"certified_bound", number(w.certified_bound)},
            {"mass_bound", number(w.mass_bound)},
            {"sup_f", number(w.sup_f)},
            {"gradient", number(w.gradient)},
            {"gradient_estimated", w.gradient_estimated},
            {"deficit", number(w.deficit)},
            {"deficit_term", number(w.deficit_term)},
            {"resolution_term", number(w.resolution_term)},
            {"empirical_error", number(w.empirical_error)}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

void write_csv(const std::filesystem::path& path, const Json& head, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows) {
    std::ofstream out(path);
    if (!out) throw ArgumentError("cannot write " + path.string());
    out << "# " << head.dump() << '\n';
    for (std::size_t c = 0; c < columns.size(); ++c) out << (c ? "," : "") << columns[c];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
        out << '\n';
    }
}

} // namespace levlab::io
