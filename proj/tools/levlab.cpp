#include "levlab/dichotomy.hpp"
#include "levlab/dyadic.hpp"
#include "levlab/euclid.hpp"
#include "levlab/hyperbolic.hpp"
#include "levlab/io.hpp"
#include "levlab/weights.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

using namespace levlab;
using io::Json;
namespace fs = std::filesystem;
namespace hy = levlab::hyperbolic;

namespace {

enum Exit { kOk = 0, kError = 1, kUndecided = 2, kBreach = 3 };

struct RunConfig {
    std::string command;
    std::string psi = "lin-log:1";
    std::string space = "H3";
    std::string op = "sft-roundtrip";
    std::string bump = "0,1";
    int d = 3;
    double L = 1.0;
    int level = 0; // 0: smallest level the deficit allows
    double tau = 4.0;
    double eps = 0.05;
    double tol = 0.0; // 0: the command's default
    std::uint64_t seed = 1;
    std::string out = "levlab-out";

    Json to_json() const {
        return {{"command", command}, {"psi", psi}, {"space", space}, {"op", op},   {"bump", bump},
                {"d", d},             {"L", L},     {"level", level}, {"tau", tau}, {"eps", eps},
                {"tol", tol},         {"seed", seed}, {"out", out}};
    }
};

// Bump exp(-1/(1-u^2)) on the interval [lo, hi], or the zero function.
struct BumpSpec {
    double lo = 0.0, hi = 1.0;
    bool zero = false;
    bool centered = true; // a single radius r means the bump on [-r, r]

    static BumpSpec parse(const std::string& s) {
        BumpSpec b;
        if (s == "zero" || s == "0") {
            b.zero = true;
            return b;
        }
        const auto comma = s.find(',');
        try {
            if (comma == std::string::npos) {
                b.hi = std::stod(s);
                b.lo = -b.hi;
            } else {
                b.lo = std::stod(s.substr(0, comma));
                b.hi = std::stod(s.substr(comma + 1));
                b.centered = b.lo == 0.0;
                if (b.centered) b.lo = -b.hi;
            }
        } catch (const std::logic_error&) {
            throw ArgumentError("--bump expects 'lo,hi', a radius, or 'zero'");
        }
        if (!(b.hi > b.lo) || !(b.hi > 0.0)) throw ArgumentError("--bump: need lo < hi and hi > 0");
        return b;
    }
    double operator()(double x) const {
        if (zero) return 0.0;
        const double c = 0.5 * (lo + hi), a = 0.5 * (hi - lo), u = (x - c) / a;
        return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0;
    }
    double support() const { return zero ? 1.0 : hi; }
};

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

std::vector<std::vector<double>> columns_of(const UniformAxis& ax, const std::vector<Complex>& v) {
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < ax.n; ++i) rows.push_back({ax[i], v[i].real(), v[i].imag()});
    return rows;
}

Json error_json(const std::exception& e) {
    Json j{{"type", "error"}, {"message", e.what()}};
    if (const auto* c = dynamic_cast<const CertificationError*>(&e)) {
        j["type"] = "certification";
        j["certificate"] = c->certificate();
        j["value"] = io::number(c->value());
    }
    return j;
}

// ---------------------------------------------------------------- classify

int cmd_classify(const RunConfig& cfg, const Json& head) {
    const auto psi = WeightFunction::parse(cfg.psi);
    const auto v = classify_levinson(psi);
    Json report = head;
    report["psi"] = psi.name();
    report["classification"] = io::to_json(v);
    io::write_json(fs::path(cfg.out) / "classify.json", report);
    std::cout << psi.name() << ": " << to_string(v.verdict) << " (" << to_string(v.method) << ")\n";
    return v.verdict == Verdict::Undecided ? kUndecided : kOk;
}

// ---------------------------------------------------------------- transform

int cmd_transform(const RunConfig& cfg, const Json& head) {
    const fs::path out(cfg.out);
    const auto bump = BumpSpec::parse(cfg.bump);
    Json report = head;
    report["op"] = cfg.op;
    double residual = 0.0, tol = cfg.tol;

    if (cfg.op == "sft-roundtrip" || cfg.op == "abel-roundtrip") {
        const auto model = hy::HyperbolicModel::parse(cfg.space);
        const double support = bump.support();
        const auto f = hy::BiinvariantFunction::sample(model, support + 0.5, 2001,
                                                       [&](double t) { return Complex{bump(t)}; }, support);
        io::write_csv(out / "input.csv", head, {"t", "re", "im"}, columns_of(f.radii(), f.values()));
        std::vector<Complex> back;
        if (cfg.op == "sft-roundtrip") {
            const auto F = hy::sft_forward(f);
            io::write_csv(out / "output.csv", head, {"lambda", "re", "im"}, columns_of(F.lambdas, F.values));
            back = hy::sft_inverse(F, f.radii()).values();
            report["bandwidth"] = F.lambdas.hi;
        } else {
            const auto g = hy::abel_forward(f);
            io::write_csv(out / "output.csv", head, {"s", "re", "im"}, columns_of(g.axis(), g.full()));
            back = hy::abel_inverse(g, model, support).values();
        }
        residual = max_diff(back, f.values());
        io::write_csv(out / "roundtrip.csv", head, {"t", "re", "im"}, columns_of(f.radii(), back));
        if (tol == 0.0) tol = 1e-4;
    } else if (cfg.op == "slice-check") {
        const auto f = RadialProfile::sample(cfg.d, 1.5 * bump.support(), 301,
                                             [&](double r) { return Complex{bump(r)}; }, bump.support());
        const UniformAxis lam{0.0, 40.0, 201};
        const auto pts = lam.points();
        const auto direct = euclid::radial_fourier(f, pts);
        const auto sliced = euclid::even_fourier(euclid::radon_radial(f), pts);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < lam.n; ++i)
            rows.push_back({pts[i], direct[i].real(), sliced[i].real(), std::abs(direct[i] - sliced[i])});
        io::write_csv(out / "discrepancy.csv", head, {"lambda", "radial", "slice", "abs_diff"}, rows);
        residual = euclid::slice_projection_check(f, pts);
        if (tol == 0.0) tol = 1e-6;
    } else if (cfg.op == "radon-roundtrip") {
        const double support = bump.support();
        const auto g = EvenProfile::sample(1.5 * support, 300, [&](double s) { return Complex{bump(s)}; });
        io::write_csv(out / "input.csv", head, {"s", "re", "im"}, columns_of(g.axis(), g.full()));
        const auto f = euclid::radon_inverse_radial(g, cfg.d, support);
        io::write_csv(out / "output.csv", head, {"r", "re", "im"}, columns_of(f.radii(), f.values()));
        const auto back = euclid::radon_radial(f);
        residual = max_diff(back.half(), g.half());
        if (tol == 0.0) tol = 1e-4;
    } else {
        throw ArgumentError("unknown --op '" + cfg.op + "' (sft-roundtrip, abel-roundtrip, slice-check, radon-roundtrip)");
    }
    report["residual"] = io::number(residual);
    report["tol"] = tol;
    report["passed"] = residual < tol || residual == 0.0;
    io::write_json(out / "residual.json", report);
    std::cout << cfg.op << ": residual " << io::format_double(residual) << " (tol " << io::format_double(tol) << ")\n";
    return report["passed"].get<bool>() ? kOk : kBreach;
}

// ---------------------------------------------------------------- witness

int run_witness(const RunConfig& cfg, const WeightFunction& psi, Json report, const std::string& file) {
    const fs::path out(cfg.out);
    const auto space = dichotomy::Space::parse(cfg.space);
    try {
        const auto w = dichotomy::witness_on_space(psi, cfg.L, space);
        report["witness"] = io::to_json(w);
        std::vector<std::vector<double>> rows;
        if (w.line) {
            const auto ax = UniformAxis{0.0, w.line->half_width(), w.line->half_count()};
            rows = columns_of(ax, w.line->half());
        } else if (w.radial) {
            rows = columns_of(w.radial->radii(), w.radial->values());
        } else if (w.biinvariant) {
            rows = columns_of(w.biinvariant->radii(), w.biinvariant->values());
        }
        io::write_csv(out / "witness.csv", report, {"r", "re", "im"}, rows);
        std::vector<std::vector<double>> spectrum;
        for (int i = 0; i <= 2000; ++i) {
            const double l = 0.05 * i, F = w.transform(l);
            spectrum.push_back({l, F, std::abs(F) * std::exp(psi(l))});
        }
        io::write_csv(out / "spectrum.csv", report, {"lambda", "transform", "weighted"}, spectrum);
        report["passed"] = true;
        io::write_json(out / file, report);
        std::cout << "witness on " << space.name() << ": certified (decay " << io::format_double(w.decay.sampled_max)
                  << " <= " << io::format_double(w.decay.constant) << ", support "
                  << io::format_double(w.support.relative) << ")\n";
        return kOk;
    } catch (const CertificationError& e) {
        report["passed"] = false;
        report["error"] = error_json(e);
        io::write_json(out / file, report);
        std::cerr << "certification failed: " << e.what() << '\n';
        return kBreach;
    }
}

int cmd_witness(const RunConfig& cfg, const Json& head) {
    const auto psi = WeightFunction::parse(cfg.psi);
    return run_witness(cfg, psi, head, "witness.json");
}

// ---------------------------------------------------------------- dichotomy

int cmd_dichotomy(const RunConfig& cfg, const Json& head) {
    const fs::path out(cfg.out);
    const auto psi = WeightFunction::parse(cfg.psi);
    const auto v = classify_levinson(psi);
    Json report = head;
    report["psi"] = psi.name();
    report["classification"] = io::to_json(v);
    if (v.verdict == Verdict::Undecided) {
        io::write_json(out / "dichotomy.json", report);
        std::cout << psi.name() << ": undecided, no experiment run\n";
        return kUndecided;
    }
    if (v.verdict == Verdict::Convergent) return run_witness(cfg, psi, report, "dichotomy.json");

    // divergent: the vanishing argument on a shell bump outside B(o, L)
    const auto model = hy::HyperbolicModel::parse(cfg.space);
    const double L = cfg.L;
    const auto f = hy::BiinvariantFunction::sample(model, 2.0 * L, 801, [L](double t) {
        const double u = (t - 1.25 * L) / (0.25 * L);
        return Complex{std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0};
    });
    dichotomy::LadderOptions lo;
    lo.project.seed = cfg.seed;
    const auto ladder = dichotomy::step2_ladder(f, L, psi, lo);
    report["ladder"] = io::to_json(ladder);

    std::vector<std::vector<double>> rows;
    for (const auto& r : ladder.rungs)
        rows.push_back({r.eps, double(r.span_size), r.bandwidth, r.ratio, r.bound.energy, r.bound.residual,
                        r.bound.weighted_mass, r.bound.pairing, r.bound.slack, r.passed ? 1.0 : 0.0});
    io::write_csv(out / "ladder.csv", head,
                  {"eps", "span_size", "bandwidth", "ratio", "energy", "residual", "weighted_mass", "pairing", "slack",
                   "passed"},
                  rows);

    // plot data on the last rung's grid
    hy::SpectralOptions so;
    so.bandwidth = ladder.rungs.back().bandwidth;
    so.spacing = lo.spacing;
    auto F = hy::sft_forward(f, so);
    std::vector<std::vector<double>> spectrum;
    for (std::size_t i = 0; i < F.lambdas.n; ++i) {
        const double a = std::abs(F.values[i]) / ladder.scale;
        spectrum.push_back({F.lambdas[i], a, a * std::exp(psi(F.lambdas[i]))});
    }
    io::write_csv(out / "spectrum.csv", head, {"lambda", "abs_transform", "weighted"}, spectrum);

    // residual against span size for the conjugate transform
    hy::SpectralOptions ro;
    ro.bandwidth = 20.0;
    ro.spacing = lo.spacing;
    auto G = hy::sft_forward(f, ro);
    for (auto& x : G.values) x = std::conj(x) / ladder.scale;
    const auto study = dichotomy::refinement_study(G, dichotomy::PhiSpan::uniform(model, L, 8), psi, 3);
    std::vector<std::vector<double>> res;
    bool decreasing = true;
    for (std::size_t k = 0; k < study.size(); ++k) {
        res.push_back({double(8u << k), study[k]});
        if (k > 0 && !(study[k] < study[k - 1])) decreasing = false;
    }
    io::write_csv(out / "residuals.csv", head, {"span_size", "residual"}, res);
    report["refinement"] = {{"span0", 8}, {"residuals", study}, {"strictly_decreasing", decreasing}};
    report["passed"] = ladder.passed && decreasing;
    io::write_json(out / "dichotomy.json", report);
    for (const auto& r : ladder.rungs)
        std::cout << "eps " << io::format_double(r.eps) << ": span " << r.span_size << ", bandwidth "
                  << io::format_double(r.bandwidth) << ", energy/mass " << io::format_double(r.ratio)
                  << (r.passed ? "" : "  FAILED") << '\n';
    return report["passed"].get<bool>() ? kOk : kBreach;
}

// ---------------------------------------------------------------- approx

int cmd_approx(const RunConfig& cfg, const Json& head) {
    const fs::path out(cfg.out);
    const int d = cfg.d;
    if (d < 1 || d > 3) throw ArgumentError("approx: --d must be 1, 2 or 3");
    const double L = cfg.L;
    const dyadic::FieldFn f = [L](std::span<const double> x) {
        double r2 = 0.0;
        for (double c : x) r2 += c * c;
        const double u2 = r2 / (L * L);
        return Complex{u2 < 1.0 ? std::exp(-1.0 / (1.0 - u2)) : 0.0};
    };
    dyadic::ApproxOptions ao;
    ao.seed = cfg.seed;
    const auto mu = dyadic::RadonMeasureRep::lebesgue(d);
    const auto g = dyadic::KernelFunction::exponential();
    int level = cfg.level;
    if (level == 0) {
        try {
            ao.verify = false;
            dyadic::approximate(f, L, mu, g, 1, cfg.tau, cfg.eps, ao);
            level = 1;
        } catch (const LevelTooCoarseError& e) {
            level = e.minimal_level();
        }
        ao.verify = true;
    }
    const auto w = dyadic::approximate(f, L, mu, g, level, cfg.tau, cfg.eps, ao);
    Json report = head;
    report["approximation"] = io::to_json(w);
    const bool ok = w.empirical_error <= w.certified_bound;
    report["passed"] = ok;
    io::write_json(out / "approx.json", report);
    std::vector<std::string> cols;
    for (int j = 0; j < d; ++j) cols.push_back("x" + std::to_string(j));
    cols.push_back("re");
    cols.push_back("im");
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < w.size(); ++k) {
        std::vector<double> row(w.node(k).begin(), w.node(k).end());
        row.push_back(w.coeffs[k].real());
        row.push_back(w.coeffs[k].imag());
        rows.push_back(std::move(row));
    }
    io::write_csv(out / "nodes.csv", head, cols, rows);
    std::cout << "level " << w.level << ", " << w.size() << " nodes, empirical " << io::format_double(w.empirical_error)
              << " <= certified " << io::format_double(w.certified_bound) << (ok ? "" : "  FAILED") << '\n';
    return ok ? kOk : kBreach;
}

template <class T>
void merge(const Json& file, const CLI::App& app, const std::string& name, T& value) {
    bool given = false;
    for (const auto* sub : app.get_subcommands())
        if (const auto* o = sub->get_option_no_throw("--" + name); o && o->count() > 0) given = true;
    if (const auto* o = app.get_option_no_throw("--" + name); o && o->count() > 0) given = true;
    if (!given && file.contains(name)) value = file.at(name).get<T>();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"levlab: weighted uncertainty experiments on R^d and hyperbolic space"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;
    app.add_option("--out", cfg.out, "Output directory");
    app.add_option("--seed", cfg.seed, "Seed for probe sequences");
    app.add_option("--tol", cfg.tol, "Tolerance override (0 keeps the command default)");
    app.add_option("--config", config_path, "JSON config; flags given on the command line win");

    auto* classify = app.add_subcommand("classify", "Classify the weight integral of psi(r)/r^2");
    classify->add_option("--psi", cfg.psi, "Weight: power:a, lin-log:k, log:c, sqrt, table:path");

    auto* transform = app.add_subcommand("transform", "Run a transform round trip or consistency check");
    transform->add_option("--op", cfg.op, "sft-roundtrip, abel-roundtrip, slice-check, radon-roundtrip");
    transform->add_option("--space", cfg.space, "Hyperbolic space for the spherical ops, e.g. H3");
    transform->add_option("--bump", cfg.bump, "Bump support 'lo,hi', a radius, or 'zero'");
    transform->add_option("--d", cfg.d, "Euclidean dimension for slice-check and radon-roundtrip");

    auto* dich = app.add_subcommand("dichotomy", "Step-2 ladder for divergent psi, witness for convergent psi");
    dich->add_option("--psi", cfg.psi, "Weight");
    dich->add_option("--space", cfg.space, "R, R<d> or H<d> (the ladder needs H<d>)");
    dich->add_option("--L", cfg.L, "Ball radius");

    auto* witness = app.add_subcommand("witness", "Build and certify a compactly supported witness");
    witness->add_option("--psi", cfg.psi, "Convergent weight");
    witness->add_option("--space", cfg.space, "R, R<d> or H<d>");
    witness->add_option("--L", cfg.L, "Support parameter");

    auto* approx = app.add_subcommand("approx", "Dyadic node approximation of a bump's Fourier integral");
    approx->add_option("--d", cfg.d, "Dimension");
    approx->add_option("--level", cfg.level, "Dyadic level n (0 picks the smallest admissible)");
    approx->add_option("--tau", cfg.tau, "Frequency radius");
    approx->add_option("--eps", cfg.eps, "Deficit tolerance");
    approx->add_option("--L", cfg.L, "Ball radius");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kError;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw ArgumentError("cannot read config " + config_path);
            Json file;
            try {
                file = Json::parse(in);
            } catch (const nlohmann::json::exception& e) {
                throw ArgumentError(std::string("config: ") + e.what());
            }
            merge(file, app, "out", cfg.out);
            merge(file, app, "seed", cfg.seed);
            merge(file, app, "tol", cfg.tol);
            merge(file, app, "psi", cfg.psi);
            merge(file, app, "space", cfg.space);
            merge(file, app, "op", cfg.op);
            merge(file, app, "bump", cfg.bump);
            merge(file, app, "d", cfg.d);
            merge(file, app, "L", cfg.L);
            merge(file, app, "level", cfg.level);
            merge(file, app, "tau", cfg.tau);
            merge(file, app, "eps", cfg.eps);
        }
        if (cfg.tol < 0.0) throw ArgumentError("--tol must be positive");
        cfg.command = app.get_subcommands().front()->get_name();
        fs::create_directories(cfg.out);
        const Json head = io::header(cfg.command, cfg.to_json(), cfg.seed);
        if (cfg.command == "classify") return cmd_classify(cfg, head);
        if (cfg.command == "transform") return cmd_transform(cfg, head);
        if (cfg.command == "dichotomy") return cmd_dichotomy(cfg, head);
        if (cfg.command == "witness") return cmd_witness(cfg, head);
        return cmd_approx(cfg, head);
    } catch (const std::exception& e) {
        std::cerr << "levlab: " << e.what() << '\n';
        try {
            if (fs::is_directory(cfg.out)) {
                Json report = io::header(cfg.command, cfg.to_json(), cfg.seed);
                report["error"] = error_json(e);
                io::write_json(fs::path(cfg.out) / "error.json", report);
            }
        } catch (...) {
        }
        return kError;
    }
}
