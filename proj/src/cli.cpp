#include "blab/cli.hpp"

#include "blab/boundary.hpp"
#include "blab/boundary_json.hpp"
#include "blab/dynamics.hpp"
#include "blab/error.hpp"
#include "blab/fractal.hpp"
#include "blab/io.hpp"
#include "blab/orbits.hpp"
#include "blab/parallel.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>

namespace blab {

namespace {

using nlohmann::json;

struct Invocation {
    std::string config_path;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> input;
    std::optional<std::string> fixture;
};

// Effective configuration: file contents plus command-line overrides.
struct Experiment {
    json config;
    std::string out;
    unsigned threads = 1;
    std::string digest;
};

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <typename T>
T config_value(const json& config, const char* key, T fallback) {
    if (!config.contains(key)) return fallback;
    try {
        return config.at(key).get<T>();
    } catch (const json::exception&) {
        throw DomainError(std::string("config: field '") + key + "' has the wrong type");
    }
}

const json& config_field(const json& config, const char* key) {
    if (!config.contains(key)) throw DomainError(std::string("config: missing field '") + key + "'");
    return config.at(key);
}

unsigned resolve_threads(const std::optional<unsigned>& flag) {
    if (flag) return std::max(1u, *flag);
    if (const char* env = std::getenv("BLAB_THREADS")) {
        try {
            const int v = std::stoi(env);
            if (v >= 1) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
        throw DomainError("BLAB_THREADS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

Experiment load_experiment(const Invocation& inv) {
    Experiment ex;
    std::ifstream in(inv.config_path);
    if (!in) throw DomainError("cannot open config '" + inv.config_path + "'");
    try {
        ex.config = json::parse(in);
    } catch (const json::parse_error& e) {
        throw DomainError(std::string("config: ") + e.what());
    }
    if (!ex.config.is_object()) throw DomainError("config: expected a JSON object");
    if (inv.seed) ex.config["seed"] = *inv.seed;
    if (inv.input) ex.config["input"] = *inv.input;
    if (inv.out) {
        ex.out = *inv.out;
    } else if (ex.config.contains("out") && ex.config.at("out").is_string()) {
        ex.out = ex.config.at("out").get<std::string>();
    } else {
        throw DomainError("no output path: pass --out or set \"out\" in the config");
    }
    ex.threads = resolve_threads(inv.threads ? inv.threads : [&]() -> std::optional<unsigned> {
        if (ex.config.contains("threads")) return config_value<unsigned>(ex.config, "threads", 1);
        return std::nullopt;
    }());

    json hashed = ex.config;
    hashed.erase("out");
    hashed.erase("threads");
    ex.digest = digest_hex(hashed.dump());
    return ex;
}

BoundaryCurve curve_from(const json& config) { return build_curve(descriptor_from_json(config_field(config, "boundary"))); }

json tangent_json(const Eigen::Vector2d& point, const TangentReport<double>& report) {
    json curve = json::array();
    for (const auto& [r, fraction] : report.excluded_fraction_curve) curve.push_back({r, fraction});
    return {{"point", {point.x(), point.y()}},
            {"has_tangent", report.has_tangent},
            {"gamma", report.gamma ? json(*report.gamma) : json(nullptr)},
            {"eta", report.eta_used},
            {"curve", curve}};
}

json dimension_json(const DimensionEstimate<double>& est) {
    return {{"slope", est.slope}, {"intercept", est.intercept}, {"r_squared", est.r_squared},
            {"scales", est.scales}, {"counts", est.counts}};
}

int cmd_map(const Invocation& inv, std::ostream& err) {
    const Experiment ex = load_experiment(inv);
    const BoundaryCurve curve = curve_from(ex.config);
    const json& start = config_field(ex.config, "start");
    const PhasePoint p = make_phase_point(curve, config_value<double>(start, "t", 0.0),
                                          config_value<double>(start, "theta", 0.0));
    const int steps = config_value<int>(ex.config, "steps", 1);

    std::vector<Shot> shots;
    try {
        shots = trace(curve, p, steps);
    } catch (const GrazingIntersection& e) {
        err << "numerical failure at step " << e.step().value_or(0) << ": " << e.what() << '\n';
        return kExitNumerical;
    }
    std::ostringstream csv;
    csv << "# config_digest=" << ex.digest << "\nstep,t,theta,chord\n";
    csv << 0 << ',' << format_number(p.t) << ',' << format_number(p.theta) << ',' << format_number(0.0) << '\n';
    for (std::size_t i = 0; i < shots.size(); ++i)
        csv << i + 1 << ',' << format_number(shots[i].next.t) << ',' << format_number(shots[i].next.theta) << ','
            << format_number(shots[i].chord) << '\n';
    write_text_file(ex.out, csv.str());
    return kExitOk;
}

int cmd_orbits(const Invocation& inv) {
    const Experiment ex = load_experiment(inv);
    const BoundaryCurve curve = curve_from(ex.config);
    const int n_seeds = config_value<int>(ex.config, "n_seeds", 64);
    const auto seed = config_value<std::uint64_t>(ex.config, "seed", 1);

    FinderOptions options;
    options.threads = ex.threads;
    const auto orbits = find_period3(curve, n_seeds, seed, options);

    std::vector<json> entries(orbits.size());
    parallel_for(orbits.size(), ex.threads, [&](std::size_t i) {
        const OrbitTriple& o = orbits[i];
        auto guarded = [](auto&& f) -> json {
            try {
                return number_or_null(f());
            } catch (const NumericalError&) {
                return nullptr;
            }
        };
        entries[i] = {{"t", o.t},
                      {"theta", o.theta},
                      {"perimeter", o.perimeter},
                      {"classification", std::string(to_string(o.classification))},
                      {"gradient_norm", o.gradient_norm},
                      {"dt3_defect", guarded([&] { return dt3_defect(curve, o.phase(0)); })},
                      {"wojtkowski_residual", wojtkowski_residual(curve, o)},
                      {"fermat_defect", guarded([&] { return fermat_defect(curve, o); })}};
    });
    const json report = {{"config_digest", ex.digest}, {"orbits", entries}};
    write_text_file(ex.out, report.dump(2) + "\n");
    return kExitOk;
}

AnalysisOptions analysis_options(const json& config) {
    AnalysisOptions a;
    a.s = config_value<double>(config, "s", a.s);
    a.threshold = config_value<double>(config, "threshold", a.threshold);
    a.eta_grid = config_value<std::vector<double>>(config, "eta_grid", a.eta_grid);
    a.tangent_points = config_value<int>(config, "tangent_points", a.tangent_points);
    if (config.contains("n_scales")) a.n_scales = config_value<int>(config, "n_scales", 4);
    return a;
}

int cmd_p3(const Invocation& inv, std::ostream& err) {
    const Experiment ex = load_experiment(inv);
    const BoundaryCurve curve = curve_from(ex.config);
    SampleOptions options;
    options.threads = ex.threads;
    const auto cloud = sample_p3(curve, config_value<int>(ex.config, "grid_t", 128),
                                 config_value<int>(ex.config, "grid_theta", 128),
                                 config_value<double>(ex.config, "tol", 1e-9), options);

    std::ostringstream csv;
    write_cloud_csv(csv, cloud, "t_scaled", "theta", ex.digest);
    write_text_file(ex.out, csv.str());

    json analysis = analyze_cloud(cloud, analysis_options(ex.config));
    analysis["config_digest"] = ex.digest;
    if (analysis.contains("warning")) err << "warning: " << analysis["warning"].get<std::string>() << '\n';
    write_text_file(ex.out + ".json", analysis.dump(2) + "\n");
    return kExitOk;
}

int cmd_fractal(const Invocation& inv) {
    if (inv.fixture) {
        if (!inv.out) throw DomainError("--make-fixture needs --out");
        const auto seed = inv.seed.value_or(1);
        const PointCloud<double> cloud = (*inv.fixture == "segment") ? segment_fixture<double>(10000, seed)
                                                                     : cantor_dust<double>(7);
        std::vector<Eigen::Vector2d> pts;
        for (Eigen::Index i = 0; i < cloud.size(); ++i) pts.emplace_back(cloud.point(i));
        const json args = {{"fixture", *inv.fixture}, {"seed", seed}};
        std::ostringstream csv;
        write_cloud_csv(csv, pts, "x", "y", digest_hex(args.dump()));
        write_text_file(*inv.out, csv.str());
        return kExitOk;
    }

    const Experiment ex = load_experiment(inv);
    const json& input = config_field(ex.config, "input");
    if (!input.is_string()) throw DomainError("config: 'input' must be a path");
    const auto path = input.get<std::string>();
    const PointCloud<double> cloud(read_cloud_csv_file(path), path);
    const double s = config_value<double>(ex.config, "s", 1.0);
    const int n_scales = config_value<int>(ex.config, "n_scales", 6);

    json report = {{"config_digest", ex.digest}, {"points", cloud.size()}};
    report["dimension"] = dimension_json(box_dimension(cloud, n_scales));

    const auto radii = ex.config.contains("radii") ? config_value<std::vector<double>>(ex.config, "radii", {})
                                                   : default_radii(cloud);
    const auto eta_grid = config_value<std::vector<double>>(ex.config, "eta_grid", default_eta_grid<double>());
    const double threshold = config_value<double>(ex.config, "threshold", 0.05);
    json reports = json::array();
    for (const auto& xy : config_value<std::vector<std::vector<double>>>(ex.config, "points", {})) {
        if (xy.size() != 2) throw DomainError("config: each entry of 'points' must be [x, y]");
        const Eigen::Vector2d p(xy[0], xy[1]);
        const auto dens = density(cloud, p, s, radii);
        json entry = {{"point", xy}, {"density", {{"lower", dens.lower}, {"upper", dens.upper}}}};
        if (ex.config.contains("angular")) {
            const json& ang = ex.config.at("angular");
            const double gamma = config_value<double>(ang, "gamma", 0.0);
            const double eta = config_value<double>(ang, "eta", 0.1);
            entry["angular_density"] = {{"gamma", gamma}, {"eta", eta},
                                        {"value", angular_density(cloud, p, s, gamma, eta, radii)}};
        }
        entry["tangent"] = tangent_json(p, tangent_test(cloud, p, s, eta_grid, radii, threshold));
        reports.push_back(entry);
    }
    report["radii"] = radii;
    report["reports"] = reports;
    report["normalization"] = {{"density", "mu(B(p,r)) / (2r)^s"},
                               {"tangent", "complement mass / ball mass"},
                               {"factor_2_pow_s", std::pow(2.0, s)}};
    write_text_file(ex.out, report.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

json analyze_cloud(const std::vector<Eigen::Vector2d>& points, const AnalysisOptions& options) {
    json analysis = {{"points", points.size()}};
    if (points.size() < 100) {
        analysis["isolated"] = true;
        analysis["warning"] = "cloud has " + std::to_string(points.size()) +
                              " points (< 100); treated as isolated points, dimension analysis skipped";
        analysis["dimension"] = nullptr;
        analysis["tangent"] = nullptr;
        return analysis;
    }
    analysis["isolated"] = false;
    const PointCloud<double> cloud(points, "p3");
    const int n_scales = options.n_scales.value_or(suggest_scale_count(cloud));
    analysis["dimension"] = dimension_json(box_dimension(cloud, n_scales));

    const auto radii = default_radii(cloud);
    const Eigen::Index n = cloud.size();
    const Eigen::Index samples = std::min<Eigen::Index>(options.tangent_points, n);
    json reports = json::array();
    int with_tangent = 0;
    for (Eigen::Index k = 0; k < samples; ++k) {
        const Eigen::Vector2d p = cloud.point(k * n / samples);
        const auto report = tangent_test(cloud, p, options.s, options.eta_grid, radii, options.threshold);
        with_tangent += report.has_tangent ? 1 : 0;
        reports.push_back(tangent_json(p, report));
    }
    analysis["tangent"] = {{"sampled", samples},
                           {"with_tangent", with_tangent},
                           {"s", options.s},
                           {"threshold", options.threshold},
                           {"eta_grid", options.eta_grid},
                           {"radii", radii},
                           {"reports", reports}};
    analysis["normalization"] = {{"density", "mu(B(p,r)) / (2r)^s"},
                                 {"tangent", "complement mass / ball mass"},
                                 {"factor_2_pow_s", std::pow(2.0, options.s)}};
    return analysis;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"blab: period-3 billiard orbits and fractal estimators"};
    app.require_subcommand(1);
    Invocation inv;

    auto add_common = [&inv](CLI::App* sub, bool config_required) {
        auto* cfg = sub->add_option("--config,-c", inv.config_path, "Experiment JSON file");
        if (config_required) cfg->required();
        sub->add_option("--out,-o", inv.out, "Output path (overrides the config)");
        sub->add_option("--seed", inv.seed, "RNG seed (overrides the config)");
        sub->add_option("--threads", inv.threads, "Worker threads (default: BLAB_THREADS or all cores)")
            ->check(CLI::PositiveNumber);
    };
    auto* map = app.add_subcommand("map", "Trace an orbit segment to CSV");
    add_common(map, true);
    auto* orbits = app.add_subcommand("orbits", "Find period-3 orbits and report diagnostics");
    add_common(orbits, true);
    auto* p3 = app.add_subcommand("p3", "Sample the period-3 set and analyse it");
    add_common(p3, true);
    auto* fractal = app.add_subcommand("fractal", "Analyse a point cloud CSV");
    add_common(fractal, false);
    fractal->add_option("--input", inv.input, "Cloud CSV (overrides the config)");
    fractal->add_option("--make-fixture", inv.fixture, "Write a fixture cloud instead")
        ->check(CLI::IsMember({"segment", "cantor"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (map->parsed()) return cmd_map(inv, err);
        if (orbits->parsed()) return cmd_orbits(inv);
        if (p3->parsed()) return cmd_p3(inv, err);
        if (fractal->parsed()) {
            if (!inv.fixture && inv.config_path.empty()) throw DomainError("fractal needs --config or --make-fixture");
            return cmd_fractal(inv);
        }
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace blab
