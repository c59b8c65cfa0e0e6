#include "dhc/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dhc/bloch.hpp"
#include "dhc/csv.hpp"
#include "dhc/error.hpp"
#include "dhc/gauge.hpp"
#include "dhc/oracle.hpp"
#include "dhc/quadratic.hpp"
#include "dhc/thresholds.hpp"

#ifndef DHC_VERSION
#define DHC_VERSION "unknown"
#endif

namespace dhc::cli {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(Command c) {
    switch (c) {
        case Command::spectrum: return "spectrum";
        case Command::bloch_scan: return "bloch-scan";
        case Command::ep_ring: return "ep-ring";
        case Command::pt_scan: return "pt-scan";
        case Command::dynamics: return "dynamics";
        case Command::ness_count: return "ness-count";
        case Command::verify: return "verify";
    }
    return "?";
}

const char* to_string(GaugeChoice g) {
    switch (g) {
        case GaugeChoice::uniform: return "uniform";
        case GaugeChoice::from_file: return "from-file";
        case GaugeChoice::ness_representative: return "ness-representative";
    }
    return "?";
}

double RunConfig::gamma() const {
    if (gamma_is_grid || gammas.size() != 1) throw ConfigError(std::string(to_string(command)) + " needs a single --gamma value");
    return gammas.front();
}

namespace {

double parse_number(const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) throw ConfigError("not a finite number: '" + s + "'");
    return v;
}

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw ConfigError(std::string(name) + " must be finite");
}

}  // namespace

std::vector<double> parse_gamma(const std::string& text, bool& is_grid) {
    if (text.empty()) throw ConfigError("empty gamma value");
    const auto c1 = text.find(':');
    if (c1 == std::string::npos) {
        is_grid = false;
        const double g = parse_number(text);
        if (g < 0.0) throw ConfigError("gamma must be non-negative");
        return {g};
    }
    const auto c2 = text.find(':', c1 + 1);
    if (c2 == std::string::npos || text.find(':', c2 + 1) != std::string::npos)
        throw ConfigError("gamma grid must be start:stop:step, got '" + text + "'");
    is_grid = true;
    const double start = parse_number(text.substr(0, c1));
    const double stop = parse_number(text.substr(c1 + 1, c2 - c1 - 1));
    const double step = parse_number(text.substr(c2 + 1));
    if (start < 0.0) throw ConfigError("gamma grid must start at a non-negative value");
    return make_grid(start, stop, step);
}

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    RunConfig cfg;
    CLI::App app{"Dissipative Yao-Lee spin-orbital model: spectra, thresholds, exceptional rings, oracles", "dhc"};
    app.set_config("--config", "", "INI file with flag=value lines; command-line flags take precedence");
    app.set_version_flag("--version", DHC_VERSION);

    int L = 0, L1 = 0, L2 = 0;
    bool open = false;
    std::string gamma_text, grid_text, gauge = "uniform", out_dir;
    app.add_option("--L", L, "Linear size (sets L1 = L2)");
    app.add_option("--L1", L1, "Unit cells along a1");
    app.add_option("--L2", L2, "Unit cells along a2");
    app.add_flag("--open", open, "Open instead of periodic boundaries");
    app.add_option("--J", cfg.J, "Coupling J");
    app.add_option("--gamma", gamma_text, "Dissipation strength, or a start:stop:step grid");
    app.add_option("--gamma-grid", grid_text, "Grid start:stop:step (endpoints inclusive within 1e-12)");
    app.add_option("--gauge", gauge, "uniform | from-file | ness-representative");
    app.add_option("--gauge-file", cfg.gauge_file, "JSON gauge ({\"u\",...}) or flux ({\"W\",...}) document");
    app.add_option("--out", out_dir, "Output directory (DHC_OUT overrides)");
    app.add_option("--threads", cfg.threads, "Worker threads for gamma sweeps");
    app.add_option("--tol-class", cfg.tol_class, "Relative tolerance for mode classification");
    app.add_option("--precision", cfg.precision, "Bisection width for thresholds");
    app.add_option("--seed", cfg.seed, "Seed for randomized checks");
    app.add_option("--resolution", cfg.resolution, "bloch-scan: points per axis");
    app.add_option("--rays", cfg.rays, "ep-ring: number of rays from Gamma");
    app.add_option("--method", cfg.method, "pt-scan: momentum | real");
    app.add_option("--t-max", cfg.t_max, "dynamics: final time");
    app.add_option("--dt", cfg.dt, "dynamics: time step");
    app.add_option("--envelope", cfg.envelope, "dynamics: per-site | total");
    app.add_option("--sites", cfg.sites, "verify: number of oracle sites (1-3)");

    const std::pair<const char*, Command> commands[] = {
        {"spectrum", Command::spectrum},     {"bloch-scan", Command::bloch_scan}, {"ep-ring", Command::ep_ring},
        {"pt-scan", Command::pt_scan},       {"dynamics", Command::dynamics},     {"ness-count", Command::ness_count},
        {"verify", Command::verify},
    };
    const char* help[] = {"Real-space eigenvalues of one gauge sector",
                          "Band gap over the Brillouin zone",
                          "Exceptional ring around Gamma",
                          "PT-broken fraction versus gamma and the two thresholds",
                          "Gamma-mode magnetization form",
                          "Exact number of steady-state sectors",
                          "Brute-force oracle checks"};
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < std::size(commands); ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->fallthrough();
        subs.push_back(sub);
    }
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::CallForVersion& e) {
        out << DHC_VERSION << '\n';
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw ConfigError(e.what());
    }

    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) cfg.command = commands[i].second;

    const bool has_L = app.count("--L") > 0, has_L1 = app.count("--L1") > 0, has_L2 = app.count("--L2") > 0;
    if ((has_L && L < 1) || (has_L1 && L1 < 1) || (has_L2 && L2 < 1)) throw ConfigError("lattice sizes must be at least 1");
    if (has_L && (has_L1 || has_L2)) throw ConfigError("give either --L or --L1/--L2");
    if (has_L) cfg.lattice.L1 = cfg.lattice.L2 = L;
    if (has_L1 || has_L2) {
        cfg.lattice.L1 = has_L1 ? L1 : L2;
        cfg.lattice.L2 = has_L2 ? L2 : L1;
    }
    cfg.lattice.boundary = open ? Boundary::open : Boundary::periodic;

    if (!gamma_text.empty() && !grid_text.empty()) throw ConfigError("give either --gamma or --gamma-grid");
    if (!grid_text.empty()) {
        cfg.gammas = parse_gamma(grid_text, cfg.gamma_is_grid);
        if (!cfg.gamma_is_grid) throw ConfigError("--gamma-grid needs start:stop:step");
        cfg.gamma_text = grid_text;
    } else if (!gamma_text.empty()) {
        cfg.gammas = parse_gamma(gamma_text, cfg.gamma_is_grid);
        cfg.gamma_text = gamma_text;
    }

    if (gauge == "uniform")
        cfg.gauge = GaugeChoice::uniform;
    else if (gauge == "from-file")
        cfg.gauge = GaugeChoice::from_file;
    else if (gauge == "ness-representative")
        cfg.gauge = GaugeChoice::ness_representative;
    else
        throw ConfigError("unknown --gauge '" + gauge + "'");
    if (!cfg.gauge_file.empty() && gauge == "uniform") cfg.gauge = GaugeChoice::from_file;
    if (cfg.gauge == GaugeChoice::from_file && cfg.gauge_file.empty()) throw ConfigError("--gauge from-file needs --gauge-file");

    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (const char* env = std::getenv("DHC_OUT"); env && *env) cfg.output_dir = env;

    require_finite(cfg.J, "--J");
    require_finite(cfg.tol_class, "--tol-class");
    require_finite(cfg.precision, "--precision");
    require_finite(cfg.t_max, "--t-max");
    require_finite(cfg.dt, "--dt");
    if (!(cfg.tol_class > 0.0)) throw ConfigError("--tol-class must be positive");
    if (!(cfg.precision > 0.0)) throw ConfigError("--precision must be positive");
    if (cfg.threads == 0) throw ConfigError("--threads must be at least 1");
    if (cfg.method != "momentum" && cfg.method != "real") throw ConfigError("--method must be momentum or real");
    if (cfg.envelope != "per-site" && cfg.envelope != "total") throw ConfigError("--envelope must be per-site or total");
    return cfg;
}

void write_atomic(const std::string& path, const std::string& contents) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot write " + tmp.string());
        os << contents;
        os.flush();
        if (!os) throw ConfigError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp);
        throw ConfigError("cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

class Artifacts {
public:
    explicit Artifacts(std::string dir) : dir_(std::move(dir)) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw ConfigError("output directory is not writable: " + dir_);
    }

    void write(const std::string& name, const std::string& contents, const std::string& kind) {
        write_atomic((fs::path(dir_) / name).string(), contents);
        list_.push_back({{"file", name}, {"kind", kind}});
    }

    const json& list() const { return list_; }
    const std::string& dir() const { return dir_; }

private:
    std::string dir_;
    json list_ = json::array();
};

GaugeConfig select_gauge(const RunConfig& cfg, const Lattice& lattice) {
    switch (cfg.gauge) {
        case GaugeChoice::uniform: return GaugeConfig::uniform(lattice);
        case GaugeChoice::from_file: {
            GaugeConfig g = load_gauge(lattice, read_file(cfg.gauge_file));
            validate(lattice, g);
            return g;
        }
        case GaugeChoice::ness_representative: return SectorEnumeration(lattice, SectorFilter::ness_only).gauge_at(0);
    }
    throw ConfigError("unknown gauge choice");
}

json config_json(const RunConfig& c) {
    return {{"command", to_string(c.command)},
            {"L1", c.lattice.L1},
            {"L2", c.lattice.L2},
            {"boundary", c.lattice.boundary == Boundary::periodic ? "periodic" : "open"},
            {"J", c.J},
            {"gamma", c.gamma_text},
            {"gauge", to_string(c.gauge)},
            {"gauge_file", c.gauge_file},
            {"threads", c.threads},
            {"tol_class", c.tol_class},
            {"precision", c.precision},
            {"seed", c.seed},
            {"resolution", c.resolution},
            {"rays", c.rays},
            {"method", c.method},
            {"t_max", c.t_max},
            {"dt", c.dt},
            {"envelope", c.envelope},
            {"sites", c.sites}};
}

int cmd_spectrum(const RunConfig& cfg, Artifacts& art) {
    const Lattice lattice(cfg.lattice);
    const GaugeConfig g = select_gauge(cfg, lattice);
    const auto m = build_matrix(lattice, g, cfg.J, cfg.gamma());
    EigenOptions eo;
    eo.tol_class = cfg.tol_class;
    const auto s = eigendecompose(m, eo);
    std::ostringstream csv;
    write_spectrum_csv(csv, s);
    art.write("spectrum.csv", csv.str(), "spectrum");
    const auto pt = classify_pt(s);
    json summary = {{"num_modes", s.eigenvalues.size()},
                    {"broken", pt.counts.broken},
                    {"zero_modes", pt.zero_modes},
                    {"fraction_broken", pt.fraction_broken},
                    {"phase", to_string(pt.phase)},
                    {"classification_tol", s.tol},
                    {"liouvillian_shift", liouvillian_shift(m).real()},
                    {"liouvillian_gap", liouvillian_gap(s, liouvillian_shift(m))}};
    art.write("spectrum_summary.json", summary.dump(2) + "\n", "summary");
    return 0;
}

int cmd_bloch_scan(const RunConfig& cfg, Artifacts& art) {
    const auto rows = bloch::bz_scan(cfg.resolution, cfg.J, cfg.gamma());
    std::ostringstream csv;
    bloch::write_scan_csv(csv, rows);
    art.write("bz_scan.csv", csv.str(), "bz_scan");
    return 0;
}

int cmd_ep_ring(const RunConfig& cfg, Artifacts& art) {
    const auto ring = bloch::ep_locus(cfg.J, cfg.gamma(), cfg.rays);
    std::ostringstream csv;
    bloch::write_ring_csv(csv, ring);
    art.write("ep_ring.csv", csv.str(), "ep_ring");
    double residual = 0.0, sigma = 0.0;
    for (const auto& p : ring.points) {
        residual = std::max(residual, p.residual);
        sigma = std::max(sigma, p.sigma_min);
    }
    json summary = {{"points", ring.points.size()},
                    {"max_residual", residual},
                    {"max_sigma_min", sigma},
                    {"winding_around_gamma", bloch::winding_number(ring, 0.0, 0.0)}};
    art.write("ep_ring_summary.json", summary.dump(2) + "\n", "summary");
    return 0;
}

int cmd_pt_scan(const RunConfig& cfg, Artifacts& art) {
    if (cfg.gammas.empty()) throw ConfigError("pt-scan needs --gamma start:stop:step");
    ThresholdOptions opts;
    opts.precision = cfg.precision;
    opts.threads = cfg.threads;
    ThresholdScan scan;
    if (cfg.method == "momentum") {
        if (cfg.gauge != GaugeChoice::uniform) throw ConfigError("momentum pt-scan is only defined for the uniform gauge");
        scan = bloch::scan_thresholds(cfg.lattice, cfg.J, cfg.gammas, opts);
    } else {
        const Lattice lattice(cfg.lattice);
        scan = scan_thresholds(lattice, select_gauge(cfg, lattice), cfg.J, cfg.gammas, opts, cfg.tol_class);
    }
    std::ostringstream csv;
    csv << "gamma,fraction_broken\n";
    for (std::size_t i = 0; i < scan.gammas.size(); ++i)
        csv << format_double(scan.gammas[i]) << ',' << format_double(scan.fractions[i]) << '\n';
    art.write("pt_curve.csv", csv.str(), "pt_curve");
    json t = {{"method", cfg.method},
              {"gamma_pt", optional_json(scan.gamma_pt)},
              {"gamma_star", optional_json(scan.gamma_star)},
              {"baseline_zero_modes", scan.baseline},
              {"monotone", scan.monotone},
              {"precision", cfg.precision}};
    if (cfg.lattice.boundary == Boundary::periodic) {
        const auto mt = bloch::mesh_thresholds(cfg.lattice, cfg.J);
        t["closed_form"] = {{"gamma_pt", optional_json(mt.gamma_pt)}, {"gamma_star", mt.gamma_star}};
    }
    art.write("thresholds.json", t.dump(2) + "\n", "thresholds");
    return 0;
}

int cmd_dynamics(const RunConfig& cfg, Artifacts& art) {
    if (!(cfg.dt > 0.0) || cfg.t_max < 0.0) throw ConfigError("dynamics needs dt > 0 and t-max >= 0");
    const auto steps = static_cast<std::size_t>(std::floor(cfg.t_max / cfg.dt + 1e-9));
    std::vector<double> t;
    for (std::size_t i = 0; i <= steps; ++i) t.push_back(static_cast<double>(i) * cfg.dt);
    const auto env = cfg.envelope == "total" ? bloch::Envelope::total : bloch::Envelope::per_site;
    const auto d = bloch::gamma_mode_dynamics(cfg.J, cfg.gamma(), t, cfg.lattice.num_sites(), env);
    std::ostringstream csv;
    csv << "t,M\n";
    for (const auto& s : d.samples) csv << format_double(s.t) << ',' << format_double(s.M) << '\n';
    art.write("dynamics.csv", csv.str(), "dynamics");
    json meta = {{"regime", d.at_ep ? "exceptional" : d.oscillating ? "oscillating" : "decaying"},
                 {"frequency", d.frequency},
                 {"decay_rate", d.decay_rate},
                 {"envelope", cfg.envelope},
                 {"c_L_per_site", d.c_L_per_site},
                 {"c_L_total", d.c_L_total},
                 {"num_sites", cfg.lattice.num_sites()},
                 {"note", "functional form only; amplitude and phase are not modeled"}};
    art.write("dynamics.json", meta.dump(2) + "\n", "metadata");
    return 0;
}

int cmd_ness_count(const RunConfig& cfg, Artifacts& art) {
    const auto count = count_ness(cfg.lattice);
    json out = {{"lattice", describe(cfg.lattice)},
                {"num_sites", cfg.lattice.num_sites()},
                {"count", count.str()},
                {"log2", cfg.lattice.num_sites() / 2 + 1}};
    const Lattice lattice(cfg.lattice);
    try {
        const SectorEnumeration e(lattice, SectorFilter::ness_only);
        out["enumerated"] = std::to_string(e.size());
        out["enumeration_matches"] = boost::multiprecision::cpp_int(e.size()) == count;
    } catch (const NumericalError&) {
        out["enumerated"] = nullptr;
    }
    art.write("ness_count.json", out.dump(2) + "\n", "ness_count");
    if (out.contains("enumeration_matches") && !out["enumeration_matches"].get<bool>()) return 3;
    return 0;
}

int cmd_verify(const RunConfig& cfg, Artifacts& art) {
    const double gamma = cfg.gammas.empty() ? 0.4 : cfg.gamma();
    auto checks = oracle::run_verification(cfg.sites, cfg.J, gamma);

    // spectra must not depend on the gauge representative
    const Lattice lattice(LatticeSpec{2, 2, Boundary::periodic});
    std::mt19937_64 rng(cfg.seed);
    std::uniform_int_distribution<int> coin(0, 1);
    std::vector<Z2> lam(lattice.num_sites()), lam_t(lattice.num_sites());
    for (auto& x : lam) x = coin(rng) ? 1 : -1;
    for (auto& x : lam_t) x = coin(rng) ? 1 : -1;
    const GaugeConfig g0 = GaugeConfig::uniform(lattice);
    const GaugeConfig g1 = gauge_transform(lattice, g0, lam, lam_t);
    const auto s0 = eigendecompose(build_matrix(lattice, g0, cfg.J, gamma)).eigenvalues;
    const auto s1 = eigendecompose(build_matrix(lattice, g1, cfg.J, gamma)).eigenvalues;
    double worst = 0.0;
    for (std::size_t i = 0; i < s0.size(); ++i) worst = std::max(worst, std::abs(s0[i] - s1[i]));
    checks.push_back(oracle::make_check("gauge_invariance", worst, 1e-9));

    art.write("oracle_report.json", oracle::report_json(checks) + "\n", "oracle_report");
    for (const auto& c : checks)
        if (!c.pass) return 3;
    return 0;
}

}  // namespace

int run(const RunConfig& cfg, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    Artifacts art(cfg.output_dir);
    int code = 0;
    switch (cfg.command) {
        case Command::spectrum: code = cmd_spectrum(cfg, art); break;
        case Command::bloch_scan: code = cmd_bloch_scan(cfg, art); break;
        case Command::ep_ring: code = cmd_ep_ring(cfg, art); break;
        case Command::pt_scan: code = cmd_pt_scan(cfg, art); break;
        case Command::dynamics: code = cmd_dynamics(cfg, art); break;
        case Command::ness_count: code = cmd_ness_count(cfg, art); break;
        case Command::verify: code = cmd_verify(cfg, art); break;
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    json manifest = {{"version", DHC_VERSION},
                     {"config", config_json(cfg)},
                     {"wall_time_s", wall},
                     {"exit_code", code},
                     {"artifacts", art.list()}};
    write_atomic((fs::path(art.dir()) / "manifest.json").string(), manifest.dump(2) + "\n");
    log << to_string(cfg.command) << ": " << art.list().size() << " artifact(s) in " << art.dir() << '\n';
    return code;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    auto fail = [&](const char* kind, int code, const std::string& message) {
        json e = {{"error", {{"kind", kind}, {"exit_code", code}, {"message", message}}}};
        err << e.dump() << '\n';
        return code;
    };
    try {
        const auto cfg = parse_args(argc, argv, out);
        if (!cfg) return 0;
        const int code = run(*cfg, out);
        if (code == 3) return fail("oracle", 3, "one or more checks failed; see the report");
        return code;
    } catch (const Error& e) {
        const char* kind = e.kind() == ErrorKind::config ? "config" : e.kind() == ErrorKind::numerical ? "numerical" : "oracle";
        return fail(kind, e.exit_code(), e.what());
    } catch (const std::bad_alloc&) {
        return fail("numerical", 2, "out of memory");
    } catch (const std::exception& e) {
        return fail("config", 1, e.what());
    }
}

}  // namespace dhc::cli
