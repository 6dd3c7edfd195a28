#include "hopfloq/scenario.hpp"

#include <omp.h>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace hopfloq {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

DriveProtocol ScenarioConfig::drive() const {
    if (model == "piecewise") return PiecewiseDrive{mu1, mu2, t0, period};
    if (model == "harmonic") return HarmonicDrive{mu, omega};
    throw ConfigError("unknown model '" + model + "' (expected piecewise or harmonic)");
}

void ScenarioConfig::validate() const {
    validate_drive(drive());
    if (hopf_grid < 8) throw ConfigError("hopf_grid must be >= 8");
    if (strip_nx < 8) throw ConfigError("strip_nx must be >= 8");
    if (k2_points < 3) throw ConfigError("k2_points must be >= 3");
    if (threads < 1) throw ConfigError("threads must be >= 1");
    if (!(edge_weight_threshold > 0.0 && edge_weight_threshold < 1.0))
        throw ConfigError("edge_weight_threshold must be in (0,1)");
    if (!(edge_window_frac > 0.0 && edge_window_frac < 1.0))
        throw ConfigError("edge_window_frac must be in (0,1)");
}

std::vector<ScenarioConfig> builtin_scenarios() {
    ScenarioConfig e1t;
    e1t.name = "example1-trivial";
    e1t.model = "piecewise";
    e1t.mu1 = -10.0; e1t.mu2 = -5.0; e1t.t0 = 0.1; e1t.period = 1.0;

    ScenarioConfig e1n = e1t;
    e1n.name = "example1-nontrivial";
    e1n.mu2 = -2.0;

    ScenarioConfig e2t;
    e2t.name = "example2-trivial";
    e2t.model = "harmonic";
    e2t.mu = -10.0; e2t.omega = 12.0;

    ScenarioConfig e2n = e2t;
    e2n.name = "example2-nontrivial";
    e2n.mu = -2.0; e2n.omega = 4.0;

    return {e1t, e1n, e2t, e2n};
}

ScenarioConfig builtin_scenario(const std::string& name) {
    for (const auto& s : builtin_scenarios())
        if (s.name == name) return s;
    throw ConfigError("UnknownScenario: '" + name + "'");
}

void apply_config_entry(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
    auto num = [&]() {
        try {
            std::size_t pos = 0;
            const double v = std::stod(value, &pos);
            if (pos != value.size()) throw std::invalid_argument(value);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("config key '" + key + "': bad numeric value '" + value + "'");
        }
    };
    auto integer = [&]() {
        const double v = num();
        if (v != static_cast<int>(v)) throw ConfigError("config key '" + key + "' must be an integer");
        return static_cast<int>(v);
    };

    if (key == "scenario") cfg = builtin_scenario(value);
    else if (key == "name") cfg.name = value;
    else if (key == "model") cfg.model = value;
    else if (key == "mu1") cfg.mu1 = num();
    else if (key == "mu2") cfg.mu2 = num();
    else if (key == "t0") cfg.t0 = num();
    else if (key == "T") cfg.period = num();
    else if (key == "mu") cfg.mu = num();
    else if (key == "omega") cfg.omega = num();
    else if (key == "hopf_grid") cfg.hopf_grid = integer();
    else if (key == "strip_nx") cfg.strip_nx = integer();
    else if (key == "k2_points") cfg.k2_points = integer();
    else if (key == "threads") cfg.threads = integer();
    else if (key == "edge_weight_threshold") cfg.edge_weight_threshold = num();
    else if (key == "edge_window_frac") cfg.edge_window_frac = num();
    else if (key == "out_dir") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    ScenarioConfig cfg;
    cfg.name = fs::path(path).stem().string();
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos) return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = strip(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        apply_config_entry(cfg, strip(line.substr(0, eq)), strip(line.substr(eq + 1)));
    }
    return cfg;
}

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

namespace {

class Emitter {
  public:
    explicit Emitter(const fs::path& dir) : dir_(dir) { fs::create_directories(dir); }

    void write(const std::string& name, const std::string& content,
               std::map<std::string, std::string>& manifest) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        out.close();
        manifest[name] = fnv1a_hex(content);
    }

  private:
    fs::path dir_;
};

std::string curves_csv(const std::vector<PreimageCurve>& curves) {
    std::ostringstream s;
    s << "curve,point,k1,k2,alpha,w1,w2,w3\n";
    for (std::size_t c = 0; c < curves.size(); ++c)
        for (std::size_t p = 0; p < curves[c].points.size(); ++p) {
            const Vec3& v = curves[c].points[p];
            s << c << ',' << p << ',' << csv_double(v.x) << ',' << csv_double(v.y) << ','
              << csv_double(v.z) << ',' << curves[c].winding[0] << ','
              << curves[c].winding[1] << ',' << curves[c].winding[2] << '\n';
        }
    return s.str();
}

std::string spectrum_csv(const SpectrumTable& t) {
    std::ostringstream s;
    s << "k2,band,quasienergy,w_left,w_right\n";
    for (const auto& r : t.rows)
        s << csv_double(r.k2) << ',' << r.band << ',' << csv_double(r.quasienergy) << ','
          << csv_double(r.w_left) << ',' << csv_double(r.w_right) << '\n';
    return s.str();
}

std::string profile_csv(const EdgeProfile& p) {
    std::ostringstream s;
    s << "site,probability\n";
    for (std::size_t i = 0; i < p.probability.size(); ++i)
        s << i << ',' << csv_double(p.probability[i]) << '\n';
    return s.str();
}

json config_json(const ScenarioConfig& c) {
    json j;
    j["name"] = c.name;
    j["model"] = c.model;
    if (c.model == "piecewise") {
        j["mu1"] = c.mu1;
        j["mu2"] = c.mu2;
        j["t0"] = c.t0;
        j["T"] = c.period;
    } else {
        j["mu"] = c.mu;
        j["omega"] = c.omega;
    }
    j["hopf_grid"] = c.hopf_grid;
    j["strip_nx"] = c.strip_nx;
    j["k2_points"] = c.k2_points;
    j["threads"] = c.threads;
    j["edge_weight_threshold"] = c.edge_weight_threshold;
    j["edge_window_frac"] = c.edge_window_frac;
    return j;
}

}  // namespace

RunReport run_scenario(const ScenarioConfig& config) {
    RunReport report;
    report.config = config;
    config.validate();
    omp_set_num_threads(config.threads);

    Emitter emit{fs::path(config.out_dir)};
    const DriveProtocol drive = config.drive();
    const double T = drive_period(drive);

    using clock = std::chrono::steady_clock;
    auto timed = [&](const std::string& stage, auto&& fn) {
        const auto start = clock::now();
        fn();
        const double sec = std::chrono::duration<double>(clock::now() - start).count();
        report.timings.push_back({stage, sec});
    };

    std::vector<PreimageCurve> north, south;
    std::optional<SpectrumTable> spectrum;
    std::optional<EdgeProfile> prof0, prof_pi;

    try {
        PseudoSpinGrid grid, cgrid;
        timed("pseudospin_grid", [&] {
            grid = pseudospin_grid(drive, config.hopf_grid, config.hopf_grid,
                                   config.hopf_grid, Branch::Lower);
        });
        timed("hopf_invariant", [&] { report.topology = hopf_summary(grid); });
        timed("preimage_curves", [&] {
            // Offset sampling: both models pin the preimage curves inside the
            // sin k2 = 0 symmetry planes, where node-aligned faces degenerate.
            cgrid = pseudospin_grid(drive, config.hopf_grid, config.hopf_grid,
                                    config.hopf_grid, Branch::Lower, {}, kCurveGridOffset);
            north = preimage_curves(cgrid, Pole::North);
            south = preimage_curves(cgrid, Pole::South);
            emit.write("curves_north.csv", curves_csv(north), report.manifest);
            emit.write("curves_south.csv", curves_csv(south), report.manifest);
        });
        timed("linking_number", [&] {
            const double min_sep = 2.0 * kTwoPi / config.hopf_grid;
            auto attempt = [&](const std::vector<PreimageCurve>& n,
                              const std::vector<PreimageCurve>& s) {
                if (n.empty() || s.empty()) {
                    report.linking_skipped_reason = "empty preimage family";
                    return false;
                }
                try {
                    report.linking = family_linking_number(n, s, min_sep);
                    report.linking_skipped_reason.clear();
                    return true;
                } catch (const NonContractibleCurveError& e) {
                    report.linking_skipped_reason = e.what();
                } catch (const CurvesTooCloseError& e) {
                    report.linking_skipped_reason = e.what();
                }
                return false;
            };
            if (attempt(north, south)) return;
            // Linking is pole-independent; retry with the x poles if the
            // z-pole preimages come out unusable (net winding, or too close).
            const PseudoSpinGrid rot = rotate_field(
                cgrid, {Vec3{0, 0, 1}, Vec3{0, 1, 0}, Vec3{-1, 0, 0}});
            if (attempt(preimage_curves(rot, Pole::North),
                        preimage_curves(rot, Pole::South)))
                report.linking_poles = "x";
        });
        const double window = config.edge_window_frac * kPi / T;
        timed("strip_spectrum", [&] {
            // one pass: the per-column propagator also yields both profiles
            StripScanResult scan = strip_scan(drive, config.strip_nx, config.k2_points,
                                              window, config.edge_weight_threshold);
            spectrum = std::move(scan.spectrum);
            prof0 = std::move(scan.gap0);
            prof_pi = std::move(scan.gap_pi);
            emit.write("spectrum.csv", spectrum_csv(*spectrum), report.manifest);
        });
        timed("edge_modes", [&] {
            report.edge_modes_gap0 =
                static_cast<int>(edge_modes(*spectrum, 0.0, window,
                                            config.edge_weight_threshold).size());
            report.edge_modes_gap_pi =
                static_cast<int>(edge_modes(*spectrum, kPi / T, window,
                                            config.edge_weight_threshold).size());
        });
        timed("edge_profiles", [&] {
            if (prof0) {
                report.xi_gap0 = prof0->localization_length;
                emit.write("profile_gap0.csv", profile_csv(*prof0), report.manifest);
            }
            if (prof_pi)
                emit.write("profile_gapPi.csv", profile_csv(*prof_pi), report.manifest);
        });
        report.spectrum = std::move(spectrum);
    } catch (const std::exception& e) {
        report.error = e.what();
    }

    json j;
    j["scenario"] = config_json(config);
    j["topology"] = {
        {"hopf_value", report.topology.hopf_value},
        {"hopf_rounded", report.topology.hopf_rounded},
        {"chern_slices", report.topology.chern_slices},
        {"chern_slices_rounded", report.topology.chern_slices_rounded},
    };
    if (report.linking) {
        j["linking"] = {{"value", report.linking->value},
                        {"raw", report.linking->raw},
                        {"residual", report.linking->residual},
                        {"poles", report.linking_poles}};
    } else {
        j["linking"] = {{"skipped", report.linking_skipped_reason}};
    }
    j["edge_modes"] = {{"gap0", report.edge_modes_gap0}, {"gapPi", report.edge_modes_gap_pi}};
    if (report.xi_gap0) j["xi_gap0"] = *report.xi_gap0;
    json jt = json::object();
    for (const auto& t : report.timings) jt[t.stage] = t.seconds;
    j["timings"] = jt;
    j["manifest"] = report.manifest;
    if (!report.error.empty()) j["error"] = report.error;

    // summary hashes the data files; it is not part of its own manifest
    std::ofstream out(fs::path(config.out_dir) / "summary.json", std::ios::binary);
    out << j.dump(2) << '\n';
    return report;
}

std::string list_scenarios(const std::optional<std::string>& config_path) {
    std::ostringstream s;
    auto echo = [&](const ScenarioConfig& c) {
        s << c.name << ": model=" << c.model;
        if (c.model == "piecewise")
            s << " mu1=" << c.mu1 << " mu2=" << c.mu2 << " t0=" << c.t0 << " T=" << c.period;
        else
            s << " mu=" << c.mu << " omega=" << c.omega;
        s << '\n';
    };
    for (const auto& c : builtin_scenarios()) echo(c);
    if (config_path) echo(parse_config_file(*config_path));
    return s.str();
}

std::vector<SweepEntry> sweep(const ScenarioConfig& base, const std::string& parameter,
                              const std::vector<double>& values) {
    if (values.empty()) throw ConfigError("sweep: empty value list");
    const bool piecewise_param = parameter == "t0" || parameter == "mu2";
    const bool harmonic_param = parameter == "mu" || parameter == "omega";
    if (!piecewise_param && !harmonic_param)
        throw ConfigError("sweep: parameter must be one of t0, mu2, mu, omega");
    if (piecewise_param && base.model != "piecewise")
        throw ConfigError("sweep: parameter '" + parameter + "' needs the piecewise model");
    if (harmonic_param && base.model != "harmonic")
        throw ConfigError("sweep: parameter '" + parameter + "' needs the harmonic model");

    std::vector<SweepEntry> entries;
    for (std::size_t i = 0; i < values.size(); ++i) {
        ScenarioConfig c = base;
        if (parameter == "t0") c.t0 = values[i];
        else if (parameter == "mu2") c.mu2 = values[i];
        else if (parameter == "mu") c.mu = values[i];
        else c.omega = values[i];
        c.name = base.name + "-" + parameter + std::to_string(i);
        c.out_dir = (fs::path(base.out_dir) / ("sweep_" + parameter + "_" + std::to_string(i)))
                        .string();
        SweepEntry e;
        e.value = values[i];
        try {
            e.report = run_scenario(c);
        } catch (const std::exception& ex) {
            e.report.config = c;
            e.report.error = ex.what();
        }
        entries.push_back(std::move(e));
    }

    std::ostringstream s;
    s << "parameter,value,status,hopf_value,hopf_rounded,linking,edge_modes_gap0,"
         "edge_modes_gapPi,xi_gap0\n";
    for (const auto& e : entries) {
        s << parameter << ',' << csv_double(e.value) << ','
          << (e.report.ok() ? "ok" : "error") << ','
          << csv_double(e.report.topology.hopf_value) << ',' << e.report.topology.hopf_rounded
          << ',' << (e.report.linking ? std::to_string(e.report.linking->value) : "")
          << ',' << e.report.edge_modes_gap0 << ',' << e.report.edge_modes_gap_pi << ','
          << (e.report.xi_gap0 ? csv_double(*e.report.xi_gap0) : "") << '\n';
    }
    fs::create_directories(base.out_dir);
    std::ofstream out(fs::path(base.out_dir) / "sweep.csv", std::ios::binary);
    out << s.str();
    return entries;
}

}  // namespace hopfloq
