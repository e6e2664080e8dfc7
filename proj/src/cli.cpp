#include "spacelike/cli.hpp"

#include "spacelike/collapse.hpp"
#include "spacelike/config.hpp"
#include "spacelike/diagram.hpp"
#include "spacelike/errors.hpp"
#include "spacelike/quantum.hpp"
#include "spacelike/scenario.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

namespace spacelike::cli {

namespace {

constexpr int kOk = 0;
constexpr int kInconsistent = 1;
constexpr int kUsage = 2;
constexpr int kGeometry = 3;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string axis_text(const Vec3& v) { return "(" + num(v.x) + "," + num(v.y) + "," + num(v.z) + ")"; }

[[noreturn]] void usage(const std::string& what) {
    throw ConfigError(ConfigError::Kind::semantic, what, 0, "argument");
}

// "a:b:n" with n >= 1.
std::vector<double> parse_grid(const std::string& text, const char* name) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (c2 == std::string::npos) usage(std::string(name) + ": expected a:b:n, got '" + text + "'");
    const std::string parts[3] = {text.substr(0, c1), text.substr(c1 + 1, c2 - c1 - 1), text.substr(c2 + 1)};
    double ab[2];
    for (int i = 0; i < 2; ++i) {
        char* end = nullptr;
        ab[i] = std::strtod(parts[i].c_str(), &end);
        if (parts[i].empty() || end != parts[i].c_str() + parts[i].size() || !std::isfinite(ab[i])) {
            usage(std::string(name) + ": bad bound '" + parts[i] + "'");
        }
    }
    char* end = nullptr;
    const long n = std::strtol(parts[2].c_str(), &end, 10);
    if (parts[2].empty() || end != parts[2].c_str() + parts[2].size() || n < 1) {
        usage(std::string(name) + ": point count must be a positive integer");
    }
    return scenario::linspace(ab[0], ab[1], static_cast<std::size_t>(n));
}

std::array<Vec3, 4> parse_bell_axes(const std::string& text) {
    if (text == "optimal") return quantum::optimal_chsh_axes();
    if (text == "equal") {
        const Vec3 z{0.0, 0.0, 1.0};
        return {z, z, z, z};
    }
    // Same grammar as the config file's axes key.
    try {
        const auto cfg = scenario::parse_config("[source]\nmode = lightlike\n[detector.A]\narrival = 0\naxes = " +
                                                text + "\n[detector.B]\narrival = 0\n");
        const auto& axes = cfg.detector_a.axes;
        if (axes.size() != 4) usage("--axes: expected four vectors a, a', b, b'");
        return {axes[0], axes[1], axes[2], axes[3]};
    } catch (const ConfigError& e) {
        usage(std::string("--axes: ") + e.what());
    }
}

std::uint64_t pick_seed(const std::optional<std::uint64_t>& flag, const scenario::ScenarioConfig* cfg) {
    if (flag) return *flag;
    if (cfg) return scenario::resolve_seed(*cfg);
    scenario::ScenarioConfig empty;
    return scenario::resolve_seed(empty);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) usage("cannot write '" + path.string() + "'");
    f << text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collapse-hypersurface simulator for two spacelike separated spin measurements"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::uint64_t max_log = 100;
    auto* simulate = app.add_subcommand("simulate", "run trials and print logs and ensemble statistics");
    simulate->add_option("--config", config_path, "scenario config file")->required();
    simulate->add_option("--trials", trials, "override run.trials");
    simulate->add_option("--seed", seed, "root seed (default: config, then SIM_SEED, then 1)");
    simulate->add_option("--out", out_path, "output directory for trials.log, stats.txt and config.txt");
    simulate->add_option("--max-log-trials", max_log, "number of trials written to the log")->capture_default_str();

    std::string policy_text = "blc";
    std::string zeta_grid = "0.1:3:30";
    std::string time_grid = "-2:2:40";
    auto* check = app.add_subcommand("check", "frame-consistency sweep of a collapse policy");
    check->add_option("--policy", policy_text, "inst | plane:<slope> | blc")->capture_default_str();
    check->add_option("--zeta-grid", zeta_grid, "rapidity grid a:b:n")->capture_default_str();
    check->add_option("--time-grid", time_grid, "decision time grid a:b:n")->capture_default_str();

    std::string bell_axes = "optimal";
    std::uint64_t bell_trials = 100000;
    auto* bell = app.add_subcommand("bell", "CHSH estimate for the singlet");
    bell->add_option("--axes", bell_axes, "optimal | equal | '(a), (a'), (b), (b')'")->capture_default_str();
    bell->add_option("--trials", bell_trials, "trial count")->capture_default_str();
    bell->add_option("--seed", seed, "root seed (default: SIM_SEED, then 1)");

    std::string frame = "A";
    auto* diagram = app.add_subcommand("diagram", "SVG spacetime diagram of a scenario");
    diagram->add_option("--config", config_path, "scenario config file")->required();
    diagram->add_option("--frame", frame, "A | B | zeta:<v>")->capture_default_str();
    diagram->add_option("--out", out_path, "SVG file (default: standard output)");

    auto* schema = app.add_subcommand("schema", "print the config key schema as JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*simulate) {
            auto cfg = scenario::load_config(config_path);
            if (trials) {
                if (*trials < 1) usage("--trials must be >= 1");
                cfg.trials = *trials;
            }
            const std::uint64_t root = pick_seed(seed, &cfg);
            const auto geometry = scenario::prepare_geometry(cfg);
            std::string log;
            for (std::uint64_t i = 0; i < std::min(cfg.trials, max_log); ++i) {
                log += scenario::run_trial(cfg, geometry, root, i).format(cfg.report_frames);
            }
            const std::string stats = "seed\t" + std::to_string(root) + "\n" +
                                      scenario::run_ensemble(cfg, root).format();
            if (out_path.empty()) {
                out << log << stats;
            } else {
                const std::filesystem::path dir(out_path);
                std::filesystem::create_directories(dir);
                write_file(dir / "trials.log", log);
                write_file(dir / "stats.txt", stats);
                write_file(dir / "config.txt", scenario::dump_config(cfg));
                out << "wrote " << (dir / "trials.log").string() << ", " << (dir / "stats.txt").string() << "\n";
            }
            return kOk;
        }
        if (*check) {
            collapse::CollapsePolicy policy;
            try {
                policy = collapse::parse_policy(policy_text);
                policy.validate();
            } catch (const DomainError& e) {
                usage(std::string("--policy: ") + e.what());
            }
            const auto zetas = parse_grid(zeta_grid, "--zeta-grid");
            const auto times = parse_grid(time_grid, "--time-grid");
            const auto report = scenario::consistency_report({policy}, zetas, times);
            out << report.format();
            const auto& v = report.verdicts.front();
            if (!v.consistent()) {
                double first_zeta = v.first_violation ? v.first_violation->zeta : INFINITY;
                for (const auto& c : v.scan.cells) {
                    if (!c.consistent) first_zeta = std::min(first_zeta, c.zeta);
                }
                out << "first failing zeta\t" << num(first_zeta) << "\n";
            }
            return v.consistent() ? kOk : kInconsistent;
        }
        if (*bell) {
            if (bell_trials < 1) usage("--trials must be >= 1");
            const auto axes = parse_bell_axes(bell_axes);
            const std::uint64_t root = pick_seed(seed, nullptr);
            const auto r = quantum::chsh_value({axes[0], axes[1]}, {axes[2], axes[3]}, bell_trials, root);
            out << "axes\ta=" << axis_text(axes[0]) << " a'=" << axis_text(axes[1]) << " b=" << axis_text(axes[2])
                << " b'=" << axis_text(axes[3]) << "\n";
            out << "trials\t" << bell_trials << "\nseed\t" << root << "\n";
            const char* names[2][2] = {{"E(a,b)", "E(a,b')"}, {"E(a',b)", "E(a',b')"}};
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    out << names[i][j] << "\t" << num(r.correlator[i][j]) << "\tanalytic " << num(r.correlator_analytic[i][j])
                        << "\tn=" << r.samples[i][j] << "\n";
                }
            }
            out << "estimate\t" << num(r.estimate) << "\n";
            out << "analytic\t" << num(r.analytic) << "\n";
            out << "lhv_bound\t2\n";
            out << "violation_margin\t" << num(std::abs(r.estimate) - 2.0) << "\n";
            return kOk;
        }
        if (*diagram) {
            const auto cfg = scenario::load_config(config_path);
            const double zeta = diagram::parse_frame(frame, cfg);
            const std::string svg = diagram::render_svg(diagram::build_diagram(cfg, zeta));
            if (out_path.empty()) {
                out << svg;
            } else {
                write_file(out_path, svg);
            }
            return kOk;
        }
        if (*schema) {
            out << scenario::schema_json();
            return kOk;
        }
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return kUsage;
    } catch (const GeometryError& e) {
        err << "geometry error: " << e.what() << "\n";
        return kGeometry;
    } catch (const DomainError& e) {
        err << "domain error: " << e.what() << "\n";
        return kUsage;
    } catch (const RangeError& e) {
        err << "range error: " << e.what() << "\n";
        return kGeometry;
    }
    return kUsage;
}

}  // namespace spacelike::cli
