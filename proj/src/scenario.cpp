#include "spacelike/scenario.hpp"

#include "quadratic.hpp"
#include "spacelike/errors.hpp"
#include "spacelike/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace spacelike::scenario {

namespace {

enum Stream : std::uint64_t { kFirstOutcome = 4, kSecondOutcome = 5 };

constexpr double kResidualTol = 1e-9;

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::string complex_text(const quantum::Complex& z) {
    if (z.imag() == 0.0) return num(z.real() == 0.0 ? 0.0 : z.real());
    return num(z.real()) + (z.imag() < 0.0 ? "" : "+") + num(z.imag()) + "i";
}

std::string state_text(const quantum::StateVector& psi) {
    const auto amps = psi.canonical().amplitudes();
    std::string out = "[";
    for (std::size_t i = 0; i < amps.size(); ++i) out += (i ? "," : "") + complex_text(amps[i]);
    return out + "]";
}

std::string outcome_text(const quantum::Outcome& o) {
    const auto& a = o.axis;
    return "axis" + std::to_string(o.axis_index) + (o.sign > 0 ? "+" : "-") + " (" + num(a.x) + "," + num(a.y) +
           "," + num(a.z) + ")";
}

std::string decision_label(Side s) { return s == Side::A ? "A1" : "B2"; }

// Residuals of the two interval equations at (t, x).
std::array<double, 2> residuals(const Event& a1, const Event& b2, double ma, double mb, double t, double x) {
    return {(a1.t - t) * (a1.t - t) - (a1.x1 - x) * (a1.x1 - x) - ma,
            (b2.t - t) * (b2.t - t) - (b2.x1 - x) * (b2.x1 - x) - mb};
}

}  // namespace

Event derive_source(const Event& a1, const Event& b2, double tau_a, double tau_b) {
    if (!(tau_a >= 0.0) || !(tau_b >= 0.0)) throw DomainError("derive_source: proper times must be >= 0");
    const double ra2 = a1.x2 * a1.x2 + a1.x3 * a1.x3;
    const double rb2 = b2.x2 * b2.x2 + b2.x3 * b2.x3;
    const double ma = tau_a * tau_a + ra2;
    const double mb = tau_b * tau_b + rb2;

    // Difference of the two equations is linear: p t + q x = r.
    const double p = 2.0 * (b2.t - a1.t);
    const double q = 2.0 * (a1.x1 - b2.x1);
    const double r = ma - mb - a1.t * a1.t + a1.x1 * a1.x1 + b2.t * b2.t - b2.x1 * b2.x1;
    const double pq = p * p + q * q;
    if (pq < 1e-24) throw InfeasibleError("derive_source: A1 and B2 coincide in the (t, x1) plane");

    const double t0 = r * p / pq;
    const double x0 = r * q / pq;
    const double dt = -q;
    const double dx = p;
    const double ct = a1.t - t0;
    const double cx = a1.x1 - x0;
    const auto roots = detail::real_roots(dt * dt - dx * dx, -2.0 * (ct * dt - cx * dx), ct * ct - cx * cx - ma);

    std::optional<Event> best;
    for (double u : roots) {
        double t = t0 + u * dt;
        double x = x0 + u * dx;
        // Newton polish on the full 2x2 system.
        for (int i = 0; i < 4; ++i) {
            const auto f = residuals(a1, b2, ma, mb, t, x);
            if (std::abs(f[0]) < 1e-15 && std::abs(f[1]) < 1e-15) break;
            const double j11 = -2.0 * (a1.t - t), j12 = 2.0 * (a1.x1 - x);
            const double j21 = -2.0 * (b2.t - t), j22 = 2.0 * (b2.x1 - x);
            const double det = j11 * j22 - j12 * j21;
            if (std::abs(det) < 1e-14) break;
            t -= (f[0] * j22 - f[1] * j12) / det;
            x -= (j11 * f[1] - j21 * f[0]) / det;
        }
        const auto f = residuals(a1, b2, ma, mb, t, x);
        if (std::abs(f[0]) > kResidualTol || std::abs(f[1]) > kResidualTol) continue;
        if (!(t < a1.t) || !(t < b2.t)) continue;
        if (!best || t > best->t) best = Event{t, x, 0.0, 0.0};
    }
    if (!best) {
        throw InfeasibleError("derive_source: no source precedes both events with tau_A = " + num(tau_a) +
                              ", tau_B = " + num(tau_b));
    }
    return *best;
}

Event event_at_proper_time(const kinematics::Detector& d, double tau) {
    return kinematics::position_at(d.worldline, d.worldline.lab_time(tau));
}

Geometry prepare_geometry(const ScenarioConfig& cfg) {
    Geometry g;
    g.detector_a = cfg.detector_a;
    g.detector_b = cfg.detector_b;
    switch (cfg.source.mode) {
        case SourceMode::explicit_event: {
            g.source = cfg.source.event;
            g.detection_a = kinematics::signal_arrival(g.source, g.detector_a.worldline, cfg.source.speed_a, g.source.t);
            g.detection_b = kinematics::signal_arrival(g.source, g.detector_b.worldline, cfg.source.speed_b, g.source.t);
            break;
        }
        case SourceMode::derived:
        case SourceMode::lightlike: {
            g.detection_a = event_at_proper_time(g.detector_a, *cfg.arrival_a);
            g.detection_b = event_at_proper_time(g.detector_b, *cfg.arrival_b);
            const bool derived = cfg.source.mode == SourceMode::derived;
            g.source = derive_source(g.detection_a, g.detection_b, derived ? cfg.source.tau_a : 0.0,
                                     derived ? cfg.source.tau_b : 0.0);
            break;
        }
    }
    g.detector_a.t_start = g.detector_a.worldline.proper_time(g.detection_a.t);
    g.detector_b.t_start = g.detector_b.worldline.proper_time(g.detection_b.t);
    g.tau_a = kinematics::proper_time_between(g.source, g.detection_a);
    g.tau_b = kinematics::proper_time_between(g.source, g.detection_b);
    return g;
}

std::uint64_t resolve_seed(const ScenarioConfig& cfg) {
    if (cfg.seed) return *cfg.seed;
    if (const char* env = std::getenv("SIM_SEED"); env && *env) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*end == '\0' && env[0] != '-') return v;
        throw ConfigError(ConfigError::Kind::semantic, "SIM_SEED is not an unsigned integer", 0, "SIM_SEED");
    }
    return 1;
}

TrialLog run_trial(const ScenarioConfig& cfg, const Geometry& g, std::uint64_t root_seed, std::uint64_t index) {
    TrialLog log;
    log.index = index;
    log.seed = trial_seed(root_seed, index);
    log.policy = cfg.policy;
    log.geometry = g;

    try {
        log.schedule = ordering::schedule_decisions(g.detector_a, g.detector_b, g.tau_a, g.tau_b, log.seed);
        if (cfg.order != OrderMode::automatic) {
            const Side forced = cfg.order == OrderMode::a_first ? Side::A : Side::B;
            if (forced != log.schedule.first) {
                std::swap(log.schedule.tbar_first, log.schedule.tbar_second);
                log.schedule.first = forced;
            }
        }
        const Side first = log.schedule.first;
        const Side second = other(first);
        const double tbar_a = first == Side::A ? log.schedule.tbar_first : log.schedule.tbar_second;
        const double tbar_b = first == Side::B ? log.schedule.tbar_first : log.schedule.tbar_second;
        log.decision_a = event_at_proper_time(g.detector_a, tbar_a);
        log.decision_b = event_at_proper_time(g.detector_b, tbar_b);

        const quantum::StateVector psi = quantum::singlet();
        const CounterRng root(log.seed);
        CounterRng rng_first = root.split(kFirstOutcome);
        CounterRng rng_second = root.split(kSecondOutcome);
        log.k = quantum::born_probabilities(psi, g.detector(first)).sample(rng_first.uniform());
        const quantum::StateVector reduced = quantum::collapse_state(psi, log.k);
        log.l = quantum::conditional_probabilities(reduced, g.detector(second)).sample(rng_second.uniform());

        const collapse::CollapseSurface surface{log.decision(first), cfg.policy, g.detector(first).worldline.zeta};
        log.surface_arrival = collapse::arrival_on_worldline(surface, g.detector(second).worldline);

        const Event& target = g.detection(second);
        if (target.t > g.source.t) {
            const auto branch = kinematics::make_branch(g.source, target, "S" + std::string(to_string(first)));
            try {
                log.reduction = collapse::reduction_point_on_branch(surface, branch);
            } catch (const GeometryError&) {
                log.reduction.reset();
            }
        }
        if (log.reduction) {
            try {
                log.timeline = quantum::build_timeline(psi, first, *log.reduction, log.decision(first),
                                                       log.decision(second), log.k, log.l);
            } catch (const TimelineError&) {
                log.timeline.reset();
            }
        }

        log.consistency = collapse::consistency_check(log.decision_a, g.detector_a.worldline, log.decision_b,
                                                      g.detector_b.worldline, cfg.policy);
        log.spacelike = kinematics::spacelike_measurements(g.detector_a, g.detector_b,
                                                           g.detector_a.worldline.lab_time(g.detector_a.t_start),
                                                           g.detector_b.worldline.lab_time(g.detector_b.t_start));
    } catch (const GeometryError& e) {
        throw GeometryError("trial " + std::to_string(index) + ": " + e.what());
    }
    return log;
}

TrialLog run_trial(const ScenarioConfig& cfg, std::uint64_t index) {
    return run_trial(cfg, prepare_geometry(cfg), resolve_seed(cfg), index);
}

std::vector<LogRecord> TrialLog::records() const {
    const Side f = first();
    const Side s = other(f);
    const auto& g = geometry;
    const std::string policy_name = policy.name();
    std::vector<LogRecord> r;
    r.push_back({"trial", std::nullopt,
                 "index=" + std::to_string(index) + " seed=" + std::to_string(seed) + " first=" +
                     std::string(to_string(f)) + " policy=" + policy_name +
                     (schedule.overlap ? " overlap p_A_first=" + num(schedule.p_a_first) : std::string{})});
    r.push_back({"emission", g.source, "S tau_A=" + num(g.tau_a) + " tau_B=" + num(g.tau_b)});
    r.push_back({"detection", g.detection(f), decision_label(f) + " arrival"});
    r.push_back({"decision", decision(f), decision_label(f) + " " + outcome_text(k)});
    r.push_back({"surface", surface_arrival,
                 std::string(s == Side::A ? "A2(" : "B1(") + policy_name + ") on " + std::string(to_string(s))});
    const std::string red = "S" + std::string(to_string(f));
    if (reduction) {
        r.push_back({"reduction", *reduction, red});
    } else {
        r.push_back({"reduction", std::nullopt, red + " missed"});
    }
    r.push_back({"detection", g.detection(s), decision_label(s) + " arrival"});
    r.push_back({"decision", decision(s), decision_label(s) + " " + outcome_text(l)});
    r.push_back({"verdict", std::nullopt,
                 std::string(consistency.consistent ? "consistent" : "inconsistent") +
                     " pattern=" + std::string(collapse::to_string(consistency.pattern)) +
                     " spacelike=" + (spacelike ? "yes" : "no")});
    return r;
}

std::string TrialLog::format(const std::vector<double>& extra_frames) const {
    std::ostringstream out;
    auto emit = [&](const std::string& kind, const std::optional<Event>& e, const std::string& frame,
                    const std::string& detail) {
        out << kind;
        if (e) {
            out << '\t' << num(e->t) << '\t' << num(e->x1) << '\t' << num(e->x2) << '\t' << num(e->x3);
        } else {
            out << "\t-\t-\t-\t-";
        }
        out << '\t' << frame << '\t' << (detail.empty() ? "-" : detail) << '\n';
    };
    auto emit_epochs = [&](double zeta, const std::string& frame) {
        if (!timeline) return;
        const std::map<std::string, Event> at{{timeline->crossing_label(), timeline->crossing},
                                              {timeline->first_label(), timeline->first_decision},
                                              {timeline->second_label(), timeline->second_decision}};
        for (const auto& ep : timeline->epochs(zeta)) {
            std::optional<Event> e;
            if (!ep.begin_label.empty()) e = minkowski::boost(at.at(ep.begin_label), {zeta});
            emit("epoch", e, frame,
                 (ep.begin_label.empty() ? std::string("initial") : ep.begin_label) +
                     (ep.entangled ? " entangled " : " product ") + state_text(ep.state));
        }
    };

    const auto recs = records();
    for (const auto& rec : recs) emit(rec.kind, rec.event, "lab", rec.detail);
    emit_epochs(0.0, "lab");
    for (double z : extra_frames) {
        const std::string frame = "zeta=" + num(z);
        for (const auto& rec : recs) {
            if (!rec.event) continue;
            emit(rec.kind, minkowski::boost(*rec.event, {z}), frame, rec.detail);
        }
        emit_epochs(z, frame);
    }
    return out.str();
}

// ─── Ensembles ──────────────────────────────────────────────────────────────

void EnsembleStats::merge(const EnsembleStats& other) {
    trials += other.trials;
    a_first += other.a_first;
    consistent += other.consistent;
    spacelike += other.spacelike;
    for (const auto& [key, n] : other.counts) counts[key] += n;
}

std::uint64_t EnsembleStats::axis_count(Side side, std::size_t axis) const {
    std::uint64_t n = 0;
    for (const auto& [key, c] : counts) {
        if ((side == Side::A ? key.axis_a : key.axis_b) == axis) n += c;
    }
    return n;
}

double EnsembleStats::marginal_plus(Side side, std::size_t axis) const {
    std::uint64_t plus = 0;
    std::uint64_t all = 0;
    for (const auto& [key, c] : counts) {
        if ((side == Side::A ? key.axis_a : key.axis_b) != axis) continue;
        all += c;
        if ((side == Side::A ? key.sign_a : key.sign_b) > 0) plus += c;
    }
    return all ? static_cast<double>(plus) / static_cast<double>(all) : 0.0;
}

std::uint64_t EnsembleStats::pair_count(std::size_t axis_a, std::size_t axis_b) const {
    std::uint64_t n = 0;
    for (const auto& [key, c] : counts) {
        if (key.axis_a == axis_a && key.axis_b == axis_b) n += c;
    }
    return n;
}

double EnsembleStats::correlator(std::size_t axis_a, std::size_t axis_b) const {
    std::int64_t sum = 0;
    std::uint64_t n = 0;
    for (const auto& [key, c] : counts) {
        if (key.axis_a != axis_a || key.axis_b != axis_b) continue;
        n += c;
        sum += key.sign_a * key.sign_b * static_cast<std::int64_t>(c);
    }
    return n ? static_cast<double>(sum) / static_cast<double>(n) : 0.0;
}

std::uint64_t EnsembleStats::same_sign() const {
    std::uint64_t n = 0;
    for (const auto& [key, c] : counts) {
        if (key.axis_a == key.axis_b && key.sign_a == key.sign_b) n += c;
    }
    return n;
}

std::optional<double> EnsembleStats::chsh() const {
    if (axes_a.size() != 2 || axes_b.size() != 2) return std::nullopt;
    return correlator(0, 0) - correlator(0, 1) + correlator(1, 0) + correlator(1, 1);
}

std::string EnsembleStats::format() const {
    std::ostringstream out;
    auto sign = [](int s) { return s > 0 ? "+" : "-"; };
    out << "trials\t" << trials << "\n";
    out << "a_first\t" << a_first << "\n";
    out << "consistent\t" << consistent << "\n";
    out << "spacelike\t" << spacelike << "\n";
    out << "[counts]\n";
    for (const auto& [key, c] : counts) {
        out << "A" << key.axis_a << sign(key.sign_a) << " B" << key.axis_b << sign(key.sign_b) << "\t" << c << "\n";
    }
    out << "[marginals]\n";
    for (Side side : {Side::A, Side::B}) {
        const auto& axes = side == Side::A ? axes_a : axes_b;
        for (std::size_t i = 0; i < axes.size(); ++i) {
            out << to_string(side) << i << "+\t" << num(marginal_plus(side, i)) << "\tn=" << axis_count(side, i)
                << "\n";
        }
    }
    out << "[correlators]\n";
    for (std::size_t i = 0; i < axes_a.size(); ++i) {
        for (std::size_t j = 0; j < axes_b.size(); ++j) {
            out << "E(A" << i << ",B" << j << ")\t" << num(correlator(i, j)) << "\tn=" << pair_count(i, j) << "\n";
        }
    }
    out << "[chsh]\n";
    if (const auto s = chsh()) {
        out << "S\t" << num(*s) << "\n";
    } else {
        out << "S\t-\n";
    }
    out << "[lhv]\n";
    out << "violations\t" << lhv.size() << "\n";
    for (const auto& v : lhv) out << v.describe() << "\n";
    return out.str();
}

EnsembleStats run_ensemble(const ScenarioConfig& cfg, std::uint64_t root_seed, unsigned threads) {
    const Geometry g = prepare_geometry(cfg);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, cfg.trials));

    std::vector<EnsembleStats> parts(threads);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](unsigned w) {
        try {
            EnsembleStats& st = parts[w];
            for (std::uint64_t i = w; i < cfg.trials; i += threads) {
                const TrialLog log = run_trial(cfg, g, root_seed, i);
                ++st.trials;
                if (log.first() == Side::A) ++st.a_first;
                if (log.consistency.consistent) ++st.consistent;
                if (log.spacelike) ++st.spacelike;
                const auto& oa = log.outcome(Side::A);
                const auto& ob = log.outcome(Side::B);
                ++st.counts[{oa.axis_index, oa.sign, ob.axis_index, ob.sign}];
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < threads; ++w) pool.emplace_back(work, w);
    work(0);
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }

    EnsembleStats total;
    for (const auto& p : parts) total.merge(p);
    total.axes_a = g.detector_a.axes;
    total.axes_b = g.detector_b.axes;
    const auto psi = quantum::singlet();
    total.lhv = quantum::lhv_constraints_check(quantum::born_probabilities(psi, g.detector_a),
                                               quantum::born_probabilities(psi, g.detector_b));
    return total;
}

EnsembleStats run_ensemble(const ScenarioConfig& cfg) { return run_ensemble(cfg, resolve_seed(cfg)); }

// ─── Policy sweeps ──────────────────────────────────────────────────────────

PolicyVerdict policy_check(const collapse::CollapsePolicy& policy, const std::vector<double>& zetas,
                           const std::vector<double>& times) {
    return {collapse::inconsistency_scan(policy, zetas, times), collapse::first_bound_violation(policy, zetas, times)};
}

ConsistencyReport consistency_report(const std::vector<collapse::CollapsePolicy>& policies,
                                     const std::vector<double>& zetas, const std::vector<double>& times) {
    if (zetas.empty() || times.empty()) throw DomainError("consistency_report: grids must be non-empty");
    ConsistencyReport rep;
    rep.zetas = zetas;
    rep.times = times;
    for (const auto& p : policies) rep.verdicts.push_back(policy_check(p, zetas, times));
    return rep;
}

bool ConsistencyReport::blc_only() const {
    bool blc_ok = false;
    for (const auto& v : verdicts) {
        const bool blc = v.scan.policy.kind == collapse::PolicyKind::backward_light_cone;
        if (blc) {
            blc_ok = v.consistent();
        } else if (v.consistent()) {
            return false;
        }
    }
    return blc_ok;
}

std::string ConsistencyReport::format() const {
    std::ostringstream out;
    out << "grid\tzeta " << zetas.size() << " points [" << num(zetas.front()) << ", " << num(zetas.back())
        << "]\ttime " << times.size() << " points [" << num(times.front()) << ", " << num(times.back()) << "]\n";
    for (const auto& v : verdicts) {
        out << "policy\t" << v.scan.policy.name() << "\tconsistent " << v.consistent_cells() << "/"
            << v.scan.cells.size() << "\n";
        // One row per zeta, one column per time: '.' consistent, 'X' not.
        for (std::size_t i = 0; i < zetas.size(); ++i) {
            out << "  zeta=" << num(zetas[i]) << "\t";
            for (std::size_t j = 0; j < times.size(); ++j) {
                out << (v.scan.cells[i * times.size() + j].consistent ? '.' : 'X');
            }
            out << "\n";
        }
        if (v.first_violation) {
            out << "  first bound violation\tzeta=" << num(v.first_violation->zeta)
                << "\tt=" << num(v.first_violation->t_apex) << "\tside=" << (v.first_violation->b_side ? "B" : "A")
                << "\n";
        } else {
            out << "  first bound violation\tnone\n";
        }
        out << "  verdict\t" << (v.consistent() ? "consistent" : "inconsistent") << "\n";
    }
    out << "summary\tblc is the only consistent policy on this grid: " << (blc_only() ? "yes" : "no") << "\n";
    return out.str();
}

std::vector<collapse::CollapsePolicy> default_policies() {
    using collapse::CollapsePolicy;
    return {CollapsePolicy::instantaneous(),     CollapsePolicy::tilted_plane(0.3),  CollapsePolicy::tilted_plane(0.6),
            CollapsePolicy::tilted_plane(0.9),   CollapsePolicy::tilted_plane(0.99), CollapsePolicy::backward_light_cone()};
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    if (n == 0) throw DomainError("linspace: need at least one point");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    return out;
}

}  // namespace spacelike::scenario
