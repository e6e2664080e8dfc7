// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include "spacelike/cli.hpp"
#include "spacelike/collapse.hpp"
#include "spacelike/ordering.hpp"
#include "spacelike/quantum.hpp"
#include "spacelike/scenario.hpp"
#include "test_support.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace spacelike;
using namespace spacelike::scenario;
using minkowski::Event;
using quantum::Spinor;
using quantum::StateVector;

namespace {

// Tolerances pinned by the criteria.
constexpr double kFrameTimeTol = 0.002;
constexpr double kProperTimeTol = 0.002;
constexpr double kBoundaryTol = 0.005;
constexpr double kMarginalTol = 0.005;
constexpr double kChshTol = 0.02;
constexpr double kSlopeLimitTol = 1e-5;
constexpr double kStdErrors = 3.0;

struct Result {
    bool pass = true;
    std::string detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

Result frame_times() {
    Result r;
    const auto g = prepare_geometry(testing::load("reference.cfg"));
    const double zb = g.detector_b.worldline.zeta;
    const double values[4] = {g.detection_a.t, g.detection_b.t, minkowski::boost(g.detection_a, {zb}).t,
                              minkowski::boost(g.detection_b, {zb}).t};
    const double printed[4] = {-1.000, -1.052, -1.128, -0.933};
    const char* names[4] = {"t_A1", "t_B2", "t'_A1", "t'_B2"};
    for (int i = 0; i < 4; ++i) {
        r.require(testing::near(values[i], printed[i], kFrameTimeTol),
                  std::string(names[i]) + fmt(" = %.6f", values[i]));
    }
    r.detail = r.pass ? fmt("t_A1=%.4f t_B2=%.4f t'_A1=%.4f", values[0], values[1], values[2]) +
                            fmt(" t'_B2=%.4f", values[3])
                      : r.detail;
    return r;
}

Result proper_times() {
    Result r;
    const auto g = prepare_geometry(testing::load("reference.cfg"));
    const Event s = derive_source(g.detection_a, g.detection_b, 0.8, 0.664);
    const auto [ta, tb] = ordering::proper_times(s, g.detection_a, g.detection_b);
    r.require(testing::near(ta, 0.8, kProperTimeTol), fmt("tau_A = %.6f", ta));
    r.require(testing::near(tb, 0.664, kProperTimeTol), fmt("tau_B = %.6f", tb));
    if (r.pass) r.detail = fmt("S=(%.5f, %.5f) tau_A=%.6f", s.t, s.x1, ta) + fmt(" tau_B=%.6f", tb);
    return r;
}

const std::vector<double> kZetas = linspace(0.1, 3.0, 30);
const std::vector<double> kTimes = linspace(-2.0, 2.0, 40);

Result instantaneous_scan() {
    Result r;
    const auto scan = collapse::inconsistency_scan(collapse::CollapsePolicy::instantaneous(), kZetas, kTimes);
    std::size_t agree = 0;
    for (const auto& c : scan.cells) agree += c.consistent == !(c.t_a1 < 0.0);
    r.require(agree == scan.cells.size(), fmt("%g of %g cells match the sign predicate", double(agree),
                                              double(scan.cells.size())));
    if (r.pass) r.detail = fmt("%g/%g cells agree, %g inconsistent", double(agree), double(scan.cells.size()),
                               double(scan.inconsistent_count()));
    return r;
}

Result blc_uniqueness() {
    Result r;
    const auto blc = policy_check(collapse::CollapsePolicy::backward_light_cone(), kZetas, kTimes);
    r.require(blc.scan.inconsistent_count() == 0, fmt("blc fails %g cells", double(blc.scan.inconsistent_count())));
    r.require(!blc.first_violation, "blc violates the arrival bounds");
    std::string found;
    for (double s : {0.3, 0.6, 0.9, 0.99}) {
        const double limit = std::atanh(s) + 2.0;
        auto zetas = linspace(0.1, limit, 60);
        const auto v = collapse::first_bound_violation(collapse::CollapsePolicy::tilted_plane(s), zetas, kTimes);
        r.require(v.has_value() && v->zeta <= limit, fmt("plane %.2f has no violation up to zeta %.3f", s, limit));
        if (v) found += fmt(" s=%.2f@%.2f", s, v->zeta);
    }
    const auto grid = linspace(0.1, 10.0, 100);
    const auto limits = collapse::blc_slope_limit(grid);
    bool monotone = true;
    for (std::size_t i = 1; i < limits.size(); ++i) monotone = monotone && limits[i] > limits[i - 1];
    r.require(monotone, "slope limit not increasing");
    // Oracle: (cosh 10 - 1)/sinh 10 = tanh 5.
    r.require(testing::near(limits.back(), 0.99991, kSlopeLimitTol), fmt("limit(10) = %.7f", limits.back()));
    r.require(testing::near(limits.back(), std::tanh(5.0), 1e-12), "limit(10) differs from tanh 5");
    if (r.pass) r.detail = "blc 0 failures;" + found + fmt("; limit(10)=%.6f", limits.back());
    return r;
}

Result quantum_statistics() {
    Result r;
    auto eq = testing::load("equal_axes.cfg");
    eq.trials = 100000;
    const auto st = run_ensemble(eq);
    r.require(st.same_sign() == 0, fmt("%g same-sign coincidences", double(st.same_sign())));
    for (Side side : {Side::A, Side::B}) {
        const double m = st.marginal_plus(side, 0);
        r.require(std::abs(m - 0.5) <= kMarginalTol, fmt("marginal %.4f", m));
    }
    auto cfg = testing::load("chsh.cfg");
    cfg.trials = 1000000;
    const auto chsh = run_ensemble(cfg);
    const double s = chsh.chsh().value_or(0.0);
    r.require(std::abs(s - 2.0 * std::sqrt(2.0)) <= kChshTol, fmt("CHSH %.4f", s));
    r.require(s > 2.0, "CHSH not above the LHV bound");
    bool exclusive = false;
    for (const auto& v : chsh.lhv) exclusive = exclusive || v.kind == quantum::LhvViolation::Kind::exclusive_signs;
    r.require(exclusive, "LHV checker did not flag p^i p^-i != 0");
    if (r.pass) r.detail = fmt("same_sign=0 marginals %.4f/%.4f CHSH=%.4f", st.marginal_plus(Side::A, 0),
                               st.marginal_plus(Side::B, 0), s);
    return r;
}

StateVector product(const Spinor& b, const Spinor& a) { return StateVector::product(b, a); }

Result timeline_epochs() {
    Result r;
    const double h = 1.0 / std::sqrt(2.0);
    // Basis kets written out: index 0 is |+>, index 1 is |->.
    const Spinor up{{1.0, 0.0}};
    const Spinor plus_x{{h, h}}, minus_x{{h, -h}}, pending{{-h, h}};
    auto cfg = testing::load("reference.cfg");
    cfg.detector_b.axes = {{1, 0, 0}};
    cfg.detector_a.axes = {{0, 0, 1}};
    const auto g = prepare_geometry(cfg);
    const auto root = resolve_seed(cfg);
    std::optional<TrialLog> log;
    for (std::uint64_t i = 0; i < 64 && !log; ++i) {
        auto t = run_trial(cfg, g, root, i);
        if (t.first() == Side::B && t.k.sign == -1 && t.l.sign == +1) log = std::move(t);
    }
    if (!log || !log->timeline) {
        r.require(false, "no trial with k = (x, -1), l = (z, +1)");
        return r;
    }
    const auto& tl = *log->timeline;
    const auto ep = tl.epochs();
    r.require(ep.size() == 4, "epoch count");
    if (ep.size() != 4) return r;
    r.require(testing::near(ep[1].t_begin, -1.467, kBoundaryTol), fmt("t(SB) = %.5f", ep[1].t_begin));
    r.require(testing::near(ep[2].t_begin, -1.052, kBoundaryTol), fmt("t(B2) = %.5f", ep[2].t_begin));
    r.require(testing::near(ep[3].t_begin, -1.000, kBoundaryTol), fmt("t(A1) = %.5f", ep[3].t_begin));
    r.require(ep[1].t_begin < ep[2].t_begin && ep[2].t_begin < ep[3].t_begin, "lab boundaries out of order");

    // The four displays: singlet, pending x a^-k, b^k x a^-k, b^k x a^l.
    StateVector singlet;
    singlet.at(1, 0) = h;
    singlet.at(0, 1) = -h;
    const StateVector displays[4] = {singlet, product(pending, plus_x), product(minus_x, plus_x),
                                     product(minus_x, up)};
    for (int i = 0; i < 4; ++i) r.require(quantum::same_ray(ep[i].state, displays[i]), fmt("epoch %g content", i));

    const double zb = g.detector_b.worldline.zeta;
    const auto primed = tl.epochs(zb);
    const double ta1 = primed[3].t_begin, tb2 = primed[2].t_begin;
    r.require(ta1 < tb2, fmt("t'(A1) = %.4f not before t'(B2) = %.4f", ta1, tb2));
    for (int i = 0; i < 4; ++i) {
        r.require(primed[i].begin_label == ep[i].begin_label && quantum::same_ray(primed[i].state, ep[i].state),
                  fmt("epoch %g changed in B's frame", i));
    }
    // The slice t'(A1) < t' < t'(B2) carries psi_B x a^l.
    r.require(quantum::same_ray(tl.state_at(0.5 * (ta1 + tb2), zb), product(pending, up)),
              "B-frame slice between A1 and B2");
    if (r.pass) r.detail = fmt("trial %g: t(SB)=%.4f t(B2)=%.4f", double(log->index), ep[1].t_begin, ep[2].t_begin) +
                           fmt(" t(A1)=%.4f; t'(A1)=%.4f < t'(B2)=%.4f", ep[3].t_begin, ta1, tb2);
    return r;
}

Result order_independence() {
    Result r;
    auto cfg = testing::load("chsh.cfg");
    cfg.trials = 10000;
    cfg.order = OrderMode::a_first;
    const auto a = run_ensemble(cfg);
    cfg.order = OrderMode::b_first;
    const auto b = run_ensemble(cfg);
    r.require(a.a_first == a.trials && b.a_first == 0, "forced order not applied");
    double worst = 0.0;
    for (std::size_t ia = 0; ia < 2; ++ia)
        for (int sa : {+1, -1})
            for (std::size_t ib = 0; ib < 2; ++ib)
                for (int sb : {+1, -1}) {
                    const OutcomeKey key{ia, sa, ib, sb};
                    const auto ca = a.counts.count(key) ? a.counts.at(key) : 0;
                    const auto cb = b.counts.count(key) ? b.counts.at(key) : 0;
                    const double pa = double(ca) / double(a.trials), pb = double(cb) / double(b.trials);
                    const double p = 0.5 * (pa + pb);
                    const double se = std::sqrt(p * (1.0 - p) * (1.0 / double(a.trials) + 1.0 / double(b.trials)));
                    const double z = se > 0.0 ? std::abs(pa - pb) / se : 0.0;
                    worst = std::max(worst, z);
                    r.require(z <= kStdErrors, fmt("cell differs by %.2f standard errors", z));
                }
    if (r.pass) r.detail = fmt("16 cells, largest difference %.2f standard errors", worst);
    return r;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int cli(std::vector<std::string> args, std::string& out) {
    args.insert(args.begin(), "spacelike-sim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream o, e;
    const int code = cli::run_cli(static_cast<int>(argv.size()), argv.data(), o, e);
    out = o.str();
    return code;
}

Result determinism() {
    Result r;
    const auto base = std::filesystem::temp_directory_path() / "spacelike_acceptance";
    std::filesystem::remove_all(base);
    std::string outs[2], svgs[2];
    for (int run = 0; run < 2; ++run) {
        const auto dir = base / ("run" + std::to_string(run));
        r.require(cli({"simulate", "--config", testing::config_path("chsh.cfg"), "--trials", "20000", "--out",
                       dir.string()},
                      outs[run]) == 0,
                  "simulate failed");
        r.require(cli({"diagram", "--config", testing::config_path("reference.cfg"), "--frame", "B"}, svgs[run]) == 0,
                  "diagram failed");
    }
    for (const char* f : {"trials.log", "stats.txt", "config.txt"}) {
        const auto x = slurp(base / "run0" / f), y = slurp(base / "run1" / f);
        r.require(!x.empty() && x == y, std::string(f) + " differs");
    }
    r.require(!svgs[0].empty() && svgs[0] == svgs[1], "SVG differs");
    std::filesystem::remove_all(base);
    if (r.pass) r.detail = "trials.log, stats.txt, config.txt and SVG identical";
    return r;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
        {"1 reference frame times", frame_times},
        {"2 derived source proper times", proper_times},
        {"3 instantaneous collapse inconsistency", instantaneous_scan},
        {"4 blc uniqueness", blc_uniqueness},
        {"5 quantum statistics", quantum_statistics},
        {"6 timeline epochs", timeline_epochs},
        {"7 order independence", order_independence},
        {"8 determinism", determinism},
    };
    int failed = 0;
    for (const auto& [name, check] : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Result r;
        try {
            r = check();
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("%s  %-40s %s (%.2fs)\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str(), secs);
        failed += !r.pass;
    }
    return failed == 0 ? 0 : 1;
}
