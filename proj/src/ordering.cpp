#include "spacelike/ordering.hpp"

#include "spacelike/errors.hpp"
#include "spacelike/rng.hpp"

#include <algorithm>
#include <cmath>

namespace spacelike::ordering {

namespace {

enum Stream : std::uint64_t { kOrderStream = 1, kSharpA = 2, kSharpB = 3 };

}  // namespace

std::pair<double, double> proper_times(const minkowski::Event& source, const minkowski::Event& a1,
                                       const minkowski::Event& b2) {
    return {kinematics::proper_time_between(source, a1), kinematics::proper_time_between(source, b2)};
}

double a_first_probability(double tau_a, double tau_b, double dtau_a, double dtau_b) {
    const double lo_a = tau_a - dtau_a, hi_a = tau_a + dtau_a;
    const double lo_b = tau_b - dtau_b, hi_b = tau_b + dtau_b;
    const double overlap = std::max(0.0, std::min(hi_a, hi_b) - std::max(lo_a, lo_b));
    const double g_a = std::max(0.0, std::min(hi_a, lo_b) - lo_a) + std::max(0.0, hi_b - std::max(hi_a, lo_b));
    const double g_b = std::max(0.0, std::min(hi_b, lo_a) - lo_b) + std::max(0.0, hi_a - std::max(hi_b, lo_a));
    const double denom = g_a + g_b + overlap;
    if (denom <= 0.0) return 0.5;
    return (g_a + 0.5 * overlap) / denom;
}

DecisionSchedule decide_order(double tau_a, double tau_b, double dtau_a, double dtau_b, std::uint64_t rng_seed) {
    if (!(dtau_a >= 0.0) || !(dtau_b >= 0.0)) throw DomainError("decide_order: negative uncertainty");
    DecisionSchedule s;
    s.tau_a = tau_a;
    s.tau_b = tau_b;
    s.overlap = !(std::abs(tau_a - tau_b) > dtau_a + dtau_b);
    if (!s.overlap) {
        s.first = tau_a < tau_b ? Side::A : Side::B;
        s.p_a_first = s.first == Side::A ? 1.0 : 0.0;
        return s;
    }
    s.p_a_first = a_first_probability(tau_a, tau_b, dtau_a, dtau_b);
    CounterRng rng = CounterRng(rng_seed).split(kOrderStream);
    s.first = rng.uniform() < s.p_a_first ? Side::A : Side::B;
    return s;
}

double sample_sharp_time(const kinematics::Detector& d, std::uint64_t rng_seed) {
    const double room = std::min(d.pre_decision, d.dt_window - d.pre_decision);
    const double half_width = d.jitter * room;
    if (half_width <= 0.0) return d.t_start + d.pre_decision;
    CounterRng rng = CounterRng(rng_seed).split(d.side == Side::A ? kSharpA : kSharpB);
    const double u = rng.uniform_open();
    return d.t_start + d.pre_decision + half_width * (2.0 * u - 1.0);
}

DecisionSchedule schedule_decisions(const kinematics::Detector& da, const kinematics::Detector& db, double tau_a,
                                    double tau_b, std::uint64_t rng_seed) {
    DecisionSchedule s = decide_order(tau_a, tau_b, da.dt_window, db.dt_window, rng_seed);
    const double tbar_a = sample_sharp_time(da, rng_seed);
    const double tbar_b = sample_sharp_time(db, rng_seed);
    s.tbar_first = s.first == Side::A ? tbar_a : tbar_b;
    s.tbar_second = s.first == Side::A ? tbar_b : tbar_a;
    return s;
}

}  // namespace spacelike::ordering
