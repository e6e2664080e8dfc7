#pragma once

// Which detector reduces first: compare the invariant signal proper times
// from the source, and draw at random when the response-time uncertainties
// overlap.

#include "spacelike/kinematics.hpp"
#include "spacelike/minkowski.hpp"
#include "spacelike/vec3.hpp"

#include <cstdint>
#include <utility>

namespace spacelike::ordering {

struct DecisionSchedule {
    Side first = Side::A;
    // Sharp decision times, each in its own detector's rest frame. Filled by
    // schedule_decisions(); decide_order() leaves them at 0.
    double tbar_first = 0.0;
    double tbar_second = 0.0;
    double tau_a = 0.0;
    double tau_b = 0.0;
    bool overlap = false;
    // Probability that A goes first under the overlap rule (0 or 1 when the
    // uncertainty intervals are disjoint).
    double p_a_first = 0.0;
};

// (tau_A, tau_B): proper times S -> A1 and S -> B2.
std::pair<double, double> proper_times(const minkowski::Event& source, const minkowski::Event& a1,
                                       const minkowski::Event& b2);

// Continuous, label-symmetric overlap rule. With I = [tau - dtau, tau + dtau],
// L the overlap length, and g_X the length of the parts of both intervals that
// put X ahead (X's part before the overlap plus the other's part after it):
//   P(A first) = (g_A + L/2) / (g_A + g_B + L),  1/2 if the denominator is 0.
double a_first_probability(double tau_a, double tau_b, double dtau_a, double dtau_b);

DecisionSchedule decide_order(double tau_a, double tau_b, double dtau_a, double dtau_b, std::uint64_t rng_seed);

// Sharp decision time in the detector's rest frame: uniform over
// pre_decision +- jitter * min(pre_decision, window - pre_decision) after
// t_start, hence strictly inside the window.
double sample_sharp_time(const kinematics::Detector& d, std::uint64_t rng_seed);

DecisionSchedule schedule_decisions(const kinematics::Detector& da, const kinematics::Detector& db, double tau_a,
                                    double tau_b, std::uint64_t rng_seed);

}  // namespace spacelike::ordering
