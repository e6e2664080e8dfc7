#pragma once

#include "spacelike/minkowski.hpp"
#include "spacelike/vec3.hpp"

#include <string>
#include <vector>

namespace spacelike::kinematics {

using minkowski::Event;

// Inertial worldline crossing x1 = 0 at t = 0, moving along e1 with rapidity
// `zeta`, displaced transversally by (offset2, offset3).
struct Worldline {
    double zeta = 0.0;
    double offset2 = 0.0;
    double offset3 = 0.0;

    double beta() const;
    // Lab time -> proper time elapsed since the origin crossing.
    double proper_time(double lab_t) const;
    double lab_time(double proper_t) const;
    void validate() const;
};

struct Detector {
    std::string id;
    Side side = Side::A;
    Worldline worldline;
    // Response window [t_start, t_start + dt_window] in the detector's rest frame.
    double t_start = 0.0;
    double dt_window = 1e-3;
    // Nominal response time (tbar - t_start).
    double pre_decision = 5e-4;
    // Fraction of the symmetric room around the nominal decision time that the
    // sharp decision time is jittered over; 0 means no jitter.
    double jitter = 0.8;
    std::vector<Vec3> axes{{0.0, 0.0, 1.0}};
    std::vector<double> axis_weights{1.0};

    // Throws DomainError naming the violated invariant.
    void validate() const;
};

struct SignalBranch {
    Event source;
    Event detection;
    std::string label;
};

// Throws DomainError unless detection lies in the causal future of source.
SignalBranch make_branch(const Event& source, const Event& detection, std::string label);

Event position_at(const Worldline& w, double t);

// Invariant length of a timelike or lightlike segment. Throws DomainError for
// spacelike pairs.
double proper_time_between(const Event& e1, const Event& e2);

// Worst-case reading of the no-communication condition. tA, tB are window
// start times in the lab frame; windows are converted from proper durations.
// Distances are taken between every pair of window endpoints and the smallest
// one must exceed the total time span.
bool spacelike_measurements(const Detector& dA, const Detector& dB, double tA, double tB);

// Earliest event on `w` after `after` (and after the source) reached by a
// signal of the given speed (fraction of c) leaving `source`. Throws
// GeometryError when no forward intersection exists.
Event signal_arrival(const Event& source, const Worldline& w, double speed, double after);

Event lightlike_branch(const Event& source, const Worldline& w, double after);

}  // namespace spacelike::kinematics
