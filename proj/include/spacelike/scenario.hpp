#pragma once

// One simulated run of the two-detector setup: place the source, find the
// detections, pick the first decider, sample outcomes, intersect the first
// decider's collapse surface with the other branch, and record everything.

#include "spacelike/collapse.hpp"
#include "spacelike/config.hpp"
#include "spacelike/kinematics.hpp"
#include "spacelike/minkowski.hpp"
#include "spacelike/ordering.hpp"
#include "spacelike/quantum.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spacelike::scenario {

using minkowski::Event;

// Source S with target proper times to A1 and B2. Solves the two interval
// equations in the (t, x1) plane of S; transverse offsets of A1 and B2 enter
// as fixed spatial separations. Of two admissible roots the later emission is
// returned. Throws InfeasibleError when no S precedes both events with
// timelike or lightlike branches.
Event derive_source(const Event& a1, const Event& b2, double tau_a, double tau_b);

struct Geometry {
    Event source;
    Event detection_a;  // A1 signal arrival (lab)
    Event detection_b;  // B2 signal arrival (lab)
    double tau_a = 0.0;
    double tau_b = 0.0;
    // Detectors with t_start set to the rest-frame arrival time.
    kinematics::Detector detector_a;
    kinematics::Detector detector_b;

    const kinematics::Detector& detector(Side s) const { return s == Side::A ? detector_a : detector_b; }
    const Event& detection(Side s) const { return s == Side::A ? detection_a : detection_b; }
};

// Throws GeometryError (InfeasibleError for an unsolvable derived source).
Geometry prepare_geometry(const ScenarioConfig& cfg);

// Event on the detector's worldline at rest-frame time tau.
Event event_at_proper_time(const kinematics::Detector& d, double tau);

struct LogRecord {
    std::string kind;
    std::optional<Event> event;  // lab frame
    std::string detail;
};

struct TrialLog {
    std::uint64_t index = 0;
    std::uint64_t seed = 0;
    collapse::CollapsePolicy policy;
    Geometry geometry;
    ordering::DecisionSchedule schedule;
    Event decision_a;
    Event decision_b;
    quantum::Outcome k;  // first decider
    quantum::Outcome l;  // second decider
    Event surface_arrival;                // first decider's surface on the other worldline
    std::optional<Event> reduction;       // ... on the other signal branch
    std::optional<quantum::WaveFunctionTimeline> timeline;
    collapse::ConsistencyResult consistency;
    bool spacelike = false;

    Side first() const { return schedule.first; }
    const Event& decision(Side s) const { return s == Side::A ? decision_a : decision_b; }
    const quantum::Outcome& outcome(Side s) const { return s == first() ? k : l; }

    // Causally ordered records in the lab frame.
    std::vector<LogRecord> records() const;
    // Tab separated lines: kind t x1 x2 x3 frame detail. Each extra frame
    // repeats the event records and epochs re-expressed in that frame.
    std::string format(const std::vector<double>& extra_frames = {}) const;
};

// Root seed from the config or, failing that, SIM_SEED, then 1.
std::uint64_t resolve_seed(const ScenarioConfig& cfg);

// Deterministic in (cfg, root_seed, index). Geometry errors are rethrown as
// GeometryError with the trial index in the message.
TrialLog run_trial(const ScenarioConfig& cfg, const Geometry& g, std::uint64_t root_seed, std::uint64_t index);
TrialLog run_trial(const ScenarioConfig& cfg, std::uint64_t index);

struct OutcomeKey {
    std::size_t axis_a;
    int sign_a;
    std::size_t axis_b;
    int sign_b;
    auto operator<=>(const OutcomeKey&) const = default;
};

struct EnsembleStats {
    std::uint64_t trials = 0;
    std::uint64_t a_first = 0;
    std::uint64_t consistent = 0;
    std::uint64_t spacelike = 0;
    std::map<OutcomeKey, std::uint64_t> counts;
    std::vector<Vec3> axes_a;
    std::vector<Vec3> axes_b;
    std::vector<quantum::LhvViolation> lhv;

    void merge(const EnsembleStats& other);
    // Frequency of sign +1 on the given side and axis (conditioned on that axis).
    double marginal_plus(Side side, std::size_t axis) const;
    std::uint64_t axis_count(Side side, std::size_t axis) const;
    // E = <sign_a sign_b> over trials with this axis pair; 0 when none.
    double correlator(std::size_t axis_a, std::size_t axis_b) const;
    std::uint64_t pair_count(std::size_t axis_a, std::size_t axis_b) const;
    std::uint64_t same_sign() const;
    // E(0,0) - E(0,1) + E(1,0) + E(1,1); needs two axes per side.
    std::optional<double> chsh() const;

    // Fixed field order: counts, marginals, correlators, CHSH, LHV.
    std::string format() const;
};

// Trials run on `threads` workers (0: hardware concurrency); the result does
// not depend on the thread count.
EnsembleStats run_ensemble(const ScenarioConfig& cfg, std::uint64_t root_seed, unsigned threads = 0);
EnsembleStats run_ensemble(const ScenarioConfig& cfg);

struct PolicyVerdict {
    collapse::ScanReport scan;
    std::optional<collapse::BoundViolation> first_violation;

    bool consistent() const { return scan.inconsistent_count() == 0 && !first_violation; }
    std::size_t consistent_cells() const { return scan.cells.size() - scan.inconsistent_count(); }
};

// Frame-consistency test and the arrival bounds over the paired construction.
PolicyVerdict policy_check(const collapse::CollapsePolicy& policy, const std::vector<double>& zetas,
                           const std::vector<double>& times);

struct ConsistencyReport {
    std::vector<double> zetas;
    std::vector<double> times;
    std::vector<PolicyVerdict> verdicts;
    // True when the blc is the only consistent policy among those checked.
    bool blc_only() const;
    std::string format() const;
};

ConsistencyReport consistency_report(const std::vector<collapse::CollapsePolicy>& policies,
                                     const std::vector<double>& zetas, const std::vector<double>& times);

// Policies checked when none are named: inst, planes 0.3/0.6/0.9/0.99, blc.
std::vector<collapse::CollapsePolicy> default_policies();

// n points from a to b inclusive (n == 1 gives a).
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace spacelike::scenario
