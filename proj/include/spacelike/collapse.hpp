#pragma once

// Collapse hypersurfaces anchored at a decision event, their crossings with
// detector worldlines and signal branches, and the frame-consistency test for
// a pair of spacelike decisions.

#include "spacelike/kinematics.hpp"
#include "spacelike/minkowski.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spacelike::collapse {

using minkowski::Event;

enum class PolicyKind { instantaneous, tilted_plane, backward_light_cone };

struct CollapsePolicy {
    PolicyKind kind = PolicyKind::backward_light_cone;
    // dt/dx1 of the plane in the decider's rest frame; 0 for instantaneous.
    double slope = 0.0;

    static CollapsePolicy instantaneous() { return {PolicyKind::instantaneous, 0.0}; }
    static CollapsePolicy tilted_plane(double slope);
    static CollapsePolicy backward_light_cone() { return {PolicyKind::backward_light_cone, 0.0}; }

    bool is_plane() const { return kind != PolicyKind::backward_light_cone; }
    void validate() const;
    // "inst", "plane:<slope>" or "blc".
    std::string name() const;
};

// Parses the names produced by CollapsePolicy::name(); throws DomainError.
CollapsePolicy parse_policy(std::string_view text);

struct CollapseSurface {
    Event apex;
    CollapsePolicy policy;
    double decider_zeta = 0.0;
};

// Crossing of the surface with a worldline, in lab coordinates. Throws
// GeometryError when there is none (parallel plane, blc apex on `w`).
Event arrival_on_worldline(const CollapseSurface& s, const kinematics::Worldline& w);

// Crossing of the surface with the open segment source -> detection. Throws
// GeometryError when the endpoints do not strictly straddle the surface.
Event reduction_point_on_branch(const CollapseSurface& s, const kinematics::SignalBranch& branch);

// Who acted first according to each detector's own bookkeeping.
enum class OrderPattern {
    a_first,        // B's surface reaches A after A1, A's surface reaches B before B2
    b_first,        // mirror image
    both_first,     // each decided before the other's surface arrived: contradiction
    both_deferred,  // each surface arrives before the other decision
    degenerate,     // an arrival coincides with a decision
};

std::string_view to_string(OrderPattern p);

struct ConsistencyResult {
    // Proper times along each detector's worldline (rest-frame times).
    double a1 = 0.0;  // A's decision
    double a2 = 0.0;  // arrival of B's surface at A
    double b2 = 0.0;  // B's decision
    double b1 = 0.0;  // arrival of A's surface at B
    Event a2_event;
    Event b1_event;
    OrderPattern pattern = OrderPattern::degenerate;
    bool consistent = false;

    double delta_a() const { return a2 - a1; }
    double delta_b() const { return b2 - b1; }
};

// Both decisions in lab coordinates on their worldlines. Each detector's
// surface follows `policy` in its own rest frame. Only the both_first and
// degenerate patterns are inconsistent.
ConsistencyResult consistency_check(const Event& decision_a, const kinematics::Worldline& wa,
                                    const Event& decision_b, const kinematics::Worldline& wb,
                                    const CollapsePolicy& policy);

// A at rest through the origin, B with rapidity `zeta`; both events in A's frame.
ConsistencyResult consistency_check(const Event& decision_a, const Event& decision_b,
                                    const CollapsePolicy& policy, double zeta);

// Latest event on B's worldline (rapidity zeta) that A's surface from `apex`
// may reach without contradiction: (t cosh zeta, t sinh zeta).
Event max_consistent_arrival(const Event& apex, double zeta);

// (cosh z - 1) / sinh z for each z. Throws DomainError for z <= 0.
std::vector<double> blc_slope_limit(const std::vector<double>& zetas);

struct ScanCell {
    double zeta = 0.0;
    double t_a1 = 0.0;
    bool consistent = false;
    std::optional<ConsistencyResult> result;
    std::string error;  // geometry error text when result is empty
};

struct ScanReport {
    CollapsePolicy policy;
    std::vector<ScanCell> cells;  // zeta-major, then time

    std::vector<ScanCell> inconsistent() const;
    std::size_t inconsistent_count() const;
};

// Paired construction: A decides at (t, 0); B decides at proper time t on its
// worldline, i.e. exactly at max_consistent_arrival((t, 0), zeta).
ScanReport inconsistency_scan(const CollapsePolicy& policy, const std::vector<double>& zetas,
                              const std::vector<double>& times);

struct BoundCheck {
    double zeta = 0.0;
    double t_apex = 0.0;
    // Proper-time arrival of A's surface on B (and the mirrored quantity for
    // B's surface on A), against the common bound t_apex.
    double arrival_on_b = 0.0;
    double arrival_on_a = 0.0;
    bool b_side_ok = false;  // A's surface on B's worldline
    bool a_side_ok = false;  // B's surface on A's worldline, roles swapped
    bool ok() const { return a_side_ok && b_side_ok; }
};

// Arrival-time bounds for the paired construction at one grid point. The B
// side requires the lab arrival time to stay strictly below t cosh zeta; the A
// side is the same test with roles swapped (B at rest, A at rapidity -zeta).
BoundCheck arrival_bounds(const CollapsePolicy& policy, double t_apex, double zeta);

struct BoundViolation {
    double zeta = 0.0;
    double t_apex = 0.0;
    bool b_side = false;  // true: A's surface on B violates; false: A side
};

// First violation over an ascending zeta grid (then time grid order).
std::optional<BoundViolation> first_bound_violation(const CollapsePolicy& policy,
                                                    const std::vector<double>& zetas,
                                                    const std::vector<double>& times);

}  // namespace spacelike::collapse
