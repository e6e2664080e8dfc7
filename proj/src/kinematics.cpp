#include "spacelike/kinematics.hpp"

#include "spacelike/errors.hpp"
#include "quadratic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace spacelike::kinematics {

namespace {

double spatial_distance(const Event& a, const Event& b) {
    const double d1 = a.x1 - b.x1;
    const double d2 = a.x2 - b.x2;
    const double d3 = a.x3 - b.x3;
    return std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

}  // namespace

double Worldline::beta() const { return std::tanh(zeta); }

double Worldline::proper_time(double lab_t) const { return lab_t / std::cosh(zeta); }

double Worldline::lab_time(double proper_t) const { return proper_t * std::cosh(zeta); }

void Worldline::validate() const {
    if (!std::isfinite(zeta) || !std::isfinite(offset2) || !std::isfinite(offset3)) {
        throw DomainError("worldline: non-finite parameters");
    }
    if (std::abs(std::tanh(zeta)) >= 1.0) {
        throw DomainError("worldline: |tanh(zeta)| must be < 1");
    }
}

void Detector::validate() const {
    worldline.validate();
    if (!(dt_window > 0.0)) throw DomainError("detector " + id + ": window must be > 0");
    if (!(pre_decision > 0.0 && pre_decision < dt_window)) {
        throw DomainError("detector " + id + ": pre_decision must lie strictly inside the window");
    }
    if (!(jitter >= 0.0 && jitter < 1.0)) {
        throw DomainError("detector " + id + ": jitter must lie in [0, 1)");
    }
    if (axes.empty()) throw DomainError("detector " + id + ": at least one axis is required");
    if (axes.size() != axis_weights.size()) {
        throw DomainError("detector " + id + ": axes and weights differ in length");
    }
    for (const auto& a : axes) {
        if (std::abs(a.norm() - 1.0) > 1e-9) {
            throw DomainError("detector " + id + ": axis is not a unit vector");
        }
    }
    double sum = 0.0;
    for (double w : axis_weights) {
        if (!(w >= 0.0)) throw DomainError("detector " + id + ": negative axis weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw DomainError("detector " + id + ": axis weights must sum to 1");
    }
}

SignalBranch make_branch(const Event& source, const Event& detection, std::string label) {
    const auto iv = minkowski::interval(source, detection);
    if (iv.kind == minkowski::IntervalKind::spacelike || !(detection.t > source.t)) {
        throw DomainError("signal branch " + label + ": detection is not in the causal future of the source");
    }
    return {source, detection, std::move(label)};
}

Event position_at(const Worldline& w, double t) {
    return {t, t * w.beta(), w.offset2, w.offset3};
}

double proper_time_between(const Event& e1, const Event& e2) {
    const auto iv = minkowski::interval(e1, e2);
    switch (iv.kind) {
        case minkowski::IntervalKind::lightlike: return 0.0;
        case minkowski::IntervalKind::timelike: return std::sqrt(iv.s_squared);
        case minkowski::IntervalKind::spacelike: break;
    }
    throw DomainError("proper_time_between: events are spacelike separated");
}

bool spacelike_measurements(const Detector& dA, const Detector& dB, double tA, double tB) {
    const double lenA = dA.worldline.lab_time(dA.dt_window);
    const double lenB = dB.worldline.lab_time(dB.dt_window);
    const double span = std::max(tA + lenA, tB + lenB) - std::min(tA, tB);

    const std::array<Event, 2> ends_a{position_at(dA.worldline, tA), position_at(dA.worldline, tA + lenA)};
    const std::array<Event, 2> ends_b{position_at(dB.worldline, tB), position_at(dB.worldline, tB + lenB)};
    double nearest = std::numeric_limits<double>::infinity();
    for (const auto& a : ends_a) {
        for (const auto& b : ends_b) nearest = std::min(nearest, spatial_distance(a, b));
    }
    return span < nearest;
}

Event signal_arrival(const Event& source, const Worldline& w, double speed, double after) {
    if (!(speed > 0.0 && speed <= 1.0)) {
        throw DomainError("signal_arrival: speed must lie in (0, 1]");
    }
    // speed^2 (t - ts)^2 = (beta t - xs1)^2 + d_perp^2
    const double beta = w.beta();
    const double v2 = speed * speed;
    const double dp2 = (w.offset2 - source.x2) * (w.offset2 - source.x2) +
                       (w.offset3 - source.x3) * (w.offset3 - source.x3);
    const double a = v2 - beta * beta;
    const double b = -2.0 * (v2 * source.t - beta * source.x1);
    const double c = v2 * source.t * source.t - source.x1 * source.x1 - dp2;

    const double floor_t = std::max(source.t, after);
    const double eps = 1e-12 * std::max(1.0, std::abs(floor_t));
    for (double t : detail::real_roots(a, b, c)) {
        if (t > floor_t + eps) return position_at(w, t);
    }
    throw GeometryError("signal_arrival: no forward intersection with the worldline");
}

Event lightlike_branch(const Event& source, const Worldline& w, double after) {
    return signal_arrival(source, w, 1.0, after);
}

}  // namespace spacelike::kinematics
