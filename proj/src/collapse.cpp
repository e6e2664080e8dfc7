#include "spacelike/collapse.hpp"

#include "spacelike/errors.hpp"
#include "quadratic.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace spacelike::collapse {

using kinematics::Worldline;

namespace {

constexpr double kBisectionTol = 1e-12;

// Plane through the apex with dt'/dx1' = slope in the decider frame, written
// in lab coordinates as alpha * (t - ta) - gamma * (x1 - xa) = 0.
struct PlaneCoefficients {
    double alpha;
    double gamma;
};

PlaneCoefficients plane_coefficients(const CollapseSurface& s) {
    const double ch = std::cosh(s.decider_zeta);
    const double sh = std::sinh(s.decider_zeta);
    return {ch + s.policy.slope * sh, sh + s.policy.slope * ch};
}

double plane_value(const PlaneCoefficients& p, const Event& apex, const Event& e) {
    return p.alpha * (e.t - apex.t) - p.gamma * (e.x1 - apex.x1);
}

// Positive strictly inside the backward cone, zero on it, negative outside.
double blc_value(const Event& apex, const Event& e) {
    const double d1 = e.x1 - apex.x1;
    const double d2 = e.x2 - apex.x2;
    const double d3 = e.x3 - apex.x3;
    return (apex.t - e.t) - std::sqrt(d1 * d1 + d2 * d2 + d3 * d3);
}

Event lerp(const Event& a, const Event& b, double u) {
    return {a.t + u * (b.t - a.t), a.x1 + u * (b.x1 - a.x1), a.x2 + u * (b.x2 - a.x2),
            a.x3 + u * (b.x3 - a.x3)};
}

bool is_zero(double v, double scale) { return std::abs(v) <= 1e-12 * std::max(1.0, scale); }

}  // namespace

CollapsePolicy CollapsePolicy::tilted_plane(double slope) {
    CollapsePolicy p{PolicyKind::tilted_plane, slope};
    p.validate();
    return p;
}

void CollapsePolicy::validate() const {
    switch (kind) {
        case PolicyKind::instantaneous:
            if (slope != 0.0) throw DomainError("instantaneous policy has slope 0");
            break;
        case PolicyKind::tilted_plane:
            if (!(std::abs(slope) < 1.0)) throw DomainError("tilted plane requires |slope| < 1");
            break;
        case PolicyKind::backward_light_cone: break;
    }
}

std::string CollapsePolicy::name() const {
    switch (kind) {
        case PolicyKind::instantaneous: return "inst";
        case PolicyKind::backward_light_cone: return "blc";
        case PolicyKind::tilted_plane: {
            char buf[48];
            std::snprintf(buf, sizeof(buf), "plane:%.9g", slope);
            return buf;
        }
    }
    return "unknown";
}

CollapsePolicy parse_policy(std::string_view text) {
    if (text == "inst" || text == "instantaneous") return CollapsePolicy::instantaneous();
    if (text == "blc" || text == "backward_light_cone") return CollapsePolicy::backward_light_cone();
    constexpr std::string_view prefix = "plane:";
    if (text.substr(0, prefix.size()) == prefix) {
        const std::string num(text.substr(prefix.size()));
        char* end = nullptr;
        const double s = std::strtod(num.c_str(), &end);
        if (num.empty() || end != num.c_str() + num.size() || !std::isfinite(s)) {
            throw DomainError("malformed plane slope: '" + num + "'");
        }
        return CollapsePolicy::tilted_plane(s);
    }
    throw DomainError("unknown collapse policy '" + std::string(text) + "'");
}

Event arrival_on_worldline(const CollapseSurface& s, const Worldline& w) {
    const double beta = w.beta();
    const Event& a = s.apex;
    if (s.policy.is_plane()) {
        const auto p = plane_coefficients(s);
        const double denom = p.alpha - p.gamma * beta;
        if (std::abs(denom) < 1e-14) {
            throw GeometryError("collapse plane does not cross the worldline");
        }
        const Event e = kinematics::position_at(w, (p.alpha * a.t - p.gamma * a.x1) / denom);
        if (!e.is_finite()) throw GeometryError("collapse plane crossing is not finite");
        return e;
    }

    // (ta - t)^2 = (beta t - xa)^2 + d_perp^2 with t < ta
    const double dp2 = (w.offset2 - a.x2) * (w.offset2 - a.x2) + (w.offset3 - a.x3) * (w.offset3 - a.x3);
    const auto roots = detail::real_roots(1.0 - beta * beta, -2.0 * (a.t - beta * a.x1),
                                          a.t * a.t - a.x1 * a.x1 - dp2);
    const double eps = 1e-12 * std::max(1.0, std::abs(a.t));
    for (auto it = roots.rbegin(); it != roots.rend(); ++it) {
        if (*it < a.t - eps) return kinematics::position_at(w, *it);
    }
    throw GeometryError("backward light-cone apex lies on the target worldline");
}

Event reduction_point_on_branch(const CollapseSurface& s, const kinematics::SignalBranch& branch) {
    const Event& src = branch.source;
    const Event& det = branch.detection;
    const double scale = std::abs(det.t - src.t) + std::abs(det.x1 - src.x1);

    if (s.policy.is_plane()) {
        const auto p = plane_coefficients(s);
        const double f0 = plane_value(p, s.apex, src);
        const double f1 = plane_value(p, s.apex, det);
        if (is_zero(f0, scale) || is_zero(f1, scale) || (f0 > 0.0) == (f1 > 0.0)) {
            throw GeometryError("collapse plane does not cross branch " + branch.label);
        }
        return lerp(src, det, f0 / (f0 - f1));
    }

    const double g_lo = blc_value(s.apex, src);
    const double g_hi = blc_value(s.apex, det);
    if (is_zero(g_lo, scale) || is_zero(g_hi, scale) || !(g_lo > 0.0) || !(g_hi < 0.0)) {
        throw GeometryError("backward light-cone does not cross branch " + branch.label);
    }
    // g is concave along the segment, so the sign change is unique.
    double lo = 0.0;
    double hi = 1.0;
    const double dt = std::max(std::abs(det.t - src.t), 1e-300);
    for (int i = 0; i < 200 && (hi - lo) * dt > kBisectionTol; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double g = blc_value(s.apex, lerp(src, det, mid));
        if (g > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return lerp(src, det, 0.5 * (lo + hi));
}

std::string_view to_string(OrderPattern p) {
    switch (p) {
        case OrderPattern::a_first: return "A-first";
        case OrderPattern::b_first: return "B-first";
        case OrderPattern::both_first: return "both-first";
        case OrderPattern::both_deferred: return "both-deferred";
        case OrderPattern::degenerate: return "degenerate";
    }
    return "unknown";
}

ConsistencyResult consistency_check(const Event& decision_a, const Worldline& wa, const Event& decision_b,
                                    const Worldline& wb, const CollapsePolicy& policy) {
    policy.validate();
    ConsistencyResult r;
    r.a2_event = arrival_on_worldline({decision_b, policy, wb.zeta}, wa);
    r.b1_event = arrival_on_worldline({decision_a, policy, wa.zeta}, wb);
    r.a1 = wa.proper_time(decision_a.t);
    r.a2 = wa.proper_time(r.a2_event.t);
    r.b2 = wb.proper_time(decision_b.t);
    r.b1 = wb.proper_time(r.b1_event.t);

    const double da = r.delta_a();
    const double db = r.delta_b();
    if (is_zero(da, std::abs(r.a1)) || is_zero(db, std::abs(r.b2))) {
        r.pattern = OrderPattern::degenerate;
    } else if (da > 0.0 && db > 0.0) {
        r.pattern = OrderPattern::a_first;
    } else if (da < 0.0 && db < 0.0) {
        r.pattern = OrderPattern::b_first;
    } else if (da > 0.0) {
        r.pattern = OrderPattern::both_first;
    } else {
        r.pattern = OrderPattern::both_deferred;
    }
    r.consistent = r.pattern != OrderPattern::both_first && r.pattern != OrderPattern::degenerate;
    return r;
}

ConsistencyResult consistency_check(const Event& decision_a, const Event& decision_b,
                                    const CollapsePolicy& policy, double zeta) {
    return consistency_check(decision_a, Worldline{}, decision_b, Worldline{zeta}, policy);
}

Event max_consistent_arrival(const Event& apex, double zeta) {
    return {apex.t * std::cosh(zeta), apex.t * std::sinh(zeta), apex.x2, apex.x3};
}

std::vector<double> blc_slope_limit(const std::vector<double>& zetas) {
    std::vector<double> out;
    out.reserve(zetas.size());
    for (double z : zetas) {
        if (!(z > 0.0)) throw DomainError("blc_slope_limit: rapidity must be positive");
        const double v = (std::cosh(z) - 1.0) / std::sinh(z);
        if (!std::isfinite(v)) throw RangeError("blc_slope_limit: overflow");
        out.push_back(v);
    }
    return out;
}

std::vector<ScanCell> ScanReport::inconsistent() const {
    std::vector<ScanCell> out;
    for (const auto& c : cells) {
        if (!c.consistent) out.push_back(c);
    }
    return out;
}

std::size_t ScanReport::inconsistent_count() const {
    std::size_t n = 0;
    for (const auto& c : cells) n += c.consistent ? 0 : 1;
    return n;
}

ScanReport inconsistency_scan(const CollapsePolicy& policy, const std::vector<double>& zetas,
                              const std::vector<double>& times) {
    ScanReport report{policy, {}};
    report.cells.reserve(zetas.size() * times.size());
    for (double zeta : zetas) {
        for (double t : times) {
            ScanCell cell{zeta, t, false, std::nullopt, {}};
            const Event a1{t, 0.0, 0.0, 0.0};
            const Event b2 = max_consistent_arrival(a1, zeta);
            try {
                cell.result = consistency_check(a1, b2, policy, zeta);
                cell.consistent = cell.result->consistent;
            } catch (const GeometryError& e) {
                cell.error = e.what();
            }
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

namespace {

// Arrival of the surface of a rest decider at (t_apex, 0) on a worldline of
// rapidity zeta, compared with t_apex cosh zeta. Missing crossings violate.
bool arrival_within_bound(const CollapsePolicy& policy, double t_apex, double zeta, double& arrival) {
    const Worldline target{zeta};
    try {
        const Event e = arrival_on_worldline({{t_apex, 0.0, 0.0, 0.0}, policy, 0.0}, target);
        arrival = target.proper_time(e.t);
    } catch (const GeometryError&) {
        arrival = std::nan("");
        return false;
    }
    const double bound = t_apex * std::cosh(zeta);
    const double lab = target.lab_time(arrival);
    return lab < bound && !is_zero(lab - bound, std::abs(bound));
}

}  // namespace

BoundCheck arrival_bounds(const CollapsePolicy& policy, double t_apex, double zeta) {
    BoundCheck b;
    b.zeta = zeta;
    b.t_apex = t_apex;
    b.b_side_ok = arrival_within_bound(policy, t_apex, zeta, b.arrival_on_b);
    b.a_side_ok = arrival_within_bound(policy, t_apex, -zeta, b.arrival_on_a);
    return b;
}

std::optional<BoundViolation> first_bound_violation(const CollapsePolicy& policy, const std::vector<double>& zetas,
                                                    const std::vector<double>& times) {
    for (double zeta : zetas) {
        for (double t : times) {
            const auto b = arrival_bounds(policy, t, zeta);
            if (!b.b_side_ok) return BoundViolation{zeta, t, true};
            if (!b.a_side_ok) return BoundViolation{zeta, t, false};
        }
    }
    return std::nullopt;
}

}  // namespace spacelike::collapse
