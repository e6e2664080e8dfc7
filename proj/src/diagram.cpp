#include "spacelike/diagram.hpp"

#include "spacelike/collapse.hpp"
#include "spacelike/errors.hpp"
#include "spacelike/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <optional>
#include <sstream>

namespace spacelike::diagram {

namespace {

constexpr double kCanvas = 600.0;
constexpr double kMargin = 40.0;

std::string fixed(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    // Avoid "-0.000".
    return std::string(buf) == "-0.000" ? "0.000" : buf;
}

std::string sig(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v == 0.0 ? 0.0 : v);
    return buf;
}

std::optional<Event> attempt(const std::function<Event()>& f) {
    try {
        return f();
    } catch (const GeometryError&) {
        return std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

double parse_frame(std::string_view spec, const scenario::ScenarioConfig& cfg) {
    if (spec == "A") return cfg.detector_a.worldline.zeta;
    if (spec == "B") return cfg.detector_b.worldline.zeta;
    constexpr std::string_view prefix = "zeta:";
    if (spec.substr(0, prefix.size()) == prefix) {
        const std::string text(spec.substr(prefix.size()));
        char* end = nullptr;
        const double z = std::strtod(text.c_str(), &end);
        if (!text.empty() && end == text.c_str() + text.size() && std::isfinite(z)) return z;
    }
    throw ConfigError(ConfigError::Kind::semantic, "bad frame '" + std::string(spec) + "' (expected A, B or zeta:<v>)",
                      0, "frame");
}

DiagramSpec build_diagram(const scenario::ScenarioConfig& cfg, double frame_zeta) {
    using collapse::CollapsePolicy;
    using collapse::CollapseSurface;

    const scenario::Geometry g = scenario::prepare_geometry(cfg);
    const auto& wa = g.detector_a.worldline;
    const auto& wb = g.detector_b.worldline;
    const Event a1 = g.detection_a;
    const Event b2 = g.detection_b;

    DiagramSpec d;
    d.frame_zeta = frame_zeta;
    d.events.push_back({"S", g.source});

    // Lightlike source whose signals arrive one response time before A1 and B2.
    if (auto s2 = attempt([&] {
            return scenario::derive_source(
                scenario::event_at_proper_time(g.detector_a, g.detector_a.t_start - g.detector_a.pre_decision),
                scenario::event_at_proper_time(g.detector_b, g.detector_b.t_start - g.detector_b.pre_decision), 0.0,
                0.0);
        })) {
        d.events.push_back({"S2", *s2});
    }
    d.events.push_back({"A1", a1});
    d.events.push_back({"B2", b2});

    const CollapseSurface blc_a{a1, CollapsePolicy::backward_light_cone(), wa.zeta};
    const CollapseSurface blc_b{b2, CollapsePolicy::backward_light_cone(), wb.zeta};
    const CollapseSurface inst_a{a1, CollapsePolicy::instantaneous(), wa.zeta};
    const CollapseSurface inst_b{b2, CollapsePolicy::instantaneous(), wb.zeta};

    const auto branch_a = kinematics::SignalBranch{g.source, a1, "S->A1"};
    const auto branch_b = kinematics::SignalBranch{g.source, b2, "S->B2"};
    const auto sa = attempt([&] { return collapse::reduction_point_on_branch(blc_a, branch_b); });
    const auto sb = attempt([&] { return collapse::reduction_point_on_branch(blc_b, branch_a); });
    if (sa) d.events.push_back({"SA", *sa});
    if (sb) d.events.push_back({"SB", *sb});

    const auto b1_inst = attempt([&] { return collapse::arrival_on_worldline(inst_a, wb); });
    const auto a2_inst = attempt([&] { return collapse::arrival_on_worldline(inst_b, wa); });
    const auto b1_blc = attempt([&] { return collapse::arrival_on_worldline(blc_a, wb); });
    const auto a2_blc = attempt([&] { return collapse::arrival_on_worldline(blc_b, wa); });
    if (b1_inst) d.events.push_back({"B1(inst)", *b1_inst});
    if (a2_inst) d.events.push_back({"A2(inst)", *a2_inst});
    if (b1_blc) d.events.push_back({"B1(blc)", *b1_blc});
    if (a2_blc) d.events.push_back({"A2(blc)", *a2_blc});

    // Extents from the projected events plus the origin.
    double t_lo = 0.0, t_hi = 0.0, x_lo = 0.0, x_hi = 0.0;
    for (const auto& e : d.events) {
        const Event p = minkowski::boost(e.event, {frame_zeta});
        t_lo = std::min(t_lo, p.t);
        t_hi = std::max(t_hi, p.t);
        x_lo = std::min(x_lo, p.x1);
        x_hi = std::max(x_hi, p.x1);
    }
    const double span = std::max({t_hi - t_lo, x_hi - x_lo, 1e-6});
    const double pad = 0.15 * span;
    const double tc = 0.5 * (t_lo + t_hi);
    const double xc = 0.5 * (x_lo + x_hi);
    const double half = 0.5 * span + pad;
    d.t_min = tc - half;
    d.t_max = tc + half;
    d.x_min = xc - half;
    d.x_max = xc + half;

    // Long lines are clipped to the canvas when rendered.
    const double far = 4.0 * (std::abs(tc) + std::abs(xc) + half) * std::cosh(frame_zeta) * std::cosh(frame_zeta);
    d.segments.push_back({"lightcone", "future/past", {-far, -far, 0, 0}, {far, far, 0, 0}});
    d.segments.push_back({"lightcone", "future/past", {-far, far, 0, 0}, {far, -far, 0, 0}});
    d.segments.push_back({"worldline", "A", kinematics::position_at(wa, -far), kinematics::position_at(wa, far)});
    d.segments.push_back({"worldline", "B", kinematics::position_at(wb, -far), kinematics::position_at(wb, far)});
    d.segments.push_back({"branch", "S->A1", g.source, a1});
    d.segments.push_back({"branch", "S->B2", g.source, b2});

    // Each blc drawn as its two null legs down to the level of its crossing
    // with the other worldline; planes as the chord to that crossing.
    auto blc_legs = [&](const Event& apex, const std::optional<Event>& hit, const std::string& label) {
        if (!hit) return;
        const double depth = apex.t - hit->t;
        d.segments.push_back({"surface", label, apex, {apex.t - depth, apex.x1 - depth, apex.x2, apex.x3}});
        d.segments.push_back({"surface", label, apex, {apex.t - depth, apex.x1 + depth, apex.x2, apex.x3}});
    };
    blc_legs(a1, b1_blc, "blc(A1)");
    blc_legs(b2, a2_blc, "blc(B2)");
    if (b1_inst) d.segments.push_back({"surface", "inst(A1)", a1, *b1_inst});
    if (a2_inst) d.segments.push_back({"surface", "inst(B2)", b2, *a2_inst});
    return d;
}

std::string render_svg(const DiagramSpec& spec) {
    const double size = kCanvas + 2.0 * kMargin;
    const double sx = kCanvas / (spec.x_max - spec.x_min);
    const double st = kCanvas / (spec.t_max - spec.t_min);
    auto px = [&](double x) { return kMargin + (x - spec.x_min) * sx; };
    auto py = [&](double t) { return kMargin + (spec.t_max - t) * st; };
    auto project = [&](const Event& e) { return minkowski::boost(e, {spec.frame_zeta}); };

    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(size) << "\" height=\"" << fixed(size)
        << "\" viewBox=\"0 0 " << fixed(size) << " " << fixed(size) << "\" data-frame-zeta=\"" << sig(spec.frame_zeta)
        << "\">\n";
    out << "<defs><clipPath id=\"canvas\"><rect x=\"" << fixed(kMargin) << "\" y=\"" << fixed(kMargin)
        << "\" width=\"" << fixed(kCanvas) << "\" height=\"" << fixed(kCanvas) << "\"/></clipPath></defs>\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << fixed(size) << "\" height=\"" << fixed(size)
        << "\" fill=\"white\"/>\n";
    out << "<rect x=\"" << fixed(kMargin) << "\" y=\"" << fixed(kMargin) << "\" width=\"" << fixed(kCanvas)
        << "\" height=\"" << fixed(kCanvas) << "\" fill=\"none\" stroke=\"#999\"/>\n";
    out << "<text x=\"" << fixed(kMargin + kCanvas) << "\" y=\"" << fixed(size - 10.0)
        << "\" text-anchor=\"end\" font-size=\"12\">x1</text>\n";
    out << "<text x=\"10\" y=\"" << fixed(kMargin - 10.0) << "\" font-size=\"12\">ct</text>\n";

    out << "<g clip-path=\"url(#canvas)\">\n";
    for (const auto& s : spec.segments) {
        const Event a = project(s.from);
        const Event b = project(s.to);
        const char* style = "stroke=\"black\"";
        if (s.kind == "lightcone") style = "stroke=\"#bbb\" stroke-dasharray=\"4 4\"";
        if (s.kind == "branch") style = "stroke=\"#1f77b4\"";
        if (s.kind == "surface") style = s.label.rfind("blc", 0) == 0 ? "stroke=\"#d62728\"" : "stroke=\"#2ca02c\"";
        out << "<line class=\"" << s.kind << "\" data-label=\"" << escape(s.label) << "\" x1=\"" << fixed(px(a.x1))
            << "\" y1=\"" << fixed(py(a.t)) << "\" x2=\"" << fixed(px(b.x1)) << "\" y2=\"" << fixed(py(b.t)) << "\" "
            << style << "/>\n";
    }
    out << "</g>\n";

    for (const auto& e : spec.events) {
        const Event p = project(e.event);
        out << "<circle class=\"event\" data-label=\"" << escape(e.label) << "\" data-t=\"" << sig(p.t)
            << "\" data-x=\"" << sig(p.x1) << "\" cx=\"" << fixed(px(p.x1)) << "\" cy=\"" << fixed(py(p.t))
            << "\" r=\"3\"/>\n";
        out << "<text x=\"" << fixed(px(p.x1) + 5.0) << "\" y=\"" << fixed(py(p.t) - 5.0)
            << "\" font-size=\"11\">" << escape(e.label) << "</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace spacelike::diagram
