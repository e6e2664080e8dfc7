#pragma once

// Static spacetime diagram of a scenario: horizontal x1, vertical c t, light
// cones at 45 degrees, projected into the frame with the given rapidity.

#include "spacelike/config.hpp"
#include "spacelike/minkowski.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace spacelike::diagram {

using minkowski::Event;

struct LabeledEvent {
    std::string label;
    Event event;  // lab frame
};

struct Segment {
    std::string kind;  // worldline, lightcone, surface, branch
    std::string label;
    Event from;  // lab frame
    Event to;
};

struct DiagramSpec {
    double frame_zeta = 0.0;
    std::vector<Segment> segments;
    std::vector<LabeledEvent> events;
    // Canvas extents in frame coordinates.
    double t_min = 0.0, t_max = 0.0, x_min = 0.0, x_max = 0.0;
};

// "A", "B" or "zeta:<v>". Throws ConfigError for anything else.
double parse_frame(std::string_view spec, const scenario::ScenarioConfig& cfg);

// Events S, S2, A1, B2, SA, SB, B1(inst), A2(inst), B1(blc), A2(blc) with the
// worldlines, the light cones through the origin, the collapse surfaces and
// both signal branches. Events that do not exist for this geometry are
// omitted.
DiagramSpec build_diagram(const scenario::ScenarioConfig& cfg, double frame_zeta);

std::string render_svg(const DiagramSpec& spec);

}  // namespace spacelike::diagram
