#pragma once

// Scenario configuration: line-oriented sections with `key = value` pairs and
// `#` comments.
//
//   [source]      mode = derived | explicit | lightlike
//   [detector.A]  rapidity, offsets, arrival time, response window, axes
//   [detector.B]
//   [policy]      kind = inst | plane | blc, slope for planes
//   [run]         trials, seed, order, report_frames
//
// schema_json() lists every key with its type, default and meaning.

#include "spacelike/collapse.hpp"
#include "spacelike/kinematics.hpp"
#include "spacelike/minkowski.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace spacelike::scenario {

enum class SourceMode { derived, explicit_event, lightlike };
enum class OrderMode { automatic, a_first, b_first };

std::string_view to_string(SourceMode m);
std::string_view to_string(OrderMode m);

struct SourceConfig {
    SourceMode mode = SourceMode::derived;
    // derived mode: target proper times S -> A1 and S -> B2
    double tau_a = 0.0;
    double tau_b = 0.0;
    // explicit mode
    minkowski::Event event;
    double speed_a = 1.0;
    double speed_b = 1.0;
};

struct ScenarioConfig {
    SourceConfig source;
    kinematics::Detector detector_a;
    kinematics::Detector detector_b;
    // Rest-frame signal arrival times; required unless the source is explicit.
    std::optional<double> arrival_a;
    std::optional<double> arrival_b;
    collapse::CollapsePolicy policy = collapse::CollapsePolicy::backward_light_cone();
    std::uint64_t trials = 1000;
    std::optional<std::uint64_t> seed;
    OrderMode order = OrderMode::automatic;
    std::vector<double> report_frames;

    const kinematics::Detector& detector(Side s) const { return s == Side::A ? detector_a : detector_b; }
    // Throws ConfigError (semantic) on any violated invariant.
    void validate() const;
};

// Throws ConfigError: syntax errors carry the line number, semantic errors
// name the offending key.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

// Every key with defaults applied; parse_config(dump_config(c)) reproduces c.
std::string dump_config(const ScenarioConfig& cfg);

// Machine-readable key list (JSON).
std::string schema_json();

}  // namespace spacelike::scenario
