#include "spacelike/config.hpp"

#include "spacelike/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace spacelike::scenario {

namespace {

using Kind = ConfigError::Kind;

struct KeySpec {
    const char* section;  // "detector" covers both detector sections
    const char* key;
    const char* type;
    const char* default_value;
    const char* doc;
};

constexpr KeySpec kKeys[] = {
    {"source", "mode", "enum(derived|explicit|lightlike)", "derived",
     "derived: solve for S from proper times; explicit: give S; lightlike: S on the past light cone of both "
     "detections"},
    {"source", "tau_A", "number >= 0", "", "derived mode: proper time S -> A1"},
    {"source", "tau_B", "number >= 0", "", "derived mode: proper time S -> B2"},
    {"source", "t", "number", "", "explicit mode: emission time (lab)"},
    {"source", "x1", "number", "0", "explicit mode: emission position"},
    {"source", "x2", "number", "0", "explicit mode"},
    {"source", "x3", "number", "0", "explicit mode"},
    {"source", "speed_A", "number in (0,1]", "1", "explicit mode: signal speed towards A (fraction of c)"},
    {"source", "speed_B", "number in (0,1]", "1", "explicit mode: signal speed towards B (fraction of c)"},
    {"detector", "zeta", "number", "0", "rapidity along e1 (exclusive with beta)"},
    {"detector", "beta", "number in (-1,1)", "0", "velocity along e1 (exclusive with zeta)"},
    {"detector", "offset2", "number", "0", "transverse offset"},
    {"detector", "offset3", "number", "0", "transverse offset"},
    {"detector", "arrival", "number", "",
     "rest-frame time of signal detection; required unless the source is explicit"},
    {"detector", "window", "number > 0", "0.001", "response window (rest frame)"},
    {"detector", "pre_decision", "number in (0,window)", "window/2", "nominal response time"},
    {"detector", "jitter", "number in [0,1)", "0.8", "jitter fraction around the nominal decision time"},
    {"detector", "axes", "list of unit 3-vectors '(x,y,z), ...'", "(0,0,1)", "measurement axes"},
    {"detector", "weights", "list of numbers summing to 1", "uniform", "axis choice probabilities"},
    {"policy", "kind", "enum(inst|plane|blc)", "blc", "collapse hypersurface"},
    {"policy", "slope", "number in (-1,1)", "0", "plane slope dt'/dx1' in the decider's frame"},
    {"run", "trials", "integer >= 1", "1000", "trial count"},
    {"run", "seed", "unsigned integer", "", "root seed; falls back to SIM_SEED, then 1"},
    {"run", "order", "enum(auto|A|B)", "auto", "proper-time rule or forced first decider"},
    {"run", "report_frames", "list of numbers", "", "extra rapidities for the trial log"},
};

bool known_key(const std::string& section, const std::string& key) {
    const std::string family = section.rfind("detector.", 0) == 0 ? "detector" : section;
    for (const auto& k : kKeys) {
        if (family == k.section && key == k.key) return true;
    }
    return false;
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

struct Value {
    std::string text;
    int line;
};

using Section = std::map<std::string, Value>;

[[noreturn]] void semantic(const std::string& key, const std::string& what) {
    throw ConfigError(Kind::semantic, key + ": " + what, 0, key);
}

double to_number(const std::string& key, const std::string& text) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        semantic(key, "expected a finite number, got '" + text + "'");
    }
    return v;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& text) {
    char* end = nullptr;
    if (text.empty() || text[0] == '-' || text[0] == '+') semantic(key, "expected an unsigned integer");
    const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
    if (end != text.c_str() + text.size()) semantic(key, "expected an unsigned integer, got '" + text + "'");
    return v;
}

std::vector<double> to_numbers(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_number(key, trim(item)));
    if (out.empty()) semantic(key, "empty list");
    return out;
}

std::vector<Vec3> to_axes(const std::string& key, const std::string& text) {
    std::vector<Vec3> out;
    std::size_t pos = 0;
    while (true) {
        pos = text.find_first_not_of(" \t", pos);
        if (pos == std::string::npos) break;
        if (text[pos] != '(') semantic(key, "expected '(' in axis list");
        const auto close = text.find(')', pos);
        if (close == std::string::npos) semantic(key, "unterminated axis");
        const auto comps = to_numbers(key, text.substr(pos + 1, close - pos - 1));
        if (comps.size() != 3) semantic(key, "axis needs three components");
        const Vec3 v{comps[0], comps[1], comps[2]};
        if (std::abs(v.norm() - 1.0) > 1e-9) semantic(key, "axis is not a unit vector");
        out.push_back(v);
        pos = text.find_first_not_of(" \t", close + 1);
        if (pos == std::string::npos) break;
        if (text[pos] != ',') semantic(key, "expected ',' between axes");
        ++pos;
    }
    if (out.empty()) semantic(key, "empty axis list");
    return out;
}

std::map<std::string, Section> tokenize(std::string_view text) {
    std::map<std::string, Section> sections;
    std::string current;
    int lineno = 0;
    bool any = false;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view raw = text.substr(start, nl - start);
        start = nl + 1;
        ++lineno;
        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        any = true;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(Kind::syntax, "unterminated section header", lineno);
            current = trim(std::string_view(line).substr(1, line.size() - 2));
            if (current != "source" && current != "detector.A" && current != "detector.B" && current != "policy" &&
                current != "run") {
                throw ConfigError(Kind::semantic, "unknown section [" + current + "]", lineno, current);
            }
            if (sections.count(current)) {
                throw ConfigError(Kind::semantic, "duplicate section [" + current + "]", lineno, current);
            }
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(Kind::syntax, "expected 'key = value'", lineno);
        if (current.empty()) throw ConfigError(Kind::syntax, "key outside of any section", lineno);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError(Kind::syntax, "missing key", lineno);
        const std::string full = current + "." + key;
        if (!known_key(current, key)) throw ConfigError(Kind::semantic, "unknown key '" + full + "'", lineno, full);
        auto& sec = sections[current];
        if (sec.count(key)) throw ConfigError(Kind::semantic, "duplicate key '" + full + "'", lineno, full);
        sec[key] = {value, lineno};
    }
    if (!any) throw ConfigError(Kind::syntax, "empty configuration", 1);
    return sections;
}

class Reader {
public:
    Reader(const Section& s, std::string prefix) : s_(s), prefix_(std::move(prefix)) {}

    bool has(const std::string& k) const { return s_.count(k) != 0; }
    std::string full(const std::string& k) const { return prefix_ + "." + k; }
    const std::string& text(const std::string& k) const { return s_.at(k).text; }
    double number(const std::string& k, double fallback) const {
        return has(k) ? to_number(full(k), text(k)) : fallback;
    }
    std::optional<double> maybe(const std::string& k) const {
        if (!has(k)) return std::nullopt;
        return to_number(full(k), text(k));
    }
    double required(const std::string& k) const {
        if (!has(k)) semantic(full(k), "required key is missing");
        return to_number(full(k), text(k));
    }
    void forbid(const std::string& k, const std::string& why) const {
        if (has(k)) semantic(full(k), why);
    }

private:
    const Section& s_;
    std::string prefix_;
};

const Section kEmpty;

const Section& section(const std::map<std::string, Section>& all, const std::string& name) {
    const auto it = all.find(name);
    return it == all.end() ? kEmpty : it->second;
}

kinematics::Detector read_detector(const Section& sec, Side side, std::optional<double>& arrival) {
    const std::string name = "detector." + std::string(to_string(side));
    Reader r(sec, name);
    kinematics::Detector d;
    d.id = std::string(to_string(side));
    d.side = side;
    if (r.has("zeta") && r.has("beta")) semantic(r.full("beta"), "zeta and beta are mutually exclusive");
    if (r.has("beta")) {
        const double beta = r.required("beta");
        if (!(std::abs(beta) < 1.0)) semantic(r.full("beta"), "|beta| must be < 1");
        d.worldline.zeta = std::atanh(beta);
    } else {
        d.worldline.zeta = r.number("zeta", 0.0);
    }
    d.worldline.offset2 = r.number("offset2", 0.0);
    d.worldline.offset3 = r.number("offset3", 0.0);
    arrival = r.maybe("arrival");
    d.dt_window = r.number("window", 1e-3);
    if (!(d.dt_window > 0.0)) semantic(r.full("window"), "must be > 0");
    d.pre_decision = r.number("pre_decision", 0.5 * d.dt_window);
    if (!(d.pre_decision > 0.0 && d.pre_decision < d.dt_window)) {
        semantic(r.full("pre_decision"), "must lie strictly inside the window");
    }
    d.jitter = r.number("jitter", 0.8);
    if (!(d.jitter >= 0.0 && d.jitter < 1.0)) semantic(r.full("jitter"), "must lie in [0, 1)");
    if (r.has("axes")) d.axes = to_axes(r.full("axes"), r.text("axes"));
    if (r.has("weights")) {
        d.axis_weights = to_numbers(r.full("weights"), r.text("weights"));
        if (d.axis_weights.size() != d.axes.size()) semantic(r.full("weights"), "one weight per axis required");
        double sum = 0.0;
        for (double w : d.axis_weights) {
            if (!(w >= 0.0)) semantic(r.full("weights"), "weights must be >= 0");
            sum += w;
        }
        if (std::abs(sum - 1.0) > 1e-9) semantic(r.full("weights"), "weights must sum to 1");
    } else {
        d.axis_weights.assign(d.axes.size(), 1.0 / static_cast<double>(d.axes.size()));
    }
    try {
        d.validate();
    } catch (const DomainError& e) {
        semantic(name, e.what());
    }
    return d;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_axis(const Vec3& v) { return "(" + fmt(v.x) + ", " + fmt(v.y) + ", " + fmt(v.z) + ")"; }

}  // namespace

std::string_view to_string(SourceMode m) {
    switch (m) {
        case SourceMode::derived: return "derived";
        case SourceMode::explicit_event: return "explicit";
        case SourceMode::lightlike: return "lightlike";
    }
    return "unknown";
}

std::string_view to_string(OrderMode m) {
    switch (m) {
        case OrderMode::automatic: return "auto";
        case OrderMode::a_first: return "A";
        case OrderMode::b_first: return "B";
    }
    return "unknown";
}

void ScenarioConfig::validate() const {
    if (trials < 1) semantic("run.trials", "must be >= 1");
    policy.validate();
    for (const auto* d : {&detector_a, &detector_b}) {
        try {
            d->validate();
        } catch (const DomainError& e) {
            semantic("detector." + d->id, e.what());
        }
    }
    if (source.mode == SourceMode::explicit_event) {
        if (arrival_a || arrival_b) semantic("detector.A.arrival", "not allowed with an explicit source");
        for (double s : {source.speed_a, source.speed_b}) {
            if (!(s > 0.0 && s <= 1.0)) semantic("source.speed_A", "signal speed must lie in (0, 1]");
        }
        if (!source.event.is_finite()) semantic("source.t", "non-finite source event");
    } else {
        if (!arrival_a) semantic("detector.A.arrival", "required key is missing");
        if (!arrival_b) semantic("detector.B.arrival", "required key is missing");
        if (source.mode == SourceMode::derived) {
            if (!(source.tau_a >= 0.0)) semantic("source.tau_A", "must be >= 0");
            if (!(source.tau_b >= 0.0)) semantic("source.tau_B", "must be >= 0");
        }
    }
}

ScenarioConfig parse_config(std::string_view text) {
    const auto all = tokenize(text);
    ScenarioConfig cfg;

    for (const char* name : {"detector.A", "detector.B"}) {
        if (!all.count(name)) semantic(name, "section is missing");
    }

    {
        Reader r(section(all, "source"), "source");
        const std::string mode = r.has("mode") ? r.text("mode") : "derived";
        if (mode == "derived") {
            cfg.source.mode = SourceMode::derived;
        } else if (mode == "explicit") {
            cfg.source.mode = SourceMode::explicit_event;
        } else if (mode == "lightlike") {
            cfg.source.mode = SourceMode::lightlike;
        } else {
            semantic("source.mode", "expected derived, explicit or lightlike");
        }
        const char* explicit_only[] = {"t", "x1", "x2", "x3", "speed_A", "speed_B"};
        if (cfg.source.mode == SourceMode::derived) {
            cfg.source.tau_a = r.required("tau_A");
            cfg.source.tau_b = r.required("tau_B");
        } else {
            r.forbid("tau_A", "only valid in derived mode");
            r.forbid("tau_B", "only valid in derived mode");
        }
        if (cfg.source.mode == SourceMode::explicit_event) {
            cfg.source.event = {r.required("t"), r.number("x1", 0.0), r.number("x2", 0.0), r.number("x3", 0.0)};
            cfg.source.speed_a = r.number("speed_A", 1.0);
            cfg.source.speed_b = r.number("speed_B", 1.0);
        } else {
            for (const char* k : explicit_only) r.forbid(k, "only valid in explicit mode");
        }
    }

    cfg.detector_a = read_detector(section(all, "detector.A"), Side::A, cfg.arrival_a);
    cfg.detector_b = read_detector(section(all, "detector.B"), Side::B, cfg.arrival_b);

    {
        Reader r(section(all, "policy"), "policy");
        const std::string kind = r.has("kind") ? r.text("kind") : "blc";
        if (kind == "inst" || kind == "instantaneous") {
            r.forbid("slope", "only valid for kind = plane");
            cfg.policy = collapse::CollapsePolicy::instantaneous();
        } else if (kind == "blc" || kind == "backward_light_cone") {
            r.forbid("slope", "only valid for kind = plane");
            cfg.policy = collapse::CollapsePolicy::backward_light_cone();
        } else if (kind == "plane") {
            const double s = r.number("slope", 0.0);
            if (!(std::abs(s) < 1.0)) semantic("policy.slope", "must lie in (-1, 1)");
            cfg.policy = collapse::CollapsePolicy::tilted_plane(s);
        } else {
            semantic("policy.kind", "expected inst, plane or blc");
        }
    }

    {
        const Section& sec = section(all, "run");
        Reader r(sec, "run");
        if (r.has("trials")) {
            cfg.trials = to_unsigned("run.trials", r.text("trials"));
            if (cfg.trials < 1) semantic("run.trials", "must be >= 1");
        }
        if (r.has("seed")) cfg.seed = to_unsigned("run.seed", r.text("seed"));
        if (r.has("order")) {
            const auto& o = r.text("order");
            if (o == "auto") {
                cfg.order = OrderMode::automatic;
            } else if (o == "A") {
                cfg.order = OrderMode::a_first;
            } else if (o == "B") {
                cfg.order = OrderMode::b_first;
            } else {
                semantic("run.order", "expected auto, A or B");
            }
        }
        if (r.has("report_frames") && !r.text("report_frames").empty()) {
            cfg.report_frames = to_numbers("run.report_frames", r.text("report_frames"));
        }
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(Kind::semantic, "cannot open '" + path + "'", 0, "path");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "[source]\n";
    out << "mode = " << to_string(cfg.source.mode) << "\n";
    if (cfg.source.mode == SourceMode::derived) {
        out << "tau_A = " << fmt(cfg.source.tau_a) << "\n";
        out << "tau_B = " << fmt(cfg.source.tau_b) << "\n";
    }
    if (cfg.source.mode == SourceMode::explicit_event) {
        const auto& e = cfg.source.event;
        out << "t = " << fmt(e.t) << "\nx1 = " << fmt(e.x1) << "\nx2 = " << fmt(e.x2) << "\nx3 = " << fmt(e.x3)
            << "\n";
        out << "speed_A = " << fmt(cfg.source.speed_a) << "\nspeed_B = " << fmt(cfg.source.speed_b) << "\n";
    }
    for (Side side : {Side::A, Side::B}) {
        const auto& d = cfg.detector(side);
        const auto& arrival = side == Side::A ? cfg.arrival_a : cfg.arrival_b;
        out << "\n[detector." << to_string(side) << "]\n";
        out << "zeta = " << fmt(d.worldline.zeta) << "\n";
        out << "offset2 = " << fmt(d.worldline.offset2) << "\noffset3 = " << fmt(d.worldline.offset3) << "\n";
        if (arrival) out << "arrival = " << fmt(*arrival) << "\n";
        out << "window = " << fmt(d.dt_window) << "\npre_decision = " << fmt(d.pre_decision)
            << "\njitter = " << fmt(d.jitter) << "\n";
        out << "axes = ";
        for (std::size_t i = 0; i < d.axes.size(); ++i) out << (i ? ", " : "") << fmt_axis(d.axes[i]);
        out << "\nweights = ";
        for (std::size_t i = 0; i < d.axis_weights.size(); ++i) out << (i ? ", " : "") << fmt(d.axis_weights[i]);
        out << "\n";
    }
    out << "\n[policy]\n";
    switch (cfg.policy.kind) {
        case collapse::PolicyKind::instantaneous: out << "kind = inst\n"; break;
        case collapse::PolicyKind::backward_light_cone: out << "kind = blc\n"; break;
        case collapse::PolicyKind::tilted_plane: out << "kind = plane\nslope = " << fmt(cfg.policy.slope) << "\n"; break;
    }
    out << "\n[run]\ntrials = " << cfg.trials << "\n";
    if (cfg.seed) out << "seed = " << *cfg.seed << "\n";
    out << "order = " << to_string(cfg.order) << "\n";
    if (!cfg.report_frames.empty()) {
        out << "report_frames = ";
        for (std::size_t i = 0; i < cfg.report_frames.size(); ++i) out << (i ? ", " : "") << fmt(cfg.report_frames[i]);
        out << "\n";
    }
    return out.str();
}

std::string schema_json() {
    nlohmann::ordered_json doc;
    doc["format"] = "sectioned key = value, '#' comments";
    doc["sections"] = nlohmann::ordered_json::object();
    for (const char* name : {"source", "detector.A", "detector.B", "policy", "run"}) {
        const std::string family = std::string(name).rfind("detector.", 0) == 0 ? "detector" : name;
        auto& sec = doc["sections"][name];
        sec = nlohmann::ordered_json::object();
        for (const auto& k : kKeys) {
            if (family != k.section) continue;
            nlohmann::ordered_json entry;
            entry["type"] = k.type;
            if (*k.default_value) {
                entry["default"] = k.default_value;
            } else {
                entry["default"] = nullptr;
            }
            entry["doc"] = k.doc;
            sec[k.key] = entry;
        }
    }
    return doc.dump(2) + "\n";
}

}  // namespace spacelike::scenario
