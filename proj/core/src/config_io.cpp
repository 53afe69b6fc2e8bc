#include "idris/config_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <concepts>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "idris/error.hpp"

namespace idris {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
    std::vector<std::string_view> parts;
    while (true) {
        const auto comma = s.find(',');
        parts.push_back(trim(s.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return parts;
}

[[noreturn]] void bad_value(const std::string& key, std::string_view value, std::string_view what) {
    throw ConfigError(ConfigErrorCode::parse, key,
                      fmt::format("expected {}, got '{}'", what, value));
}

template <typename Int>
Int parse_integer(std::string_view text, const std::string& key) {
    Int v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size()) bad_value(key, text, "an integer");
    return v;
}

struct Entry {
    std::string value;
    int line = 0;
    bool used = false;
};

class Document {
public:
    explicit Document(std::string_view text) {
        int line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const auto nl = text.find('\n', pos);
            std::string_view line =
                text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
                line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
                throw ConfigError(ConfigErrorCode::parse, fmt::format("line {}", line_no),
                                  "expected 'key = value'");
            const std::string key(trim(line.substr(0, eq)));
            const std::string value(trim(line.substr(eq + 1)));
            if (key.empty())
                throw ConfigError(ConfigErrorCode::parse, fmt::format("line {}", line_no),
                                  "empty key");
            if (entries_.contains(key))
                throw ConfigError(ConfigErrorCode::parse, key,
                                  fmt::format("duplicate key on line {}", line_no));
            entries_.emplace(key, Entry{value, line_no, false});
        }
        if (entries_.empty())
            throw ConfigError(ConfigErrorCode::parse, "", "configuration has no entries");
    }

    std::optional<std::string_view> take(const std::string& key) {
        const auto it = entries_.find(key);
        if (it == entries_.end()) return std::nullopt;
        it->second.used = true;
        return std::string_view(it->second.value);
    }

    std::string_view require(const std::string& key) {
        const auto v = take(key);
        if (!v) throw ConfigError(ConfigErrorCode::validation, key, "required key is missing");
        return *v;
    }

    void read(const std::string& key, double& out) {
        if (const auto v = take(key)) out = parse_number(*v, key);
    }
    template <std::integral Int>
        requires(!std::same_as<Int, bool>)
    void read(const std::string& key, Int& out) {
        if (const auto v = take(key)) out = parse_integer<Int>(*v, key);
    }
    void read(const std::string& key, bool& out) {
        if (const auto v = take(key)) {
            if (*v == "true") out = true;
            else if (*v == "false") out = false;
            else bad_value(key, *v, "true or false");
        }
    }
    void read(const std::string& key, std::string& out) {
        if (const auto v = take(key)) out = std::string(*v);
    }

    // Distinct integer indices N appearing as `<prefix>N.` in any key.
    std::set<std::size_t> indices(const std::string& prefix) const {
        std::set<std::size_t> out;
        for (const auto& [key, entry] : entries_) {
            if (key.rfind(prefix, 0) != 0) continue;
            const std::string_view rest = std::string_view(key).substr(prefix.size());
            const auto dot = rest.find('.');
            const std::string_view digits = rest.substr(0, dot);
            std::size_t idx = 0;
            const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), idx);
            if (ec != std::errc{} || end != digits.data() + digits.size())
                throw ConfigError(ConfigErrorCode::unknown_key, key, "expected a numeric index");
            out.insert(idx);
        }
        return out;
    }

    void reject_unused() const {
        for (const auto& [key, entry] : entries_) {
            if (!entry.used)
                throw ConfigError(ConfigErrorCode::unknown_key, key,
                                  fmt::format("unknown key on line {}", entry.line));
        }
    }

private:
    std::map<std::string, Entry> entries_;
};

std::size_t contiguous_count(const std::set<std::size_t>& idx, const std::string& prefix) {
    std::size_t expected = 0;
    for (std::size_t i : idx) {
        if (i != expected)
            throw ConfigError(ConfigErrorCode::validation, prefix + std::to_string(expected),
                              "indices must be contiguous from 0");
        ++expected;
    }
    return expected;
}

std::vector<double> number_list(std::string_view text, const std::string& key) {
    std::vector<double> out;
    for (auto part : split_list(text)) out.push_back(parse_number(part, key));
    return out;
}

std::vector<double> fixed_list(std::string_view text, const std::string& key, std::size_t n) {
    auto v = number_list(text, key);
    if (v.size() != n) bad_value(key, text, fmt::format("{} comma-separated numbers", n));
    return v;
}

Vec3 read_vec3(std::string_view text, const std::string& key) {
    const auto v = fixed_list(text, key, 3);
    return {v[0], v[1], v[2]};
}

void read_axis(Document& doc, const std::string& key, LatticeAxis& axis) {
    if (const auto v = doc.take(key)) {
        const auto p = fixed_list(*v, key, 3);
        axis = {p[0], p[1], p[2]};
    }
}

template <typename T, typename Parse>
std::vector<T> name_list(std::string_view text, Parse parse) {
    std::vector<T> out;
    for (auto part : split_list(text)) out.push_back(parse(part));
    return out;
}

AgentConfig read_agent(Document& doc, std::size_t k) {
    const std::string p = "agent." + std::to_string(k) + ".";
    AgentConfig a;
    {
        const auto o = fixed_list(doc.require(p + "area.origin"), p + "area.origin", 2);
        const auto s = fixed_list(doc.require(p + "area.size"), p + "area.size", 2);
        a.area.origin_x = o[0];
        a.area.origin_y = o[1];
        a.area.width = s[0];
        a.area.depth = s[1];
    }
    if (const auto v = doc.take(p + "area.cells")) {
        const auto parts = split_list(*v);
        if (parts.size() != 2) bad_value(p + "area.cells", *v, "two integers");
        a.area.cells_x = parse_integer<std::size_t>(parts[0], p + "area.cells");
        a.area.cells_y = parse_integer<std::size_t>(parts[1], p + "area.cells");
    }
    doc.read(p + "area.reflection_order", a.area.reflection_order);
    doc.read(p + "heading_deg", a.heading_deg);
    read_axis(doc, p + "height", a.height);
    read_axis(doc, p + "orientation", a.orientation);
    read_axis(doc, p + "elevation", a.elevation);
    read_axis(doc, p + "amplitude", a.amplitude);

    auto& panel = a.panel;
    panel.num_elements = 5000;
    doc.read(p + "panel.elements", panel.num_elements);
    doc.read(p + "panel.control_bits", panel.control_bits);
    double beamwidth = 20.0;
    doc.read(p + "panel.beamwidth_deg", beamwidth);
    panel.pattern.half_power_beamwidth_deg = beamwidth;
    doc.read(p + "panel.sidelobe_floor_db", panel.pattern.sidelobe_floor_db);
    if (const auto v = doc.take(p + "panel.peak_gain_dbi")) {
        panel.pattern.peak_gain_dbi = parse_number(*v, p + "panel.peak_gain_dbi");
    } else {
        if (!(beamwidth > 0.0 && beamwidth <= 360.0))
            throw ConfigError(ConfigErrorCode::validation, p + "panel.beamwidth_deg",
                              "must lie in (0, 360]");
        panel.pattern.peak_gain_dbi = channel::peak_directivity_from_beamwidth(beamwidth, beamwidth);
    }
    doc.read(p + "panel.design_incident_deg", panel.design_incident_deg);
    doc.read(p + "panel.design_reflection_deg", panel.design_reflection_deg);

    const auto list = doc.take(p + "panel.codebook");
    const auto size = doc.take(p + "panel.codebook_size");
    const auto span = doc.take(p + "panel.codebook_half_span_deg");
    if (list && (size || span))
        throw ConfigError(ConfigErrorCode::validation, p + "panel.codebook",
                          "give either an explicit codebook or its size and span");
    if (list) panel.codebook_deg = number_list(*list, p + "panel.codebook");
    if (size || span) {
        if (!size || !span)
            throw ConfigError(ConfigErrorCode::validation, p + "panel.codebook_size",
                              "codebook size and half span go together");
        const auto n = parse_integer<std::size_t>(*size, p + "panel.codebook_size");
        if (n == 0)
            throw ConfigError(ConfigErrorCode::validation, p + "panel.codebook_size",
                              "must be at least 1");
        panel.codebook_deg =
            channel::uniform_codebook(n, parse_number(*span, p + "panel.codebook_half_span_deg"));
    }

    if (const auto v = doc.take(p + "sub_agents"))
        a.sub_agents = name_list<SubAgentKind>(*v, sub_agent_kind_from_string);
    return a;
}

StartPoint read_start(Document& doc, std::size_t s, std::size_t agent_count) {
    const std::string p = "start." + std::to_string(s) + ".";
    StartPoint sp;
    sp.name = std::string(doc.require(p + "name"));
    for (std::size_t k = 0; k < agent_count; ++k) {
        const std::string key = p + "agent." + std::to_string(k);
        const auto text = doc.require(key);
        const auto v = number_list(text, key);
        if (v.size() != 5 && v.size() != 6)
            bad_value(key, text, "x, y, height, orientation offset, elevation[, ris]");
        StartPose pose{v[0], v[1], v[2], v[3], v[4], 0};
        if (v.size() == 6) {
            if (v[5] < 0.0 || v[5] != static_cast<double>(static_cast<std::size_t>(v[5])))
                bad_value(key, text, "a non-negative integer RIS configuration");
            pose.ris_configuration = static_cast<std::size_t>(v[5]);
        }
        sp.poses.push_back(pose);
    }
    return sp;
}

}  // namespace

SeedRange parse_seed_range(std::string_view text, const std::string& key) {
    const auto dots = text.find("..");
    if (dots == std::string_view::npos) {
        const auto s = parse_integer<std::uint64_t>(trim(text), key);
        return {s, s};
    }
    return {parse_integer<std::uint64_t>(trim(text.substr(0, dots)), key),
            parse_integer<std::uint64_t>(trim(text.substr(dots + 2)), key)};
}

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

double parse_number(std::string_view text, const std::string& key) {
    text = trim(text);
    double v = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    const auto [end, ec] = std::from_chars(first, text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size() || text.empty())
        bad_value(key, text, "a number");
    return v;
}

ScenarioConfig parse_config(std::string_view text) {
    Document doc(text);
    ScenarioConfig c;

    doc.read("name", c.name);
    doc.read("scheme", c.scheme);
    doc.read("start", c.start);
    doc.read("seed", c.seed);
    if (const auto v = doc.take("seeds")) c.seeds = parse_seed_range(*v, "seeds");
    doc.read("budget", c.budget);
    doc.read("oracle_cap", c.oracle_cap);

    doc.read("radio.carrier_frequency_hz", c.radio.carrier_frequency_hz);
    doc.read("radio.tx_power_dbm", c.radio.tx_power_dbm);
    doc.read("radio.bandwidth_hz", c.radio.bandwidth_hz);
    doc.read("radio.throughput_cap_bps", c.radio.throughput_cap_bps);
    doc.read("radio.noise_figure_db", c.radio.noise_figure_db);
    doc.read("calibration_margin", c.radio.calibration_margin_db);
    doc.read("calibration_target_bps", c.calibration_target_bps);
    doc.read("scatter_floor.enabled", c.scatter_floor_enabled);
    doc.read("scatter_floor.snr_db", c.scatter_floor_snr_db);

    c.bs.position = read_vec3(doc.require("bs.position"), "bs.position");
    doc.read("bs.beamwidth_deg", c.bs.beamwidth_deg);
    doc.read("bs.beam_count", c.bs.beam_count);
    doc.read("bs.boresight_deg", c.bs.boresight_deg);
    doc.read("bs.half_span_deg", c.bs.half_span_deg);
    c.rx.position = read_vec3(doc.require("rx.position"), "rx.position");
    doc.read("rx.gain_dbi", c.rx.gain_dbi);

    const auto blockers = contiguous_count(doc.indices("blocker."), "blocker.");
    for (std::size_t b = 0; b < blockers; ++b) {
        const std::string p = "blocker." + std::to_string(b) + ".";
        c.blockers.push_back({read_vec3(doc.require(p + "min"), p + "min"),
                              read_vec3(doc.require(p + "max"), p + "max")});
    }

    const auto agents = contiguous_count(doc.indices("agent."), "agent.");
    for (std::size_t k = 0; k < agents; ++k) c.agents.push_back(read_agent(doc, k));
    const auto starts = contiguous_count(doc.indices("start."), "start.");
    for (std::size_t s = 0; s < starts; ++s) c.starts.push_back(read_start(doc, s, agents));
    doc.read("near_optimal_radius_m", c.near_optimal_radius_m);

    doc.read("kinematics.speed_mps", c.kinematics.speed_mps);
    doc.read("kinematics.height_rate_mps", c.kinematics.height_rate_mps);
    doc.read("kinematics.orientation_rate_dps", c.kinematics.orientation_rate_dps);
    doc.read("kinematics.elevation_rate_dps", c.kinematics.elevation_rate_dps);
    doc.read("kinematics.ris_switch_s", c.kinematics.ris_switch_s);
    doc.read("kinematics.step_latency_s", c.kinematics.step_latency_s);

    doc.read("noise.sigma_db", c.noise.sigma_db);
    doc.read("noise.tick_s", c.noise.tick_s);

    auto& l = c.learning;
    doc.read("learning.epsilon", l.hp.epsilon);
    doc.read("learning.alpha", l.hp.alpha);
    doc.read("learning.gamma", l.hp.gamma);
    doc.read("learning.fl_period", l.hp.fl_period);
    doc.read("learning.window_s", l.hp.window_s);
    doc.read("learning.warmup_steps", l.warmup_steps);
    doc.read("learning.q_init", l.q_init);
    doc.read("learning.patience", l.patience);
    doc.read("learning.tolerance", l.tolerance);
    doc.read("learning.stop_on_convergence", l.stop_on_convergence);
    if (const auto v = doc.take("learning.schedule")) l.schedule = exploration_schedule_from_string(*v);
    doc.read("learning.decay", l.decay);
    doc.read("learning.min_epsilon", l.min_epsilon);
    if (const auto v = doc.take("learning.state_dims"))
        l.state_dims = name_list<StateDim>(*v, state_dim_from_string);

    doc.read("baselines.centralized_latency_s", c.baselines.centralized_latency_s);
    doc.read("baselines.joint_action_cap", c.baselines.joint_action_cap);
    if (const auto v = doc.take("baselines.bandit")) c.baselines.bandit = bandit_policy_from_string(*v);
    doc.read("baselines.ucb_exploration", c.baselines.ucb_exploration);

    doc.reject_unused();
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError(ConfigErrorCode::missing_file, path.string(), "cannot open scenario file");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

namespace {

std::string join_numbers(std::initializer_list<double> values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ", ";
        out += format_number(v);
    }
    return out;
}

std::string join_numbers(const std::vector<double>& values) {
    std::string out;
    for (double v : values) {
        if (!out.empty()) out += ", ";
        out += format_number(v);
    }
    return out;
}

template <typename T>
std::string join_names(const std::vector<T>& values) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ", ";
        out += to_string(v);
    }
    return out;
}

std::string axis(const LatticeAxis& a) { return join_numbers({a.min, a.max, a.step}); }
std::string vec(Vec3 v) { return join_numbers({v.x, v.y, v.z}); }

}  // namespace

std::string serialize_config(const ScenarioConfig& c) {
    std::string out;
    const auto put = [&out](std::string_view key, const std::string& value) {
        out += fmt::format("{} = {}\n", key, value);
    };
    const auto num = [&put](std::string_view key, double v) { put(key, format_number(v)); };
    const auto cnt = [&put](std::string_view key, auto v) { put(key, std::to_string(v)); };
    const auto flag = [&put](std::string_view key, bool v) { put(key, v ? "true" : "false"); };

    put("name", c.name);
    put("scheme", c.scheme);
    if (!c.start.empty()) put("start", c.start);
    cnt("seed", c.seed);
    put("seeds", fmt::format("{}..{}", c.seeds.first, c.seeds.last));
    cnt("budget", c.budget);
    cnt("oracle_cap", c.oracle_cap);
    out += "\n";
    num("radio.carrier_frequency_hz", c.radio.carrier_frequency_hz);
    num("radio.tx_power_dbm", c.radio.tx_power_dbm);
    num("radio.bandwidth_hz", c.radio.bandwidth_hz);
    num("radio.throughput_cap_bps", c.radio.throughput_cap_bps);
    num("radio.noise_figure_db", c.radio.noise_figure_db);
    num("calibration_margin", c.radio.calibration_margin_db);
    num("calibration_target_bps", c.calibration_target_bps);
    flag("scatter_floor.enabled", c.scatter_floor_enabled);
    num("scatter_floor.snr_db", c.scatter_floor_snr_db);
    out += "\n";
    put("bs.position", vec(c.bs.position));
    num("bs.beamwidth_deg", c.bs.beamwidth_deg);
    cnt("bs.beam_count", c.bs.beam_count);
    num("bs.boresight_deg", c.bs.boresight_deg);
    num("bs.half_span_deg", c.bs.half_span_deg);
    put("rx.position", vec(c.rx.position));
    num("rx.gain_dbi", c.rx.gain_dbi);
    for (std::size_t b = 0; b < c.blockers.size(); ++b) {
        const std::string p = "blocker." + std::to_string(b) + ".";
        put(p + "min", vec(c.blockers[b].min));
        put(p + "max", vec(c.blockers[b].max));
    }
    for (std::size_t k = 0; k < c.agents.size(); ++k) {
        const AgentConfig& a = c.agents[k];
        const std::string p = "agent." + std::to_string(k) + ".";
        out += "\n";
        put(p + "area.origin", join_numbers({a.area.origin_x, a.area.origin_y}));
        put(p + "area.size", join_numbers({a.area.width, a.area.depth}));
        put(p + "area.cells", fmt::format("{}, {}", a.area.cells_x, a.area.cells_y));
        cnt(p + "area.reflection_order", a.area.reflection_order);
        num(p + "heading_deg", a.heading_deg);
        put(p + "height", axis(a.height));
        put(p + "orientation", axis(a.orientation));
        put(p + "elevation", axis(a.elevation));
        put(p + "amplitude", axis(a.amplitude));
        cnt(p + "panel.elements", a.panel.num_elements);
        cnt(p + "panel.control_bits", a.panel.control_bits);
        num(p + "panel.beamwidth_deg", a.panel.pattern.half_power_beamwidth_deg);
        num(p + "panel.peak_gain_dbi", a.panel.pattern.peak_gain_dbi);
        num(p + "panel.sidelobe_floor_db", a.panel.pattern.sidelobe_floor_db);
        num(p + "panel.design_incident_deg", a.panel.design_incident_deg);
        num(p + "panel.design_reflection_deg", a.panel.design_reflection_deg);
        if (!a.panel.codebook_deg.empty()) put(p + "panel.codebook", join_numbers(a.panel.codebook_deg));
        put(p + "sub_agents", join_names(a.sub_agents));
    }
    out += "\n";
    for (std::size_t s = 0; s < c.starts.size(); ++s) {
        const std::string p = "start." + std::to_string(s) + ".";
        put(p + "name", c.starts[s].name);
        for (std::size_t k = 0; k < c.starts[s].poses.size(); ++k) {
            const StartPose& q = c.starts[s].poses[k];
            put(p + "agent." + std::to_string(k),
                join_numbers({q.x, q.y, q.height, q.orientation_offset_deg, q.elevation_deg,
                              static_cast<double>(q.ris_configuration)}));
        }
    }
    num("near_optimal_radius_m", c.near_optimal_radius_m);
    out += "\n";
    num("kinematics.speed_mps", c.kinematics.speed_mps);
    num("kinematics.height_rate_mps", c.kinematics.height_rate_mps);
    num("kinematics.orientation_rate_dps", c.kinematics.orientation_rate_dps);
    num("kinematics.elevation_rate_dps", c.kinematics.elevation_rate_dps);
    num("kinematics.ris_switch_s", c.kinematics.ris_switch_s);
    num("kinematics.step_latency_s", c.kinematics.step_latency_s);
    num("noise.sigma_db", c.noise.sigma_db);
    num("noise.tick_s", c.noise.tick_s);
    out += "\n";
    const auto& l = c.learning;
    num("learning.epsilon", l.hp.epsilon);
    num("learning.alpha", l.hp.alpha);
    num("learning.gamma", l.hp.gamma);
    cnt("learning.fl_period", l.hp.fl_period);
    num("learning.window_s", l.hp.window_s);
    cnt("learning.warmup_steps", l.warmup_steps);
    num("learning.q_init", l.q_init);
    cnt("learning.patience", l.patience);
    num("learning.tolerance", l.tolerance);
    flag("learning.stop_on_convergence", l.stop_on_convergence);
    put("learning.schedule", std::string(to_string(l.schedule)));
    num("learning.decay", l.decay);
    num("learning.min_epsilon", l.min_epsilon);
    put("learning.state_dims", join_names(l.state_dims));
    out += "\n";
    num("baselines.centralized_latency_s", c.baselines.centralized_latency_s);
    cnt("baselines.joint_action_cap", c.baselines.joint_action_cap);
    put("baselines.bandit", std::string(to_string(c.baselines.bandit)));
    num("baselines.ucb_exploration", c.baselines.ucb_exploration);
    return out;
}

void save_config(const ScenarioConfig& config, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot write scenario file " + path.string());
    out << serialize_config(config);
    if (!out) throw RuntimeError("failed writing scenario file " + path.string());
}

}  // namespace idris
