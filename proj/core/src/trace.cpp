#include "idris/trace.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <stdexcept>

#include "idris/config_io.hpp"
#include "idris/error.hpp"

namespace idris {

namespace {

int sub_action_index(auto move) { return static_cast<int>(move); }

template <typename Int>
Int parse_field(std::string_view text, std::size_t line) {
    Int v{};
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw RuntimeError(fmt::format("trace line {}: bad integer '{}'", line, text));
    return v;
}

bool parse_flag(std::string_view text, std::size_t line) {
    if (text == "1") return true;
    if (text == "0") return false;
    throw RuntimeError(fmt::format("trace line {}: bad flag '{}'", line, text));
}

}  // namespace

TraceRecord make_record(std::size_t step, std::size_t agent, std::size_t state,
                        const DeploymentAction& action, const ThroughputSample& sample,
                        bool federated, bool clamped) {
    TraceRecord r;
    r.step = step;
    r.agent = agent;
    r.state = state;
    r.action_position = sub_action_index(action.position);
    r.action_height = sub_action_index(action.height);
    r.action_orientation = sub_action_index(action.orientation);
    r.action_elevation = sub_action_index(action.elevation);
    r.action_ris = action.ris ? static_cast<int>(*action.ris) : -1;
    r.reward = sample.reward;
    r.throughput_bps = sample.throughput_bps;
    r.clock_s = sample.clock_s;
    r.federated = federated;
    r.clamped = clamped;
    return r;
}

std::size_t EpisodeTrace::step_count() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].step != records[i - 1].step) ++n;
    }
    return n;
}

std::vector<double> EpisodeTrace::step_rewards() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].step != records[i - 1].step) out.push_back(records[i].reward);
    }
    return out;
}

std::vector<double> EpisodeTrace::step_throughputs() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (i == 0 || records[i].step != records[i - 1].step)
            out.push_back(records[i].throughput_bps);
    }
    return out;
}

std::size_t EpisodeTrace::federation_events() const {
    std::size_t n = 0;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].federated && (i == 0 || records[i].step != records[i - 1].step)) ++n;
    }
    return n;
}

TraceFormat trace_format_from_string(std::string_view name) {
    if (name == "csv") return TraceFormat::csv;
    if (name == "json") return TraceFormat::json;
    throw ConfigError(ConfigErrorCode::usage, "--format", "expected csv or json");
}

std::string trace_to_csv(const EpisodeTrace& trace) {
    std::string out(trace_csv_header);
    out += '\n';
    for (const TraceRecord& r : trace.records) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", r.step, r.agent, r.state,
                           r.action_position, r.action_height, r.action_orientation,
                           r.action_elevation, r.action_ris, format_number(r.reward),
                           format_number(r.throughput_bps), format_number(r.clock_s),
                           r.federated ? 1 : 0, r.clamped ? 1 : 0);
    }
    return out;
}

std::string trace_to_json(const EpisodeTrace& trace) {
    nlohmann::ordered_json records = nlohmann::ordered_json::array();
    for (const TraceRecord& r : trace.records) {
        records.push_back({{"step", r.step},
                           {"agent", r.agent},
                           {"state", r.state},
                           {"action_position", r.action_position},
                           {"action_height", r.action_height},
                           {"action_orientation", r.action_orientation},
                           {"action_elevation", r.action_elevation},
                           {"action_ris", r.action_ris},
                           {"reward", r.reward},
                           {"throughput_bps", r.throughput_bps},
                           {"clock_s", r.clock_s},
                           {"federated", r.federated},
                           {"clamped", r.clamped}});
    }
    nlohmann::ordered_json doc{{"records", std::move(records)}};
    return doc.dump(2) + "\n";
}

EpisodeTrace trace_from_csv(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line) || line != trace_csv_header)
        throw RuntimeError("trace CSV header does not match the expected columns");
    EpisodeTrace trace;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view rest(line);
        while (true) {
            const auto comma = rest.find(',');
            f.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        if (f.size() != 13)
            throw RuntimeError(fmt::format("trace line {}: expected 13 fields", line_no));
        TraceRecord r;
        r.step = parse_field<std::size_t>(f[0], line_no);
        r.agent = parse_field<std::size_t>(f[1], line_no);
        r.state = parse_field<std::size_t>(f[2], line_no);
        r.action_position = parse_field<int>(f[3], line_no);
        r.action_height = parse_field<int>(f[4], line_no);
        r.action_orientation = parse_field<int>(f[5], line_no);
        r.action_elevation = parse_field<int>(f[6], line_no);
        r.action_ris = parse_field<int>(f[7], line_no);
        const std::string where = fmt::format("trace line {}", line_no);
        try {
            r.reward = parse_number(f[8], where);
            r.throughput_bps = parse_number(f[9], where);
            r.clock_s = parse_number(f[10], where);
        } catch (const ConfigError& e) {
            throw RuntimeError(e.what());
        }
        r.federated = parse_flag(f[11], line_no);
        r.clamped = parse_flag(f[12], line_no);
        trace.records.push_back(r);
    }
    return trace;
}

EpisodeTrace trace_from_json(std::string_view text) {
    EpisodeTrace trace;
    try {
        const auto doc = nlohmann::json::parse(text);
        for (const auto& j : doc.at("records")) {
            TraceRecord r;
            r.step = j.at("step").get<std::size_t>();
            r.agent = j.at("agent").get<std::size_t>();
            r.state = j.at("state").get<std::size_t>();
            r.action_position = j.at("action_position").get<int>();
            r.action_height = j.at("action_height").get<int>();
            r.action_orientation = j.at("action_orientation").get<int>();
            r.action_elevation = j.at("action_elevation").get<int>();
            r.action_ris = j.at("action_ris").get<int>();
            r.reward = j.at("reward").get<double>();
            r.throughput_bps = j.at("throughput_bps").get<double>();
            r.clock_s = j.at("clock_s").get<double>();
            r.federated = j.at("federated").get<bool>();
            r.clamped = j.at("clamped").get<bool>();
            trace.records.push_back(r);
        }
    } catch (const nlohmann::json::exception& e) {
        throw RuntimeError(std::string("malformed trace JSON: ") + e.what());
    }
    return trace;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw RuntimeError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw RuntimeError("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw RuntimeError("cannot open " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

void emit_trace(const EpisodeTrace& trace, const std::filesystem::path& path, TraceFormat format) {
    write_text_file(path, format == TraceFormat::csv ? trace_to_csv(trace) : trace_to_json(trace));
}

EpisodeTrace read_trace(const std::filesystem::path& path, TraceFormat format) {
    const std::string text = read_text_file(path);
    return format == TraceFormat::csv ? trace_from_csv(text) : trace_from_json(text);
}

bool converged(std::span<const double> rewards, std::size_t patience, double tolerance) {
    if (patience == 0) throw std::invalid_argument("patience must be at least 1");
    if (rewards.size() < patience) return false;
    const auto tail = rewards.last(patience);
    const auto [lo, hi] = std::minmax_element(tail.begin(), tail.end());
    return *hi - *lo <= tolerance;
}

bool converged(const EpisodeTrace& trace, std::size_t patience, double tolerance) {
    return converged(trace.step_rewards(), patience, tolerance);
}

DeploymentTime deployment_time(const EpisodeTrace& trace, std::size_t patience,
                               double tolerance) {
    if (trace.records.empty()) throw std::invalid_argument("deployment time of an empty trace");
    const auto rewards = trace.step_rewards();
    std::vector<double> clocks;
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        if (i == 0 || trace.records[i].step != trace.records[i - 1].step)
            clocks.push_back(trace.records[i].clock_s);
    }
    const std::span<const double> all(rewards);
    for (std::size_t t = patience; t <= rewards.size(); ++t) {
        if (converged(all.first(t), patience, tolerance)) return {clocks[t - 1], true, t};
    }
    return {clocks.back(), false, rewards.size()};
}

}  // namespace idris
