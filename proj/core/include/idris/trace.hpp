#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idris/environment.hpp"

namespace idris {

// One agent's view of one step. Action fields hold the enum index of each
// sub-action; action_ris is -1 when the configuration was held.
struct TraceRecord {
    std::size_t step = 0;
    std::size_t agent = 0;
    std::size_t state = 0;
    int action_position = static_cast<int>(PositionMove::hold);
    int action_height = static_cast<int>(HeightMove::hold);
    int action_orientation = static_cast<int>(OrientationMove::hold);
    int action_elevation = static_cast<int>(ElevationMove::hold);
    int action_ris = -1;
    double reward = 0.0;
    double throughput_bps = 0.0;
    double clock_s = 0.0;
    bool federated = false;
    bool clamped = false;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

TraceRecord make_record(std::size_t step, std::size_t agent, std::size_t state,
                        const DeploymentAction& action, const ThroughputSample& sample,
                        bool federated, bool clamped);

// Records ordered by step, then agent.
struct EpisodeTrace {
    std::vector<TraceRecord> records;

    std::size_t step_count() const;
    std::vector<double> step_rewards() const;
    std::vector<double> step_throughputs() const;
    std::size_t federation_events() const;

    friend bool operator==(const EpisodeTrace&, const EpisodeTrace&) = default;
};

enum class TraceFormat { csv, json };

TraceFormat trace_format_from_string(std::string_view name);

inline constexpr std::string_view trace_csv_header =
    "step,agent,state,action_position,action_height,action_orientation,action_elevation,"
    "action_ris,reward,throughput_bps,clock_s,federated,clamped";

std::string trace_to_csv(const EpisodeTrace& trace);
std::string trace_to_json(const EpisodeTrace& trace);
EpisodeTrace trace_from_csv(std::string_view text);
EpisodeTrace trace_from_json(std::string_view text);

void emit_trace(const EpisodeTrace& trace, const std::filesystem::path& path, TraceFormat format);
EpisodeTrace read_trace(const std::filesystem::path& path, TraceFormat format);

// Max-min spread of the last `patience` rewards is within tolerance.
bool converged(std::span<const double> rewards, std::size_t patience, double tolerance);
bool converged(const EpisodeTrace& trace, std::size_t patience, double tolerance);

struct DeploymentTime {
    double seconds = 0.0;
    bool converged = false;
    std::size_t steps = 0;  // step at which the time was taken
};

DeploymentTime deployment_time(const EpisodeTrace& trace, std::size_t patience, double tolerance);

void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace idris
