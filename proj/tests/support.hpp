#pragma once

#include <filesystem>
#include <string>

#include <idris/config.hpp>
#include <idris/config_io.hpp>

namespace idris::test {

inline std::filesystem::path scenario_path(const std::string& name) {
    return std::filesystem::path(IDRIS_SCENARIO_DIR) / (name + ".cfg");
}

inline ScenarioConfig shipped(const std::string& name) { return load_config(scenario_path(name)); }

// One agent on a 4x3 lattice with short axes, small enough for brute force.
inline ScenarioConfig tiny_config() {
    ScenarioConfig c;
    c.name = "tiny";
    c.bs.position = {0, 0, 1.5};
    c.rx.position = {6, 2, 1.5};
    c.blockers.push_back({{2.5, 0, 0}, {3, 1.5, 3}});
    AgentConfig a;
    a.area = {-2, 4, 4, 3, 1, 4, 3};
    a.heading_deg = 270;
    a.height = {1, 1.5, 0.5};
    a.orientation = {-10, 10, 10};
    a.elevation = {0, 0, 5};
    a.panel.num_elements = 5000;
    a.panel.pattern = channel::pattern_from_beamwidth(20.0);
    c.agents.push_back(a);
    c.starts.push_back({"origin", {{-1.5, 4.5, 1.0, 0, 0, 0}}});
    c.starts.push_back({"far", {{1.5, 6.5, 1.5, 10, 0, 0}}});
    c.budget = 40;
    c.learning.stop_on_convergence = false;
    return c;
}

}  // namespace idris::test
