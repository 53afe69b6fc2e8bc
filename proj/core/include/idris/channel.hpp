#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "idris/geometry.hpp"

namespace idris::channel {

inline constexpr double speed_of_light_mps = 299'792'458.0;

struct RadioParams {
    double carrier_frequency_hz = 28e9;
    double tx_power_dbm = 21.0;
    double bandwidth_hz = 100e6;
    double throughput_cap_bps = 1e9;
    double noise_figure_db = 7.0;
    double calibration_margin_db = 0.0;

    void validate() const;
    friend bool operator==(const RadioParams&, const RadioParams&) = default;
};

// Parabolic mainlobe in dB with a flat sidelobe floor (relative to peak).
struct BeamPattern {
    double peak_gain_dbi = 0.0;
    double half_power_beamwidth_deg = 360.0;
    double sidelobe_floor_db = -30.0;

    void validate() const;
    friend bool operator==(const BeamPattern&, const BeamPattern&) = default;
};

double free_space_path_loss(double distance_m, double frequency_hz);
double beam_gain(const BeamPattern& pattern, double angular_offset_deg);
double peak_directivity_from_beamwidth(double az_beamwidth_deg, double el_beamwidth_deg);
BeamPattern pattern_from_beamwidth(double beamwidth_deg, double sidelobe_floor_db = -30.0);
double quantization_efficiency(int control_bits);
double snr_to_throughput(double snr_db, const RadioParams& radio);
double noise_power_dbm(const RadioParams& radio);

// Inverse of the uncapped Shannon mapping.
double throughput_to_snr(double throughput_bps, const RadioParams& radio);

// Incoherent power sum of two SNRs given in dB; -inf acts as "absent".
double snr_power_sum(double a_db, double b_db);

struct RisPanel {
    int num_elements = 1;
    int control_bits = 0;  // 0 = fixed beam
    BeamPattern pattern;
    double design_incident_deg = 0.0;
    double design_reflection_deg = 45.0;
    // Target reflection angles of the precomputed configurations.
    // Empty for a fixed-beam panel, which has one implicit configuration.
    std::vector<double> codebook_deg;

    bool fixed_beam() const { return control_bits == 0; }
    std::size_t configuration_count() const;
    double reflection_angle_deg(std::size_t configuration) const;
    void validate() const;
    friend bool operator==(const RisPanel&, const RisPanel&) = default;
};

struct RisConfiguration {
    std::size_t codebook_index = 0;
    double amplitude = 1.0;

    friend bool operator==(const RisConfiguration&, const RisConfiguration&) = default;
};

// Evenly spaced codebook over [-half_span, +half_span].
std::vector<double> uniform_codebook(std::size_t size, double half_span_deg);

struct BaseStation {
    Vec3 position;
    BeamPattern pattern;
    std::vector<double> beam_azimuths_deg;

    // Gain of the best codebook beam toward a unit direction.
    double gain_toward(Vec3 direction) const;
};

struct Receiver {
    Vec3 position;
    double gain_dbi = 0.0;
};

struct RisHop {
    std::reference_wrapper<const RisPanel> panel;
    Vec3 position;
    double azimuth_deg = 0.0;    // normal azimuth, counter-clockwise from +x
    double elevation_deg = 0.0;  // normal tilt above the horizontal
    RisConfiguration configuration;
};

// Normal and in-plane tangent of a panel.
struct PanelFrame {
    Vec3 normal;
    Vec3 tangent;
};
PanelFrame panel_frame(double azimuth_deg, double elevation_deg);

// Reflection gain of one panel between a source and a destination, or
// nullopt when either lies behind the panel.
std::optional<double> ris_gain(const RisHop& hop, Vec3 source, Vec3 destination);

struct LinkBudget {
    double tx_power_dbm = 0.0;
    double noise_power_dbm = 0.0;
    std::vector<double> losses_db;
    std::vector<double> gains_db;
    double snr_db = 0.0;
    bool blocked = false;
};

inline constexpr std::size_t max_chain_length = 2;

LinkBudget cascaded_link_budget(const BaseStation& bs, std::span<const RisHop> chain,
                                const Receiver& rx, const RadioParams& radio,
                                std::span<const Box> blockers);

// Same as cascaded_link_budget(...).snr_db without allocating; -inf when blocked.
double cascaded_link_snr(const BaseStation& bs, std::span<const RisHop> chain,
                         const Receiver& rx, const RadioParams& radio,
                         std::span<const Box> blockers);

}  // namespace idris::channel
