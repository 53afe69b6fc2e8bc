#include "idris/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "idris/error.hpp"

namespace idris::channel {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

void RadioParams::validate() const {
    if (!(carrier_frequency_hz > 0.0)) throw DomainError("carrier frequency must be positive");
    if (!(bandwidth_hz > 0.0)) throw DomainError("bandwidth must be positive");
    if (!(throughput_cap_bps > 0.0)) throw DomainError("throughput cap must be positive");
    if (!std::isfinite(tx_power_dbm) || !std::isfinite(noise_figure_db) ||
        !std::isfinite(calibration_margin_db))
        throw DomainError("radio levels must be finite");
}

void BeamPattern::validate() const {
    if (!(half_power_beamwidth_deg > 0.0 && half_power_beamwidth_deg <= 360.0))
        throw DomainError("half-power beamwidth must lie in (0, 360]");
    if (!(sidelobe_floor_db < 0.0)) throw DomainError("sidelobe floor must be negative");
    if (!std::isfinite(peak_gain_dbi)) throw DomainError("peak gain must be finite");
}

double free_space_path_loss(double distance_m, double frequency_hz) {
    if (!(distance_m > 0.0)) throw DomainError("path loss needs a positive distance");
    if (!(frequency_hz > 0.0)) throw DomainError("path loss needs a positive frequency");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz /
                             speed_of_light_mps);
}

double beam_gain(const BeamPattern& pattern, double angular_offset_deg) {
    const double off = std::abs(wrap_deg_180(angular_offset_deg));
    const double ratio = off / pattern.half_power_beamwidth_deg;
    return pattern.peak_gain_dbi - std::min(12.0 * ratio * ratio, -pattern.sidelobe_floor_db);
}

double peak_directivity_from_beamwidth(double az_beamwidth_deg, double el_beamwidth_deg) {
    if (!(az_beamwidth_deg > 0.0 && az_beamwidth_deg <= 360.0) ||
        !(el_beamwidth_deg > 0.0 && el_beamwidth_deg <= 360.0))
        throw DomainError("beamwidths must lie in (0, 360]");
    return 10.0 * std::log10(41253.0 / (az_beamwidth_deg * el_beamwidth_deg));
}

BeamPattern pattern_from_beamwidth(double beamwidth_deg, double sidelobe_floor_db) {
    BeamPattern p{peak_directivity_from_beamwidth(beamwidth_deg, beamwidth_deg), beamwidth_deg,
                  sidelobe_floor_db};
    p.validate();
    return p;
}

double quantization_efficiency(int control_bits) {
    if (control_bits < 0) throw DomainError("control bits cannot be negative");
    if (control_bits == 0) return 0.0;
    // Uniform phase error over one bin of width 2*pi/2^b.
    const double half_bin = std::numbers::pi / std::pow(2.0, control_bits);
    return 20.0 * std::log10(std::sin(half_bin) / half_bin);
}

double snr_to_throughput(double snr_db, const RadioParams& radio) {
    if (snr_db == kNegInf) return 0.0;
    const double shannon = radio.bandwidth_hz * std::log2(1.0 + db_to_linear(snr_db));
    return std::min(radio.throughput_cap_bps, shannon);
}

double throughput_to_snr(double throughput_bps, const RadioParams& radio) {
    if (!(throughput_bps > 0.0)) return kNegInf;
    return 10.0 * std::log10(std::exp2(throughput_bps / radio.bandwidth_hz) - 1.0);
}

double noise_power_dbm(const RadioParams& radio) {
    return -174.0 + 10.0 * std::log10(radio.bandwidth_hz) + radio.noise_figure_db;
}

double snr_power_sum(double a_db, double b_db) {
    if (a_db == kNegInf) return b_db;
    if (b_db == kNegInf) return a_db;
    return 10.0 * std::log10(db_to_linear(a_db) + db_to_linear(b_db));
}

std::size_t RisPanel::configuration_count() const {
    return codebook_deg.empty() ? 1 : codebook_deg.size();
}

double RisPanel::reflection_angle_deg(std::size_t configuration) const {
    if (codebook_deg.empty()) return design_reflection_deg;
    return codebook_deg.at(configuration);
}

void RisPanel::validate() const {
    if (num_elements < 1) throw DomainError("a panel needs at least one element");
    if (control_bits < 0) throw DomainError("control bits cannot be negative");
    if (fixed_beam() && !codebook_deg.empty())
        throw DomainError("a fixed-beam panel has no codebook");
    pattern.validate();
}

std::vector<double> uniform_codebook(std::size_t size, double half_span_deg) {
    std::vector<double> angles;
    angles.reserve(size);
    if (size == 1) {
        angles.push_back(0.0);
        return angles;
    }
    for (std::size_t i = 0; i < size; ++i) {
        angles.push_back(-half_span_deg +
                         2.0 * half_span_deg * static_cast<double>(i) /
                             static_cast<double>(size - 1));
    }
    return angles;
}

double BaseStation::gain_toward(Vec3 direction) const {
    double best = kNegInf;
    for (double az : beam_azimuths_deg) {
        const Vec3 beam{std::cos(deg2rad(az)), std::sin(deg2rad(az)), 0.0};
        best = std::max(best, beam_gain(pattern, angle_between_deg(beam, direction)));
    }
    return best;
}

PanelFrame panel_frame(double azimuth_deg, double elevation_deg) {
    const double az = deg2rad(azimuth_deg);
    const double el = deg2rad(elevation_deg);
    return {{std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)},
            {-std::sin(az), std::cos(az), 0.0}};
}

std::optional<double> ris_gain(const RisHop& hop, Vec3 source, Vec3 destination) {
    const RisPanel& panel = hop.panel.get();
    const PanelFrame f = panel_frame(hop.azimuth_deg, hop.elevation_deg);
    const Vec3 u_in = normalized(source - hop.position);
    const Vec3 u_out = normalized(destination - hop.position);
    if (dot(u_in, f.normal) <= 0.0 || dot(u_out, f.normal) <= 0.0) return std::nullopt;

    const auto design_direction = [&](double angle_deg) {
        const double a = deg2rad(angle_deg);
        return std::cos(a) * f.normal + std::sin(a) * f.tangent;
    };
    const Vec3 d_in = design_direction(panel.design_incident_deg);
    const Vec3 d_out =
        design_direction(panel.reflection_angle_deg(hop.configuration.codebook_index));

    const double reflected = beam_gain(panel.pattern, angle_between_deg(u_out, d_out));
    const double incident_penalty =
        beam_gain(panel.pattern, angle_between_deg(u_in, d_in)) - panel.pattern.peak_gain_dbi;
    return reflected + incident_penalty + quantization_efficiency(panel.control_bits) +
           20.0 * std::log10(hop.configuration.amplitude);
}

namespace {

struct RecordingSink {
    LinkBudget* budget;
    void loss(double db) { budget->losses_db.push_back(db); }
    void gain(double db) { budget->gains_db.push_back(db); }
};

struct SummingSink {
    double total = 0.0;
    void loss(double db) { total -= db; }
    void gain(double db) { total += db; }
};

// Returns false when the chain is blocked or back-facing.
template <typename Sink>
bool accumulate(const BaseStation& bs, std::span<const RisHop> chain, const Receiver& rx,
                const RadioParams& radio, std::span<const Box> blockers, Sink& sink) {
    if (chain.size() > max_chain_length)
        throw ConfigError(ConfigErrorCode::unsupported, "agents",
                          "at most two reflecting panels are supported");

    Vec3 previous = bs.position;
    for (std::size_t k = 0; k <= chain.size(); ++k) {
        const Vec3 next = k < chain.size() ? chain[k].position : rx.position;
        if (segment_blocked(previous, next, blockers)) return false;
        sink.loss(free_space_path_loss(norm(next - previous), radio.carrier_frequency_hz));
        if (k == 0) sink.gain(bs.gain_toward(normalized(next - previous)));
        if (k < chain.size()) {
            const Vec3 after = k + 1 < chain.size() ? chain[k + 1].position : rx.position;
            const auto g = ris_gain(chain[k], previous, after);
            if (!g) return false;
            sink.gain(*g);
        }
        previous = next;
    }
    sink.gain(rx.gain_dbi);
    sink.gain(radio.calibration_margin_db);
    return true;
}

}  // namespace

LinkBudget cascaded_link_budget(const BaseStation& bs, std::span<const RisHop> chain,
                                const Receiver& rx, const RadioParams& radio,
                                std::span<const Box> blockers) {
    LinkBudget budget;
    budget.tx_power_dbm = radio.tx_power_dbm;
    budget.noise_power_dbm = noise_power_dbm(radio);
    RecordingSink sink{&budget};
    if (!accumulate(bs, chain, rx, radio, blockers, sink)) {
        budget.blocked = true;
        budget.snr_db = kNegInf;
        return budget;
    }
    double sum = budget.tx_power_dbm - budget.noise_power_dbm;
    for (double g : budget.gains_db) sum += g;
    for (double l : budget.losses_db) sum -= l;
    budget.snr_db = sum;
    return budget;
}

double cascaded_link_snr(const BaseStation& bs, std::span<const RisHop> chain,
                         const Receiver& rx, const RadioParams& radio,
                         std::span<const Box> blockers) {
    SummingSink sink;
    if (!accumulate(bs, chain, rx, radio, blockers, sink)) return kNegInf;
    return radio.tx_power_dbm - noise_power_dbm(radio) + sink.total;
}

}  // namespace idris::channel
