#include <idris/channel.hpp>
#include <idris/error.hpp>

#include <bit>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "gtest/gtest.h"

namespace idris::channel {
namespace {

constexpr double kC = 299'792'458.0;

TEST(FreeSpacePathLoss, matches_hand_evaluated_friis_at_ten_meters) {
    const double by_hand = 20.0 * std::log10(4.0 * std::numbers::pi * 10.0 * 28e9 / kC);
    EXPECT_NEAR(free_space_path_loss(10.0, 28e9), by_hand, 1e-12);
    // Tabulated anchor, truncated to two decimals.
    EXPECT_NEAR(free_space_path_loss(10.0, 28e9), 81.38, 0.015);
}

TEST(FreeSpacePathLoss, doubling_distance_adds_six_db) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(0.1, 100.0);
    for (int i = 0; i < 200; ++i) {
        const double x = d(rng);
        EXPECT_NEAR(free_space_path_loss(2 * x, 28e9) - free_space_path_loss(x, 28e9), 20.0 * std::log10(2.0), 1e-6);
        EXPECT_LT(free_space_path_loss(x, 28e9), free_space_path_loss(x * 1.01, 28e9));
    }
}

TEST(FreeSpacePathLoss, unit_argument_gives_zero) {
    EXPECT_NEAR(free_space_path_loss(1.0, kC / (4.0 * std::numbers::pi)), 0.0, 1e-12);
}

TEST(FreeSpacePathLoss, rejects_non_positive_inputs) {
    EXPECT_THROW(free_space_path_loss(0.0, 28e9), DomainError);
    EXPECT_THROW(free_space_path_loss(1.0, -1.0), DomainError);
}

TEST(BeamGain, boresight_half_power_and_floor) {
    const BeamPattern p{20.0, 20.0, -30.0};
    EXPECT_DOUBLE_EQ(beam_gain(p, 0.0), 20.0);
    EXPECT_DOUBLE_EQ(beam_gain(p, 10.0), 17.0);
    EXPECT_DOUBLE_EQ(beam_gain(p, 180.0), -10.0);
}

TEST(BeamGain, even_and_bounded) {
    const BeamPattern p{36.61, 3.0, -30.0};
    for (double off = -400.0; off <= 400.0; off += 0.7) {
        const double g = beam_gain(p, off);
        EXPECT_NEAR(g, beam_gain(p, -off), 1e-9);
        EXPECT_LE(g, p.peak_gain_dbi);
        EXPECT_GE(g, p.peak_gain_dbi + p.sidelobe_floor_db);
    }
}

TEST(PeakDirectivity, pencil_and_fixed_beam_panels) {
    EXPECT_NEAR(peak_directivity_from_beamwidth(3, 3), 10 * std::log10(41253.0 / 9.0), 1e-12);
    EXPECT_NEAR(peak_directivity_from_beamwidth(3, 3), 36.61, 0.005);
    EXPECT_NEAR(peak_directivity_from_beamwidth(20, 20), 20.13, 0.005);
    EXPECT_NEAR(peak_directivity_from_beamwidth(360, 41253.0 / 360.0), 0.0, 1e-12);
    EXPECT_THROW(peak_directivity_from_beamwidth(0, 10), DomainError);
}

// |E[exp(j(theta_q - theta))]|^2 for uniform phase error over one bin.
double monte_carlo_quantization_db(int bits, int samples) {
    std::mt19937_64 rng(11);
    const double half_bin = std::numbers::pi / std::pow(2.0, bits);
    std::uniform_real_distribution<double> err(-half_bin, half_bin);
    std::complex<double> acc{0.0, 0.0};
    for (int i = 0; i < samples; ++i) acc += std::polar(1.0, err(rng));
    return 10.0 * std::log10(std::norm(acc / static_cast<double>(samples)));
}

TEST(QuantizationEfficiency, one_bit_matches_monte_carlo) {
    const double oracle = monte_carlo_quantization_db(1, 400'000);
    EXPECT_NEAR(quantization_efficiency(1), oracle, 0.02);
    EXPECT_NEAR(quantization_efficiency(1), -3.92, 0.005);
}

TEST(QuantizationEfficiency, two_bits_between_one_bit_and_lossless) {
    const double q2 = quantization_efficiency(2);
    EXPECT_GT(q2, quantization_efficiency(1));
    EXPECT_LT(q2, 0.0);
    EXPECT_NEAR(q2, monte_carlo_quantization_db(2, 400'000), 0.02);
    EXPECT_NEAR(quantization_efficiency(16), 0.0, 1e-6);
    EXPECT_EQ(quantization_efficiency(0), 0.0);
}

TEST(Throughput, anchors_of_both_scenarios) {
    const RadioParams r;
    EXPECT_NEAR(snr_to_throughput(29.50, r) / 1e6, 980.0, 0.5);
    EXPECT_NEAR(snr_to_throughput(18.0, r) / 1e6, 600.0, 0.5);
    EXPECT_NEAR(throughput_to_snr(980e6, r), 10 * std::log10(std::pow(2.0, 9.8) - 1), 1e-9);
    EXPECT_EQ(snr_to_throughput(-std::numeric_limits<double>::infinity(), r), 0.0);
}

TEST(Throughput, scatter_floor_rate) {
    EXPECT_NEAR(snr_to_throughput(-5.0, RadioParams{}) / 1e6, 39.6, 0.05);
}

TEST(Throughput, capped_and_monotone) {
    const RadioParams r;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> snr(-40.0, 60.0);
    for (int i = 0; i < 1000; ++i) {
        const double a = snr(rng);
        const double b = snr(rng);
        EXPECT_LE(snr_to_throughput(a, r), r.throughput_cap_bps);
        if (a <= b) EXPECT_LE(snr_to_throughput(a, r), snr_to_throughput(b, r));
        else EXPECT_GE(snr_to_throughput(a, r), snr_to_throughput(b, r));
    }
}

TEST(NoisePower, thermal_floor_plus_noise_figure) {
    EXPECT_NEAR(noise_power_dbm(RadioParams{}), -174.0 + 80.0 + 7.0, 1e-9);
}

TEST(SnrPowerSum, absent_term_and_equal_terms) {
    const double inf = std::numeric_limits<double>::infinity();
    EXPECT_EQ(snr_power_sum(3.0, -inf), 3.0);
    EXPECT_NEAR(snr_power_sum(0.0, 0.0), 10 * std::log10(2.0), 1e-12);
    EXPECT_EQ(snr_power_sum(-inf, -inf), -inf);
}

struct SingleHop {
    RisPanel panel;
    BaseStation bs;
    Receiver rx;
    RadioParams radio;
    Vec3 ris{0, 10, 1.5};

    SingleHop() {
        panel.num_elements = 5000;
        panel.pattern = pattern_from_beamwidth(20.0);
        bs.position = {0, 0, 1.5};
        bs.pattern = pattern_from_beamwidth(18.0);
        bs.beam_azimuths_deg = {90.0};
        // 45 degrees off the panel normal, toward the panel tangent.
        rx.position = {5, 5, 1.5};
    }
    RisHop hop() const { return {std::cref(panel), ris, 270.0, 0.0, {}}; }
};

TEST(CascadedLink, ideal_single_hop_equals_hand_sum) {
    const SingleHop s;
    const RisHop hop = s.hop();
    const double by_hand = s.radio.tx_power_dbm + s.bs.pattern.peak_gain_dbi +
                           s.panel.pattern.peak_gain_dbi - free_space_path_loss(10.0, 28e9) -
                           free_space_path_loss(std::sqrt(50.0), 28e9) -
                           (-174.0 + 10 * std::log10(s.radio.bandwidth_hz) + s.radio.noise_figure_db);
    const double snr = cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, {});
    EXPECT_NEAR(snr, by_hand, 1e-9);
}

TEST(CascadedLink, budget_terms_sum_to_snr) {
    SingleHop s;
    s.radio.calibration_margin_db = 4.5;
    const RisHop hop{std::cref(s.panel), s.ris, 262.0, 5.0, {}};
    const LinkBudget b = cascaded_link_budget(s.bs, std::span(&hop, 1), s.rx, s.radio, {});
    double sum = b.tx_power_dbm - b.noise_power_dbm;
    for (double g : b.gains_db) sum += g;
    for (double l : b.losses_db) sum -= l;
    EXPECT_NEAR(b.snr_db, sum, 1e-9);
    EXPECT_NEAR(b.snr_db, cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, {}), 1e-9);
}

TEST(CascadedLink, perturbing_the_aligned_pose_never_helps) {
    const SingleHop s;
    const RisHop best = s.hop();
    const double top = cascaded_link_snr(s.bs, std::span(&best, 1), s.rx, s.radio, {});
    for (double daz = -20; daz <= 20; daz += 5) {
        for (double del = -10; del <= 10; del += 5) {
            const RisHop h{std::cref(s.panel), s.ris, 270.0 + daz, del, {}};
            EXPECT_LE(cascaded_link_snr(s.bs, std::span(&h, 1), s.rx, s.radio, {}), top + 1e-12);
        }
    }
}

TEST(CascadedLink, blocked_segments_and_empty_chain) {
    const SingleHop s;
    const RisHop hop = s.hop();
    const Box wall{{-1, 4, 0}, {1, 5, 3}};
    EXPECT_EQ(cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, std::span(&wall, 1)),
              -std::numeric_limits<double>::infinity());
    const Box los{{2, 1, 0}, {3, 4, 3}};
    EXPECT_EQ(cascaded_link_snr(s.bs, {}, s.rx, s.radio, std::span(&los, 1)),
              -std::numeric_limits<double>::infinity());
    EXPECT_TRUE(cascaded_link_budget(s.bs, {}, s.rx, s.radio, std::span(&los, 1)).blocked);
}

TEST(CascadedLink, back_facing_panel_is_blocked) {
    const SingleHop s;
    const RisHop hop{std::cref(s.panel), s.ris, 90.0, 0.0, {}};
    EXPECT_FALSE(ris_gain(hop, s.bs.position, s.rx.position).has_value());
    EXPECT_EQ(cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, {}),
              -std::numeric_limits<double>::infinity());
}

TEST(CascadedLink, chain_longer_than_two_is_unsupported) {
    const SingleHop s;
    const RisHop hop = s.hop();
    const std::vector<RisHop> chain{hop, hop, hop};
    EXPECT_THROW(cascaded_link_snr(s.bs, chain, s.rx, s.radio, {}), ConfigError);
}

TEST(CascadedLink, pure_function) {
    const SingleHop s;
    const RisHop hop{std::cref(s.panel), s.ris, 263.0, 5.0, {}};
    const double a = cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, {});
    const double b = cascaded_link_snr(s.bs, std::span(&hop, 1), s.rx, s.radio, {});
    EXPECT_EQ(std::bit_cast<std::uint64_t>(a), std::bit_cast<std::uint64_t>(b));
}

TEST(RisPanel, codebook_configuration_count) {
    RisPanel p;
    p.control_bits = 1;
    p.num_elements = 1600;
    p.pattern = pattern_from_beamwidth(3.0);
    p.codebook_deg = uniform_codebook(16, 60.0);
    EXPECT_EQ(p.configuration_count(), 16u);
    EXPECT_DOUBLE_EQ(p.reflection_angle_deg(0), -60.0);
    EXPECT_DOUBLE_EQ(p.reflection_angle_deg(15), 60.0);
    RisPanel fixed;
    fixed.pattern = pattern_from_beamwidth(20.0);
    EXPECT_EQ(fixed.configuration_count(), 1u);
}

}  // namespace
}  // namespace idris::channel
