#pragma once

#include "samkit/cables.hpp"
#include "samkit/kinematics.hpp"
#include "samkit/plant.hpp"

#include <cstdint>
#include <string>

namespace samkit {

/// Everything a run reads from the INI-style config file.
///
/// Sections: [geometry] (l1_mm, s2_mm, connector_mm, a3_mm, d4_mm, p_offset_mm,
/// q_limits), [cables] (d_e_mm ... d_j_mm), [plant] (one key per PlantParams
/// field, vectors as comma lists, coupling as 49 row-major values),
/// [pose] (x_offset_mm) and [run] (seed). Missing keys keep their defaults.
struct Config {
    SegmentParams geometry;
    CableGeometry cables;
    PlantParams plant = PlantParams::calibrated_default();
    Vector3 box_x_offset = Vector3::Zero();
    std::uint64_t seed = 20240601;
    std::string source;  ///< file the values came from, empty for built-ins
};

/// Throws ConfigError on unreadable files, malformed values or failed validation.
Config load_config(const std::string& path);

/// Built-in defaults (identical to the shipped config/samkit.conf).
Config default_config();

void save_config(const Config& cfg, const std::string& path);

/// Parses "lo:hi, lo:hi, ..." with seven entries.
JointLimits parse_limits(const std::string& text);

/// Parses a comma/whitespace separated list of exactly n numbers.
Eigen::VectorXd parse_vector(const std::string& text, int n);

}  // namespace samkit
