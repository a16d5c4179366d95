#include "samkit/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <sstream>

namespace samkit {

namespace pt = boost::property_tree;

namespace {

std::string join(const Eigen::VectorXd& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) out += fmt::format("{}{}", i ? ", " : "", v[i]);
    return out;
}

void read_vec7(const pt::ptree& t, const char* key, Vector7& dst) {
    if (auto s = t.get_optional<std::string>(key)) dst = parse_vector(*s, 7);
}

double read_double(const pt::ptree& t, const char* key, double fallback) {
    const auto text = t.get_optional<std::string>(key);
    if (!text) return fallback;
    return parse_vector(*text, 1)[0];
}

std::uint64_t read_u64(const pt::ptree& t, const char* key, std::uint64_t fallback) {
    const auto text = t.get_optional<std::string>(key);
    if (!text) return fallback;
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(*text, &used);
        if (used == text->size() && text->find('-') == std::string::npos) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError(fmt::format("config: key '{}' is not an unsigned integer", key));
}

}  // namespace

Eigen::VectorXd parse_vector(const std::string& text, int n) {
    std::string s = text;
    for (char& c : s)
        if (c == ',' || c == ';') c = ' ';
    std::istringstream in(s);
    std::vector<double> vals;
    std::string tok;
    while (in >> tok) {
        try {
            std::size_t used = 0;
            vals.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(fmt::format("config: '{}' is not a number", tok));
        }
    }
    if (static_cast<int>(vals.size()) != n)
        throw ConfigError(fmt::format("config: expected {} values, got {} in '{}'", n, vals.size(), text));
    return Eigen::Map<Eigen::VectorXd>(vals.data(), n);
}

JointLimits parse_limits(const std::string& text) {
    std::string s = text;
    for (char& c : s)
        if (c == ':') c = ' ';
    const Eigen::VectorXd v = parse_vector(s, 14);
    JointLimits lim;
    for (int i = 0; i < kNumJoints; ++i) {
        lim.lower[i] = v[2 * i];
        lim.upper[i] = v[2 * i + 1];
        if (!(lim.lower[i] <= lim.upper[i]))
            throw ConfigError(fmt::format("config: q_limits for {} has lower > upper", kJointNames[i]));
    }
    return lim;
}

Config default_config() { return Config{}; }

Config load_config(const std::string& path) {
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config: cannot read '{}': {}", path, e.message()));
    }
    Config cfg;
    cfg.source = path;

    const pt::ptree empty;
    const auto& g = tree.get_child("geometry", empty);
    auto& geom = cfg.geometry;
    geom.l1 = read_double(g, "l1_mm", geom.l1);
    geom.s2 = read_double(g, "s2_mm", geom.s2);
    geom.connector = read_double(g, "connector_mm", geom.connector);
    geom.a3 = read_double(g, "a3_mm", geom.a3);
    geom.d4 = read_double(g, "d4_mm", geom.d4);
    if (auto s = g.get_optional<std::string>("p_offset_mm")) geom.p_offset = parse_vector(*s, 3);
    if (auto s = g.get_optional<std::string>("q_limits")) geom.limits = parse_limits(*s);

    const auto& c = tree.get_child("cables", empty);
    auto& cg = cfg.cables;
    cg.d_e = read_double(c, "d_e_mm", cg.d_e);
    cg.d_w = read_double(c, "d_w_mm", cg.d_w);
    cg.d_we = read_double(c, "d_we_mm", cg.d_we);
    cg.d_jep = read_double(c, "d_jep_mm", cg.d_jep);
    cg.d_jey = read_double(c, "d_jey_mm", cg.d_jey);
    cg.d_jwp = read_double(c, "d_jwp_mm", cg.d_jwp);
    cg.d_j = read_double(c, "d_j_mm", cg.d_j);

    const auto& p = tree.get_child("plant", empty);
    auto& pp = cfg.plant;
    read_vec7(p, "deadzone_halfwidth", pp.deadzone_halfwidth);
    read_vec7(p, "backlash_width", pp.backlash_width);
    read_vec7(p, "bw_alpha", pp.bw_alpha);
    read_vec7(p, "bw_beta", pp.bw_beta);
    read_vec7(p, "bw_gamma", pp.bw_gamma);
    read_vec7(p, "bw_n", pp.bw_n);
    read_vec7(p, "trans_gain_weight", pp.trans_gain_weight);
    pp.bias_gain = read_double(p, "bias_gain", pp.bias_gain);
    pp.bias_span = read_double(p, "bias_span", pp.bias_span);
    pp.trans_gain_slope = read_double(p, "trans_gain_slope", pp.trans_gain_slope);
    pp.noise_sd = read_double(p, "noise_sd", pp.noise_sd);
    pp.coupling_saturation = read_double(p, "coupling_saturation", pp.coupling_saturation);
    pp.noise_seed = read_u64(p, "noise_seed", pp.noise_seed);
    if (auto s = p.get_optional<std::string>("coupling")) {
        const Eigen::VectorXd v = parse_vector(*s, 49);
        pp.coupling = Eigen::Map<const Eigen::Matrix<double, 7, 7, Eigen::RowMajor>>(v.data());
    }

    const auto& ps = tree.get_child("pose", empty);
    if (auto s = ps.get_optional<std::string>("x_offset_mm")) cfg.box_x_offset = parse_vector(*s, 3);

    cfg.seed = read_u64(tree, "run.seed", cfg.seed);

    try {
        geom.validate();
        cg.validate();
        pp.validate();
    } catch (const DomainError& e) {
        throw ConfigError(fmt::format("config '{}': {}", path, e.what()));
    }
    return cfg;
}

void save_config(const Config& cfg, const std::string& path) {
    pt::ptree tree;
    const auto& g = cfg.geometry;
    tree.put("geometry.l1_mm", g.l1);
    tree.put("geometry.s2_mm", g.s2);
    tree.put("geometry.connector_mm", g.connector);
    tree.put("geometry.a3_mm", g.a3);
    tree.put("geometry.d4_mm", g.d4);
    tree.put("geometry.p_offset_mm", join(g.p_offset));
    std::string lim;
    for (int i = 0; i < kNumJoints; ++i)
        lim += fmt::format("{}{}:{}", i ? ", " : "", g.limits.lower[i], g.limits.upper[i]);
    tree.put("geometry.q_limits", lim);

    const auto& c = cfg.cables;
    tree.put("cables.d_e_mm", c.d_e);
    tree.put("cables.d_w_mm", c.d_w);
    tree.put("cables.d_we_mm", c.d_we);
    tree.put("cables.d_jep_mm", c.d_jep);
    tree.put("cables.d_jey_mm", c.d_jey);
    tree.put("cables.d_jwp_mm", c.d_jwp);
    tree.put("cables.d_j_mm", c.d_j);

    const auto& p = cfg.plant;
    tree.put("plant.deadzone_halfwidth", join(p.deadzone_halfwidth));
    tree.put("plant.backlash_width", join(p.backlash_width));
    tree.put("plant.bw_alpha", join(p.bw_alpha));
    tree.put("plant.bw_beta", join(p.bw_beta));
    tree.put("plant.bw_gamma", join(p.bw_gamma));
    tree.put("plant.bw_n", join(p.bw_n));
    tree.put("plant.bias_gain", p.bias_gain);
    tree.put("plant.bias_span", p.bias_span);
    tree.put("plant.trans_gain_slope", p.trans_gain_slope);
    tree.put("plant.trans_gain_weight", join(p.trans_gain_weight));
    const Eigen::Matrix<double, 7, 7, Eigen::RowMajor> rm = p.coupling;
    tree.put("plant.coupling", join(Eigen::Map<const Eigen::VectorXd>(rm.data(), 49)));
    tree.put("plant.coupling_saturation", p.coupling_saturation);
    tree.put("plant.noise_sd", p.noise_sd);
    tree.put("plant.noise_seed", p.noise_seed);

    tree.put("pose.x_offset_mm", join(cfg.box_x_offset));
    tree.put("run.seed", cfg.seed);
    try {
        pt::write_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(fmt::format("config: cannot write '{}': {}", path, e.message()));
    }
}

}  // namespace samkit
