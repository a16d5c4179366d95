#include "samkit/tcn_io.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace samkit {

using nlohmann::json;

namespace {

constexpr int kVersion = 1;

std::vector<double> to_list(const Vector7& v) { return {v.data(), v.data() + 7}; }

Vector7 from_list(const json& j) {
    const auto v = j.get<std::vector<double>>();
    if (v.size() != 7) throw ConfigError("checkpoint: normalizer vectors need 7 entries");
    return Eigen::Map<const Vector7>(v.data());
}

}  // namespace

std::string checkpoint_to_string(const TcnModel<float>& model) {
    const auto& c = model.config();
    json j;
    j["format"] = "samkit-tcn";
    j["version"] = kVersion;
    j["config"] = {{"L", c.L},
                   {"k", c.k},
                   {"dilation_base", c.dilation_base},
                   {"channels_in", c.channels_in},
                   {"channels_hidden", c.channels_hidden},
                   {"channels_out", c.channels_out},
                   {"num_blocks", c.blocks()},
                   {"seed", c.seed}};
    j["normalizer"] = {{"center", to_list(model.normalizer().center)},
                       {"half_range", to_list(model.normalizer().half_range)}};
    j["padding"] = "normalized-zero";
    j["trained_q1"] = model.trained_q1();
    json params = json::array();
    const auto names = model.parameter_names();
    const auto ptrs = model.parameters();
    for (std::size_t i = 0; i < ptrs.size(); ++i) {
        const auto& m = *ptrs[i];
        params.push_back({{"name", names[i]},
                          {"rows", m.rows()},
                          {"cols", m.cols()},
                          {"data", std::vector<float>(m.data(), m.data() + m.size())}});
    }
    j["parameters"] = std::move(params);
    return j.dump();
}

TcnModel<float> checkpoint_from_string(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("checkpoint: invalid JSON: ") + e.what());
    }
    try {
        if (j.at("format") != "samkit-tcn") throw ConfigError("checkpoint: unknown format");
        if (j.at("version").get<int>() != kVersion) throw ConfigError("checkpoint: unsupported version");
        if (j.value("padding", std::string("normalized-zero")) != "normalized-zero")
            throw ConfigError("checkpoint: unsupported padding convention");
        const auto& jc = j.at("config");
        TcnConfig cfg;
        cfg.L = jc.at("L");
        cfg.k = jc.at("k");
        cfg.dilation_base = jc.at("dilation_base");
        cfg.channels_in = jc.at("channels_in");
        cfg.channels_hidden = jc.at("channels_hidden");
        cfg.channels_out = jc.at("channels_out");
        cfg.seed = jc.at("seed");
        Normalizer norm;
        norm.center = from_list(j.at("normalizer").at("center"));
        norm.half_range = from_list(j.at("normalizer").at("half_range"));
        TcnModel<float> model(cfg, norm);
        const auto names = model.parameter_names();
        auto ptrs = model.parameters();
        const auto& jp = j.at("parameters");
        if (jp.size() != ptrs.size()) throw ConfigError("checkpoint: parameter count does not match config");
        for (std::size_t i = 0; i < ptrs.size(); ++i) {
            const auto& e = jp[i];
            auto& m = *ptrs[i];
            if (e.at("name") != names[i] || e.at("rows").get<Eigen::Index>() != m.rows() ||
                e.at("cols").get<Eigen::Index>() != m.cols())
                throw ConfigError("checkpoint: parameter '" + names[i] + "' has the wrong name or shape");
            const auto data = e.at("data").get<std::vector<float>>();
            if (static_cast<Eigen::Index>(data.size()) != m.size())
                throw ConfigError("checkpoint: parameter '" + names[i] + "' has the wrong size");
            m = Eigen::Map<const Eigen::MatrixXf>(data.data(), m.rows(), m.cols());
        }
        if (j.contains("trained_q1")) model.set_trained_q1(j.at("trained_q1").get<std::vector<double>>());
        return model;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    } catch (const DomainError& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    }
}

void save_checkpoint(const TcnModel<float>& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("checkpoint: cannot write " + path);
    out << checkpoint_to_string(model) << '\n';
}

TcnModel<float> load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("checkpoint: cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return checkpoint_from_string(ss.str());
}

}  // namespace samkit
