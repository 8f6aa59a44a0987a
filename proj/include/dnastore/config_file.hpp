// Key-value configuration file shared by the command-line tool. Lines are
// "key = value", '#' starts a comment, unknown keys are rejected with a
// diagnostic naming the key. Flags take precedence over file values, file
// values over built-in defaults.
#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dnastore/bio_metrics.hpp"
#include "dnastore/channel.hpp"
#include "dnastore/errors.hpp"
#include "dnastore/learner/train.hpp"
#include "dnastore/pipeline.hpp"
#include "dnastore/thermo.hpp"

namespace dnastore::config_file {

struct ToolConfig {
    pipeline::PipelineConfig pipeline{};
    std::string model_path;
    learner::ModelConfig model{};
    learner::LossWeights loss{};
    learner::TrainConfig train{};
    channel::ChannelConfig channel{};
    bio::HairpinParams hairpin{};
    thermo::ThermoConfig thermo{};
    std::string thermo_params_file;
    std::size_t analysis_window = 20;
    std::size_t analysis_step = 1;
};

namespace detail {

inline double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const double v = std::stod(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw FormatError("config: bad number for " + key + ": " + value);
    }
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t consumed = 0;
        const std::uint64_t v = std::stoull(value, &consumed);
        if (consumed != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (...) {
        throw FormatError("config: bad integer for " + key + ": " + value);
    }
}

inline std::vector<std::size_t> parse_index_list(const std::string& key, const std::string& value) {
    std::vector<std::size_t> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ','))
        out.push_back(static_cast<std::size_t>(parse_u64(key, item)));
    return out;
}

}  // namespace detail

inline void apply_key(ToolConfig& cfg, const std::string& key, const std::string& value) {
    using detail::parse_double;
    using detail::parse_u64;
    if (key == "pipeline.mode") {
        cfg.pipeline.mode = pipeline::mode_from_name(value);
    } else if (key == "pipeline.rows_per_block") {
        cfg.pipeline.rows_per_block = parse_u64(key, value);
    } else if (key == "pipeline.mask") {
        cfg.pipeline.mask.masked_symbol_indices = detail::parse_index_list(key, value);
    } else if (key == "pipeline.model") {
        cfg.model_path = value;
    } else if (key == "rs.n") {
        cfg.pipeline.rs.n = parse_u64(key, value);
    } else if (key == "rs.k") {
        cfg.pipeline.rs.k = parse_u64(key, value);
    } else if (key == "rs.first_root_exponent") {
        cfg.pipeline.rs.first_root_exponent = static_cast<unsigned>(parse_u64(key, value));
    } else if (key == "model.tokens_in") {
        cfg.model.tokens_in = parse_u64(key, value);
    } else if (key == "model.hidden_dim") {
        cfg.model.hidden_dim = parse_u64(key, value);
    } else if (key == "model.tokens_out") {
        cfg.model.tokens_out = parse_u64(key, value);
    } else if (key == "model.heads") {
        cfg.model.heads = parse_u64(key, value);
    } else if (key == "model.layers") {
        cfg.model.layers = parse_u64(key, value);
    } else if (key == "model.ffn_dim") {
        cfg.model.ffn_dim = parse_u64(key, value);
    } else if (key == "model.seed") {
        cfg.model.seed = parse_u64(key, value);
    } else if (key == "loss.alpha") {
        cfg.loss.alpha = parse_double(key, value);
    } else if (key == "loss.beta") {
        cfg.loss.beta = parse_double(key, value);
    } else if (key == "loss.gc_target") {
        cfg.loss.gc_target = parse_double(key, value);
    } else if (key == "loss.hairpin_target") {
        cfg.loss.hairpin_target = parse_double(key, value);
    } else if (key == "loss.tau") {
        cfg.loss.tau = parse_double(key, value);
    } else if (key == "loss.hairpin_s_min") {
        cfg.loss.hairpin.s_min = parse_u64(key, value);
    } else if (key == "loss.hairpin_r_min") {
        cfg.loss.hairpin.r_min = parse_u64(key, value);
    } else if (key == "loss.hairpin_threshold") {
        cfg.loss.hairpin.threshold_ratio = parse_double(key, value);
    } else if (key == "train.learning_rate") {
        cfg.train.learning_rate = parse_double(key, value);
    } else if (key == "train.epochs") {
        cfg.train.epochs = parse_u64(key, value);
    } else if (key == "train.batch_size") {
        cfg.train.batch_size = parse_u64(key, value);
    } else if (key == "train.seed") {
        cfg.train.seed = parse_u64(key, value);
    } else if (key == "train.optimizer") {
        if (value == "momentum")
            cfg.train.optimizer = learner::Optimizer::momentum;
        else if (value == "adam")
            cfg.train.optimizer = learner::Optimizer::adam;
        else
            throw FormatError("config: unknown optimizer: " + value);
    } else if (key == "train.momentum") {
        cfg.train.momentum = parse_double(key, value);
    } else if (key == "train.bc_rows_per_batch") {
        cfg.train.bc_rows_per_batch = parse_u64(key, value);
    } else if (key == "train.grad_clip") {
        cfg.train.grad_clip = parse_double(key, value);
    } else if (key == "train.straight_through") {
        cfg.train.straight_through = parse_u64(key, value) != 0;
    } else if (key == "channel.substitution_rate") {
        cfg.channel.substitution_rate = parse_double(key, value);
    } else if (key == "channel.seed") {
        cfg.channel.seed = parse_u64(key, value);
    } else if (key == "hairpin.s_min") {
        cfg.hairpin.s_min = parse_u64(key, value);
    } else if (key == "hairpin.r_min") {
        cfg.hairpin.r_min = parse_u64(key, value);
    } else if (key == "hairpin.threshold") {
        cfg.hairpin.threshold_ratio = parse_double(key, value);
    } else if (key == "thermo.gas_constant") {
        cfg.thermo.gas_constant = parse_double(key, value);
    } else if (key == "thermo.strand_concentration") {
        cfg.thermo.strand_concentration = parse_double(key, value);
    } else if (key == "thermo.concentration_divisor") {
        cfg.thermo.concentration_divisor = parse_double(key, value);
    } else if (key == "thermo.evaluation_temperature") {
        cfg.thermo.evaluation_temperature = parse_double(key, value);
    } else if (key == "thermo.params_file") {
        cfg.thermo_params_file = value;
    } else if (key == "analysis.window") {
        cfg.analysis_window = parse_u64(key, value);
    } else if (key == "analysis.step") {
        cfg.analysis_step = parse_u64(key, value);
    } else {
        throw FormatError("config: unknown key: " + key);
    }
}

inline void load_into(ToolConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        // trim
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto last = line.find_last_not_of(" \t\r");
        line = line.substr(first, last - first + 1);
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw FormatError("config: missing '=' at line " + std::to_string(line_number));
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
        };
        apply_key(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
}

}  // namespace dnastore::config_file
