#include "fsru/config.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace fsru {

namespace {

using nlohmann::json;

json to_json(const RunConfig& c) {
    return json{{"d", c.d},
                {"m", c.m},
                {"grid_h", c.grid_h},
                {"grid_w", c.grid_w},
                {"patch_size", c.patch_size},
                {"vocab_size", c.vocab_size},
                {"k", c.k},
                {"mixer", c.mixer},
                {"usc", c.usc},
                {"csc", c.csc},
                {"dsf", c.dsf},
                {"cl", c.cl},
                {"csc_full_conv", c.csc_full_conv},
                {"literal_eq10", c.literal_eq10},
                {"alpha", c.alpha},
                {"beta", c.beta},
                {"tau", c.tau},
                {"lr", c.lr},
                {"batch_size", c.batch_size},
                {"epochs", c.epochs},
                {"seed", c.seed},
                {"folds", c.folds},
                {"count", c.count},
                {"balance", c.balance},
                {"noise", c.noise},
                {"consistency", c.consistency},
                {"text_bands_rumor", c.text_bands_rumor},
                {"text_bands_nonrumor", c.text_bands_nonrumor},
                {"image_bands_rumor", c.image_bands_rumor},
                {"image_bands_nonrumor", c.image_bands_nonrumor}};
}

RunConfig from_json(const json& j) {
    RunConfig c;
    c.d = j.at("d").get<int>();
    c.m = j.at("m").get<int>();
    c.grid_h = j.at("grid_h").get<int>();
    c.grid_w = j.at("grid_w").get<int>();
    c.patch_size = j.at("patch_size").get<int>();
    c.vocab_size = j.at("vocab_size").get<int>();
    c.k = j.at("k").get<int>();
    c.mixer = j.at("mixer").get<std::string>();
    c.usc = j.at("usc").get<bool>();
    c.csc = j.at("csc").get<bool>();
    c.dsf = j.at("dsf").get<bool>();
    c.cl = j.at("cl").get<bool>();
    c.csc_full_conv = j.at("csc_full_conv").get<bool>();
    c.literal_eq10 = j.at("literal_eq10").get<bool>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.tau = j.at("tau").get<double>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<int>();
    c.epochs = j.at("epochs").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.folds = j.at("folds").get<int>();
    c.count = j.at("count").get<int>();
    c.balance = j.at("balance").get<double>();
    c.noise = j.at("noise").get<double>();
    c.consistency = j.at("consistency").get<double>();
    c.text_bands_rumor = j.at("text_bands_rumor").get<std::vector<int>>();
    c.text_bands_nonrumor = j.at("text_bands_nonrumor").get<std::vector<int>>();
    c.image_bands_rumor = j.at("image_bands_rumor").get<std::vector<int>>();
    c.image_bands_nonrumor =
        j.at("image_bands_nonrumor").get<std::vector<int>>();
    return c;
}

void validate(const RunConfig& c) {
    if (c.d < 1 || c.m < 1 || c.grid_h < 1 || c.grid_w < 1 ||
        c.patch_size < 1 || c.vocab_size < 2)
        throw std::invalid_argument("config: dimensions must be positive");
    if (c.k < 1) throw std::invalid_argument("empty filter bank");
    if (c.alpha < 0.0 || c.beta < 0.0)
        throw std::invalid_argument("config: alpha/beta must be >= 0");
    if (c.tau <= 0.0) throw std::invalid_argument("config: tau must be > 0");
    if (c.batch_size < 1 || c.epochs < 1 || c.folds < 1)
        throw std::invalid_argument("config: batch_size/epochs/folds must be >= 1");
    parse_mixer(c.mixer);
}

}  // namespace

ModelConfig RunConfig::model_config() const {
    ModelConfig cfg;
    cfg.vocab_size = vocab_size;
    cfg.embed_dim = d;
    cfg.text_len = m;
    cfg.grid_h = grid_h;
    cfg.grid_w = grid_w;
    cfg.patch_size = patch_size;
    cfg.filter_count = k;
    cfg.mixer = parse_mixer(mixer);
    cfg.use_usc = usc;
    cfg.use_csc = csc;
    cfg.use_dsf = dsf;
    cfg.use_cl = cl;
    cfg.csc_full_conv = csc_full_conv;
    cfg.literal_supervised_pairs = literal_eq10;
    cfg.temperature = tau;
    cfg.alpha = alpha;
    cfg.beta = beta;
    return cfg;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.seed = seed;
    cfg.adam.learning_rate = lr;
    return cfg;
}

SyntheticSpec RunConfig::synthetic_spec() const {
    SyntheticSpec spec;
    spec.sample_count = count;
    spec.class_balance = balance;
    spec.noise = noise;
    spec.consistency = consistency;
    spec.text_bands_rumor = text_bands_rumor;
    spec.text_bands_nonrumor = text_bands_nonrumor;
    spec.image_bands_rumor = image_bands_rumor;
    spec.image_bands_nonrumor = image_bands_nonrumor;
    spec.text_len = m;
    spec.grid_h = grid_h;
    spec.grid_w = grid_w;
    spec.patch_size = patch_size;
    spec.vocab_size = vocab_size;
    return spec;
}

RunConfig load_run_config(const std::string& path,
                          const std::vector<std::string>& overrides) {
    json merged = to_json(RunConfig{});
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in)
            throw std::invalid_argument("config: cannot open " + path);
        json file_json;
        try {
            in >> file_json;
        } catch (const json::parse_error& e) {
            throw std::invalid_argument("config: parse error in " + path +
                                        ": " + e.what());
        }
        for (auto it = file_json.begin(); it != file_json.end(); ++it) {
            if (!merged.contains(it.key()))
                throw std::invalid_argument("config: unknown key '" +
                                            it.key() + "' in " + path);
            merged[it.key()] = it.value();
        }
    }
    for (const std::string& entry : overrides) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("--set expects key=value, got '" +
                                        entry + "'");
        const std::string key = entry.substr(0, eq);
        const std::string value = entry.substr(eq + 1);
        if (!merged.contains(key))
            throw std::invalid_argument("config: unknown key '" + key + "'");
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::parse_error&) {
            parsed = value;  // bare strings (e.g. mixer names)
        }
        if (merged[key].is_string() && !parsed.is_string())
            parsed = value;
        merged[key] = parsed;
    }
    RunConfig config;
    try {
        config = from_json(merged);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    validate(config);
    return config;
}

std::string run_config_json(const RunConfig& config) {
    return to_json(config).dump(2) + "\n";
}

}  // namespace fsru
