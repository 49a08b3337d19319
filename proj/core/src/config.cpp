#include "hatdfed/config.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hatdfed {

int link_budget(double gamma, int n_servers) {
    double links = static_cast<double>(n_servers) * (n_servers - 1);
    return static_cast<int>(std::floor(gamma * links + 0.5));
}

double derive_link_cost(double ee_link, double model_bits) {
    if (!(ee_link > 0.0)) throw ConfigError("ee_link must be positive");
    return (model_bits / 1000.0) / ee_link;
}

double derive_device_cost(int n_tr, double sample_bits, double ee_device) {
    if (!(ee_device > 0.0)) throw ConfigError("ee_device must be positive");
    return (static_cast<double>(n_tr) * sample_bits / 1000.0) / ee_device;
}

std::vector<std::string> validate_config(const SimConfig& c) {
    std::vector<std::string> v;
    if (c.n_servers < 2) v.push_back("n_servers must be >= 2");
    if (c.devices_per_server < 1) v.push_back("devices_per_server must be >= 1");
    if (c.n_rounds < 1) v.push_back("n_rounds must be >= 1");
    if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) v.push_back("alpha out of [0,1]");
    if (!(c.beta >= 0.0 && c.beta <= 1.0)) v.push_back("beta out of [0,1]");
    if (!(c.eta > 0.0 && c.eta <= 1.0)) v.push_back("eta out of (0,1]");
    if (!(c.gamma > 0.0 && c.gamma <= 1.0)) v.push_back("gamma out of (0,1]");
    if (!(c.rho >= 0.0 && c.rho <= 1.0)) v.push_back("rho out of [0,1]");
    if (!(c.lambda_dir > 0.0)) v.push_back("lambda_dir must be > 0");
    if (c.n_tr < 0) v.push_back("n_tr must be >= 0");
    if (!(c.sample_bits > 0.0)) v.push_back("sample_bits must be > 0");
    if (!(c.model_bits > 0.0)) v.push_back("model_bits must be > 0");
    if (!(c.ee_device > 0.0)) v.push_back("ee_device must be > 0");
    if (!(c.ee_link_range[0] > 0.0) || !(c.ee_link_range[1] >= c.ee_link_range[0]))
        v.push_back("ee_link_range must satisfy 0 < lo <= hi");
    if (c.tau_choices.empty()) v.push_back("tau_choices must be non-empty");
    for (double t : c.tau_choices)
        if (!(t > 0.0)) {
            v.push_back("tau_choices entries must be > 0");
            break;
        }
    if (c.batch_sample_size < 1) v.push_back("batch_sample_size must be >= 1");
    if (c.gamma > 0.0 && c.n_servers >= 2 && link_budget(c.gamma, c.n_servers) < 1)
        v.push_back("round(gamma*N(N-1)) must be >= 1");
    return v;
}

namespace {

using json = nlohmann::ordered_json;

const std::set<std::string> kKeys = {
    "n_servers",   "devices_per_server", "n_rounds",      "alpha",
    "beta",        "eta",                "gamma",         "rho",
    "lambda_dir",  "n_tr",               "sample_bits",   "model_bits",
    "ee_device",   "ee_link_range",      "tau_choices",   "batch_sample_size",
    "seed"};

int line_of_offset(const std::string& text, std::size_t byte) {
    int line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

}  // namespace

SimConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config parse error at line " +
                          std::to_string(line_of_offset(text, e.byte)) + ": " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (auto& [key, _] : j.items())
        if (!kKeys.count(key)) throw ConfigError("unknown config key: \"" + key + "\"");

    SimConfig c;
    auto get = [&](const char* key, auto& out) {
        if (!j.contains(key)) throw ConfigError(std::string("missing config key: \"") + key + "\"");
        try {
            out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("bad value for \"") + key + "\": " + e.what());
        }
    };
    get("n_servers", c.n_servers);
    get("devices_per_server", c.devices_per_server);
    get("n_rounds", c.n_rounds);
    get("alpha", c.alpha);
    get("beta", c.beta);
    get("eta", c.eta);
    get("gamma", c.gamma);
    get("rho", c.rho);
    get("lambda_dir", c.lambda_dir);
    get("n_tr", c.n_tr);
    get("sample_bits", c.sample_bits);
    get("model_bits", c.model_bits);
    get("ee_device", c.ee_device);
    get("ee_link_range", c.ee_link_range);
    get("tau_choices", c.tau_choices);
    get("batch_sample_size", c.batch_sample_size);
    get("seed", c.seed);
    return c;
}

std::string serialize_config(const SimConfig& c) {
    json j;
    j["n_servers"] = c.n_servers;
    j["devices_per_server"] = c.devices_per_server;
    j["n_rounds"] = c.n_rounds;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["eta"] = c.eta;
    j["gamma"] = c.gamma;
    j["rho"] = c.rho;
    j["lambda_dir"] = c.lambda_dir;
    j["n_tr"] = c.n_tr;
    j["sample_bits"] = c.sample_bits;
    j["model_bits"] = c.model_bits;
    j["ee_device"] = c.ee_device;
    j["ee_link_range"] = c.ee_link_range;
    j["tau_choices"] = c.tau_choices;
    j["batch_sample_size"] = c.batch_sample_size;
    j["seed"] = c.seed;
    return j.dump(2) + "\n";
}

SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    SimConfig c = parse_config(ss.str());
    if (const char* env = std::getenv("HATDFED_SEED")) {
        char* end = nullptr;
        unsigned long long s = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0')
            throw ConfigError("HATDFED_SEED is not an integer: " + std::string(env));
        c.seed = s;
    }
    return c;
}

}  // namespace hatdfed
