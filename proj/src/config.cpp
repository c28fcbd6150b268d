#include "lossnet/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "lossnet/version.hpp"

namespace lossnet {

using nlohmann::json;

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw std::runtime_error("config " + path + " is not valid JSON: " + e.what());
    }
}

void apply_overrides(json& doc, const std::vector<std::string>& assignments) {
    for (const std::string& assignment : assignments) {
        const auto eq = assignment.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("override '" + assignment + "' is not of the form key=value");
        const std::string path = assignment.substr(0, eq);
        const std::string value = assignment.substr(eq + 1);

        json* node = &doc;
        std::istringstream segments(path);
        std::string segment;
        while (std::getline(segments, segment, '.')) {
            if (node->is_array()) {
                std::size_t idx = 0;
                try {
                    idx = std::stoul(segment);
                } catch (...) {
                    throw std::runtime_error("override path '" + path +
                                             "': '" + segment + "' is not an array index");
                }
                if (idx >= node->size())
                    throw std::runtime_error("override path '" + path + "': index out of range");
                node = &(*node)[idx];
            } else if (node->is_object() && node->contains(segment)) {
                node = &(*node)[segment];
            } else {
                throw std::runtime_error("unknown override key '" + path +
                                         "' (segment '" + segment + "' not present in config)");
            }
        }
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (...) {
            parsed = value; // plain string
        }
        *node = parsed;
    }
}

SystemConfig parse_system_config(const json& doc) {
    SystemConfig cfg;
    try {
        cfg.capacity = doc.at("capacity").get<int>();
        cfg.epsilon = doc.value("epsilon", 0.05);
        cfg.horizon = doc.value("horizon", 1000.0);
        cfg.warmup_fraction = doc.value("warmup_fraction", 0.2);
        int next_id = 0;
        for (const auto& jc : doc.at("classes")) {
            ClassSpec cls;
            cls.class_id = jc.value("class_id", next_id);
            cls.arrival_rate = jc.at("arrival_rate").get<double>();
            cls.reward_rate = jc.value("reward_rate", 0.0);
            for (const auto& entry : jc.at("pmf")) {
                if (!entry.is_array() || entry.size() != 3)
                    throw std::runtime_error("pmf entries must be [delay, duration, prob] triples");
                cls.pmf.push_back({entry[0].get<int>(), entry[1].get<int>(), entry[2].get<double>()});
            }
            cfg.classes.push_back(std::move(cls));
            ++next_id;
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("config: ") + e.what());
    }
    return cfg;
}

SweepParams parse_sweep_params(const json& doc) {
    SweepParams p;
    if (!doc.contains("sweep")) throw std::runtime_error("config: missing 'sweep' section");
    const json& s = doc["sweep"];
    const std::string regime = s.value("regime", "critical");
    if (regime == "critical")
        p.regime = Regime::critical;
    else if (regime == "padded")
        p.regime = Regime::padded;
    else
        throw std::runtime_error("config: sweep.regime must be 'critical' or 'padded'");
    for (const auto& v : s.at("lambda_grid")) p.lambda_grid.push_back(v.get<double>());
    p.samples = s.value("samples", 100000LL);
    return p;
}

long long parse_blocking_samples(const json& doc) {
    if (doc.contains("blocking") && doc["blocking"].contains("samples"))
        return doc["blocking"]["samples"].get<long long>();
    return 100000;
}

BenchParams parse_bench_params(const json& doc) {
    BenchParams p;
    if (!doc.contains("bench")) return p;
    const json& b = doc["bench"];
    if (b.contains("policies")) {
        p.policies.clear();
        for (const auto& v : b["policies"]) p.policies.push_back(v.get<std::string>());
    }
    if (b.contains("capacities"))
        for (const auto& v : b["capacities"]) p.capacities.push_back(v.get<int>());
    p.scale_rates = b.value("scale_rates", true);
    return p;
}

PricingParams parse_pricing_params(const json& doc) {
    if (!doc.contains("pricing")) throw std::runtime_error("config: missing 'pricing' section");
    const json& jp = doc["pricing"];
    PricingParams p;
    p.tol = jp.value("tol", 1e-9);
    if (jp.contains("grid_resolution")) p.grid_resolution = jp["grid_resolution"].get<int>();
    int next_id = 0;
    for (const auto& jc : jp.at("classes")) {
        PricedClass pc;
        pc.class_id = jc.value("class_id", next_id);
        const std::string family = jc.at("family").get<std::string>();
        if (family == "linear")
            pc.curve.family = DemandCurve::Family::linear;
        else if (family == "exponential_cutoff")
            pc.curve.family = DemandCurve::Family::exponential_cutoff;
        else
            throw std::runtime_error("config: unknown demand curve family '" + family + "'");
        pc.curve.base_rate = jc.at("base_rate").get<double>();
        pc.curve.choke_price = jc.at("choke_price").get<double>();
        pc.curve.shape = jc.value("shape", 1.0);
        for (const auto& entry : jc.at("pmf"))
            pc.pmf.push_back({entry[0].get<int>(), entry[1].get<int>(), entry[2].get<double>()});
        p.classes.push_back(std::move(pc));
        ++next_id;
    }
    return p;
}

DpInstance parse_dp_instance(const json& doc) {
    if (!doc.contains("dp")) throw std::runtime_error("config: missing 'dp' section");
    const json& jd = doc["dp"];
    if (jd.contains("classes")) {
        DpInstance inst;
        inst.periods = jd.at("periods").get<int>();
        inst.capacity = jd.at("capacity").get<int>();
        int next_id = 0;
        for (const auto& jc : jd["classes"]) {
            DpClass dc;
            dc.class_id = jc.value("class_id", next_id);
            dc.arrival_prob = jc.at("prob").get<double>();
            dc.reward_rate = jc.at("reward_rate").get<double>();
            for (const auto& w : jc.at("windows"))
                dc.windows.push_back({w[0].get<int>(), w[1].get<int>(), w[2].get<double>()});
            inst.classes.push_back(std::move(dc));
            ++next_id;
        }
        inst.validate();
        return inst;
    }
    if (jd.contains("period_length")) {
        const SystemConfig cfg = parse_system_config(doc);
        return discretize(cfg, jd["period_length"].get<double>(), jd.at("periods").get<int>());
    }
    throw std::runtime_error("config: 'dp' needs either explicit classes or period_length/periods");
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) h = (h ^ c) * 1099511628211ULL;
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

void write_manifest(const std::string& out_path, const std::string& command,
                    const std::string& config_path, const json& effective_config,
                    std::uint64_t seed, int replications,
                    const std::vector<std::string>& overrides, const json& extras) {
    json m;
    m["tool"] = "lossnet";
    m["version"] = kVersion;
    m["command"] = command;
    m["config_path"] = config_path;
    std::ifstream raw(config_path, std::ios::binary);
    if (raw) {
        std::ostringstream buf;
        buf << raw.rdbuf();
        m["config_file_hash"] = fnv1a_hex(buf.str());
    }
    m["effective_config_hash"] = fnv1a_hex(effective_config.dump());
    m["seed"] = seed;
    m["replications"] = replications;
    m["overrides"] = overrides;
    if (!extras.is_null()) m["extras"] = extras;
    std::ofstream out(out_path + ".manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest next to " + out_path);
    out << m.dump(2) << '\n';
}

} // namespace lossnet
