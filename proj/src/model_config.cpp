#include "snlevy/model_config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "snlevy/errors.hpp"

namespace snlevy {
namespace config {

using nlohmann::json;

std::vector<std::string> gallery_names() {
    return {"brownian", "cramer_lundberg_exp", "piecewise_power", "piecewise_exp"};
}

LevyModel gallery_model(const std::string& name) {
    if (name == "brownian")
        return LevyModel::make(0.0, 1.0, JumpMeasure::none(), "brownian");
    if (name == "cramer_lundberg_exp")
        return LevyModel::make_bv(1.0, JumpMeasure::exponential(1.0, 2.0), "cramer_lundberg_exp");
    if (name == "piecewise_power")
        // paper-family exponents with an e^{-0.01/x} tempering near 0 (keeps
        // the transform evaluable; the density is log convex on [0.008, inf))
        return LevyModel::make_bv(3.0, JumpMeasure::piecewise_power(1.5, 0.5, 1.0, 0.1, 0.01),
                                  "piecewise_power");
    if (name == "piecewise_exp")
        return LevyModel::make_bv(13.0, JumpMeasure::piecewise_exp(0.5), "piecewise_exp");
    throw ConfigError("unknown gallery model: " + name);
}

JumpMeasure load_density_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open density CSV: " + path);
    std::vector<double> xs, ys;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double x, y;
        if (!(ss >> x >> y)) throw ConfigError("bad density CSV row: " + line);
        xs.push_back(x);
        ys.push_back(y);
    }
    try {
        return JumpMeasure::table_density(xs, ys);
    } catch (const NumericError& e) {
        throw ConfigError(std::string("density table rejected: ") + e.what());
    }
}

namespace {

double need(const json& p, const char* key) {
    if (!p.contains(key))
        throw ConfigError(std::string("missing parameter '") + key + "'");
    if (!p[key].is_number()) throw ConfigError(std::string("parameter '") + key + "' not numeric");
    return p[key].get<double>();
}

double maybe(const json& p, const char* key, double fallback) {
    if (!p.contains(key)) return fallback;
    if (!p[key].is_number()) throw ConfigError(std::string("parameter '") + key + "' not numeric");
    return p[key].get<double>();
}

LevyModel build(const std::string& family, const json& p, const std::string& base_dir) {
    try {
        if (family == "brownian") {
            return LevyModel::make(maybe(p, "gamma", 0.0), need(p, "sigma"), JumpMeasure::none(),
                                   "brownian");
        }
        if (family == "cramer_lundberg_exp") {
            return LevyModel::make_bv(need(p, "c"),
                                      JumpMeasure::exponential(need(p, "lambda"), need(p, "mu")),
                                      "cramer_lundberg_exp");
        }
        if (family == "piecewise_power") {
            auto jm = JumpMeasure::piecewise_power(need(p, "lambda1"), need(p, "lambda2"),
                                                   maybe(p, "alpha", 1.0), maybe(p, "scale", 1.0),
                                                   maybe(p, "temper", 0.01));
            if (p.contains("delta")) return LevyModel::make_bv(need(p, "delta"), jm, family);
            return LevyModel::make(need(p, "gamma"), maybe(p, "sigma", 0.0), jm, family);
        }
        if (family == "piecewise_exp") {
            auto jm = JumpMeasure::piecewise_exp(need(p, "lambda"), maybe(p, "scale", 1.0));
            return LevyModel::make_bv(need(p, "c"), jm, family);
        }
        if (family == "custom_density_table") {
            if (!p.contains("csv") || !p["csv"].is_string())
                throw ConfigError("custom_density_table needs a 'csv' path");
            std::string csv = p["csv"].get<std::string>();
            if (!csv.empty() && csv[0] != '/' && !base_dir.empty()) csv = base_dir + "/" + csv;
            auto jm = load_density_csv(csv);
            if (p.contains("delta")) return LevyModel::make_bv(need(p, "delta"), jm, family);
            return LevyModel::make(need(p, "gamma"), maybe(p, "sigma", 0.0), jm, family);
        }
    } catch (const NumericError& e) {
        throw ConfigError(std::string("model rejected: ") + e.what());
    }
    throw ConfigError("unknown model family: " + family);
}

} // namespace

ModelConfig load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open model file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model file parse error: ") + e.what());
    }
    if (!doc.contains("family") || !doc["family"].is_string())
        throw ConfigError("model file needs a string 'family'");
    json params = doc.value("parameters", json::object());
    std::string base_dir;
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos) base_dir = path.substr(0, slash);
    ModelConfig mc{build(doc["family"].get<std::string>(), params, base_dir), {}, path};
    if (doc.contains("tolerances")) {
        for (auto& [k, v] : doc["tolerances"].items()) {
            if (!v.is_number()) throw ConfigError("tolerance '" + k + "' not numeric");
            mc.tolerances[k] = v.get<double>();
        }
    }
    return mc;
}

ModelConfig resolve_model(const std::string& spec) {
    if (spec.rfind("gallery:", 0) == 0) {
        std::string name = spec.substr(8);
        return ModelConfig{gallery_model(name), {}, spec};
    }
    return load_model_file(spec);
}

} // namespace config
} // namespace snlevy
