#include "collapse/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "collapse/errors.hpp"

namespace collapse {

using nlohmann::json;

namespace {

ModelChoice parse_model(const std::string& s) {
    if (s == "dp-monitoring") return ModelChoice::dp_monitoring;
    if (s == "dp-full") return ModelChoice::dp_full;
    if (s == "csl-monitoring") return ModelChoice::csl_monitoring;
    throw ValidationError("config: unknown model '" + s + "'");
}

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known)
            throw ValidationError("config: unknown key '" + item.key() + "' in " + where);
    }
}

} // namespace

ScenarioConfig ScenarioConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: JSON parse error: ") + e.what());
    }

    if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");
    reject_unknown_keys(j,
                        {"model", "constants", "m", "a", "d", "sigma", "kappa", "gamma",
                         "time", "trajectories", "bipartition"},
                        "top level");
    if (j.contains("time"))
        reject_unknown_keys(j.at("time"), {"t_max", "n_points"}, "time");
    if (j.contains("trajectories"))
        reject_unknown_keys(j.at("trajectories"),
                            {"n_traj", "dt", "master_seed", "with_backaction"}, "trajectories");

    ScenarioConfig c;
    try {
        if (j.contains("model")) c.model = parse_model(j.at("model").get<std::string>());
        if (j.contains("constants")) c.constants_profile = j.at("constants").get<std::string>();
        if (j.contains("m")) c.m = j.at("m").get<double>();
        if (j.contains("a")) c.a = j.at("a").get<double>();
        if (j.contains("d")) c.d = j.at("d").get<double>();
        if (j.contains("sigma")) c.sigma_len = j.at("sigma").get<double>();
        if (j.contains("kappa")) {
            if (c.model == ModelChoice::csl_monitoring)
                throw ValidationError("config: kappa is not valid for csl-monitoring");
            c.kappa = j.at("kappa").get<double>();
        }
        if (j.contains("gamma")) {
            if (c.model != ModelChoice::csl_monitoring)
                throw ValidationError("config: gamma is only valid for csl-monitoring");
            c.gamma = j.at("gamma").get<double>();
        }
        if (j.contains("time")) {
            const json& t = j.at("time");
            if (t.contains("t_max")) c.t_max = t.at("t_max").get<double>();
            if (t.contains("n_points")) c.n_points = t.at("n_points").get<std::size_t>();
        }
        if (j.contains("trajectories")) {
            const json& t = j.at("trajectories");
            if (t.contains("n_traj")) c.n_traj = t.at("n_traj").get<std::size_t>();
            if (t.contains("dt")) c.traj_dt = t.at("dt").get<double>();
            if (t.contains("master_seed")) c.master_seed = t.at("master_seed").get<std::uint64_t>();
            if (t.contains("with_backaction"))
                c.with_backaction = t.at("with_backaction").get<bool>();
        }
        if (j.contains("bipartition"))
            c.bipartition = j.at("bipartition").get<std::vector<std::vector<std::size_t>>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    if (!(c.m > 0.0) || !(c.a > 0.0) || !(c.d > 0.0) || !(c.sigma_len > 0.0))
        throw ValidationError("config: m, a, d, sigma must be positive");
    if (!(c.kappa > 0.0) || !(c.gamma > 0.0))
        throw ValidationError("config: kernel strength must be positive");
    if (c.n_points < 2) throw ValidationError("config: n_points must be >= 2");
    if (c.constants_profile != "natural" && c.constants_profile != "si")
        throw ValidationError("config: constants profile must be 'natural' or 'si'");
    if (c.with_backaction && c.model == ModelChoice::csl_monitoring)
        throw ValidationError("config: back-action is not available for csl-monitoring");
    return c;
}

ScenarioConfig ScenarioConfig::from_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("config: cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return from_json_text(os.str());
}

PhysicalConstants ScenarioConfig::constants() const {
    return constants_profile == "si" ? PhysicalConstants::si() : PhysicalConstants::natural();
}

Kernel ScenarioConfig::kernel() const {
    return model == ModelChoice::csl_monitoring ? Kernel::csl(gamma) : Kernel::dp(kappa);
}

BmvScenario ScenarioConfig::scenario() const { return bmv_scenario(m, a, d, sigma_len); }

Bipartition ScenarioConfig::bipartition_for(const ParticleSystem& system) const {
    if (bipartition.empty()) return Bipartition::first_particle(system);
    if (bipartition.size() != 2)
        throw ValidationError("config: bipartition needs exactly two particle lists");
    Bipartition b{bipartition[0], bipartition[1]};
    b.validate(system);
    return b;
}

GeneratorTables ScenarioConfig::tables(const ParticleSystem& system) const {
    switch (model) {
        case ModelChoice::dp_full:
            return dp_full_generator(system, constants());
        case ModelChoice::csl_monitoring:
        case ModelChoice::dp_monitoring:
        default:
            return monitoring_tables(system, kernel(), constants());
    }
}

std::vector<double> ScenarioConfig::time_grid(const GeneratorTables& tables) const {
    double tmax = t_max;
    if (!(tmax > 0.0)) {
        double gmax = tables.gamma.max_abs();
        tmax = gmax > 0.0 ? 1.0 / gmax : 1.0;
    }
    std::vector<double> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i)
        out[i] = tmax * static_cast<double>(i) / static_cast<double>(n_points - 1);
    return out;
}

} // namespace collapse
