#include "nambd/report.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nambd/spacepi.hpp"
#include "nambd/text.hpp"

namespace nambd::io {

namespace {

RngKind rng_from_string(const std::string& s) {
    if (s == "mt19937_64" || s == "mersenne_twister" || s == "mt") return RngKind::MersenneTwister;
    if (s == "lcg48" || s == "lcg" || s == "baseline") return RngKind::BaselineLcg;
    throw std::invalid_argument("unknown rng kind '" + s + "'");
}

DetectorKind detector_from_string(const std::string& s) {
    if (s == "time_stepped") return DetectorKind::TimeStepped;
    if (s == "event_triggered") return DetectorKind::EventTriggered;
    throw std::invalid_argument("unknown detector kind '" + s + "'");
}

SimulatorConfig engine_from_json(const nlohmann::json& j) {
    SimulatorConfig config;
    config.rng_kind = rng_from_string(j.value("rng", "mt19937_64"));
    config.detector_kind = detector_from_string(j.value("detector", "event_triggered"));
    if (j.contains("stepsize")) {
        const auto& s = j.at("stepsize");
        const std::string policy = s.value("policy", "fixed");
        if (policy == "fixed") {
            config.stepsize = FixedStep{s.value("dt", 0.1)};
        } else if (policy == "adaptive") {
            config.stepsize = AdaptiveStep{s.value("dt_max", 0.1), s.value("dt_min", 1e-4),
                                           s.value("safety_fraction", 0.1)};
        } else {
            throw std::invalid_argument("unknown stepsize policy '" + policy + "'");
        }
    }
    config.seed = j.value("seed", std::uint64_t{0});
    config.validate();
    return config;
}

NamGeometry geometry_from_json(const nlohmann::json& j,
                               const std::filesystem::path& base_dir) {
    if (j.contains("model")) {
        const std::filesystem::path file =
            base_dir.empty() ? std::filesystem::path(j.at("model").get<std::string>())
                             : base_dir / j.at("model").get<std::string>();
        std::ifstream in(file);
        if (!in) throw std::runtime_error("cannot open model file " + file.string());
        std::stringstream buf;
        buf << in.rdbuf();
        const auto doc = spacepi::parse_model(buf.str());
        return spacepi::lower_to_nam(doc, j.at("D").get<double>()).geometry;
    }
    return make_geometry(j.at("a").get<double>(), j.at("b").get<double>(),
                         j.at("q").get<double>(), j.at("D").get<double>(),
                         j.value("particle_radius", 0.0));
}

}  // namespace

ExperimentSpec spec_from_json(const nlohmann::json& j,
                              const std::filesystem::path& base_dir) {
    ExperimentSpec spec;
    if (j.contains("reference")) {
        const auto& ref = j.at("reference");
        if (ref.is_string()) {
            if (ref.get<std::string>() != "analytic")
                throw std::invalid_argument("reference must be \"analytic\" or a number");
            spec.reference = Reference{true, 0.0};
        } else {
            spec.reference = Reference{false, ref.get<double>()};
        }
    }
    spec.tolerance = j.at("e").get<double>();
    spec.confidence = j.at("c").get<double>();
    for (const auto& g : j.at("grid")) spec.model_grid.push_back(geometry_from_json(g, base_dir));
    for (const auto& e : j.at("engines")) spec.engine_matrix.push_back(engine_from_json(e));
    spec.master_seed = j.value("seed", std::uint64_t{0});
    spec.pilot_n = j.value("pilot_n", std::uint64_t{50});
    spec.max_n = j.value("max_n", std::uint64_t{1'000'000});
    spec.step_cap = j.value("step_cap", std::uint64_t{100'000'000});
    spec.validate();
    return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open spec file " + file.string());
    nlohmann::json j;
    in >> j;
    return spec_from_json(j, file.parent_path());
}

nlohmann::json engine_to_json(const SimulatorConfig& config) {
    nlohmann::json j;
    j["rng"] = config.rng_kind == RngKind::MersenneTwister ? "mt19937_64" : "lcg48";
    j["detector"] = config.detector_kind == DetectorKind::TimeStepped ? "time_stepped"
                                                                      : "event_triggered";
    if (const auto* fixed = std::get_if<FixedStep>(&config.stepsize)) {
        j["stepsize"] = {{"policy", "fixed"}, {"dt", fixed->dt}};
    } else {
        const auto& ad = std::get<AdaptiveStep>(config.stepsize);
        j["stepsize"] = {{"policy", "adaptive"},
                         {"dt_max", ad.dt_max},
                         {"dt_min", ad.dt_min},
                         {"safety_fraction", ad.safety_fraction}};
    }
    j["seed"] = config.seed;
    return j;
}

nlohmann::json spec_to_json(const ExperimentSpec& spec) {
    nlohmann::json j;
    if (spec.reference.analytic)
        j["reference"] = "analytic";
    else
        j["reference"] = spec.reference.value;
    j["e"] = spec.tolerance;
    j["c"] = spec.confidence;
    j["grid"] = nlohmann::json::array();
    for (const auto& g : spec.model_grid)
        j["grid"].push_back({{"a", g.a()},
                             {"b", g.b()},
                             {"q", g.q()},
                             {"D", g.diffusion()},
                             {"particle_radius", g.particle_radius()}});
    j["engines"] = nlohmann::json::array();
    for (const auto& e : spec.engine_matrix) j["engines"].push_back(engine_to_json(e));
    j["seed"] = spec.master_seed;
    j["pilot_n"] = spec.pilot_n;
    j["max_n"] = spec.max_n;
    j["step_cap"] = spec.step_cap;
    return j;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out =
        "cell,a,b,q,D,engine,beta_ref,beta_hat,std_error,n,n_required,valid,capped,"
        "step_limit_hit\n";
    for (const auto& r : report.rows) {
        out += std::to_string(r.cell_index) + "," + format_double(r.a) + "," +
               format_double(r.b) + "," + format_double(r.q) + "," + format_double(r.D) +
               "," + r.engine + "," + format_double(r.beta_ref) + "," +
               format_double(r.beta_hat) + "," + format_double(r.std_error) + "," +
               std::to_string(r.n) + "," + std::to_string(r.n_required) + "," +
               (r.valid ? "true" : "false") + "," + (r.capped ? "true" : "false") + "," +
               (r.step_limit_hit ? "true" : "false") + "\n";
    }
    return out;
}

nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    std::map<std::string, nlohmann::json> series;
    for (const auto& r : report.rows) {
        j["rows"].push_back({{"cell", r.cell_index},
                             {"a", r.a},
                             {"b", r.b},
                             {"q", r.q},
                             {"D", r.D},
                             {"engine", r.engine},
                             {"beta_ref", r.beta_ref},
                             {"beta_hat", r.beta_hat},
                             {"std_error", r.std_error},
                             {"n", r.n},
                             {"n_required", r.n_required},
                             {"valid", r.valid},
                             {"capped", r.capped},
                             {"step_limit_hit", r.step_limit_hit}});
        series[r.engine].push_back(
            {{"D", r.D}, {"beta_hat", r.beta_hat}, {"beta_ref", r.beta_ref}});
    }
    j["series"] = nlohmann::json::object();
    for (const auto& [engine, points] : series) j["series"][engine] = points;
    return j;
}

std::string replications_to_jsonl(const std::vector<ConfigurationVerdict>& verdicts) {
    std::string out;
    for (const auto& v : verdicts) {
        for (std::size_t k = 0; k < v.runs.size(); ++k) {
            const nlohmann::json line = {
                {"cell", v.cell_index},
                {"replication", k},
                {"end_state", v.runs[k].end_state == EndState::Reacted ? "reacted" : "escaped"},
                {"steps", v.runs[k].steps},
                {"model_time", v.runs[k].model_time}};
            out += line.dump() + "\n";
        }
    }
    return out;
}

nlohmann::json manifest_to_json(const ExperimentSpec& spec,
                                const std::vector<ConfigurationVerdict>& verdicts) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["spec"] = spec_to_json(spec);
    j["master_seed"] = spec.master_seed;
    j["cells"] = nlohmann::json::array();
    for (const auto& v : verdicts)
        j["cells"].push_back({{"cell", v.cell_index},
                              {"engine", engine_label(v.engine)},
                              {"n", v.estimate.n},
                              {"n_required", v.n_required},
                              {"beta_hat", v.estimate.beta_hat},
                              {"std_error", v.estimate.std_error},
                              {"valid", v.valid},
                              {"capped", v.capped},
                              {"step_limit_hit", v.step_limit_hit},
                              {"wall_time_s", v.wall_time_s}});
    return j;
}

PotentialOfMeanForce pmf_from_json(const nlohmann::json& j) {
    const std::string kind = j.value("kind", "zero");
    if (kind == "zero")
        return PotentialOfMeanForce{[](double) { return 0.0; },
                                    [](double) { return 0.0; }};
    if (kind == "debye_huckel") {
        const double prefactor = j.at("prefactor").get<double>();
        const double kappa = j.at("kappa").get<double>();
        return PotentialOfMeanForce{
            [=](double r) { return prefactor * std::exp(-kappa * r) / r; },
            [=](double r) {
                return -prefactor * std::exp(-kappa * r) * (kappa * r + 1.0) / (r * r);
            }};
    }
    throw std::invalid_argument("unknown potential kind '" + kind + "'");
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

}  // namespace nambd::io
