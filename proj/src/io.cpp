#include "becnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "becnet/errors.hpp"

namespace becnet {

using nlohmann::json;

namespace {

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError(origin + ": " + err.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

double beta_from_json(const json& value, const std::string& origin) {
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s == "inf" || s == "INF" || s == "infinite") return kInfiniteBeta;
        throw ConfigError(origin + ": beta string must be \"inf\"");
    }
    if (!value.is_number()) throw ConfigError(origin + ": beta must be a number or \"inf\"");
    return value.get<double>();
}

json beta_to_json(double beta) {
    if (std::isinf(beta)) return json("inf");
    return json(beta);
}

NetworkSpec spec_from_json(const json& j, const std::string& origin) {
    for (const char* key : {"M", "N", "J", "lambda"})
        if (!j.contains(key))
            throw ConfigError(origin + ": network spec missing field '" + key + "'");

    NetworkSpec spec;
    spec.M = j.at("M").get<int>();
    spec.N = j.at("N").get<int>();
    if (spec.M < 1 || spec.N < 1) throw ConfigError(origin + ": M and N must be >= 1");
    spec.lambda = j.at("lambda").get<std::vector<double>>();
    if (spec.lambda.size() != static_cast<std::size_t>(spec.M))
        throw ConfigError(origin + ": lambda must have length M");

    spec.J.assign(static_cast<std::size_t>(spec.M) * spec.M, 0.0);
    const json& jj = j.at("J");
    if (jj.is_array()) {
        if (jj.size() != static_cast<std::size_t>(spec.M))
            throw ConfigError(origin + ": dense J must have M rows");
        for (int r = 0; r < spec.M; ++r) {
            const json& row = jj.at(r);
            if (!row.is_array() || row.size() != static_cast<std::size_t>(spec.M))
                throw ConfigError(origin + ": dense J row " + std::to_string(r) +
                                  " must have M entries");
            for (int c = 0; c < spec.M; ++c) spec.coupling(r, c) = row.at(c).get<double>();
        }
        for (int r = 0; r < spec.M; ++r)
            for (int c = r + 1; c < spec.M; ++c)
                if (spec.coupling(r, c) != spec.coupling(c, r)) {
                    std::ostringstream msg;
                    msg << origin << ": asymmetric J at (" << r << ", " << c << "): "
                        << spec.coupling(r, c) << " vs " << spec.coupling(c, r);
                    throw ConfigError(msg.str());
                }
    } else if (jj.is_object() && jj.contains("entries")) {
        for (const json& entry : jj.at("entries")) {
            if (!entry.is_array() || entry.size() != 3)
                throw ConfigError(origin + ": coordinate J entries must be [i, j, v]");
            const int r = entry.at(0).get<int>();
            const int c = entry.at(1).get<int>();
            const double v = entry.at(2).get<double>();
            if (r < 0 || r >= spec.M || c < 0 || c >= spec.M)
                throw ConfigError(origin + ": coordinate J index out of range");
            // one (i, j, v) entry defines the symmetric pair
            if (spec.coupling(r, c) != 0.0 && spec.coupling(r, c) != v) {
                std::ostringstream msg;
                msg << origin << ": conflicting coordinate J values at (" << r << ", " << c
                    << ")";
                throw ConfigError(msg.str());
            }
            spec.coupling(r, c) = v;
            spec.coupling(c, r) = v;
        }
    } else {
        throw ConfigError(origin + ": J must be a dense matrix or {\"entries\": [...]}");
    }
    spec.validate();
    return spec;
}

json spec_to_json_obj(const NetworkSpec& spec) {
    json j;
    j["M"] = spec.M;
    j["N"] = spec.N;
    j["lambda"] = spec.lambda;
    json rows = json::array();
    for (int r = 0; r < spec.M; ++r) {
        json row = json::array();
        for (int c = 0; c < spec.M; ++c) row.push_back(spec.coupling(r, c));
        rows.push_back(std::move(row));
    }
    j["J"] = std::move(rows);
    return j;
}

} // namespace

NetworkSpec parse_spec_json(const std::string& text) {
    return spec_from_json(parse_json_text(text, "network spec"), "network spec");
}

NetworkSpec read_spec(const std::string& path) {
    return spec_from_json(parse_json_text(read_file(path), path), path);
}

std::string spec_to_json(const NetworkSpec& spec) {
    return spec_to_json_obj(spec).dump(2) + "\n";
}

void write_spec(const NetworkSpec& spec, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << spec_to_json(spec);
}

const char* engine_name(EngineKind engine) {
    switch (engine) {
        case EngineKind::kmc: return "kmc";
        case EngineKind::ode: return "ode";
        case EngineKind::sde: return "sde";
        case EngineKind::metropolis: return "metropolis";
        case EngineKind::oracle: return "oracle";
    }
    return "?";
}

namespace {

EngineKind engine_from_name(const std::string& name, const std::string& origin) {
    if (name == "kmc") return EngineKind::kmc;
    if (name == "ode") return EngineKind::ode;
    if (name == "sde") return EngineKind::sde;
    if (name == "metropolis") return EngineKind::metropolis;
    if (name == "oracle") return EngineKind::oracle;
    throw ConfigError(origin + ": unknown engine '" + name +
                      "' (kmc|ode|sde|metropolis|oracle)");
}

InitialMode initial_mode_from_name(const std::string& name, const std::string& origin) {
    if (name == "uniform-random") return InitialMode::uniform_random;
    if (name == "half-filled") return InitialMode::half_filled;
    if (name == "pattern-fragment") return InitialMode::pattern_fragment;
    if (name == "random-spins") return InitialMode::random_spins;
    throw ConfigError(origin + ": unknown initial mode '" + name + "'");
}

} // namespace

NetworkSpec ExperimentConfig::load_network() const {
    if (inline_spec) return *inline_spec;
    if (network_file.empty()) throw ConfigError("config: no network file or inline spec");
    return read_spec(network_file);
}

void ExperimentConfig::validate() const {
    if (!(alpha > 0.0)) throw ConfigError("config: alpha must be > 0");
    beta.validate();
    if (t_max < 0.0) throw ConfigError("config: t_max must be >= 0");
    if (t_max > 0.0 && engine != EngineKind::metropolis && !(sample_dt > 0.0))
        throw ConfigError("config: sample_dt must be > 0");
    if (n_traj < 1) throw ConfigError("config: n_traj must be >= 1");
    if (n_sweeps < 1) throw ConfigError("config: n_sweeps must be >= 1");
    // dt = 0 means "engine default"; the simulate subcommands require an
    // explicit dt for the fixed-step integrators
    if (initial.mode == InitialMode::pattern_fragment) {
        if (initial.pattern_file.empty())
            throw ConfigError("config: pattern-fragment initial mode needs a pattern file");
        if (!(initial.fraction >= 0.0 && initial.fraction <= 1.0))
            throw ConfigError("config: fragment fraction must be in [0, 1]");
    }
}

ExperimentConfig parse_config_json(const std::string& text, const std::string& origin) {
    const json j = parse_json_text(text, origin);
    ExperimentConfig cfg;

    if (!j.contains("network")) throw ConfigError(origin + ": missing 'network'");
    const json& net = j.at("network");
    if (net.is_string()) {
        cfg.network_file = net.get<std::string>();
    } else if (net.is_object() && net.contains("file")) {
        cfg.network_file = net.at("file").get<std::string>();
    } else if (net.is_object()) {
        cfg.inline_spec = spec_from_json(net, origin + ".network");
    } else {
        throw ConfigError(origin + ": 'network' must be a file path or an inline spec");
    }

    if (!j.contains("engine")) throw ConfigError(origin + ": missing 'engine'");
    cfg.engine = engine_from_name(j.at("engine").get<std::string>(), origin);

    if (j.contains("thermo")) {
        const json& th = j.at("thermo");
        if (th.contains("alpha")) cfg.alpha = th.at("alpha").get<double>();
        if (th.contains("beta") && th.contains("beta_schedule"))
            throw ConfigError(origin + ": give either beta or beta_schedule");
        if (th.contains("beta")) {
            cfg.beta = BetaSchedule::constant(beta_from_json(th.at("beta"), origin));
        } else if (th.contains("beta_schedule")) {
            std::vector<std::pair<double, double>> knots;
            for (const json& knot : th.at("beta_schedule")) {
                if (!knot.is_array() || knot.size() != 2)
                    throw ConfigError(origin + ": beta_schedule knots are [t, beta]");
                knots.emplace_back(knot.at(0).get<double>(),
                                   beta_from_json(knot.at(1), origin));
            }
            cfg.beta = BetaSchedule::ramp(std::move(knots));
        }
    }

    if (j.contains("t_max")) cfg.t_max = j.at("t_max").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("sample_dt")) cfg.sample_dt = j.at("sample_dt").get<double>();
    if (j.contains("n_traj")) cfg.n_traj = j.at("n_traj").get<int>();
    if (j.contains("n_sweeps")) cfg.n_sweeps = j.at("n_sweeps").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) cfg.out_path = j.at("out").get<std::string>();
    if (j.contains("verify_oracle")) cfg.verify_oracle = j.at("verify_oracle").get<bool>();

    if (j.contains("initial")) {
        const json& init = j.at("initial");
        if (!init.contains("mode")) throw ConfigError(origin + ": initial needs 'mode'");
        cfg.initial.mode = initial_mode_from_name(init.at("mode").get<std::string>(), origin);
        if (init.contains("file")) cfg.initial.pattern_file = init.at("file").get<std::string>();
        if (init.contains("fraction")) cfg.initial.fraction = init.at("fraction").get<double>();
    }

    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    return parse_config_json(read_file(path), path);
}

std::uint64_t config_hash(const std::string& canonical_json) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical_json) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string canonical_config_json(const std::string& path) {
    return parse_json_text(read_file(path), path).dump();
}

CsvWriter::CsvWriter(std::ostream& out, const CsvProvenance& prov) : out_(out) {
    out_ << "# " << kArtifactVersion << "\n";
    out_ << "# engine=" << prov.engine << " seed=" << prov.seed << " config_hash="
         << prov.config_hash << "\n";
    for (const std::string& line : prov.extra) out_ << "# " << line << "\n";
}

void CsvWriter::header(const std::vector<std::string>& columns) {
    for (std::size_t i = 0; i < columns.size(); ++i)
        out_ << (i ? "," : "") << columns[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i)
        out_ << (i ? "," : "") << format(values[i]);
    out_ << "\n";
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

std::string CsvWriter::format(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const CsvProvenance& prov) {
    CsvWriter csv(out, prov);
    std::vector<std::string> cols{"t"};
    for (int i = 1; i <= traj.meta.M; ++i) cols.push_back("s_" + std::to_string(i));
    csv.header(cols);
    std::vector<double> row(traj.meta.M + 1);
    for (std::size_t c = 0; c < traj.times.size(); ++c) {
        row[0] = traj.times[c];
        for (int i = 0; i < traj.meta.M; ++i) row[i + 1] = traj.samples[c][i];
        csv.row(row);
    }
}

void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats,
                        const CsvProvenance& prov) {
    CsvWriter csv(out, prov);
    const int M = stats.mean.empty() ? 0 : static_cast<int>(stats.mean.front().size());
    std::vector<std::string> cols{"t"};
    for (int i = 1; i <= M; ++i) cols.push_back("mean_" + std::to_string(i));
    for (int i = 1; i <= M; ++i) cols.push_back("var_" + std::to_string(i));
    csv.header(cols);
    std::vector<double> row(2 * M + 1);
    for (std::size_t c = 0; c < stats.times.size(); ++c) {
        row[0] = stats.times[c];
        for (int i = 0; i < M; ++i) row[i + 1] = stats.mean[c][i];
        for (int i = 0; i < M; ++i) row[M + i + 1] = stats.var[c][i];
        csv.row(row);
    }
}

} // namespace becnet
