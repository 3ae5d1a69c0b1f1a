#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "becnet/kmc.hpp"
#include "becnet/model.hpp"
#include "becnet/schedule.hpp"

namespace becnet {

inline constexpr const char* kArtifactVersion = "becnet 0.1.0";

// --- NetworkSpec files (JSON) ---
// {"M":2, "N":4, "lambda":[...], "J":[[...],[...]]}            dense form
// {"M":2, "N":4, "lambda":[...], "J":{"entries":[[i,j,v],...]}} coordinate form
// Coordinate entries fill both (i,j) and (j,i); dense matrices must be
// symmetric and are rejected with the offending indices otherwise.
NetworkSpec read_spec(const std::string& path);
NetworkSpec parse_spec_json(const std::string& text);
void write_spec(const NetworkSpec& spec, const std::string& path);
std::string spec_to_json(const NetworkSpec& spec);

// --- experiment configuration (JSON) ---

enum class EngineKind { kmc, ode, sde, metropolis, oracle };
enum class InitialMode { uniform_random, half_filled, pattern_fragment, random_spins };

struct InitialConditionSpec {
    InitialMode mode = InitialMode::uniform_random;
    std::string pattern_file; // pattern-fragment only
    double fraction = 0.5;    // leading row-major fraction of sites kept
};

struct ExperimentConfig {
    std::string network_file;              // exclusive with inline_spec
    std::optional<NetworkSpec> inline_spec;
    EngineKind engine = EngineKind::kmc;
    double alpha = 1.0;
    BetaSchedule beta = BetaSchedule::constant(1.0);
    double t_max = 1.0;
    double dt = 0.0;          // 0: engine default
    double sample_dt = 0.1;
    int n_traj = 1;
    int n_sweeps = 1000;      // metropolis engines
    std::uint64_t seed = 0;
    InitialConditionSpec initial;
    std::string out_path;
    bool verify_oracle = false;

    NetworkSpec load_network() const;
    void validate() const;
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text, const std::string& origin);

/// FNV-1a over the canonical JSON dump; stable across runs.
std::uint64_t config_hash(const std::string& canonical_json);
std::string canonical_config_json(const std::string& path);

const char* engine_name(EngineKind engine);

// --- CSV emission ---
// Every file starts with '#' provenance comments (version, engine, seed,
// config hash), then a header row. No timestamps: identical inputs must
// produce byte-identical files.
struct CsvProvenance {
    std::string engine;
    std::uint64_t seed = 0;
    std::uint64_t config_hash = 0;
    std::vector<std::string> extra; // additional "key=value" comment lines
};

class CsvWriter {
public:
    CsvWriter(std::ostream& out, const CsvProvenance& prov);

    void header(const std::vector<std::string>& columns);
    void row(const std::vector<double>& values);
    void comment(const std::string& line);

    /// %.17g: shortest full-precision decimal form.
    static std::string format(double value);

private:
    std::ostream& out_;
};

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const CsvProvenance& prov);
void write_ensemble_csv(std::ostream& out, const EnsembleStats& stats,
                        const CsvProvenance& prov);

} // namespace becnet
