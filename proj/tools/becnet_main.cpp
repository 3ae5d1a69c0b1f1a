// becnet command-line front end: simulation engines, learning, and the
// pattern-completion / N-sweep experiments, all emitting plot-ready CSV.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "becnet/errors.hpp"
#include "becnet/experiment.hpp"
#include "becnet/hebbian.hpp"
#include "becnet/io.hpp"
#include "becnet/master_equation.hpp"
#include "becnet/meanfield.hpp"
#include "becnet/metropolis.hpp"

namespace fs = std::filesystem;
using namespace becnet;

namespace {

// exit codes:
constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kNotConverged = 4;
constexpr int kVerifyFailed = 5;

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed_override;
    std::string out_override;
    bool verify_oracle = false;
};

ExperimentConfig load_config(const CommonArgs& args, EngineKind expected) {
    ExperimentConfig cfg = parse_config(args.config_path);
    if (cfg.engine != expected)
        throw ConfigError("config engine is '" + std::string(engine_name(cfg.engine)) +
                          "' but the subcommand expects '" + engine_name(expected) + "'");
    if (args.seed_override) cfg.seed = *args.seed_override;
    if (!args.out_override.empty()) cfg.out_path = args.out_override;
    if (args.verify_oracle) cfg.verify_oracle = true;
    return cfg;
}

CsvProvenance make_provenance(const CommonArgs& args, const ExperimentConfig& cfg) {
    CsvProvenance prov;
    prov.engine = engine_name(cfg.engine);
    prov.seed = cfg.seed;
    prov.config_hash = config_hash(canonical_config_json(args.config_path));
    return prov;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write output file: " + path);
    return out;
}

InitialCondition make_occupation_init(const ExperimentConfig& cfg, const NetworkSpec& spec) {
    switch (cfg.initial.mode) {
        case InitialMode::uniform_random:
            return [](const NetworkSpec& s, Rng& r) { return random_occupation(s, r); };
        case InitialMode::half_filled:
            return [](const NetworkSpec& s, Rng&) {
                return OccupationState(s.M, s.N / 2);
            };
        case InitialMode::random_spins:
            return [](const NetworkSpec& s, Rng& r) {
                OccupationState k(s.M);
                for (int i = 0; i < s.M; ++i) k[i] = r.below(2) == 0 ? 0 : s.N;
                return k;
            };
        case InitialMode::pattern_fragment: {
            const SpinState s0 = make_initial_spins(spec, cfg.initial, cfg.seed);
            OccupationState k0 = occupation_state(s0, spec.N);
            return [k0](const NetworkSpec&, Rng&) { return k0; };
        }
    }
    throw ConfigError("unknown initial mode");
}

int run_simulate_kmc(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args, EngineKind::kmc);
    const NetworkSpec spec = cfg.load_network();
    spec.validate();
    auto out = open_out(cfg.out_path);
    const CsvProvenance prov = make_provenance(args, cfg);

    if (cfg.n_traj == 1) {
        if (cfg.verify_oracle)
            throw ConfigError("--verify-oracle needs an ensemble (n_traj >= 100)");
        Rng init_rng(derive_seed(cfg.seed, 0x1c0));
        const OccupationState k0 = make_occupation_init(cfg, spec)(spec, init_rng);
        const Trajectory traj =
            run_trajectory(spec, cfg.beta, cfg.alpha, k0, cfg.t_max, cfg.sample_dt, cfg.seed);
        write_trajectory_csv(out, traj, prov);
        return kOk;
    }

    const EnsembleStats stats =
        run_ensemble(spec, cfg.beta, cfg.alpha, cfg.n_traj, cfg.t_max, cfg.sample_dt,
                     cfg.seed, make_occupation_init(cfg, spec));
    write_ensemble_csv(out, stats, prov);
    if (cfg.verify_oracle) {
        if (cfg.n_traj < 100)
            throw ConfigError("--verify-oracle needs n_traj >= 100 for a standard error");
        const OracleCheck check = verify_against_oracle(spec, cfg, stats);
        if (!check.passed) {
            std::cerr << "oracle cross-check FAILED: " << check.detail << "\n";
            return kVerifyFailed;
        }
        std::cerr << "oracle cross-check passed (worst deviation "
                  << check.worst_deviation << " of tolerance)\n";
    }
    return kOk;
}

int run_simulate_ode(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args, EngineKind::ode);
    if (!(cfg.dt > 0.0)) throw ConfigError("simulate-ode: config needs dt > 0");
    const NetworkSpec spec = cfg.load_network();
    spec.validate();
    const SpinState s0 = make_initial_spins(spec, cfg.initial, cfg.seed);
    const Trajectory traj =
        integrate_ode(spec, cfg.beta, cfg.alpha, s0, cfg.t_max, cfg.dt, cfg.sample_dt);
    auto out = open_out(cfg.out_path);
    write_trajectory_csv(out, traj, make_provenance(args, cfg));
    if (cfg.verify_oracle)
        throw ConfigError("--verify-oracle applies to the stochastic ensemble engines");
    return kOk;
}

int run_simulate_sde(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args, EngineKind::sde);
    if (!(cfg.dt > 0.0)) throw ConfigError("simulate-sde: config needs dt > 0");
    const NetworkSpec spec = cfg.load_network();
    spec.validate();
    auto out = open_out(cfg.out_path);
    const CsvProvenance prov = make_provenance(args, cfg);

    if (cfg.n_traj == 1) {
        SdeParams params;
        params.dt = cfg.dt;
        params.seed = cfg.seed;
        const SpinState s0 = make_initial_spins(spec, cfg.initial, cfg.seed);
        const SdeResult result =
            integrate_sde(spec, cfg.beta, cfg.alpha, s0, cfg.t_max, cfg.sample_dt, params);
        write_trajectory_csv(out, result.trajectory, prov);
        return kOk;
    }

    // ensemble of independent paths, merged like the kmc ensembles
    const std::size_t n_samples =
        static_cast<std::size_t>(std::floor(cfg.t_max / cfg.sample_dt)) + 1;
    EnsembleStats stats;
    stats.n_traj = cfg.n_traj;
    stats.times.resize(n_samples);
    for (std::size_t c = 0; c < n_samples; ++c) stats.times[c] = c * cfg.sample_dt;
    stats.mean.assign(n_samples, std::vector<double>(spec.M, 0.0));
    stats.var.assign(n_samples, std::vector<double>(spec.M, 0.0));
    std::vector<std::vector<double>> m2(n_samples, std::vector<double>(spec.M, 0.0));
    for (int tr = 0; tr < cfg.n_traj; ++tr) {
        SdeParams params;
        params.dt = cfg.dt;
        params.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(tr));
        const SpinState s0 = make_initial_spins(spec, cfg.initial, params.seed);
        const SdeResult result =
            integrate_sde(spec, cfg.beta, cfg.alpha, s0, cfg.t_max, cfg.sample_dt, params);
        for (std::size_t c = 0; c < n_samples; ++c) {
            for (int i = 0; i < spec.M; ++i) {
                const double x = result.trajectory.samples[c][i];
                const double d = x - stats.mean[c][i];
                stats.mean[c][i] += d / (tr + 1);
                m2[c][i] += d * (x - stats.mean[c][i]);
            }
        }
    }
    if (cfg.n_traj > 1)
        for (std::size_t c = 0; c < n_samples; ++c)
            for (int i = 0; i < spec.M; ++i) stats.var[c][i] = m2[c][i] / (cfg.n_traj - 1);
    write_ensemble_csv(out, stats, prov);

    if (cfg.verify_oracle) {
        if (cfg.n_traj < 100)
            throw ConfigError("--verify-oracle needs n_traj >= 100 for a standard error");
        const OracleCheck check = verify_against_oracle(spec, cfg, stats);
        if (!check.passed) {
            std::cerr << "oracle cross-check FAILED: " << check.detail << "\n";
            return kVerifyFailed;
        }
        std::cerr << "oracle cross-check passed (worst deviation "
                  << check.worst_deviation << " of tolerance)\n";
    }
    return kOk;
}

int run_oracle(const CommonArgs& args) {
    const ExperimentConfig cfg = load_config(args, EngineKind::oracle);
    const NetworkSpec spec = cfg.load_network();
    spec.validate();
    if (!oracle_feasible(spec))
        throw NumericalError("oracle: (N+1)^M exceeds the 10^6 state guard");
    if (!cfg.beta.is_constant())
        throw ConfigError("oracle: beta schedules are not supported here");
    const ThermoParams thermo{cfg.beta.constant_value(), cfg.alpha};
    StateSpace space(spec.M, spec.N);

    ProbabilityVector p;
    switch (cfg.initial.mode) {
        case InitialMode::uniform_random: p = uniform_distribution(space); break;
        case InitialMode::half_filled:
            p = delta_distribution(space, OccupationState(spec.M, spec.N / 2));
            break;
        default:
            throw ConfigError("oracle: initial mode must be uniform-random or half-filled");
    }

    auto out = open_out(cfg.out_path);
    CsvWriter csv(out, make_provenance(args, cfg));
    std::vector<std::string> cols{"t"};
    for (int i = 1; i <= spec.M; ++i) cols.push_back("s_" + std::to_string(i));
    csv.header(cols);

    const std::size_t n_samples =
        cfg.t_max > 0.0
            ? static_cast<std::size_t>(std::floor(cfg.t_max / cfg.sample_dt)) + 1
            : 1;
    EvolveOptions eopts;
    eopts.dt = cfg.dt > 0.0 ? cfg.dt : 0.0;
    double t_prev = 0.0;
    std::vector<double> row(spec.M + 1);
    for (std::size_t c = 0; c < n_samples; ++c) {
        const double t = static_cast<double>(c) * cfg.sample_dt;
        p = evolve(spec, thermo, std::move(p), t - t_prev, eopts);
        t_prev = t;
        row[0] = t;
        const std::vector<double> means = mean_spins(space, p);
        for (int i = 0; i < spec.M; ++i) row[i + 1] = means[i];
        csv.row(row);
    }
    return kOk;
}

int run_metropolis_like(const CommonArgs& args, bool annealing) {
    const ExperimentConfig cfg = load_config(args, EngineKind::metropolis);
    const NetworkSpec spec = cfg.load_network();
    spec.validate();

    Rng rng(cfg.seed);
    Rng init_rng(derive_seed(cfg.seed, 0x1c0));
    OccupationState k = make_occupation_init(cfg, spec)(spec, init_rng);

    auto out = open_out(cfg.out_path);
    CsvWriter csv(out, make_provenance(args, cfg));
    std::vector<std::string> cols{"sweep", "energy"};
    for (int i = 1; i <= spec.M; ++i) cols.push_back("s_" + std::to_string(i));
    csv.header(cols);

    const int stride = std::max(1, cfg.n_sweeps / 1000); // ~1000 rows
    std::vector<double> row(spec.M + 2);
    auto emit = [&](int sweep) {
        row[0] = sweep;
        row[1] = energy(spec, k);
        const SpinState s = spin_state(k, spec.N);
        for (int i = 0; i < spec.M; ++i) row[i + 2] = s[i];
        csv.row(row);
    };

    if (annealing) {
        const SweepObserver observer = [&](int sweep, const OccupationState& state,
                                           double current_energy) {
            if (sweep % stride != 0) return;
            row[0] = sweep;
            row[1] = current_energy;
            const SpinState s = spin_state(state, spec.N);
            for (int i = 0; i < spec.M; ++i) row[i + 2] = s[i];
            csv.row(row);
        };
        const AnnealResult result =
            anneal(spec, cfg.beta, cfg.alpha, k, cfg.n_sweeps, rng, observer);
        csv.comment("best_energy=" + CsvWriter::format(result.best_energy));
        std::cout << "best energy " << CsvWriter::format(result.best_energy) << "\n";
        return kOk;
    }

    if (!cfg.beta.is_constant())
        throw ConfigError("sample-metropolis: use the anneal subcommand for schedules");
    const ThermoParams thermo{cfg.beta.constant_value(), cfg.alpha};
    for (int sweep = 0; sweep < cfg.n_sweeps; ++sweep) {
        if (sweep % stride == 0) emit(sweep);
        for (int p = 0; p < spec.M; ++p) metropolis_step(k, spec, thermo, rng);
    }
    emit(cfg.n_sweeps);
    return kOk;
}

int run_learn(const std::string& patterns_dir, double c, double lambda0, double beta,
              double alpha, int epochs, const std::string& equilibrator,
              const std::string& out_path, int boson_number, std::uint64_t seed) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(patterns_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("learn: no pattern files in " + patterns_dir);

    std::vector<Pattern> patterns;
    for (const auto& file : files) patterns.push_back(load_pattern_file(file.string()));
    const int M = patterns.front().size();
    for (const Pattern& p : patterns)
        if (p.size() != M) throw ConfigError("learn: pattern sizes differ");

    EquilibratorConfig eq;
    eq.seed = seed;
    if (equilibrator == "analytic") {
        eq.kind = EquilibratorKind::analytic;
    } else if (equilibrator == "metropolis") {
        eq.kind = EquilibratorKind::metropolis;
    } else if (equilibrator == "ode") {
        eq.kind = EquilibratorKind::ode;
        eq.ode_t_max = 50.0 / (alpha * boson_number);
        eq.ode_dt = 0.02 / (alpha * boson_number);
    } else {
        throw ConfigError("learn: equilibrator must be analytic|metropolis|ode");
    }

    const ThermoParams thermo{beta, alpha};
    thermo.validate();
    const TrainingSet set = TrainingSet::from_patterns(patterns, lambda0, c);
    const TrainResult result =
        hebbian_train(NetworkSpec::zeros(M, boson_number), thermo, set, eq, epochs);
    write_spec(result.spec, out_path);
    std::cout << "trained " << patterns.size() << " pattern(s), " << result.exposures
              << " exposure(s), max update asymmetry "
              << CsvWriter::format(result.max_asymmetry) << "\n";
    return kOk;
}

int run_complete_pattern(const CommonArgs& args, const std::string& spec_path,
                         const std::string& targets_dir, double epsilon) {
    ExperimentConfig cfg = parse_config(args.config_path);
    if (args.seed_override) cfg.seed = *args.seed_override;
    if (!args.out_override.empty()) cfg.out_path = args.out_override;
    const NetworkSpec trained = read_spec(spec_path);
    trained.validate();

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(targets_dir))
        if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<Pattern> targets;
    for (const auto& file : files) targets.push_back(load_pattern_file(file.string()));
    if (targets.empty()) throw ConfigError("complete-pattern: no target patterns");

    CompletionOptions opts;
    opts.engine = cfg.engine;
    opts.seed = cfg.seed;
    opts.epsilon_conv = epsilon;
    if (cfg.t_max > 0.0) opts.t_max = cfg.t_max;
    if (cfg.dt > 0.0) opts.dt = cfg.dt;
    if (cfg.sample_dt > 0.0) opts.sample_dt = cfg.sample_dt;

    const SpinState s0 = make_initial_spins(trained, cfg.initial, cfg.seed);
    const CompletionResult result =
        run_pattern_completion(trained, cfg.beta, cfg.alpha, s0, targets, opts);

    auto out = open_out(cfg.out_path);
    CsvWriter csv(out, make_provenance(args, cfg));
    std::vector<std::string> cols{"t"};
    for (std::size_t n = 1; n <= targets.size(); ++n)
        cols.push_back("D_" + std::to_string(n));
    for (int i = 1; i <= trained.M; ++i) cols.push_back("s_" + std::to_string(i));
    csv.header(cols);
    std::vector<double> row(1 + targets.size() + trained.M);
    for (std::size_t c = 0; c < result.times.size(); ++c) {
        row[0] = result.times[c];
        for (std::size_t n = 0; n < targets.size(); ++n) row[1 + n] = result.distances[c][n];
        const std::size_t base = 1 + targets.size();
        for (int i = 0; i < trained.M; ++i) row[base + i] = result.samples[c][i];
        csv.row(row);
    }

    std::cout << render_pattern_grid(result.final_state, targets.front().rows,
                                     targets.front().cols);
    if (result.converged) {
        std::cout << "converged to pattern " << (result.target_index + 1)
                  << (result.target_sign < 0 ? " (inverted)" : "") << "\n";
        return kOk;
    }
    std::cout << "did not converge within t_max\n";
    return kNotConverged;
}

int run_sweep_n(const CommonArgs& args, const std::string& spec_path,
                const std::string& target_file, std::vector<int> n_values,
                std::vector<double> epsilons) {
    ExperimentConfig cfg = parse_config(args.config_path);
    if (args.seed_override) cfg.seed = *args.seed_override;
    if (!args.out_override.empty()) cfg.out_path = args.out_override;
    const NetworkSpec trained = read_spec(spec_path);
    trained.validate();
    const Pattern target = load_pattern_file(target_file);

    SweepOptions opts;
    if (!epsilons.empty()) opts.epsilons = std::move(epsilons);
    opts.engine = cfg.engine == EngineKind::metropolis ? EngineKind::ode : cfg.engine;
    opts.seed = cfg.seed;
    const SweepResult result = run_n_sweep(trained, cfg.beta, cfg.alpha, cfg.initial,
                                           target, n_values, opts);

    auto out = open_out(cfg.out_path);
    CsvWriter csv(out, make_provenance(args, cfg));
    csv.header({"N", "epsilon", "t_epsilon", "censored"});
    for (const SweepRow& row : result.rows)
        csv.row({static_cast<double>(row.N), row.epsilon, row.t_epsilon,
                 row.censored ? 1.0 : 0.0});
    for (const auto& [eps, slope] : result.slopes) {
        csv.comment("slope eps=" + CsvWriter::format(eps) + " slope=" +
                    CsvWriter::format(slope));
        std::cout << "eps=" << eps << " slope=" << slope << "\n";
    }
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"becnet: stochastic bosonic network simulator"};
    app.require_subcommand(1);

    CommonArgs common;
    auto add_common = [&common](CLI::App* cmd, bool with_verify = true) {
        cmd->add_option("--config", common.config_path, "experiment config (JSON)")
            ->required();
        cmd->add_option("--seed", common.seed_override, "override the config seed");
        cmd->add_option("--out", common.out_override, "override the output path");
        if (with_verify)
            cmd->add_flag("--verify-oracle", common.verify_oracle,
                          "cross-check against the exact master equation");
    };

    auto* cmd_oracle = app.add_subcommand("oracle", "exact master-equation evolution");
    add_common(cmd_oracle, false);
    auto* cmd_kmc = app.add_subcommand("simulate-kmc", "kinetic Monte Carlo trajectories");
    add_common(cmd_kmc);
    auto* cmd_ode = app.add_subcommand("simulate-ode", "mean-field ODE integration");
    add_common(cmd_ode, false);
    auto* cmd_sde = app.add_subcommand("simulate-sde", "stochastic differential equation");
    add_common(cmd_sde);
    auto* cmd_met = app.add_subcommand("sample-metropolis", "equilibrium Metropolis chain");
    add_common(cmd_met, false);
    auto* cmd_anneal = app.add_subcommand("anneal", "simulated annealing");
    add_common(cmd_anneal, false);

    std::string patterns_dir, out_spec, equilibrator = "analytic";
    double learn_c = 1e-6, lambda0 = 1.0, learn_beta = 1.0, learn_alpha = 1.0;
    int epochs = 1, boson_number = 10000;
    std::uint64_t learn_seed = 0;
    bool learn_beta_inf = false;
    auto* cmd_learn = app.add_subcommand("learn", "Hebbian-train couplings from patterns");
    cmd_learn->add_option("--patterns", patterns_dir, "directory of pattern grid files")
        ->required();
    cmd_learn->add_option("--out", out_spec, "output network spec path")->required();
    cmd_learn->add_option("--c", learn_c, "learning constant");
    cmd_learn->add_option("--lambda0", lambda0, "field magnitude per pattern");
    cmd_learn->add_option("--beta", learn_beta, "training inverse temperature");
    cmd_learn->add_flag("--beta-inf", learn_beta_inf, "train at zero temperature");
    cmd_learn->add_option("--alpha", learn_alpha, "rate constant");
    cmd_learn->add_option("--epochs", epochs, "passes over the training set");
    cmd_learn->add_option("--equilibrator", equilibrator, "analytic|metropolis|ode");
    cmd_learn->add_option("--N", boson_number, "bosons per site");
    cmd_learn->add_option("--seed", learn_seed, "stochastic equilibrator seed");

    std::string cp_spec, cp_targets;
    double cp_epsilon = 0.05;
    auto* cmd_complete = app.add_subcommand("complete-pattern", "recall from a fragment");
    add_common(cmd_complete, false);
    cmd_complete->add_option("--spec", cp_spec, "trained network spec")->required();
    cmd_complete->add_option("--targets", cp_targets, "directory of target patterns")
        ->required();
    cmd_complete->add_option("--epsilon", cp_epsilon, "convergence threshold on D");

    std::string sw_spec, sw_target;
    std::vector<int> sw_n;
    std::vector<double> sw_eps;
    auto* cmd_sweep = app.add_subcommand("sweep-n", "completion-time scaling in N");
    add_common(cmd_sweep, false);
    cmd_sweep->add_option("--spec", sw_spec, "trained network spec")->required();
    cmd_sweep->add_option("--target", sw_target, "target pattern file")->required();
    cmd_sweep->add_option("--N", sw_n, "boson numbers to sweep")->required();
    cmd_sweep->add_option("--eps", sw_eps, "epsilon thresholds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_oracle->parsed()) return run_oracle(common);
        if (cmd_kmc->parsed()) return run_simulate_kmc(common);
        if (cmd_ode->parsed()) return run_simulate_ode(common);
        if (cmd_sde->parsed()) return run_simulate_sde(common);
        if (cmd_met->parsed()) return run_metropolis_like(common, false);
        if (cmd_anneal->parsed()) return run_metropolis_like(common, true);
        if (cmd_learn->parsed())
            return run_learn(patterns_dir, learn_c, lambda0,
                             learn_beta_inf ? kInfiniteBeta : learn_beta, learn_alpha,
                             epochs, equilibrator, out_spec, boson_number, learn_seed);
        if (cmd_complete->parsed())
            return run_complete_pattern(common, cp_spec, cp_targets, cp_epsilon);
        if (cmd_sweep->parsed()) return run_sweep_n(common, sw_spec, sw_target, sw_n, sw_eps);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << "\n";
        return kConfigError;
    } catch (const NumericalError& err) {
        std::cerr << "numerical error: " << err.what() << "\n";
        return kNumericalError;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
