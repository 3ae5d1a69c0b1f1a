#include "becnet/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "becnet/errors.hpp"
#include "becnet/master_equation.hpp"

namespace becnet {

SpinState make_initial_spins(const NetworkSpec& spec, const InitialConditionSpec& init,
                             std::uint64_t seed) {
    Rng rng(seed);
    switch (init.mode) {
        case InitialMode::uniform_random: {
            OccupationState k = random_occupation(spec, rng);
            return spin_state(k, spec.N);
        }
        case InitialMode::half_filled: {
            OccupationState k(spec.M, spec.N / 2);
            return spin_state(k, spec.N);
        }
        case InitialMode::random_spins: {
            SpinState s(spec.M);
            for (int i = 0; i < spec.M; ++i) s[i] = rng.below(2) == 0 ? -1.0 : 1.0;
            return s;
        }
        case InitialMode::pattern_fragment: {
            const Pattern pat = load_pattern_file(init.pattern_file);
            if (pat.size() != spec.M)
                throw ConfigError("pattern fragment: pattern length != M");
            const int keep = static_cast<int>(std::lround(init.fraction * spec.M));
            SpinState s(spec.M, 0.0);
            for (int i = 0; i < keep && i < spec.M; ++i) s[i] = pat.p[i];
            return s;
        }
    }
    throw ConfigError("make_initial_spins: unknown mode");
}

namespace {

Trajectory run_completion_trajectory(const NetworkSpec& spec, const BetaSchedule& beta,
                                     double alpha, const SpinState& s0,
                                     const CompletionOptions& opts, double t_max, double dt,
                                     double sample_dt) {
    switch (opts.engine) {
        case EngineKind::ode:
            return integrate_ode(spec, beta, alpha, s0, t_max, dt, sample_dt);
        case EngineKind::sde: {
            SdeParams params;
            params.dt = dt;
            params.seed = opts.seed;
            return integrate_sde(spec, beta, alpha, s0, t_max, sample_dt, params).trajectory;
        }
        case EngineKind::kmc: {
            const OccupationState k0 = occupation_state(s0, spec.N);
            return run_trajectory(spec, beta, alpha, k0, t_max, sample_dt, opts.seed);
        }
        default:
            throw ConfigError("pattern completion: engine must be ode, sde, or kmc");
    }
}

} // namespace

CompletionResult run_pattern_completion(const NetworkSpec& trained, const BetaSchedule& beta,
                                        double alpha, const SpinState& s0,
                                        const std::vector<Pattern>& targets,
                                        const CompletionOptions& opts) {
    if (targets.empty()) throw ConfigError("pattern completion: no target patterns");
    for (const Pattern& p : targets)
        if (p.size() != trained.M)
            throw ConfigError("pattern completion: target length != M");

    const double t_max = opts.t_max > 0.0 ? opts.t_max : 80.0 / (alpha * trained.N);
    const double dt = opts.dt > 0.0 ? opts.dt : 0.02 / (alpha * trained.N);
    const double sample_dt = opts.sample_dt > 0.0 ? opts.sample_dt : t_max / 200.0;

    const Trajectory traj =
        run_completion_trajectory(trained, beta, alpha, s0, opts, t_max, dt, sample_dt);

    CompletionResult result;
    result.times = traj.times;
    result.distances.reserve(traj.samples.size());
    for (const SpinState& s : traj.samples) {
        std::vector<double> d(targets.size());
        for (std::size_t n = 0; n < targets.size(); ++n)
            d[n] = hamming_distance(s, targets[n]);
        result.distances.push_back(std::move(d));
    }
    result.final_state = traj.samples.back();
    result.samples = traj.samples;

    const std::vector<double>& final_d = result.distances.back();
    for (std::size_t n = 0; n < targets.size(); ++n) {
        if (final_d[n] < opts.epsilon_conv) {
            result.converged = true;
            result.target_index = static_cast<int>(n);
            result.target_sign = 1;
            break;
        }
        if (final_d[n] > 1.0 - opts.epsilon_conv) {
            result.converged = true;
            result.target_index = static_cast<int>(n);
            result.target_sign = -1;
            break;
        }
    }
    return result;
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_loglog_slope: need >= 2 points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lx = std::log10(x[i]);
        const double ly = std::log10(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

SweepResult run_n_sweep(const NetworkSpec& trained, const BetaSchedule& beta, double alpha,
                        const InitialConditionSpec& init, const Pattern& target,
                        const std::vector<int>& n_values, const SweepOptions& opts) {
    if (n_values.size() < 2) throw ConfigError("sweep: need at least two N values");
    std::vector<int> ns = n_values;
    std::sort(ns.begin(), ns.end());
    if (std::adjacent_find(ns.begin(), ns.end()) != ns.end())
        throw ConfigError("sweep: N values must be distinct");

    // one run per N; every epsilon is read off the same trajectory
    struct RunOut {
        std::vector<double> t_eps; // per epsilon; <0 means censored
    };
    std::vector<RunOut> outs(ns.size());

    auto run_one = [&](std::size_t idx) {
        NetworkSpec spec = trained;
        spec.N = ns[idx];
        const double t_max = opts.t_max_scale / (alpha * spec.N);
        const double dt = opts.dt_scale / (alpha * spec.N);
        const double sample_dt = dt; // every step is a candidate crossing
        CompletionOptions copts;
        copts.engine = opts.engine;
        copts.seed = derive_seed(opts.seed, idx);
        copts.t_max = t_max;
        copts.dt = dt;
        copts.sample_dt = sample_dt;
        const SpinState s0 = make_initial_spins(spec, init, copts.seed);
        const CompletionResult run =
            run_pattern_completion(spec, beta, alpha, s0, {target}, copts);
        RunOut out;
        out.t_eps.assign(opts.epsilons.size(), -1.0);
        for (std::size_t e = 0; e < opts.epsilons.size(); ++e) {
            for (std::size_t c = 0; c < run.times.size(); ++c) {
                if (run.distances[c][0] < opts.epsilons[e] && run.times[c] > 0.0) {
                    out.t_eps[e] = run.times[c];
                    break;
                }
            }
        }
        outs[idx] = std::move(out);
    };

    const int workers =
        std::min<int>(resolve_worker_count(opts.n_workers), static_cast<int>(ns.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < ns.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < ns.size();
                     i = next.fetch_add(1))
                    run_one(i);
            });
        for (auto& th : pool) th.join();
    }

    SweepResult result;
    for (std::size_t e = 0; e < opts.epsilons.size(); ++e) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            SweepRow row;
            row.N = ns[i];
            row.epsilon = opts.epsilons[e];
            row.censored = outs[i].t_eps[e] < 0.0;
            row.t_epsilon = row.censored ? 0.0 : outs[i].t_eps[e];
            row.engine = engine_name(opts.engine);
            row.seed = derive_seed(opts.seed, i);
            result.rows.push_back(std::move(row));
        }
        // fit over the largest N values (default top half, at least a pair),
        // censored rows excluded
        std::vector<double> xs, ys;
        const std::size_t fit_count =
            opts.fit_count > 0 ? static_cast<std::size_t>(opts.fit_count)
                               : std::max<std::size_t>(2, (ns.size() + 1) / 2);
        for (std::size_t i = ns.size() >= fit_count ? ns.size() - fit_count : 0;
             i < ns.size(); ++i) {
            if (outs[i].t_eps[e] > 0.0) {
                xs.push_back(static_cast<double>(ns[i]));
                ys.push_back(outs[i].t_eps[e]);
            }
        }
        if (xs.size() >= 2)
            result.slopes.emplace_back(opts.epsilons[e], fit_loglog_slope(xs, ys));
    }
    return result;
}

OracleCheck verify_against_oracle(const NetworkSpec& spec, const ExperimentConfig& cfg,
                                  const EnsembleStats& stats) {
    OracleCheck check;
    if (!oracle_feasible(spec, 10000)) {
        check.passed = false;
        check.detail = "instance too large for the oracle cross-check ((N+1)^M > 1e4)";
        return check;
    }
    if (!cfg.beta.is_constant()) {
        check.passed = false;
        check.detail = "oracle cross-check requires a constant beta";
        return check;
    }
    const ThermoParams thermo{cfg.beta.constant_value(), cfg.alpha};
    StateSpace space(spec.M, spec.N);

    ProbabilityVector p0;
    switch (cfg.initial.mode) {
        case InitialMode::uniform_random:
            p0 = uniform_distribution(space);
            break;
        case InitialMode::half_filled:
            p0 = delta_distribution(space, OccupationState(spec.M, spec.N / 2));
            break;
        default: {
            check.passed = false;
            check.detail = "oracle cross-check supports uniform-random or half-filled starts";
            return check;
        }
    }

    // mean-field engines carry an O(1/sqrt(N)) closure allowance on top of
    // the 3-standard-error band used for the exact engines
    const double closure = (cfg.engine == EngineKind::ode || cfg.engine == EngineKind::sde)
                               ? 0.75 / std::sqrt(static_cast<double>(spec.N))
                               : 0.0;

    ProbabilityVector p = std::move(p0);
    double t_prev = 0.0;
    for (std::size_t c = 0; c < stats.times.size(); ++c) {
        p = evolve(spec, thermo, std::move(p), stats.times[c] - t_prev);
        t_prev = stats.times[c];
        for (int i = 0; i < spec.M; ++i) {
            const double exact = mean_spin(space, p, i);
            const double se = stats.n_traj > 1
                                  ? std::sqrt(stats.var[c][i] /
                                              static_cast<double>(stats.n_traj))
                                  : 0.0;
            const double tol = 3.0 * se + closure + 1e-9;
            const double dev = std::fabs(stats.mean[c][i] - exact);
            check.worst_deviation = std::max(check.worst_deviation, dev / tol);
            if (dev > tol) {
                check.passed = false;
                std::ostringstream msg;
                msg << "site " << i << " at t=" << stats.times[c] << ": |" << stats.mean[c][i]
                    << " - " << exact << "| > " << tol;
                check.detail = msg.str();
                return check;
            }
        }
    }
    return check;
}

} // namespace becnet
