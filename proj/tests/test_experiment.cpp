#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "becnet/experiment.hpp"
#include "becnet/master_equation.hpp"

using namespace becnet;
namespace fs = std::filesystem;

namespace {

Pattern make_pattern(std::vector<double> values, int rows, int cols) {
    Pattern p;
    p.p = std::move(values);
    p.rows = rows;
    p.cols = cols;
    return p;
}

// small trained network storing the two patterns directly (outer-product
// couplings with the sign the dynamics store)
NetworkSpec stored_network(const std::vector<Pattern>& patterns, int N, double weight) {
    const int M = patterns.front().size();
    NetworkSpec spec = NetworkSpec::zeros(M, N);
    for (const Pattern& pat : patterns)
        for (int i = 0; i < M; ++i)
            for (int j = 0; j < M; ++j)
                if (i != j) spec.coupling(i, j) += weight * pat.p[i] * pat.p[j];
    return spec;
}

} // namespace

TEST_CASE("make_initial_spins: modes") {
    const NetworkSpec spec = NetworkSpec::zeros(6, 10);
    InitialConditionSpec init;

    init.mode = InitialMode::half_filled;
    for (double s : make_initial_spins(spec, init, 1)) CHECK(s == 0.0);

    init.mode = InitialMode::random_spins;
    for (double s : make_initial_spins(spec, init, 2)) CHECK(std::fabs(s) == 1.0);

    init.mode = InitialMode::uniform_random;
    const SpinState a = make_initial_spins(spec, init, 3);
    const SpinState b = make_initial_spins(spec, init, 3);
    CHECK(a == b); // seed-deterministic
    for (double s : a) CHECK((s >= -1.0 && s <= 1.0));
}

TEST_CASE("make_initial_spins: pattern fragment keeps the leading fraction") {
    const fs::path file = fs::temp_directory_path() / "becnet_frag.txt";
    {
        std::ofstream out(file);
        out << "##..\n##..\n";
    }
    const NetworkSpec spec = NetworkSpec::zeros(8, 4);
    InitialConditionSpec init;
    init.mode = InitialMode::pattern_fragment;
    init.pattern_file = file.string();
    init.fraction = 0.5;
    const SpinState s = make_initial_spins(spec, init, 0);
    CHECK(s[0] == 1.0);
    CHECK(s[1] == 1.0);
    CHECK(s[2] == -1.0);
    CHECK(s[3] == -1.0);
    for (int i = 4; i < 8; ++i) CHECK(s[i] == 0.0);
    fs::remove(file);
}

TEST_CASE("pattern completion: a learned pattern is a fixed point (D < 0.01)") {
    const Pattern a = make_pattern({1, 1, 1, 1, -1, -1, -1, -1}, 2, 4);
    const Pattern b = make_pattern({1, -1, 1, -1, 1, -1, 1, -1}, 2, 4);
    const NetworkSpec spec = stored_network({a, b}, 1000, 1e-3);
    CompletionOptions opts;
    const CompletionResult result = run_pattern_completion(
        spec, BetaSchedule::constant(kInfiniteBeta), 1.0, a.p, {a, b}, opts);
    for (const auto& d : result.distances) CHECK(d[0] < 0.01);
    CHECK(result.converged);
    CHECK(result.target_index == 0);
    CHECK(result.target_sign == 1);
}

TEST_CASE("pattern completion: fragment start converges to its own pattern") {
    const Pattern a = make_pattern({1, 1, 1, 1, -1, -1, -1, -1}, 2, 4);
    const Pattern b = make_pattern({1, -1, 1, -1, 1, -1, 1, -1}, 2, 4);
    const NetworkSpec spec = stored_network({a, b}, 1000, 1e-3);
    SpinState frag = a.p;
    for (int i = 4; i < 8; ++i) frag[i] = 0.0; // keep the top half
    const CompletionResult result = run_pattern_completion(
        spec, BetaSchedule::constant(kInfiniteBeta), 1.0, frag, {a, b}, {});
    CHECK(result.converged);
    CHECK(result.target_index == 0);
    CHECK(result.distances.back()[0] < 0.05);
    CHECK(result.distances.back()[1] > 0.2);
}

TEST_CASE("fit_loglog_slope: recovers an exact power law") {
    std::vector<double> x{10, 100, 1000, 10000};
    std::vector<double> y;
    for (double xi : x) y.push_back(3.7 / xi);
    CHECK(fit_loglog_slope(x, y) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("analytic single-site proxy: completion-time slope is -1 at large N") {
    // closed-form first-passage to |s - s_inf| = eps, which is the M = 1
    // stand-in for the pattern-completion time
    auto t_eps = [](double N) {
        const double g = 1.0;
        const double A = std::sqrt(1.0 + 2.0 / N + 1.0 / (N * N));
        const double b = 1.0 / N;
        const double s_target = (A - b) - 0.05;
        const double K0 = std::atanh(b / A);
        return (std::atanh((s_target + b) / A) - K0) / (g * A * N);
    };
    std::vector<double> ns{1e6, 1e7, 1e8};
    std::vector<double> ts;
    for (double n : ns) ts.push_back(t_eps(n));
    CHECK(fit_loglog_slope(ns, ts) == doctest::Approx(-1.0).epsilon(0.01));
}

TEST_CASE("run_n_sweep: monotone thresholds and 1/N scaling on a stored pattern") {
    const Pattern a = make_pattern({1, 1, -1, 1, -1, -1, 1, -1}, 2, 4);
    const NetworkSpec spec = stored_network({a}, 100, 1e-3);

    const fs::path file = fs::temp_directory_path() / "becnet_sweep_target.txt";
    {
        std::ofstream out(file);
        out << render_pattern_grid(a);
    }
    InitialConditionSpec init;
    init.mode = InitialMode::pattern_fragment;
    init.pattern_file = file.string();
    init.fraction = 0.5;

    SweepOptions opts;
    opts.epsilons = {0.3, 0.1, 0.05};
    const std::vector<int> ns{100, 1000, 10000, 100000};
    const SweepResult result = run_n_sweep(spec, BetaSchedule::constant(kInfiniteBeta), 1.0,
                                           init, a, ns, opts);
    fs::remove(file);

    REQUIRE(result.rows.size() == 12);
    // larger epsilon is reached earlier at fixed N
    for (int n : ns) {
        double t_loose = -1.0, t_tight = -1.0;
        for (const SweepRow& row : result.rows) {
            if (row.N != n) continue;
            REQUIRE(!row.censored);
            if (row.epsilon == 0.3) t_loose = row.t_epsilon;
            if (row.epsilon == 0.05) t_tight = row.t_epsilon;
        }
        CHECK(t_loose < t_tight);
    }
    REQUIRE(result.slopes.size() == 3);
    for (const auto& [eps, slope] : result.slopes) CHECK(slope == doctest::Approx(-1.0).epsilon(0.15));
}

TEST_CASE("verify_against_oracle: exact engine passes, biased mean fails") {
    NetworkSpec spec = NetworkSpec::zeros(1, 3);
    spec.lambda[0] = 0.4;
    ExperimentConfig cfg;
    cfg.inline_spec = spec;
    cfg.engine = EngineKind::kmc;
    cfg.alpha = 1.0;
    cfg.beta = BetaSchedule::constant(0.8);
    cfg.initial.mode = InitialMode::half_filled;
    cfg.n_traj = 2000;

    const EnsembleStats stats = run_ensemble(
        spec, cfg.beta, cfg.alpha, cfg.n_traj, 1.0, 0.25, 31415,
        [](const NetworkSpec& s, Rng&) { return OccupationState(s.M, s.N / 2); });
    const OracleCheck ok = verify_against_oracle(spec, cfg, stats);
    CHECK(ok.passed);

    EnsembleStats biased = stats;
    for (auto& row : biased.mean)
        for (double& m : row) m += 0.2;
    const OracleCheck bad = verify_against_oracle(spec, cfg, biased);
    CHECK(!bad.passed);
}
