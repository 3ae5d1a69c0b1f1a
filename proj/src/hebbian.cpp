#include "becnet/hebbian.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "becnet/errors.hpp"
#include "becnet/meanfield.hpp"
#include "becnet/metropolis.hpp"
#include "becnet/rng.hpp"

namespace becnet {

TrainingSet TrainingSet::from_patterns(const std::vector<Pattern>& patterns, double lambda0,
                                       double c) {
    TrainingSet set;
    set.c = c;
    for (const Pattern& p : patterns) {
        std::vector<double> field(p.p.size());
        for (std::size_t i = 0; i < p.p.size(); ++i) field[i] = lambda0 * p.p[i];
        set.field_patterns.push_back(std::move(field));
    }
    return set;
}

namespace {

SpinState equilibrate_analytic(const NetworkSpec& spec, const ThermoParams& thermo,
                               const EquilibratorConfig& eq) {
    SpinState s(spec.M, 0.0);
    SpinState next(spec.M);
    const bool decoupled =
        std::all_of(spec.J.begin(), spec.J.end(), [](double j) { return j == 0.0; });
    if (decoupled) {
        // the field is state-independent: the equilibrium is exact
        for (int i = 0; i < spec.M; ++i) {
            const double h = spec.lambda[i];
            s[i] = std::isinf(thermo.beta) ? (h > 0.0 ? -1.0 : (h < 0.0 ? 1.0 : 0.0))
                                           : activation_phi(thermo.beta * h, spec.N);
        }
        return s;
    }
    for (int it = 0; it < eq.max_iterations; ++it) {
        double worst = 0.0;
        for (int i = 0; i < spec.M; ++i) {
            const double h = local_field(spec, s, i);
            const double target = std::isinf(thermo.beta)
                                      ? (h > 0.0 ? -1.0 : (h < 0.0 ? 1.0 : 0.0))
                                      : activation_phi(thermo.beta * h, spec.N);
            next[i] = (1.0 - eq.damping) * s[i] + eq.damping * target;
            worst = std::max(worst, std::fabs(next[i] - s[i]));
        }
        s.swap(next);
        if (worst < eq.tolerance) return s;
    }
    throw NumericalError("equilibrate: analytic fixed-point iteration did not converge");
}

SpinState equilibrate_metropolis(const NetworkSpec& spec, const ThermoParams& thermo,
                                 const EquilibratorConfig& eq) {
    Rng rng(eq.seed);
    OccupationState k(spec.M, spec.N / 2);
    k = metropolis_run(std::move(k), spec, thermo, eq.burnin_sweeps, rng);
    SpinState mean(spec.M, 0.0);
    long samples = 0;
    for (int sweep = 0; sweep < eq.measure_sweeps; ++sweep) {
        for (int p = 0; p < spec.M; ++p) metropolis_step(k, spec, thermo, rng);
        ++samples;
        for (int i = 0; i < spec.M; ++i) mean[i] += spin_of(k[i], spec.N);
    }
    for (double& m : mean) m /= samples;
    return mean;
}

SpinState equilibrate_ode(const NetworkSpec& spec, const ThermoParams& thermo,
                          const EquilibratorConfig& eq) {
    const SpinState s0(spec.M, 0.0);
    const Trajectory traj =
        integrate_ode(spec, BetaSchedule::constant(thermo.beta), thermo.alpha, s0,
                      eq.ode_t_max, eq.ode_dt, eq.ode_t_max);
    return traj.samples.back();
}

} // namespace

SpinState equilibrate(const NetworkSpec& spec, const ThermoParams& thermo,
                      const EquilibratorConfig& eq) {
    switch (eq.kind) {
        case EquilibratorKind::analytic: return equilibrate_analytic(spec, thermo, eq);
        case EquilibratorKind::metropolis: return equilibrate_metropolis(spec, thermo, eq);
        case EquilibratorKind::ode: return equilibrate_ode(spec, thermo, eq);
    }
    throw ConfigError("equilibrate: unknown equilibrator");
}

TrainResult hebbian_train(const NetworkSpec& spec0, const ThermoParams& thermo,
                          const TrainingSet& set, const EquilibratorConfig& eq, int epochs) {
    spec0.validate();
    if (set.c < 0.0) throw ConfigError("hebbian_train: learning constant must be >= 0");
    for (double j : spec0.J)
        if (j != 0.0) throw ConfigError("hebbian_train: couplings must start at zero");
    for (const auto& field : set.field_patterns)
        if (field.size() != static_cast<std::size_t>(spec0.M))
            throw ConfigError("hebbian_train: field pattern length != M");

    TrainResult result;
    result.spec = spec0;
    NetworkSpec& spec = result.spec;

    for (int epoch = 0; epoch < epochs; ++epoch) {
        for (const auto& field : set.field_patterns) {
            spec.lambda = field;
            NetworkSpec probe = spec;
            if (eq.measure_at_zero_coupling)
                probe.J.assign(probe.J.size(), 0.0);
            const SpinState s = equilibrate(probe, thermo, eq);

            // raw update is asymmetric for generic responses; symmetrize and
            // keep the diagonal at zero so the dynamics invariants hold
            for (int i = 0; i < spec.M; ++i)
                for (int j = 0; j < spec.M; ++j)
                    spec.coupling(i, j) -= set.c * s[i] * field[j];
            double asym = 0.0;
            for (int i = 0; i < spec.M; ++i) {
                spec.coupling(i, i) = 0.0;
                for (int j = i + 1; j < spec.M; ++j) {
                    asym = std::max(asym,
                                    std::fabs(spec.coupling(i, j) - spec.coupling(j, i)));
                    const double sym = 0.5 * (spec.coupling(i, j) + spec.coupling(j, i));
                    spec.coupling(i, j) = sym;
                    spec.coupling(j, i) = sym;
                }
            }
            result.max_asymmetry = std::max(result.max_asymmetry, asym);
            ++result.exposures;
        }
    }
    spec.lambda.assign(spec.M, 0.0);
    return result;
}

double hamming_distance(const SpinState& s, const std::vector<double>& target) {
    if (s.size() != target.size())
        throw std::invalid_argument("hamming_distance: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) sum += std::fabs(s[i] - target[i]);
    return sum / (2.0 * s.size());
}

double hamming_distance(const SpinState& s, const Pattern& target) {
    return hamming_distance(s, target.p);
}

Pattern load_pattern_grid(const std::string& text) {
    Pattern pat;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (pat.cols == 0) {
            pat.cols = static_cast<int>(line.size());
        } else if (static_cast<int>(line.size()) != pat.cols) {
            std::ostringstream msg;
            msg << "pattern grid: ragged row " << pat.rows << " (width "
                << line.size() << ", expected " << pat.cols << ")";
            throw ConfigError(msg.str());
        }
        for (char ch : line) {
            if (ch == '#') {
                pat.p.push_back(1.0);
            } else if (ch == '.') {
                pat.p.push_back(-1.0);
            } else {
                throw ConfigError(std::string("pattern grid: invalid character '") + ch +
                                  "' (use '#' and '.')");
            }
        }
        ++pat.rows;
    }
    if (pat.rows == 0) throw ConfigError("pattern grid: empty");
    return pat;
}

Pattern load_pattern_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("pattern file not readable: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_pattern_grid(buffer.str());
}

std::string render_pattern_grid(const std::vector<double>& s, int rows, int cols) {
    if (static_cast<std::size_t>(rows) * cols != s.size())
        throw std::invalid_argument("render_pattern_grid: shape mismatch");
    std::string out;
    out.reserve(static_cast<std::size_t>(rows) * (cols + 1));
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) out += s[static_cast<std::size_t>(r) * cols + c] >= 0.0 ? '#' : '.';
        out += '\n';
    }
    return out;
}

std::string render_pattern_grid(const Pattern& p) {
    return render_pattern_grid(p.p, p.rows, p.cols);
}

} // namespace becnet
