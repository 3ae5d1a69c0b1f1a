#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "becnet/errors.hpp"
#include "becnet/model.hpp"

namespace becnet {

/// Piecewise-linear inverse-temperature schedule beta(t), clamped outside the
/// knot range. Time is trajectory time for the continuous engines and sweep
/// index for Metropolis annealing. A constant schedule may be infinite;
/// interpolation toward infinity is rejected at validation.
class BetaSchedule {
public:
    BetaSchedule() = default;

    static BetaSchedule constant(double beta) {
        BetaSchedule s;
        s.knots_.emplace_back(0.0, beta);
        return s;
    }

    static BetaSchedule ramp(std::vector<std::pair<double, double>> knots) {
        BetaSchedule s;
        s.knots_ = std::move(knots);
        s.validate();
        return s;
    }

    double at(double t) const {
        if (knots_.size() == 1 || t <= knots_.front().first) return knots_.front().second;
        if (t >= knots_.back().first) return knots_.back().second;
        for (std::size_t i = 1; i < knots_.size(); ++i) {
            if (t <= knots_[i].first) {
                const auto& [t0, b0] = knots_[i - 1];
                const auto& [t1, b1] = knots_[i];
                const double f = (t - t0) / (t1 - t0);
                return b0 + f * (b1 - b0);
            }
        }
        return knots_.back().second;
    }

    bool is_constant() const { return knots_.size() == 1; }
    double constant_value() const { return knots_.front().second; }
    const std::vector<std::pair<double, double>>& knots() const { return knots_; }

    void validate() const {
        if (knots_.empty()) throw ConfigError("BetaSchedule: no knots");
        for (std::size_t i = 0; i < knots_.size(); ++i) {
            const double b = knots_[i].second;
            if (std::isnan(b) || b < 0.0)
                throw ConfigError("BetaSchedule: beta must be >= 0");
            if (std::isinf(b) && knots_.size() > 1)
                throw ConfigError("BetaSchedule: infinite beta only allowed as a constant");
            if (i > 0 && !(knots_[i].first > knots_[i - 1].first))
                throw ConfigError("BetaSchedule: knot times must be strictly increasing");
        }
    }

    /// Annealing schedules must cool monotonically.
    void require_non_decreasing() const {
        for (std::size_t i = 1; i < knots_.size(); ++i)
            if (knots_[i].second < knots_[i - 1].second)
                throw ConfigError("BetaSchedule: annealing schedule must be non-decreasing in beta");
    }

private:
    std::vector<std::pair<double, double>> knots_;
};

} // namespace becnet
