#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "symbxrl/core.hpp"

#include <nlohmann/json_fwd.hpp>

namespace symbxrl {

// Single-quantile P^2 estimator: five markers tracking min, the p/2-, p- and
// (1+p)/2-quantiles, and max. Constant memory, one pass.
class P2Estimator {
public:
    explicit P2Estimator(double p);

    void observe(double x);
    // Exact nearest-rank quantile of the buffer while count <= 5, q3 afterwards.
    double estimate() const;

    double probability() const { return p_; }
    std::int64_t count() const { return count_; }
    bool initialized() const { return count_ > 5; }

    // Marker invariants, checked by tests after every observation.
    const std::array<double, 5>& heights() const { return heights_; }
    const std::array<std::int64_t, 5>& positions() const { return positions_; }

    nlohmann::json to_json() const;
    static P2Estimator from_json(const nlohmann::json& j);

private:
    double parabolic(int i, int d) const;
    double linear(int i, int d) const;

    double p_;
    std::int64_t count_ = 0;
    std::array<double, 5> buffer_{};            // first five observations
    std::array<double, 5> heights_{};           // q1..q5
    std::array<std::int64_t, 5> positions_{};   // n1..n5
    std::array<double, 5> desired_{};           // n'1..n'5
    std::array<double, 5> increments_{};
};

// Running quartile state for one monitored scalar stream.
class QuartileTracker {
public:
    explicit QuartileTracker(bool max_enabled = false);

    void observe(double x);
    void reset();

    // Label of x, which must already have been observed.
    Quartile label(double x) const;

    double estimate(double p) const;  // p in {0.25, 0.5, 0.75}
    double running_min() const { return min_; }
    double running_max() const { return max_; }
    std::int64_t count() const { return count_; }
    bool max_enabled() const { return max_enabled_; }

    nlohmann::json to_json() const;
    static QuartileTracker from_json(const nlohmann::json& j);

private:
    std::vector<P2Estimator> estimators_;  // p = 0.25, 0.5, 0.75
    bool max_enabled_;
    double min_ = 0.0;
    double max_ = 0.0;
    std::int64_t count_ = 0;
};

}  // namespace symbxrl
