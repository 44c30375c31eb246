#include "symbxrl/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace symbxrl {

P2Estimator::P2Estimator(double p) : p_(p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile probability must be in (0,1)");
    increments_ = {0.0, p / 2.0, p, (1.0 + p) / 2.0, 1.0};
}

void P2Estimator::observe(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite observation");

    if (count_ < 5) {
        buffer_[static_cast<size_t>(count_++)] = x;
        if (count_ == 5) {
            std::array<double, 5> sorted = buffer_;
            std::sort(sorted.begin(), sorted.end());
            heights_ = sorted;
            for (int i = 0; i < 5; ++i) positions_[i] = i + 1;
            desired_ = {1.0, 1.0 + 2.0 * p_, 1.0 + 4.0 * p_, 3.0 + 2.0 * p_, 5.0};
        }
        return;
    }

    int cell;
    if (x < heights_[0]) {
        heights_[0] = x;
        cell = 0;
    } else if (x < heights_[1]) {
        cell = 0;
    } else if (x < heights_[2]) {
        cell = 1;
    } else if (x < heights_[3]) {
        cell = 2;
    } else if (x <= heights_[4]) {
        cell = 3;
    } else {
        heights_[4] = x;
        cell = 3;
    }

    for (int i = cell + 1; i < 5; ++i) positions_[i] += 1;
    for (int i = 0; i < 5; ++i) desired_[i] += increments_[i];

    for (int i = 1; i < 4; ++i) {
        double dev = desired_[i] - static_cast<double>(positions_[i]);
        if ((dev >= 1.0 && positions_[i + 1] - positions_[i] > 1) ||
            (dev <= -1.0 && positions_[i - 1] - positions_[i] < -1)) {
            int d = dev > 0.0 ? 1 : -1;
            double candidate = parabolic(i, d);
            if (heights_[i - 1] < candidate && candidate < heights_[i + 1])
                heights_[i] = candidate;
            else
                heights_[i] = linear(i, d);
            positions_[i] += d;
        }
    }
    ++count_;
}

double P2Estimator::parabolic(int i, int d) const {
    auto n = [&](int k) { return static_cast<double>(positions_[k]); };
    return heights_[i] +
           d / (n(i + 1) - n(i - 1)) *
               ((n(i) - n(i - 1) + d) * (heights_[i + 1] - heights_[i]) / (n(i + 1) - n(i)) +
                (n(i + 1) - n(i) - d) * (heights_[i] - heights_[i - 1]) / (n(i) - n(i - 1)));
}

double P2Estimator::linear(int i, int d) const {
    return heights_[i] + d * (heights_[i + d] - heights_[i]) /
                             static_cast<double>(positions_[i + d] - positions_[i]);
}

double P2Estimator::estimate() const {
    if (count_ == 0) throw std::logic_error("estimate on empty estimator");
    if (count_ <= 5) {
        std::vector<double> sorted(buffer_.begin(), buffer_.begin() + count_);
        std::sort(sorted.begin(), sorted.end());
        // nearest-rank: x[ceil(p*n)], 1-indexed
        auto rank = static_cast<size_t>(std::ceil(p_ * static_cast<double>(count_)));
        rank = std::clamp<size_t>(rank, 1, sorted.size());
        return sorted[rank - 1];
    }
    return heights_[2];
}

nlohmann::json P2Estimator::to_json() const {
    return {{"p", p_},
            {"count", count_},
            {"buffer", buffer_},
            {"heights", heights_},
            {"positions", positions_},
            {"desired", desired_}};
}

P2Estimator P2Estimator::from_json(const nlohmann::json& j) {
    P2Estimator e(j.at("p").get<double>());
    e.count_ = j.at("count").get<std::int64_t>();
    j.at("buffer").get_to(e.buffer_);
    j.at("heights").get_to(e.heights_);
    j.at("positions").get_to(e.positions_);
    j.at("desired").get_to(e.desired_);
    return e;
}

// ---------------------------------------------------------------------------

QuartileTracker::QuartileTracker(bool max_enabled) : max_enabled_(max_enabled) {
    estimators_.emplace_back(0.25);
    estimators_.emplace_back(0.5);
    estimators_.emplace_back(0.75);
}

void QuartileTracker::observe(double x) {
    if (!std::isfinite(x)) throw std::invalid_argument("non-finite observation");
    if (count_ == 0) {
        min_ = max_ = x;
    } else {
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }
    for (auto& e : estimators_) e.observe(x);
    ++count_;
}

void QuartileTracker::reset() { *this = QuartileTracker(max_enabled_); }

double QuartileTracker::estimate(double p) const {
    for (const auto& e : estimators_)
        if (e.probability() == p) return e.estimate();
    throw std::invalid_argument("tracker only maintains p in {0.25, 0.5, 0.75}");
}

Quartile QuartileTracker::label(double x) const {
    if (count_ == 0) throw std::logic_error("label on empty tracker");
    if (max_enabled_ && x >= max_) return Quartile::MAX;
    if (x <= estimate(0.25)) return Quartile::Q1;
    if (x <= estimate(0.5)) return Quartile::Q2;
    if (x <= estimate(0.75)) return Quartile::Q3;
    return Quartile::Q4;
}

nlohmann::json QuartileTracker::to_json() const {
    nlohmann::json est = nlohmann::json::array();
    for (const auto& e : estimators_) est.push_back(e.to_json());
    return {{"estimators", est},
            {"max_enabled", max_enabled_},
            {"min", min_},
            {"max", max_},
            {"count", count_}};
}

QuartileTracker QuartileTracker::from_json(const nlohmann::json& j) {
    QuartileTracker t(j.at("max_enabled").get<bool>());
    t.estimators_.clear();
    for (const auto& e : j.at("estimators")) t.estimators_.push_back(P2Estimator::from_json(e));
    t.min_ = j.at("min").get<double>();
    t.max_ = j.at("max").get<double>();
    t.count_ = j.at("count").get<std::int64_t>();
    return t;
}

}  // namespace symbxrl
