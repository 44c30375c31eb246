#pragma once

#include <random>
#include <vector>

#include "symbxrl/core.hpp"

namespace symbxrl::testing {

inline Step make_a2_step(long long t, std::vector<int> mask, double reward = 1.0,
                         double mse = 0.1, double dtu = 2.0) {
    Step step;
    step.t = t;
    step.state["MSE"] = {std::vector<double>(7, mse)};
    step.state["DTU"] = {std::vector<double>(7, dtu)};
    step.state["G"] = {{0, 0, 0, 1, 1, 2, 2}};
    step.action = A2Action{std::move(mask)};
    step.reward = reward;
    return step;
}

inline Step make_a1_step(long long t, std::array<int, 3> prb = {10, 20, 30},
                         std::array<std::string, 3> policy = {"WF", "RR", "PF"},
                         double level = 5.0) {
    Step step;
    step.t = t;
    for (const char* kpi : {"tx_brate", "tx_pkts", "dl_buffer"}) {
        std::vector<std::vector<double>> rows(3, std::vector<double>(10, level));
        step.state[kpi] = rows;
    }
    step.action = A1Action{prb, policy};
    step.reward = 0.5;
    return step;
}

inline std::vector<int> random_mask(std::mt19937_64& rng) {
    std::vector<int> mask(7);
    std::uniform_int_distribution<int> bit(0, 1);
    for (auto& b : mask) b = bit(rng);
    return mask;
}

}  // namespace symbxrl::testing
