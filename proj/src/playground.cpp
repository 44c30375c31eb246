#include "symbxrl/playground.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "symbxrl/trace_io.hpp"

namespace symbxrl {

nlohmann::json MimoEnvConfig::to_json() const {
    return {{"group_sizes", schema.group_sizes},
            {"rho_in", rho_in},
            {"rho_out", rho_out},
            {"ar_coeff", ar_coeff},
            {"noise_power", noise_power},
            {"gain_variance", gain_variance},
            {"mse_noise", mse_noise},
            {"fairness_weight", fairness_weight},
            {"horizon", horizon},
            {"seed", seed},
            {"channel", channel},
            {"speed", speed}};
}

MimoEnvConfig MimoEnvConfig::from_json(const nlohmann::json& j) {
    MimoEnvConfig c;
    if (j.contains("group_sizes")) j.at("group_sizes").get_to(c.schema.group_sizes);
    c.rho_in = j.value("rho_in", c.rho_in);
    c.rho_out = j.value("rho_out", c.rho_out);
    c.ar_coeff = j.value("ar_coeff", c.ar_coeff);
    c.noise_power = j.value("noise_power", c.noise_power);
    c.gain_variance = j.value("gain_variance", c.gain_variance);
    c.mse_noise = j.value("mse_noise", c.mse_noise);
    c.fairness_weight = j.value("fairness_weight", c.fairness_weight);
    c.horizon = j.value("horizon", c.horizon);
    c.seed = j.value("seed", c.seed);
    c.channel = j.value("channel", c.channel);
    c.speed = j.value("speed", c.speed);
    return c;
}

MimoEnv::MimoEnv(MimoEnvConfig config) : config_(std::move(config)) {
    int total = 0;
    for (int s : config_.schema.group_sizes) total += s;
    if (total != SchemaA2::kUsers) throw std::invalid_argument("group sizes must sum to N");
    if (config_.rho_in < 0 || config_.rho_in > 1 || config_.rho_out < 0 || config_.rho_out > 1)
        throw std::invalid_argument("correlations must be in [0,1]");
    if (config_.ar_coeff <= 0 || config_.ar_coeff >= 1)
        throw std::invalid_argument("AR(1) coefficient must be in (0,1)");
    reset(config_.seed);
}

void MimoEnv::reset(std::uint64_t seed) {
    rng_.seed(seed);
    t_ = 0;
    int n = SchemaA2::kUsers;
    state_.gain.assign(n, 0.0);
    state_.mse.assign(n, 0.0);
    state_.dtu.assign(n, 0.0);
    latent_re_.assign(n, 0.0);
    latent_im_.assign(n, 0.0);
    double comp_sd = std::sqrt(config_.gain_variance / 2.0);
    for (int u = 0; u < n; ++u) {
        latent_re_[u] = comp_sd * next_gaussian();
        latent_im_[u] = comp_sd * next_gaussian();
        state_.gain[u] = latent_re_[u] * latent_re_[u] + latent_im_[u] * latent_im_[u];
        double a = config_.ar_coeff;
        // Estimation error scales inversely with channel strength: weak users
        // are harder to estimate, so MSE carries channel-quality information.
        double c = 1.0 + 2.0 / (1.0 + state_.gain[u]);
        state_.mse[u] = c * (1.0 - a * a) + config_.mse_noise * std::abs(next_gaussian());
    }
}

double MimoEnv::next_gaussian() {
    std::normal_distribution<double> normal(0.0, 1.0);
    return normal(rng_);
}

double MimoEnv::correlation(int u, int v) const {
    return config_.schema.group_of(u) == config_.schema.group_of(v) ? config_.rho_in
                                                                    : config_.rho_out;
}

double MimoEnv::reward_of(const A2Action& action) const {
    if (action.mask.size() != static_cast<size_t>(SchemaA2::kUsers))
        throw std::invalid_argument("bad mask length");
    int n = SchemaA2::kUsers;
    double sum_rate = 0.0;
    double max_dtu = 0.0;
    for (int u = 0; u < n; ++u) max_dtu = std::max(max_dtu, state_.dtu[u]);
    double fairness = 0.0;
    for (int u = 0; u < n; ++u) {
        if (!action.mask[static_cast<size_t>(u)]) continue;
        double interference = 0.0;
        for (int v = 0; v < n; ++v)
            if (v != u && action.mask[static_cast<size_t>(v)])
                interference += correlation(u, v) * state_.gain[v];
        double sinr = state_.gain[u] / (config_.noise_power + interference);
        sum_rate += std::log2(1.0 + sinr);
        fairness += state_.dtu[u] / std::max(1.0, max_dtu);
    }
    return sum_rate + config_.fairness_weight * fairness;
}

double MimoEnv::step(const A2Action& action) {
    double reward = reward_of(action);
    int n = SchemaA2::kUsers;
    for (int u = 0; u < n; ++u)
        state_.dtu[u] = action.mask[static_cast<size_t>(u)] ? 0.0 : state_.dtu[u] + 1.0;

    double a = config_.ar_coeff;
    double innov_sd = std::sqrt((1.0 - a * a) * config_.gain_variance / 2.0);
    for (int u = 0; u < n; ++u) {
        latent_re_[u] = a * latent_re_[u] + innov_sd * next_gaussian();
        latent_im_[u] = a * latent_im_[u] + innov_sd * next_gaussian();
        state_.gain[u] = latent_re_[u] * latent_re_[u] + latent_im_[u] * latent_im_[u];
        double c = 1.0 + 2.0 / (1.0 + state_.gain[u]);
        state_.mse[u] = c * (1.0 - a * a) + config_.mse_noise * std::abs(next_gaussian());
    }
    ++t_;
    return reward;
}

Step MimoEnv::observe(const A2Action& action, double reward) const {
    Step step;
    step.t = t_;
    step.state["MSE"] = {state_.mse};
    step.state["DTU"] = {state_.dtu};
    std::vector<double> groups;
    for (int u = 0; u < SchemaA2::kUsers; ++u)
        groups.push_back(static_cast<double>(config_.schema.group_of(u)));
    step.state["G"] = {groups};
    step.action = action;
    step.reward = reward;
    step.meta = {{"channel", config_.channel}, {"speed", config_.speed}};
    return step;
}

// ---------------------------------------------------------------------------

TdAgent::TdAgent(AgentConfig config, const SchemaA2& schema)
    : config_(config),
      n_users_(SchemaA2::kUsers),
      n_actions_(1 << SchemaA2::kUsers),
      n_features_(1 + 3 * SchemaA2::kUsers),
      weights_(static_cast<size_t>(n_actions_) * n_features_, 0.0),
      rng_(config.seed) {
    (void)schema;
}

std::vector<double> TdAgent::features(const EnvState& state) const {
    std::vector<double> phi;
    phi.reserve(static_cast<size_t>(n_features_));
    phi.push_back(1.0);
    for (int u = 0; u < n_users_; ++u) phi.push_back(state.gain[u] / (1.0 + state.gain[u]));
    for (int u = 0; u < n_users_; ++u) phi.push_back(state.dtu[u] / (1.0 + state.dtu[u]));
    for (int u = 0; u < n_users_; ++u) phi.push_back(std::min(state.mse[u], 1.0));
    return phi;
}

double TdAgent::value(const std::vector<double>& phi, int action_id) const {
    const double* w = &weights_[static_cast<size_t>(action_id) * n_features_];
    double v = 0.0;
    for (int i = 0; i < n_features_; ++i) v += w[i] * phi[static_cast<size_t>(i)];
    return v;
}

int TdAgent::greedy(const std::vector<double>& phi) const {
    int best = 0;
    double best_v = value(phi, 0);
    for (int a = 1; a < n_actions_; ++a) {
        double v = value(phi, a);
        if (v > best_v) {
            best_v = v;
            best = a;
        }
    }
    return best;
}

namespace {

A2Action mask_of(int action_id) {
    A2Action a;
    a.mask.resize(SchemaA2::kUsers);
    for (int u = 0; u < SchemaA2::kUsers; ++u) a.mask[static_cast<size_t>(u)] = (action_id >> u) & 1;
    return a;
}

int id_of(const A2Action& a) {
    int id = 0;
    for (int u = 0; u < SchemaA2::kUsers; ++u)
        if (a.mask[static_cast<size_t>(u)]) id |= 1 << u;
    return id;
}

}  // namespace

A2Action TdAgent::act(const EnvState& state, double epsilon) {
    if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must be in [0,1]");
    if (epsilon > 0.0) {
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        if (coin(rng_) < epsilon) {
            std::uniform_int_distribution<int> pick(0, n_actions_ - 1);
            return mask_of(pick(rng_));
        }
    }
    return mask_of(greedy(features(state)));
}

void TdAgent::learn(const EnvState& state, const A2Action& action, double reward,
                    const EnvState& next_state) {
    auto phi = features(state);
    auto phi_next = features(next_state);
    int a = id_of(action);
    double target = reward + config_.gamma * value(phi_next, greedy(phi_next));
    double td = target - value(phi, a);
    double* w = &weights_[static_cast<size_t>(a) * n_features_];
    for (int i = 0; i < n_features_; ++i) w[i] += config_.alpha * td * phi[static_cast<size_t>(i)];
}

nlohmann::json TdAgent::to_json() const {
    return {{"alpha", config_.alpha},
            {"gamma", config_.gamma},
            {"eps_start", config_.eps_start},
            {"eps_end", config_.eps_end},
            {"eps_decay_episodes", config_.eps_decay_episodes},
            {"seed", config_.seed},
            {"weights", weights_}};
}

TdAgent TdAgent::from_json(const nlohmann::json& j, const SchemaA2& schema) {
    AgentConfig c;
    c.alpha = j.at("alpha").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.eps_start = j.at("eps_start").get<double>();
    c.eps_end = j.at("eps_end").get<double>();
    c.eps_decay_episodes = j.at("eps_decay_episodes").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    TdAgent agent(c, schema);
    j.at("weights").get_to(agent.weights_);
    return agent;
}

void TdAgent::save(const std::string& path, const nlohmann::json& run_config) const {
    nlohmann::json j = {{"version", 1},
                        {"agent", to_json()},
                        {"config_hash", std::hash<std::string>{}(run_config.dump())}};
    atomic_write(path, j.dump());
}

TdAgent TdAgent::load(const std::string& path, const SchemaA2& schema) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in);
    if (j.at("version").get<int>() != 1) throw std::runtime_error("checkpoint version mismatch");
    return from_json(j.at("agent"), schema);
}

TrainResult train_agent(const MimoEnvConfig& env_config, const AgentConfig& agent_config,
                        int episodes, const std::vector<int>& checkpoint_episodes,
                        const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    TdAgent agent(agent_config, env_config.schema);
    MimoEnv env(env_config);
    TrainResult result;

    for (int ep = 1; ep <= episodes; ++ep) {
        env.reset(env_config.seed + static_cast<std::uint64_t>(ep));
        double frac = std::min(1.0, static_cast<double>(ep) /
                                        std::max(1, agent_config.eps_decay_episodes));
        double eps = agent_config.eps_start + frac * (agent_config.eps_end - agent_config.eps_start);
        double ep_return = 0.0;
        for (int t = 0; t < env_config.horizon; ++t) {
            EnvState state = env.state();
            A2Action action = agent.act(state, eps);
            double reward = env.step(action);
            agent.learn(state, action, reward, env.state());
            ep_return += reward;
        }
        result.episode_returns.push_back(ep_return);
        if (std::find(checkpoint_episodes.begin(), checkpoint_episodes.end(), ep) !=
            checkpoint_episodes.end()) {
            std::string path = out_dir + "/checkpoint-" + std::to_string(ep) + ".json";
            agent.save(path, env_config.to_json());
            result.checkpoints.emplace_back(ep, path);
        }
    }
    return result;
}

// ---------------------------------------------------------------------------

std::vector<Step> synth_trace_a1(std::uint64_t seed, int steps) {
    SchemaA1 schema;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> prb_pick(1, SchemaA1::kPrbTotal);
    std::uniform_int_distribution<int> pol_pick(0, 2);

    // regime levels per (kpi, slice), redrawn every ~50 steps
    std::vector<std::vector<double>> level(schema.kpis.size(),
                                           std::vector<double>(schema.slices.size(), 0.0));
    auto redraw = [&] {
        for (size_t k = 0; k < schema.kpis.size(); ++k)
            for (size_t l = 0; l < schema.slices.size(); ++l)
                level[k][l] = 10.0 + 90.0 * unit(rng);
    };
    redraw();

    std::vector<Step> out;
    for (int t = 0; t < steps; ++t) {
        if (t > 0 && t % 50 == 0) redraw();
        Step step;
        step.t = t;
        for (size_t k = 0; k < schema.kpis.size(); ++k) {
            std::vector<std::vector<double>> rows;
            for (size_t l = 0; l < schema.slices.size(); ++l) {
                std::vector<double> row;
                for (int m = 0; m < SchemaA1::kMeasurements; ++m)
                    row.push_back(level[k][l] * (0.9 + 0.2 * unit(rng)));
                rows.push_back(std::move(row));
            }
            step.state[schema.kpis[k]] = std::move(rows);
        }
        A1Action action;
        for (size_t l = 0; l < 3; ++l) {
            action.prb[l] = prb_pick(rng);
            action.policy[l] = schema.policies[static_cast<size_t>(pol_pick(rng))];
        }
        step.action = action;
        step.reward = unit(rng);
        out.push_back(std::move(step));
    }
    return out;
}

}  // namespace symbxrl
