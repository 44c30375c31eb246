#include "commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "symbxrl/experiments.hpp"
#include "symbxrl/explainer.hpp"
#include "symbxrl/intent.hpp"
#include "symbxrl/playground.hpp"
#include "symbxrl/steering.hpp"
#include "symbxrl/store.hpp"
#include "symbxrl/symbolizer.hpp"
#include "symbxrl/trace_io.hpp"

namespace symbxrl::cli {

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    RunConfig c;
    c.raw = nlohmann::json::parse(in);
    return c;
}

RunConfig RunConfig::defaults() { return RunConfig{}; }

std::string RunConfig::schema() const { return raw.value("schema", "a2"); }

std::uint64_t RunConfig::seed() const {
    if (const char* env = std::getenv("SYMBXRL_SEED")) return std::stoull(env);
    return raw.value("seed", std::uint64_t{1});
}

int RunConfig::steps() const { return raw.value("steps", 500); }

nlohmann::json RunConfig::env() const {
    nlohmann::json e = raw.value("env", nlohmann::json::object());
    if (!e.contains("seed")) e["seed"] = seed();
    return e;
}

nlohmann::json RunConfig::agent() const { return raw.value("agent", nlohmann::json::object()); }

int RunConfig::train_episodes() const {
    return raw.value("train", nlohmann::json::object()).value("episodes", 200);
}

double RunConfig::eps_rel() const {
    return raw.value("symbolizer", nlohmann::json::object()).value("eps_rel", 0.01);
}

double RunConfig::abs_floor() const {
    return raw.value("symbolizer", nlohmann::json::object()).value("abs_floor", 1e-9);
}

namespace {

AgentConfig agent_config_from(const nlohmann::json& j) {
    AgentConfig c;
    c.alpha = j.value("alpha", c.alpha);
    c.gamma = j.value("gamma", c.gamma);
    c.eps_start = j.value("eps_start", c.eps_start);
    c.eps_end = j.value("eps_end", c.eps_end);
    c.eps_decay_episodes = j.value("eps_decay_episodes", c.eps_decay_episodes);
    c.seed = j.value("seed", c.seed);
    return c;
}

Schema schema_from(const std::string& name) {
    if (name == "a1") return SchemaA1{};
    if (name == "a2") return SchemaA2{};
    throw std::invalid_argument("unknown schema '" + name + "' (want a1|a2)");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

int cmd_simulate(const RunConfig& config, const std::string& out_path,
                 const std::optional<std::string>& checkpoint) {
    if (config.schema() == "a1") {
        auto steps = synth_trace_a1(config.seed(), config.steps());
        write_trace(out_path, steps);
        std::cout << "wrote " << steps.size() << " a1 steps to " << out_path << "\n";
        return 0;
    }

    MimoEnvConfig env_config = MimoEnvConfig::from_json(config.env());
    MimoEnv env(env_config);
    env.reset(config.seed());

    std::optional<TdAgent> agent;
    if (checkpoint) agent = TdAgent::load(*checkpoint, env_config.schema);
    AgentConfig random_cfg;
    random_cfg.seed = config.seed();
    TdAgent random_agent(random_cfg, env_config.schema);

    std::vector<Step> steps;
    for (int t = 0; t < config.steps(); ++t) {
        A2Action action = agent ? agent->act(env.state(), 0.0)
                                : random_agent.act(env.state(), 1.0);
        Step record = env.observe(action, 0.0);
        record.reward = env.step(action);
        steps.push_back(std::move(record));
    }
    write_trace(out_path, steps);
    std::cout << "wrote " << steps.size() << " a2 steps to " << out_path << "\n";
    return 0;
}

int cmd_train(const RunConfig& config, const std::vector<int>& checkpoints,
              const std::string& out_dir) {
    MimoEnvConfig env_config = MimoEnvConfig::from_json(config.env());
    AgentConfig agent_config = agent_config_from(config.agent());
    int episodes = config.train_episodes();
    for (int c : checkpoints)
        if (c < 1 || c > episodes)
            throw std::invalid_argument("checkpoint episode " + std::to_string(c) +
                                        " outside 1.." + std::to_string(episodes));

    TrainResult result = train_agent(env_config, agent_config, episodes, checkpoints, out_dir);

    std::string curve = "episode,return\n";
    for (size_t i = 0; i < result.episode_returns.size(); ++i)
        curve += std::to_string(i + 1) + "," + format_double(result.episode_returns[i]) + "\n";
    atomic_write(out_dir + "/training-curve.csv", curve);

    for (const auto& [ep, path] : result.checkpoints)
        std::cout << "checkpoint " << ep << " -> " << path << "\n";
    std::cout << "training curve -> " << out_dir << "/training-curve.csv\n";
    return 0;
}

int cmd_symbolize(const std::string& schema_name, const std::string& in_path,
                  const std::string& out_path, const std::optional<std::string>& store_path,
                  double eps_rel) {
    Schema schema = schema_from(schema_name);
    Trajectory traj = validate_trajectory(read_trace(in_path, schema), schema);

    SymbolizerConfig sym_config;
    sym_config.eps_rel = eps_rel;
    SymbolizerState state(schema, sym_config);
    SymbolicTrace trace = symbolize_trajectory(traj, state);
    write_symbolic_trace(out_path, trace);

    if (store_path) {
        ExperienceStore store;
        if (std::filesystem::exists(*store_path)) store = ExperienceStore::load(*store_path);
        for (size_t i = 0; i < trace.steps.size(); ++i) {
            const auto& sym = trace.steps[i];
            store.record_step(sym.state, sym.action, traj.steps[i].action, traj.steps[i].reward,
                              sym.t, false);
        }
        store.end_sequence();
        store.set_tracker_state(state.trackers_to_json());
        store.save(*store_path);
        std::cout << "store -> " << *store_path << " (" << store.size() << " experiences)\n";
    }
    std::cout << "wrote " << trace.steps.size() << " symbolic steps to " << out_path << "\n";
    return 0;
}

int cmd_explain(const std::string& in_path, const std::optional<std::string>& kg_path,
                const std::optional<std::string>& dist_path,
                const std::optional<std::string>& density_path, const std::string& normalize,
                int group, const std::string& filter) {
    SymbolicTrace trace = read_symbolic_trace(in_path);

    if (kg_path) {
        KnowledgeGraph kg = build_kg(trace, "g" + std::to_string(group));
        atomic_write(*kg_path, export_kg_dot(kg));
        std::string json_path = *kg_path;
        auto dot = json_path.rfind(".dot");
        if (dot != std::string::npos) json_path = json_path.substr(0, dot);
        json_path += ".json";
        atomic_write(json_path, export_kg_json(kg));
        std::cout << "kg -> " << *kg_path << ", " << json_path << "\n";
    }
    if (dist_path) {
        atomic_write(*dist_path, frequency_table_csv(effect_distribution(trace, filter)));
        std::cout << "effect distribution -> " << *dist_path << "\n";
    }
    if (density_path) {
        Normalization mode;
        if (normalize == "joint") mode = Normalization::Joint;
        else if (normalize == "row") mode = Normalization::Row;
        else if (normalize == "col") mode = Normalization::Column;
        else throw std::invalid_argument("unknown normalization '" + normalize + "'");
        atomic_write(*density_path,
                     density_map_csv(decision_effect_density(trace, "", filter, mode)));
        std::cout << "density map -> " << *density_path << "\n";
    }
    return 0;
}

int cmd_steer(const RunConfig& config, const std::string& mode,
              const std::optional<std::string>& checkpoint,
              const std::optional<std::string>& intent_file, double start_frac, int n_seeds,
              double delta, const std::string& out_dir, bool direct_force_baseline) {
    if (n_seeds < 1) throw std::invalid_argument("--seeds must be >= 1");

    SteerExperimentConfig exp;
    exp.env = MimoEnvConfig::from_json(config.env());
    exp.symbolizer.eps_rel = config.eps_rel();
    exp.symbolizer.abs_floor = config.abs_floor();
    exp.steering.mode = steering_mode_from(mode);
    exp.steering.start_fraction = start_frac;
    exp.steering.delta = delta;
    if (intent_file) exp.steering.intents = parse_intent_file(*intent_file, exp.env.schema);
    if (exp.steering.mode == SteeringMode::Condition && exp.steering.intents.empty())
        throw std::invalid_argument("condition mode requires --intent");
    exp.steering.validate();  // unsatisfiable intents surface before any episode
    exp.forcing = direct_force_baseline ? ForcingMode::DirectForce : ForcingMode::Steer;
    for (int s = 0; s < n_seeds; ++s) exp.seeds.push_back(config.seed() + static_cast<std::uint64_t>(s));

    TdAgent agent = checkpoint
                        ? TdAgent::load(*checkpoint, exp.env.schema)
                        : TdAgent(agent_config_from(config.agent()), exp.env.schema);

    auto outcomes = run_steer_experiment(exp, agent);

    std::filesystem::create_directories(out_dir);
    std::string summary =
        "seed,baseline,steered,rel_improvement,no_record,better_known,constraint,"
        "fallback_forced,violations\n";
    std::vector<double> improvements;
    FrequencyTable applied_dist;
    for (const auto& out : outcomes) {
        summary += std::to_string(out.seed) + "," + format_double(out.baseline_reward) + "," +
                   format_double(out.steered_reward) + "," +
                   format_double(out.relative_improvement) + "," +
                   std::to_string(out.replaced_no_record) + "," +
                   std::to_string(out.replaced_better_known) + "," +
                   std::to_string(out.replaced_constraint) + "," +
                   std::to_string(out.replaced_fallback_forced) + "," +
                   std::to_string(out.intent_violations) + "\n";
        improvements.push_back(out.relative_improvement);

        std::string log;
        for (const auto& d : out.log) {
            log += d.to_json().dump();
            log += '\n';
        }
        atomic_write(out_dir + "/decisions-seed" + std::to_string(out.seed) + ".jsonl", log);

        std::string rewards = "t,baseline,steered\n";
        for (size_t t = 0; t < out.steered_step_rewards.size(); ++t)
            rewards += std::to_string(t) + "," + format_double(out.baseline_step_rewards[t]) +
                       "," + format_double(out.steered_step_rewards[t]) + "\n";
        atomic_write(out_dir + "/rewards-seed" + std::to_string(out.seed) + ".csv", rewards);

        for (const auto& term : out.applied_action_terms) {
            ++applied_dist.counts[term];
            ++applied_dist.total;
        }
    }
    atomic_write(out_dir + "/action-dist.csv", frequency_table_csv(applied_dist));
    summary += "median_improvement," + format_double(median(improvements)) + ",,,,,,,\n";
    atomic_write(out_dir + "/summary.csv", summary);

    std::cout << "median relative improvement: " << format_double(median(improvements)) << "\n";
    std::cout << "summary -> " << out_dir << "/summary.csv\n";
    return 0;
}

int cmd_compare(const std::string& run_a, const std::string& run_b, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    auto load_table = [](const std::string& path) {
        FrequencyTable table;
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);  // header
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string key, count, prob;
            std::getline(ss, key, ',');
            std::getline(ss, count, ',');
            std::getline(ss, prob, ',');
            if (key.rfind("median", 0) == 0) continue;
            table.counts[key] = std::stoll(count);
            table.total += std::stoll(count);
        }
        return table;
    };

    // Distribution deltas for any CSV table present in both runs.
    bool wrote_any = false;
    for (const auto& entry : fs::directory_iterator(run_a)) {
        std::string name = entry.path().filename().string();
        if (name.find("dist") == std::string::npos || entry.path().extension() != ".csv") continue;
        fs::path other = fs::path(run_b) / name;
        if (!fs::exists(other)) continue;
        auto deltas = compare_distributions(load_table(entry.path().string()),
                                            load_table(other.string()));
        atomic_write(out_dir + "/delta-" + name, deltas_csv(deltas));
        std::cout << "delta table -> " << out_dir << "/delta-" << name << "\n";
        wrote_any = true;
    }

    // Relative cumulative reward series per seed shared by both runs.
    auto load_rewards = [](const std::string& path) {
        std::vector<double> rewards;
        std::ifstream in(path);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            auto last = line.rfind(',');
            rewards.push_back(std::stod(line.substr(last + 1)));
        }
        return rewards;
    };
    std::vector<std::string> reward_files;
    for (const auto& entry : fs::directory_iterator(run_a)) {
        std::string name = entry.path().filename().string();
        if (name.rfind("rewards-seed", 0) == 0 && fs::exists(fs::path(run_b) / name))
            reward_files.push_back(name);
    }
    std::sort(reward_files.begin(), reward_files.end());
    std::string series = "seed_file,t,cum_a,cum_b,delta\n";
    for (const auto& name : reward_files) {
        auto a = load_rewards((fs::path(run_a) / name).string());
        auto b = load_rewards((fs::path(run_b) / name).string());
        double cum_a = 0.0, cum_b = 0.0;
        for (size_t t = 0; t < std::min(a.size(), b.size()); ++t) {
            cum_a += a[t];
            cum_b += b[t];
            series += name + "," + std::to_string(t) + "," + format_double(cum_a) + "," +
                      format_double(cum_b) + "," + format_double(cum_b - cum_a) + "\n";
        }
    }
    if (!reward_files.empty()) {
        atomic_write(out_dir + "/relative-cum-reward.csv", series);
        std::cout << "reward series -> " << out_dir << "/relative-cum-reward.csv\n";
        wrote_any = true;
    }
    if (!wrote_any) throw std::runtime_error("no comparable outputs found in the two runs");
    return 0;
}

}  // namespace symbxrl::cli
