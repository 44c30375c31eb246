#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commands.hpp"

using symbxrl::cli::RunConfig;

int main(int argc, char** argv) {
    CLI::App app{"symbxrl: symbolic explanation and action steering for RL traces"};
    app.require_subcommand(1);

    std::string config_path, out, schema = "a2", in_path, normalize = "joint", mode = "reward-max";
    std::optional<std::string> checkpoint, intent_file, store_path, kg_path, dist_path,
        density_path;
    std::vector<int> checkpoints{50, 100, 200};
    double eps_rel = 0.01, start_frac = 0.0, delta = 0.0;
    int n_seeds = 10, group = 0;
    std::string filter;
    bool direct = false;

    auto* simulate = app.add_subcommand("simulate", "generate a trace from the playground");
    simulate->add_option("--config", config_path, "run config JSON");
    simulate->add_option("--out", out, "output trace JSONL")->required();
    simulate->add_option("--checkpoint", checkpoint, "agent checkpoint (a2; random agent if omitted)");

    auto* train = app.add_subcommand("train", "train the playground agent");
    train->add_option("--config", config_path, "run config JSON");
    train->add_option("--checkpoints", checkpoints, "episodes at which to checkpoint")
        ->delimiter(',');
    train->add_option("--out", out, "output directory")->required();

    auto* symbolize = app.add_subcommand("symbolize", "convert a trace to symbolic terms");
    symbolize->add_option("--schema", schema, "a1|a2")->required();
    symbolize->add_option("--in", in_path, "input trace JSONL")->required();
    symbolize->add_option("--out", out, "output symbolic JSONL")->required();
    symbolize->add_option("--store", store_path, "experience store JSON to create/update");
    symbolize->add_option("--eps-rel", eps_rel, "relative tolerance for const");

    auto* explain = app.add_subcommand("explain", "analytics over a symbolic trace");
    explain->add_option("--in", in_path, "input symbolic JSONL")->required();
    explain->add_option("--kg", kg_path, "knowledge graph DOT output (JSON written alongside)");
    explain->add_option("--dist", dist_path, "effect distribution CSV");
    explain->add_option("--density", density_path, "decision/effect density CSV");
    explain->add_option("--normalize", normalize, "joint|row|col");
    explain->add_option("--group", group, "group for the KG projection");
    explain->add_option("--filter", filter, "subject filter (slice, group, or full subject)");

    auto* steer = app.add_subcommand("steer", "steered vs unsteered episode experiment");
    steer->add_option("--config", config_path, "run config JSON");
    steer->add_option("--mode", mode, "reward-max|condition|accel|off");
    steer->add_option("--checkpoint", checkpoint, "agent checkpoint");
    steer->add_option("--intent", intent_file, "intent file (condition mode)");
    steer->add_option("--start-frac", start_frac, "episode fraction at which steering starts");
    steer->add_option("--seeds", n_seeds, "number of seeds");
    steer->add_option("--delta", delta, "replacement hysteresis");
    steer->add_option("--out", out, "output directory")->required();
    steer->add_flag("--direct-force", direct, "use the reward-blind forcing baseline");

    auto* compare = app.add_subcommand("compare", "delta tables between two run directories");
    std::string run_a, run_b;
    compare->add_option("runA", run_a)->required();
    compare->add_option("runB", run_b)->required();
    compare->add_option("--out", out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config =
            config_path.empty() ? RunConfig::defaults() : RunConfig::load(config_path);
        if (simulate->parsed())
            return symbxrl::cli::cmd_simulate(config, out, checkpoint);
        if (train->parsed()) return symbxrl::cli::cmd_train(config, checkpoints, out);
        if (symbolize->parsed())
            return symbxrl::cli::cmd_symbolize(schema, in_path, out, store_path, eps_rel);
        if (explain->parsed())
            return symbxrl::cli::cmd_explain(in_path, kg_path, dist_path, density_path, normalize,
                                             group, filter);
        if (steer->parsed())
            return symbxrl::cli::cmd_steer(config, mode, checkpoint, intent_file, start_frac,
                                           n_seeds, delta, out, direct);
        if (compare->parsed()) return symbxrl::cli::cmd_compare(run_a, run_b, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
