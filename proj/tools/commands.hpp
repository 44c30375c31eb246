#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace symbxrl::cli {

// Run configuration file: a single JSON document; every section is optional
// and falls back to defaults. SYMBXRL_SEED overrides the seed when set.
struct RunConfig {
    nlohmann::json raw = nlohmann::json::object();

    static RunConfig load(const std::string& path);
    static RunConfig defaults();

    std::string schema() const;        // "a1" | "a2"
    std::uint64_t seed() const;
    int steps() const;                 // simulate length
    nlohmann::json env() const;
    nlohmann::json agent() const;
    int train_episodes() const;
    double eps_rel() const;
    double abs_floor() const;
};

int cmd_simulate(const RunConfig& config, const std::string& out_path,
                 const std::optional<std::string>& checkpoint);
int cmd_train(const RunConfig& config, const std::vector<int>& checkpoints,
              const std::string& out_dir);
int cmd_symbolize(const std::string& schema, const std::string& in_path,
                  const std::string& out_path, const std::optional<std::string>& store_path,
                  double eps_rel);
int cmd_explain(const std::string& in_path, const std::optional<std::string>& kg_path,
                const std::optional<std::string>& dist_path,
                const std::optional<std::string>& density_path, const std::string& normalize,
                int group, const std::string& filter);
int cmd_steer(const RunConfig& config, const std::string& mode,
              const std::optional<std::string>& checkpoint,
              const std::optional<std::string>& intent_file, double start_frac, int n_seeds,
              double delta, const std::string& out_dir, bool direct_force_baseline);
int cmd_compare(const std::string& run_a, const std::string& run_b, const std::string& out_dir);

}  // namespace symbxrl::cli
