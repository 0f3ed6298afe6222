#pragma once

#include <symh/hamiltonian.hpp>

#include <string>
#include <vector>

namespace symh::cli {

enum class Task { Homogenize, Orbits, Measures, Subdiff, Census, RSet };

struct RunConfig {
    dynamics::HamiltonianSpec hamiltonian;
    Task task = Task::Homogenize;
    double p_min = -1.0, p_max = 1.0;
    int p_nodes = 33;
    int x_nodes = 64;
    int fiber_nodes = 49;
    std::vector<int> k_list{1, 2, 4};
    std::vector<double> alpha_list;
    std::vector<double> p_slices;
    int census_N = 20;
    std::string output_dir = ".";
    uint64_t seed = 1;
    long budget_seconds = 0;  // 0: no budget guard

    static RunConfig from_json(const std::string& text);  // throws ConfigError with field path
    std::string to_json() const;
};

struct RunReport {
    int exit_code = 0;
    std::vector<std::string> files;
    std::string manifest_path;
};

// Executes the task; writes CSV/JSON artifacts and a manifest with content
// hashes. Throws ConfigError / BudgetExceeded; other errors propagate.
RunReport run(const RunConfig& cfg);

int main_entry(int argc, char** argv);

}  // namespace symh::cli
