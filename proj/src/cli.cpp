#include <symh/cli.hpp>
#include <symh/io.hpp>
#include <symh/measures.hpp>
#include <symh/oracle.hpp>
#include <symh/orbits.hpp>
#include <symh/subdiff.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

namespace symh::cli {

using nlohmann::json;
namespace fs = std::filesystem;

static Task task_from_string(const std::string& s) {
    if (s == "homogenize") return Task::Homogenize;
    if (s == "orbits") return Task::Orbits;
    if (s == "measures") return Task::Measures;
    if (s == "subdiff") return Task::Subdiff;
    if (s == "census") return Task::Census;
    if (s == "rset") return Task::RSet;
    throw ConfigError("task: unknown value '" + s + "'");
}
static std::string task_to_string(Task t) {
    switch (t) {
        case Task::Homogenize: return "homogenize";
        case Task::Orbits: return "orbits";
        case Task::Measures: return "measures";
        case Task::Subdiff: return "subdiff";
        case Task::Census: return "census";
        case Task::RSet: return "rset";
    }
    return "homogenize";
}

RunConfig RunConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    RunConfig c;
    if (!j.contains("hamiltonian")) throw ConfigError("hamiltonian: missing");
    c.hamiltonian = dynamics::HamiltonianSpec::from_json(j["hamiltonian"].dump());
    if (j.contains("task")) c.task = task_from_string(j["task"].get<std::string>());
    auto grids = j.value("grids", json::object());
    c.p_min = grids.value("p_min", c.p_min);
    c.p_max = grids.value("p_max", c.p_max);
    c.p_nodes = grids.value("p_nodes", c.p_nodes);
    c.x_nodes = grids.value("x_nodes", c.x_nodes);
    c.fiber_nodes = grids.value("fiber_nodes", c.fiber_nodes);
    if (c.p_nodes < 2) throw ConfigError("grids.p_nodes: must be >= 2");
    if (j.contains("k_list")) c.k_list = j["k_list"].get<std::vector<int>>();
    if (j.contains("alpha_list")) c.alpha_list = j["alpha_list"].get<std::vector<double>>();
    if (j.contains("p_slices")) c.p_slices = j["p_slices"].get<std::vector<double>>();
    c.census_N = j.value("census_N", c.census_N);
    c.output_dir = j.value("output_dir", c.output_dir);
    c.seed = j.value("seed", c.seed);
    c.budget_seconds = j.value("budget_seconds", c.budget_seconds);
    for (size_t i = 1; i < c.k_list.size(); ++i)
        if (c.k_list[i] <= c.k_list[i - 1]) throw ConfigError("k_list: must be increasing");
    return c;
}

std::string RunConfig::to_json() const {
    json j;
    j["hamiltonian"] = json::parse(hamiltonian.to_json());
    j["task"] = task_to_string(task);
    j["grids"] = {{"p_min", p_min},   {"p_max", p_max},         {"p_nodes", p_nodes},
                  {"x_nodes", x_nodes}, {"fiber_nodes", fiber_nodes}};
    j["k_list"] = k_list;
    j["alpha_list"] = alpha_list;
    j["p_slices"] = p_slices;
    j["census_N"] = census_N;
    j["output_dir"] = output_dir;
    j["seed"] = seed;
    j["budget_seconds"] = budget_seconds;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

namespace {

struct Budget {
    std::chrono::steady_clock::time_point start;
    long seconds;
    void check() const {
        if (seconds <= 0) return;
        auto el = std::chrono::duration_cast<std::chrono::seconds>(
                      std::chrono::steady_clock::now() - start)
                      .count();
        if (el > seconds) throw BudgetExceeded("wall clock over " + std::to_string(seconds) + "s");
    }
};

struct Emitter {
    std::string dir;
    std::vector<std::pair<std::string, uint64_t>> files;
    void emit(const std::string& name, const std::string& body) {
        fs::create_directories(dir);
        std::string path = dir + "/" + name;
        write_text_file(path, body);
        files.push_back({name, fnv1a64(body)});
    }
};

std::vector<double> make_p_grid(const RunConfig& c) {
    std::vector<double> g;
    for (int i = 0; i < c.p_nodes; ++i)
        g.push_back(c.p_min + (c.p_max - c.p_min) * i / (c.p_nodes - 1));
    return g;
}

}  // namespace

RunReport run(const RunConfig& cfg) {
    cfg.hamiltonian.validate();
    Budget budget{std::chrono::steady_clock::now(), cfg.budget_seconds};
    Emitter out{cfg.output_dir, {}};
    auto t0 = std::chrono::steady_clock::now();

    genfunc::LandscapeGrids grids;
    grids.x_nodes = cfg.x_nodes;
    grids.fiber_nodes = cfg.fiber_nodes;
    dynamics::FlowConfig fc = dynamics::FlowConfig::for_spec(cfg.hamiltonian);

    auto run_homogenize = [&]() {
        selector::HomogenizeOptions opt;
        opt.grids = grids;
        auto rep = selector::homogenize(cfg.hamiltonian, cfg.k_list, make_p_grid(cfg), opt);
        for (auto& t : rep.tables) out.emit("hk_" + std::to_string(t.k) + ".csv", t.to_csv());
        out.emit("hbar.csv", rep.extrapolated.to_csv());
        json conv;
        conv["cauchy_sup_diffs"] = rep.cauchy_sup_diffs;
        conv["rate_estimate"] = rep.rate_estimate;
        out.emit("convergence.json", conv.dump(2));
        budget.check();
        return rep;
    };

    switch (cfg.task) {
        case Task::Homogenize: {
            run_homogenize();
            break;
        }
        case Task::Orbits: {
            CsvTable t;
            t.header = {"k", "alpha", "q", "p", "p_prime", "residual"};
            int k = cfg.k_list.empty() ? 8 : cfg.k_list.back();
            for (double a : cfg.alpha_list) {
                budget.check();
                try {
                    auto orb = dynamics::find_translated_orbit(
                        cfg.hamiltonian, k, Vec(a),
                        dynamics::PhasePoint{Vec(0.0), Vec(a)}, fc);
                    t.rows.push_back({std::to_string(k), format_g17(a),
                                      format_g17(orb.z.q[0]), format_g17(orb.z.p[0]),
                                      format_g17(orb.p_prime[0]), format_g17(orb.residual)});
                } catch (const NoOrbitFound&) {
                    t.rows.push_back({std::to_string(k), format_g17(a), "nan", "nan", "nan",
                                      "inf"});
                }
            }
            out.emit("orbits.csv", t.to_string());
            break;
        }
        case Task::Measures: {
            int k = cfg.k_list.empty() ? 16 : cfg.k_list.back();
            auto arr = json::array();
            for (double p : cfg.p_slices) {
                for (double a : cfg.alpha_list) {
                    budget.check();
                    json e;
                    e["p"] = p;
                    e["alpha"] = a;
                    try {
                        auto mu = measures::build_mu_alpha(cfg.hamiltonian, a, p, k, fc);
                        auto sc = measures::support_checks(mu, cfg.hamiltonian);
                        e["measure"] = json::parse(measures::measure_to_json(mu));
                        e["mass_inside_support"] = sc.mass_inside_support;
                        e["energy_spread"] = sc.energy_spread;
                        e["level_identity_gap"] = sc.level_identity_gap;
                    } catch (const error& err) {
                        e["error"] = err.what();
                    }
                    arr.push_back(e);
                }
            }
            out.emit("measures.json", arr.dump(2));
            break;
        }
        case Task::Subdiff: {
            auto rep = run_homogenize();
            CsvTable t;
            t.header = {"p", "clarke_lo", "clarke_hi"};
            auto& ex = rep.extrapolated;
            for (size_t i = 1; i + 1 < ex.p_grid.size(); ++i) {
                auto poly = subdiff::clarke_of_table(ex.p_grid, ex.values, ex.p_grid[i]);
                double lo = poly.vertices.front()[0], hi = poly.vertices.back()[0];
                t.rows.push_back({format_g17(ex.p_grid[i]), format_g17(std::min(lo, hi)),
                                  format_g17(std::max(lo, hi))});
            }
            out.emit("clarke.csv", t.to_string());
            break;
        }
        case Task::Census: {
            auto rep = dynamics::census(cfg.hamiltonian, cfg.census_N, fc, cfg.seed);
            CsvTable t;
            t.header = {"period", "rotation", "action", "q", "p"};
            for (auto& r : rep.rows)
                t.rows.push_back({std::to_string(r.period), format_g17(r.rotation[0]),
                                  format_g17(r.action), format_g17(r.z.q[0]),
                                  format_g17(r.z.p[0])});
            out.emit("census.csv", t.to_string());
            json meta;
            meta["degenerate"] = rep.degenerate;
            meta["distinct_actions"] = rep.degenerate ? 0 : rep.distinct_actions();
            out.emit("census_meta.json", meta.dump(2));
            break;
        }
        case Task::RSet: {
            auto rep = run_homogenize();
            auto rows = measures::emit_R_set(rep.extrapolated.p_grid, rep.extrapolated.values);
            out.emit("rset.csv", measures::rset_to_csv(rows));
            break;
        }
    }

    // manifest: content hashes of emitted bodies; runtime recorded separately
    auto t1 = std::chrono::steady_clock::now();
    json man;
    man["config_hash"] = hash_hex(fnv1a64(cfg.to_json()));
    man["version"] = "symh 0.1";
    auto files = json::array();
    for (auto& [name, h] : out.files) files.push_back({{"file", name}, {"hash", hash_hex(h)}});
    man["files"] = files;
    man["runtime_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    std::string man_body = man.dump(2);
    fs::create_directories(cfg.output_dir);
    write_text_file(cfg.output_dir + "/manifest.json", man_body);

    RunReport rep;
    rep.exit_code = 0;
    for (auto& [name, h] : out.files) rep.files.push_back(name);
    rep.manifest_path = cfg.output_dir + "/manifest.json";
    return rep;
}

// ---------------------------------------------------------------------------
// command line
// ---------------------------------------------------------------------------

int main_entry(int argc, char** argv) {
    CLI::App app{"symplectic homogenization laboratory"};
    std::string config_path, out_dir, k_csv;
    long long seed = -1;
    long budget = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--out", out_dir, "output directory override");
        sub->add_option("--k", k_csv, "comma-separated k list override");
        sub->add_option("--seed", seed, "seed override");
        sub->add_option("--budget-seconds", budget, "wall-clock budget override");
    };
    std::vector<std::pair<std::string, Task>> subs = {
        {"homogenize", Task::Homogenize}, {"orbits", Task::Orbits},
        {"measures", Task::Measures},     {"subdiff", Task::Subdiff},
        {"census", Task::Census},         {"rset", Task::RSet}};
    std::vector<CLI::App*> apps;
    for (auto& [name, task] : subs) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub);
        apps.push_back(sub);
    }
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        RunConfig cfg = RunConfig::from_json(read_text_file(config_path));
        for (size_t i = 0; i < subs.size(); ++i)
            if (apps[i]->parsed()) cfg.task = subs[i].second;
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
        if (budget >= 0) cfg.budget_seconds = budget;
        if (!k_csv.empty()) {
            cfg.k_list.clear();
            std::string cur;
            for (char ch : k_csv + ",") {
                if (ch == ',') {
                    if (!cur.empty()) cfg.k_list.push_back(std::stoi(cur));
                    cur.clear();
                } else
                    cur.push_back(ch);
            }
        }
        RunReport rep = run(cfg);
        std::cout << "wrote " << rep.files.size() << " artifact(s) to " << cfg.output_dir
                  << "\n";
        return rep.exit_code;
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const BudgetExceeded& e) {
        std::cerr << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}

}  // namespace symh::cli
