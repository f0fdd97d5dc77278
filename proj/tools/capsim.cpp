#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "capsim/cap_decomposition.hpp"
#include "capsim/errors.hpp"
#include "capsim/experiment.hpp"
#include "capsim/graph.hpp"

namespace fs = std::filesystem;
using namespace capsim;

namespace {

struct Flags {
    std::optional<std::string> config;
    std::map<std::string, std::optional<std::string>> values;

    void add(CLI::App* app, const std::string& key, const std::string& help) {
        app->add_option("--" + key, values[key], help);
    }

    ExperimentConfig resolve(ExperimentKind kind) const {
        ExperimentConfig cfg;
        if (config) {
            std::ifstream in(*config);
            if (!in) throw ConfigError("cannot read config file " + *config);
            cfg.load(in);
        }
        cfg.kind = kind;
        for (const auto& [key, value] : values) {
            if (value) cfg.set(key, *value);
        }
        cfg.validate();
        return cfg;
    }
};

void add_model_flags(CLI::App* app, Flags& f) {
    app->add_option("--config", f.config, "key=value config file; flags override it");
    f.add(app, "k", "number of colors (defaults to the length of --lambda)");
    f.add(app, "lambda", "color intensities a,b,...");
    f.add(app, "seed", "random seed");
}

void add_run_flags(CLI::App* app, Flags& f) {
    add_model_flags(app, f);
    f.add(app, "n", "graph sizes n1,n2,...");
    f.add(app, "replicas", "graph replicas per size");
    f.add(app, "samples", "branching-process samples");
    f.add(app, "out", "output directory; a run directory named by the config hash is created inside");
    f.add(app, "workers", "worker threads (0 = all cores)");
    f.add(app, "ell-max", "largest component size reported");
    f.add(app, "depth-cap", "friend-count depth cap");
    f.add(app, "node-cap", "node cap for tree growth");
    f.add(app, "survival-tol", "stop once all avoiding clusters survive except with this probability");
    f.add(app, "series-tol", "certified tail tolerance of the two-color series");
    f.add(app, "radius", "ball radius for the local weak check (1 or 2)");
    f.add(app, "max-nodes", "largest ball class kept in the local weak catalog");
    f.add(app, "eps", "near-critical grid e1,e2,... (decreasing)");
}

int emit(const ExperimentConfig& cfg, const RunRecord& rec, const std::string& csv_name, const std::string& csv) {
    const auto j = rec.to_json();
    std::cout << j.dump(2) << '\n';
    if (!cfg.out.empty()) {
        const fs::path dir = fs::path(cfg.out) / (std::string(to_string(cfg.kind)) + "-" + cfg.hash());
        fs::create_directories(dir);
        std::ofstream(dir / "record.json") << j.dump(2) << '\n';
        std::ofstream(dir / "config.txt") << cfg.canonical();
        if (!csv_name.empty()) std::ofstream(dir / csv_name) << csv;
        std::cerr << "wrote " << dir.string() << '\n';
    }
    if (!rec.ok()) {
        std::cerr << "consistency checks failed\n";
        return 1;
    }
    return 0;
}

std::ostream& open_out(const std::optional<std::string>& path, std::ofstream& file) {
    if (!path) return std::cout;
    file.open(*path);
    if (!file) throw ConfigError("cannot write " + *path);
    return file;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Color-avoiding percolation on edge-colored random graphs"};
    app.require_subcommand(1);

    Flags sample_flags;
    auto* sample = app.add_subcommand("sample-ecer", "sample an edge-colored Erdos-Renyi graph and dump it");
    add_model_flags(sample, sample_flags);
    sample_flags.add(sample, "n", "number of vertices");
    std::optional<std::string> sample_out;
    sample->add_option("--out", sample_out, "graph dump file (stdout if absent)");

    Flags comp_flags;
    auto* comp = app.add_subcommand("components", "color-avoiding component sizes as CSV");
    add_model_flags(comp, comp_flags);
    comp_flags.add(comp, "n", "number of vertices when sampling");
    std::optional<std::string> comp_in, comp_out;
    comp->add_option("--input", comp_in, "graph dump to decompose (samples one if absent)");
    comp->add_option("--out", comp_out, "CSV file (stdout if absent)");

    struct Run {
        const char* name;
        const char* help;
        ExperimentKind kind;
        const char* csv;
        Flags flags;
        CLI::App* app = nullptr;
    };
    std::vector<Run> runs{
        {"analytic", "closed-form report: regime, p table, both f*_inf routes, two-color f*_ell", ExperimentKind::analytic_report, "", {}},
        {"ecbp-mc", "branching-process Monte Carlo of friend counts and f*_inf", ExperimentKind::ecbp_mc, "", {}},
        {"convergence", "empirical component densities of random graphs against the limits", ExperimentKind::ecer_convergence, "convergence.csv", {}},
        {"local-weak", "ball statistics of random graphs against branching-process balls", ExperimentKind::local_weak_check, "local_weak.csv", {}},
        {"near-critical", "f*_inf(eps)/eps^k near criticality with extrapolation", ExperimentKind::near_critical, "", {}},
    };
    for (auto& r : runs) {
        r.app = app.add_subcommand(r.name, r.help);
        add_run_flags(r.app, r.flags);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sample) {
            ExperimentConfig cfg = sample_flags.resolve(ExperimentKind::analytic_report);
            const std::size_t n = cfg.n.front();
            const auto g = sample_ecer(n, n, cfg.lambda_vector(), Stream(cfg.seed));
            std::ofstream file;
            write_graph(open_out(sample_out, file), g);
            return 0;
        }
        if (*comp) {
            std::optional<EdgeColoredGraph> g;
            if (comp_in) {
                std::ifstream in(*comp_in);
                if (!in) throw ConfigError("cannot read " + *comp_in);
                g = read_graph(in);
            } else {
                ExperimentConfig cfg = comp_flags.resolve(ExperimentKind::analytic_report);
                const std::size_t n = cfg.n.front();
                g = sample_ecer(n, n, cfg.lambda_vector(), Stream(cfg.seed));
            }
            const auto d = decompose(*g);
            std::size_t total = 0;
            for (const auto& [size, count] : d.size_histogram) total += count;
            std::ofstream file;
            write_size_csv(open_out(comp_out, file), d);
            return total == d.n() ? 0 : 1;
        }
        for (auto& r : runs) {
            if (!*r.app) continue;
            const ExperimentConfig cfg = r.flags.resolve(r.kind);
            std::ostringstream csv;
            const RunRecord rec = run_experiment(cfg, *r.csv ? &csv : nullptr);
            return emit(cfg, rec, r.csv, csv.str());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "parameter error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
