#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "../vendor/CLI11.hpp"
#include "moller/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"verification driver for the Dirac/Moller numerical laboratory"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "execute verification suites from a config");
    std::string config_path, grid_csv, out_dir;
    std::vector<std::string> suites;
    long seed = -1;
    run->add_option("config", config_path, "JSON run configuration")->required();
    run->add_option("--suite", suites, "suite to run (repeatable; default: all)");
    run->add_option("--grid", grid_csv, "comma-separated grid ladder override");
    run->add_option("--out", out_dir, "output directory override");
    run->add_option("--seed", seed, "random seed override");

    CLI11_PARSE(app, argc, argv);

    try {
        md::RunConfig cfg = md::load_config(config_path);
        if (!suites.empty()) cfg.suites = suites;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (seed >= 0) cfg.seed = static_cast<unsigned>(seed);
        if (!grid_csv.empty()) {
            cfg.grids.clear();
            std::stringstream ss(grid_csv);
            std::string tok;
            while (std::getline(ss, tok, ',')) cfg.grids.push_back(std::stoi(tok));
        }
        md::validate_config(cfg);
        int rc = md::run_suites(cfg);
        std::fprintf(rc == 0 ? stdout : stderr, "%s (reports in %s)\n",
                     rc == 0 ? "all suites passed" : "suite failure", cfg.out_dir.c_str());
        return rc;
    } catch (const md::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
