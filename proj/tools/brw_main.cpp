// Command-line front end: runs one experiment from a config file and
// writes the CSV table plus a JSON summary.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "brw/config.hpp"
#include "brw/errors.hpp"
#include "brw/harness.hpp"

int main(int argc, char** argv) {
    CLI::App app{"branching walk energy landscape toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    brw::RunOverrides overrides;
    int depth = 0;
    double beta = 0.0;
    long long replicates = 0;
    std::uint64_t seed = 0;
    unsigned threads = 0;

    CLI::App* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "config file (key = value lines)")
        ->required();
    auto* od = run->add_option("--N,--depth", depth, "override tree depth");
    auto* ob = run->add_option("--beta", beta, "override inverse temperature");
    auto* orr =
        run->add_option("--replicates", replicates, "override replicate count");
    auto* os = run->add_option("--seed", seed, "override base seed");
    auto* ot = run->add_option("--threads", threads, "override worker threads");
    run->add_option("--out", out_path, "write the CSV table to this file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        brw::ConfigMap cfg = brw::ConfigMap::parse_file(config_path);
        if (od->count()) overrides.depth = depth;
        if (ob->count()) overrides.beta = beta;
        if (orr->count()) overrides.replicates = replicates;
        if (os->count()) overrides.seed = seed;
        if (ot->count()) overrides.threads = threads;

        const brw::ResultRecord rec = brw::run_experiment(cfg, overrides);

        std::string target = out_path;
        if (target.empty()) target = cfg.get_string("out", "");
        if (!target.empty()) {
            std::ofstream out(target);
            if (!out) {
                std::cerr << "error: cannot write '" << target << "'\n";
                return 3;
            }
            brw::write_csv(rec, out);
            std::cout << rec.summary.dump(2) << "\n";
        } else {
            brw::write_csv(rec, std::cout);
            std::cerr << rec.summary.dump(2) << "\n";
        }
        return 0;
    } catch (const brw::ValidationError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const brw::TruncationError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const brw::ResourceError& e) {
        std::cerr << "resource error: " << e.what() << "\n";
        return 3;
    } catch (const brw::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
