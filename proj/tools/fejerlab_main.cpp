// Command line front end.  Three subcommands:
//
//   fejerlab run <config.json> [--out BASE]   run one experiment
//   fejerlab oracle [--max-n N] [--out BASE]  exact identity suite only
//   fejerlab report <summary.json...>         tabulate finished runs
//
// Outputs land under BASE/<experiment name>/.  BASE comes from --out,
// then the FEJERLAB_OUT environment variable, then the config's "out"
// hint, then "./out".
//
// Exit codes: 0 all contract checks passed, 1 a contract check failed,
// 2 bad config or usage, 3 a domain error (degenerate input reached an
// operation that cannot serve it), 4 I/O or other runtime failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fejerlab/errors.hpp"
#include "fejerlab/experiments.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string resolve_base(const std::string& cli_out,
                         const std::string& hint) {
    if (!cli_out.empty()) return cli_out;
    if (const char* env = std::getenv("FEJERLAB_OUT"); env && *env) {
        return env;
    }
    if (!hint.empty()) return hint;
    return "out";
}

json load_json(const std::string& path) {
    std::ifstream ifs(path);
    if (!ifs) {
        throw fejerlab::ConfigError("cannot open " + path);
    }
    return json::parse(ifs);
}

int report_pass(const ordered_json& summary, const fs::path& dir) {
    const bool pass = summary.value("pass", false);
    std::cout << summary.value("name", std::string("?")) << ": "
              << (pass ? "pass" : "FAIL") << "\n";
    if (!pass && summary.contains("failures")) {
        for (const auto& f : summary.at("failures")) {
            std::cout << "  - " << f.get<std::string>() << "\n";
        }
    }
    std::cout << "wrote " << (dir / "summary.json").string() << "\n";
    return pass ? 0 : 1;
}

int run_main(const std::string& config_path, const std::string& cli_out) {
    const json raw = load_json(config_path);
    const auto cfg = fejerlab::parse_config(raw);
    const fs::path dir =
        fs::path(resolve_base(cli_out, cfg.out_hint)) / cfg.name;
    const auto summary = fejerlab::run_experiment(cfg, dir);
    return report_pass(summary, dir);
}

int oracle_main(long long max_n, const std::string& cli_out) {
    fejerlab::ExperimentConfig cfg;
    cfg.name = "oracle";
    cfg.kind = fejerlab::ExperimentKind::Oracle;
    cfg.oracle_max_n = max_n;
    const fs::path dir = fs::path(resolve_base(cli_out, "")) / cfg.name;
    const auto summary = fejerlab::run_experiment(cfg, dir);
    return report_pass(summary, dir);
}

int report_main(const std::vector<std::string>& paths,
                const std::string& out_file) {
    std::vector<ordered_json> summaries;
    summaries.reserve(paths.size());
    for (const auto& p : paths) {
        summaries.push_back(load_json(p));
    }
    const std::string table = fejerlab::render_report_table(summaries);
    if (out_file.empty()) {
        std::cout << table;
    } else {
        std::ofstream ofs(out_file);
        ofs << table;
        ofs.flush();
        if (!ofs) {
            throw std::runtime_error("failed to write " + out_file);
        }
        std::cout << "wrote " << out_file << "\n";
    }
    for (const auto& s : summaries) {
        if (!s.value("pass", false)) return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fejer monotone iteration laboratory"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run one experiment config");
    std::string config_path;
    std::string run_out;
    run->add_option("config", config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--out", run_out, "output base directory");

    auto* oracle =
        app.add_subcommand("oracle", "Run the exact identity suite");
    long long max_n = 200;
    std::string oracle_out;
    oracle->add_option("--max-n", max_n, "largest iterate index checked")
        ->check(CLI::Range(1LL, 100000LL));
    oracle->add_option("--out", oracle_out, "output base directory");

    auto* report =
        app.add_subcommand("report", "Tabulate summary.json files");
    std::vector<std::string> summary_paths;
    std::string report_out;
    report->add_option("summaries", summary_paths, "summary.json paths")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--out", report_out, "write the table here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) return run_main(config_path, run_out);
        if (oracle->parsed()) return oracle_main(max_n, oracle_out);
        return report_main(summary_paths, report_out);
    } catch (const fejerlab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fejerlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    }
}
