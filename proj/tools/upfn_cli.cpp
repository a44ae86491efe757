// Batch experiment runner: maps named scenarios onto the envelope machinery,
// runs the Monte Carlo checks and writes CSV/JSON reports plus a constants
// manifest per scenario.
//
// Exit codes: 0 all inequalities pass, 1 a violation was observed,
// 2 usage/config error, 3 a numerical guard tripped.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "scenarios.hpp"
#include "upfn/common.hpp"

namespace {

// Flat sectioned key=value text; '#' and ';' start comments.
std::map<std::string, std::string> parse_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("cannot open config file: " + path);
    std::map<std::string, std::string> out;
    std::string line, section;
    auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r\n");
        const auto b = s.find_last_not_of(" \t\r\n");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    while (std::getline(is, line)) {
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("malformed config line: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("empty key in config line: " + line);
        out[section.empty() ? key : section + "." + key] = value;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"upper-function envelopes with Monte Carlo verification"};
    std::string config_path, scenario, out_dir = ".", format = "csv";
    std::uint64_t seed = 1;
    long replications = -1;
    int threads = 0;
    app.add_option("--config", config_path, "config file (sectioned key=value)");
    app.add_option("--scenario", scenario, "scenario name, or 'list'");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--replications", replications, "Monte Carlo replications");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads (0 = auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        upfn::cli::ScenarioContext ctx;
        if (!config_path.empty()) ctx.cfg = parse_config(config_path);

        auto cfg_get = [&](const char* key) -> const std::string* {
            auto it = ctx.cfg.find(std::string("scenario.") + key);
            if (it == ctx.cfg.end()) it = ctx.cfg.find(key);
            return it == ctx.cfg.end() ? nullptr : &it->second;
        };
        // Command-line flags win; the config supplies whatever was not given.
        if (scenario.empty())
            if (const auto* s = cfg_get("name")) scenario = *s;
        if (const auto* s = cfg_get("seed"); s && app.count("--seed") == 0)
            seed = std::stoull(*s);
        if (const auto* s = cfg_get("replications"); s && replications < 0)
            replications = std::stol(*s);
        if (const auto* s = cfg_get("format"); s && app.count("--format") == 0) format = *s;

        if (scenario == "list") {
            for (const auto& name : upfn::cli::scenario_names()) std::cout << name << "\n";
            return 0;
        }
        if (scenario.empty()) {
            std::cerr << "error: no scenario given (use --scenario or a config file)\n";
            return 2;
        }
        if (!upfn::cli::have_scenario(scenario)) {
            std::cerr << "error: unknown scenario '" << scenario << "'\n";
            return 2;
        }

        if (replications == 0 || (replications < 0 && app.count("--replications") > 0)) {
            std::cerr << "error: replications must be >= 1\n";
            return 2;
        }
        ctx.seed = seed;
        ctx.replications = replications > 0 ? replications : 1000;
        ctx.threads = threads;
        ctx.out_dir = out_dir;
        ctx.json = format == "json";
        std::filesystem::create_directories(out_dir);

        const int rc = upfn::cli::run_scenario(scenario, ctx);
        std::cout << "scenario " << scenario << ": " << (rc == 0 ? "pass" : "VIOLATION")
                  << "\n";
        return rc;
    } catch (const upfn::numeric_guard_error& e) {
        std::cerr << "numerical guard: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
