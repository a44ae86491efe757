#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace upfn::cli {

struct ScenarioContext {
    std::uint64_t seed = 1;
    long replications = 1000;
    int threads = 0;
    std::string out_dir = ".";
    bool json = false;
    std::map<std::string, std::string> cfg;

    double num(const std::string& key, double fallback) const;
    long integer(const std::string& key, long fallback) const;
    std::vector<double> list(const std::string& key, const std::string& fallback) const;
};

std::vector<std::string> scenario_names();
bool have_scenario(const std::string& name);

// 0: all inequalities pass, 1: a violation was observed.
int run_scenario(const std::string& name, const ScenarioContext& ctx);

}  // namespace upfn::cli
