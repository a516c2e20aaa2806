// Copyright 2025 The gwstats Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "gwstats/cli/commands.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw gwstats::cli::ConfigError("cannot open '" + path + "'", "", 0, 0);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"gwstats: detector statistics of Gaussian gravitational-wave states"};
    app.require_subcommand(1, 1);
    std::string config_path, out_path, format;
    int threads = 1;
    std::uint64_t seed = 12345;
    for (const char* name : {"probs", "g2", "tomo", "oracle-check", "physical"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "scenario JSON")->required();
        sub->add_option("--out", out_path, "output file (default stdout)");
        sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
        sub->add_option("--seed", seed, "noise seed");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : gwstats::cli::kConfigError;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    gwstats::cli::ScenarioConfig cfg;
    try {
        cfg = gwstats::cli::parse_config(slurp(config_path));
    } catch (const gwstats::cli::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return gwstats::cli::kConfigError;
    }
    gwstats::cli::Options opt;
    opt.format = !format.empty() ? format : cfg.output.format;
    opt.threads = threads;
    opt.seed = seed;
    if (out_path.empty()) out_path = cfg.output.path;

    const auto res = gwstats::cli::run_command(cmd, cfg, opt);
    if (res.exit_code == gwstats::cli::kConfigError) {
        std::cerr << config_path << ": " << res.text;
        return res.exit_code;
    }
    if (out_path.empty()) {
        std::cout << res.text;
    } else {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write '" << out_path << "'\n";
            return gwstats::cli::kConfigError;
        }
        out << res.text;
    }
    if (res.exit_code != 0 && !out_path.empty()) std::cerr << "numerical checks failed\n";
    return res.exit_code;
}
