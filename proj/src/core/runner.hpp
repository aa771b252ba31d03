#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"

namespace sns {

struct RunOverrides {
    std::optional<uint64_t> seed;
    std::optional<std::string> output_dir;
    int threads = 0;
};

// Execute a subcommand (simulate | ito-check | converge | scatter | sweep |
// transforms | exponents), writing artifacts under the output directory.
// Returns the CLI exit code: 0 ok, 2 config, 3 blow-up, 4 consistency, 1 other;
// `message` carries human-readable output (exponent table, error text).
int run_subcommand(const std::string& subcommand, RunConfig cfg, const RunOverrides& ov,
                   std::string& message);

// Same but loading the config from a file first.
int run_subcommand_file(const std::string& subcommand, const std::string& config_path,
                        const RunOverrides& ov, std::string& message);

std::string format_exponent_table(int d, double alpha, int lambda);

} // namespace sns
