#pragma once

#include <string>
#include <vector>

#include "kolmo/config.hpp"

namespace kolmo {

struct RunResult {
    int exit_code = 0;
    std::vector<std::string> artifacts;  // paths relative to the output directory
    std::string manifest_path;
};

/// Execute one subcommand pipeline (sample | simulate | resolve | solve |
/// invariant | verify) into `outdir`, writing artifacts plus manifest.json.
/// The KOLMO_OUT_DIR environment variable overrides `outdir` when set.
RunResult run_subcommand(const std::string& subcommand, const Config& cfg,
                         const std::string& outdir);

/// Re-execute the run recorded in a manifest with the recorded seeds and
/// compare every artifact bitwise. Returns 0 on an exact match; prints a
/// diff summary and returns 1 otherwise.
int reproduce(const std::string& manifest_path);

/// Shared helpers for building the configured objects.
CompositePotential potential_from_config(const Config& cfg);
BasisSpec basis_from_config(const Config& cfg);

}  // namespace kolmo
