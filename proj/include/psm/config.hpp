#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "psm/grid.hpp"

namespace psm {

// Flat key=value run configuration. Every key has a default; unknown keys
// are rejected with the offending line. Precedence: defaults < config file
// < PSM_SEED environment variable < command-line flags (the CLI applies the
// last layer). List values are comma-separated.
struct Config {
    std::string problem = "p1"; // p1 | p2 | pw
    double alpha = 6.0;
    double p = 6.0;
    double q = 1.0;
    int grid_n = 64;
    double grid_L = 8.0;
    int radial_m = 1024;
    double radial_R = 12.0;
    std::string symmetry = "odd_even"; // none | radial | odd_even | dihedral:k
    double tol_grad = 1e-6;
    std::uint64_t seed = 0x5EEDF1E1DULL;
    int max_iters = 5000;
    int multistarts = 1;
    int path_points = 9;
    std::vector<double> scan_p;
    std::vector<double> scan_alpha;
    std::vector<double> scan_q;
    std::string out_dir = "out";

    // Maps this->problem to the local-term sign convention.
    LocalSign local_sign() const;
    SymmetryClass symmetry_class() const; // parses this->symmetry
    ProblemParams problem_params() const;

    // Canonical key=value rendering (sorted keys), used for echoing the
    // merged configuration into manifests and for content hashing.
    std::string canonical() const;
    std::string to_json() const;
};

// Raised with a line/key diagnostic on malformed input; the CLI maps it to
// exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parse "key = value" lines ('#' comments, blank lines allowed) on top of
// the given base; returns the merged configuration.
Config parse_config_text(const std::string& text, Config base = {});
Config load_config_file(const std::filesystem::path& path, Config base = {});

// Applies the PSM_SEED environment variable (when set) on top of cfg.
void apply_env_seed(Config& cfg);

// Sets one key (same names as the file keys); throws ConfigError on unknown
// key or unparsable value. The CLI funnels --set options through this.
void set_config_key(Config& cfg, const std::string& key, const std::string& value);

std::vector<double> parse_double_list(const std::string& s); // comma-separated

} // namespace psm
