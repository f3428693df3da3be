#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "psm/config.hpp"
#include "psm/grid.hpp"

namespace psm {

inline constexpr const char* kPsmVersion = "1.0.0";

// A parameter sweep over (p, alpha, q) cells for one problem family. Lists
// come from the scan.* config keys (singletons fall back to the point keys),
// the budget and geometry from the solver/grid keys. canonical() renders the
// solve-relevant fields (not the output directory) as sorted key=value text;
// its SHA-256 is the spec hash that makes completed scans idempotent.
struct ScanSpec {
    std::vector<double> p_values, alpha_values, q_values;
    LocalSign problem = LocalSign::plus;
    int max_iters = 5000;
    int multistarts = 1;
    int path_points = 9;
    double tol_grad = 1e-6;
    std::uint64_t seed = 0x5EEDF1E1DULL;
    int grid_n = 64;
    double grid_L = 8.0;
    int radial_m = 1024;
    double radial_R = 12.0;
    std::string out_dir = "out";
    std::string config_echo; // canonical rendering of the merged run config

    void validate() const; // throws std::invalid_argument
    std::string canonical() const;
    std::string spec_hash() const;
};

ScanSpec scan_spec_from_config(const Config& cfg);

// Provenance record for a completed scan. `doc` is the full manifest
// document: spec hash, the echoed config, per-cell outcome summaries, the
// constants table (qbar, qtilde_est per (p, alpha)), timestamps, versions.
// `reused` marks a manifest loaded from disk without re-solving.
struct RunManifest {
    std::string spec_hash;
    bool reused = false;
    nlohmann::ordered_json doc;
};

// Runs every cell (bounded worker pool, results merged in input order),
// then writes <out>/manifest.json, <out>/scan.csv, <out>/fields/<id>.psm2
// and <out>/plots/*.dat. Per-cell failures are recorded in the manifest and
// never abort the scan. When <out>/manifest.json already exists with the
// same spec hash, no solve runs and no file is touched.
RunManifest run_scan(const ScanSpec& spec);

// Reads a manifest back; classifications are reproduced from the document
// without re-solving. Throws std::runtime_error on malformed input.
RunManifest load_manifest(const std::filesystem::path& path);

// Provenance block for a single solver invocation (params, grid, seed,
// tolerances, content hash of the merged config, wall time); the CLI embeds
// it next to the outcome JSON.
nlohmann::ordered_json solve_manifest(const Config& cfg, double wall_seconds);

} // namespace psm
