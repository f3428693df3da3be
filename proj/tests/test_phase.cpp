#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "psm/io.hpp"
#include "psm/phase.hpp"

using namespace psm;
namespace fs = std::filesystem;

namespace {

double rel(double a, double b)
{
    return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)});
}

ScanSpec tiny_spec(const fs::path& out)
{
    ScanSpec spec;
    spec.p_values = {6.0};
    spec.alpha_values = {5.0};
    spec.q_values = {1.6e-4, 1001.39008}; // brackets both thresholds
    spec.problem = LocalSign::plus;
    spec.grid_n = 32;
    spec.grid_L = 6.0;
    spec.radial_m = 256;
    spec.radial_R = 3.0;
    spec.multistarts = 1;
    spec.out_dir = out.string();
    return spec;
}

} // namespace

TEST_CASE("scan specs hash canonically")
{
    const ScanSpec a = tiny_spec("out_a");
    CHECK(a.spec_hash() == a.spec_hash());
    CHECK(a.spec_hash() == sha256_hex(a.canonical()));

    // The output directory is not solve-relevant.
    ScanSpec b = a;
    b.out_dir = "somewhere_else";
    CHECK(b.spec_hash() == a.spec_hash());

    ScanSpec c = a;
    c.q_values = {1.6e-4, 1002.0};
    CHECK(c.spec_hash() != a.spec_hash());

    ScanSpec empty = a;
    empty.p_values.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
}

TEST_CASE("scan specs come from configs with singleton fallbacks")
{
    Config cfg;
    cfg.scan_q = {1.0, 2.0};
    cfg.problem = "p2";
    const ScanSpec spec = scan_spec_from_config(cfg);
    CHECK(spec.problem == LocalSign::minus);
    REQUIRE(spec.q_values.size() == 2);
    CHECK(spec.q_values[1] == 2.0);
    REQUIRE(spec.p_values.size() == 1);
    CHECK(spec.p_values[0] == cfg.p);
    REQUIRE(spec.alpha_values.size() == 1);
    CHECK(spec.alpha_values[0] == cfg.alpha);
    CHECK(spec.grid_n == cfg.grid_n);
    CHECK(spec.radial_m == cfg.radial_m);
}

TEST_CASE("a two-cell scan classifies both sides of the threshold and is idempotent")
{
    const fs::path out = fs::temp_directory_path() / "psm_phase_test";
    fs::remove_all(out);
    const ScanSpec spec = tiny_spec(out);

    const RunManifest run = run_scan(spec);
    CHECK_FALSE(run.reused);
    CHECK(run.spec_hash == spec.spec_hash());

    REQUIRE(run.doc.contains("cells"));
    const auto& cells = run.doc["cells"];
    REQUIRE(cells.size() == 2);

    // Below the nonexistence threshold: clean collapse.
    CHECK(cells[0]["q"].get<double>() == 1.6e-4);
    CHECK(cells[0]["classification"] == "trivial_collapse");
    CHECK(cells[0]["converged"].get<bool>());
    CHECK(cells[0]["anomaly"].get<std::string>().empty());
    CHECK(rel(cells[0]["qbar"].get<double>(), 3.2759041726513309e-4) < 1e-9);

    // Far above the trial-family threshold: a negative-level minimizer.
    CHECK(cells[1]["q"].get<double>() == 1001.39008);
    CHECK(cells[1]["classification"] == "negative_level_minimizer");
    CHECK(cells[1]["converged"].get<bool>());
    CHECK(cells[1]["level"].get<double>() < 0.0);
    CHECK(cells[1].contains("anomaly"));

    // The thresholds are coherent: qbar <= qtilde_est <= q_high.
    const double qbar = cells[0]["qbar"].get<double>();
    const double qtilde = cells[0]["qtilde_est"].get<double>();
    CHECK(qbar <= qtilde);
    CHECK(qtilde <= 1001.39008);

    // Output layout.
    REQUIRE(fs::exists(out / "manifest.json"));
    REQUIRE(fs::exists(out / "scan.csv"));
    CHECK(fs::exists(out / "plots" / "classification.dat"));
    CHECK(fs::exists(out / "plots" / "thresholds.dat"));

    const std::string csv = read_file(out / "scan.csv");
    CHECK(csv.rfind("p,alpha,q,qbar,qtilde_est,classification,level,residual\n", 0) == 0);

    // Every recorded field file loads.
    for (const auto& cell : cells) {
        REQUIRE(cell.contains("field_file"));
        const LoadedField f = load_field(out / cell["field_file"].get<std::string>());
        CHECK(f.is_radial);
    }

    // Re-running the same spec touches nothing and reports reuse.
    const std::string manifest_before = read_file(out / "manifest.json");
    const RunManifest again = run_scan(spec);
    CHECK(again.reused);
    CHECK(again.spec_hash == run.spec_hash);
    CHECK(read_file(out / "manifest.json") == manifest_before);

    // The manifest reads back with the same content.
    const RunManifest loaded = load_manifest(out / "manifest.json");
    CHECK(loaded.spec_hash == run.spec_hash);
    CHECK(loaded.doc == run.doc);

    CHECK_THROWS_AS((void)load_manifest(out / "scan.csv"), std::runtime_error);
}
