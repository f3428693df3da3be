// Command-line front end: radial/nonradial/mountain-pass solvers, potential
// evaluation of stored fields, the verification suite, the constants table,
// and (p, alpha, q) scans. Outcome and provenance JSON go to stdout; human
// diagnostics go to stderr. Exit codes: 0 success, 1 solver non-convergence
// or failed verification, 2 invalid input.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include "psm/config.hpp"
#include "psm/energy.hpp"
#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"
#include "psm/inequalities.hpp"
#include "psm/io.hpp"
#include "psm/logkernel.hpp"
#include "psm/phase.hpp"
#include "psm/solver.hpp"
#include "psm/symmetry.hpp"

namespace {

using psm::Config;

struct CliState {
    std::string config_path;
    std::vector<std::string> sets;                           // KEY=VALUE overrides
    std::vector<std::pair<std::string, std::string>> flags;  // named-flag overrides
    int jobs = 0;
};

Config build_config(const CliState& st)
{
    Config cfg;
    if (!st.config_path.empty()) cfg = psm::load_config_file(st.config_path, cfg);
    psm::apply_env_seed(cfg);
    for (const std::string& s : st.sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw psm::ConfigError("--set expects KEY=VALUE, got: " + s);
        psm::set_config_key(cfg, s.substr(0, eq), s.substr(eq + 1));
    }
    for (const auto& [key, value] : st.flags) psm::set_config_key(cfg, key, value);
    return cfg;
}

psm::SolverOptions solver_options(const Config& cfg)
{
    psm::SolverOptions opt;
    opt.max_iters = cfg.max_iters;
    opt.tol_grad = cfg.tol_grad;
    opt.multistarts = cfg.multistarts;
    opt.path_points = cfg.path_points;
    opt.seed = cfg.seed;
    return opt;
}

void register_config_flags(CLI::App* cmd, CliState& st)
{
    static const struct {
        const char* flag;
        const char* key;
        const char* help;
    } defs[] = {
        {"--problem", "problem", "problem family: p1 | p2 | pw"},
        {"--alpha", "alpha", "confinement exponent alpha > 0"},
        {"--p", "p", "local-term exponent p > 2"},
        {"--q", "q", "coupling q >= 0"},
        {"--grid-n", "grid.n", "plane grid points per side (even, >= 8)"},
        {"--grid-L", "grid.L", "plane half-width"},
        {"--radial-m", "radial.m", "radial samples (>= 16)"},
        {"--radial-R", "radial.R", "radial outer radius"},
        {"--symmetry", "symmetry", "none | radial | odd_even | dihedral:k"},
        {"--tol-grad", "tolerances.grad", "gradient tolerance"},
        {"--seed", "seeds.rng", "RNG seed"},
        {"--max-iters", "solver.max_iters", "iteration budget"},
        {"--multistarts", "solver.multistarts", "random restarts"},
        {"--path-points", "mp.path_points", "mountain-pass path nodes"},
        {"--scan-p", "scan.p", "comma-separated p list"},
        {"--scan-alpha", "scan.alpha", "comma-separated alpha list"},
        {"--scan-q", "scan.q", "comma-separated q list"},
        {"--out-dir", "out.dir", "scan output directory"},
    };
    for (const auto& d : defs) {
        const std::string key = d.key;
        cmd->add_option_function<std::string>(
            d.flag, [&st, key](const std::string& v) { st.flags.emplace_back(key, v); },
            d.help);
    }
}

void emit(const psm::SolveOutcome& out, const Config& cfg, double wall,
          const std::string& save_path, const std::string& provenance)
{
    if (!save_path.empty()) {
        if (out.is_radial)
            psm::save_field(save_path, out.radial, provenance);
        else
            psm::save_field(save_path, out.plane, provenance);
    }
    nlohmann::ordered_json root;
    root["outcome"] = nlohmann::ordered_json::parse(out.to_json());
    root["manifest"] = psm::solve_manifest(cfg, wall);
    if (!save_path.empty()) root["field_file"] = save_path;
    std::cout << root.dump(2) << "\n";
}

int cmd_solve_radial(const CliState& st, const std::string& save_path)
{
    const Config cfg = build_config(st);
    psm::ProblemParams params = cfg.problem_params();
    params.local_sign = psm::LocalSign::plus; // the radial route minimizes I
    const psm::RadialGrid g(cfg.radial_R, cfg.radial_m);
    const auto t0 = std::chrono::steady_clock::now();
    const psm::SolveOutcome out = psm::minimize_I_radial(params, g, solver_options(cfg));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(out, cfg, wall, save_path, "solve-radial");
    return out.converged ? 0 : 1;
}

int cmd_solve_nonradial(const CliState& st, const std::string& save_path)
{
    const Config cfg = build_config(st);
    const psm::ProblemParams params = cfg.problem_params();
    if (params.local_sign == psm::LocalSign::minus)
        throw psm::ConfigError(
            "solve-nonradial minimizes the uncoupled functional; use problem p1 or pw");
    const psm::Grid2D g(cfg.grid_L, cfg.grid_n);
    const psm::Field2D seed = psm::Field2D::sample(
        g, [](double x, double y) { return x * std::exp(-(x * x + y * y)); });
    const auto t0 = std::chrono::steady_clock::now();
    const psm::SolveOutcome out =
        psm::minimize_on_H(seed, params, psm::nonlinearity_for(params),
                           cfg.symmetry_class(), solver_options(cfg));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(out, cfg, wall, save_path, "solve-nonradial");
    return out.converged ? 0 : 1;
}

int cmd_solve_mp(const CliState& st, const std::string& save_path, int k_opt)
{
    const Config cfg = build_config(st);
    psm::ProblemParams params = cfg.problem_params();
    params.local_sign = psm::LocalSign::minus; // saddle geometry needs the minus sign
    int k = k_opt;
    if (k <= 0) {
        const psm::SymmetryClass cls = cfg.symmetry_class();
        k = cls.kind == psm::SymmetryKind::dihedral ? cls.k : 1;
    }
    const psm::Grid2D g(cfg.grid_L, cfg.grid_n);
    const auto t0 = std::chrono::steady_clock::now();
    const psm::SolveOutcome out = psm::mountain_pass(params, k, g, solver_options(cfg));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit(out, cfg, wall, save_path, "solve-mp");
    return out.converged ? 0 : 1;
}

int cmd_potential(const CliState& st, const std::string& in_path, std::string out_path)
{
    const Config cfg = build_config(st);
    (void)cfg;
    const psm::LoadedField lf = psm::load_field(in_path);
    if (out_path.empty()) out_path = in_path + ".phi.psm2";
    nlohmann::ordered_json root;
    root["input"] = in_path;
    root["output"] = out_path;
    if (lf.is_radial) {
        const psm::RadialField phi = psm::radial_potential(lf.radial);
        psm::save_field(out_path, phi, "potential");
        root["geometry"] = "radial";
        root["v0"] = psm::v0(lf.radial);
    } else {
        const auto tbl = psm::kernel_table(lf.plane.grid);
        const psm::Field2D phi = psm::newtonian_potential(lf.plane, *tbl);
        psm::save_field(out_path, phi, "potential");
        root["geometry"] = "plane";
        root["v0"] = psm::v0(lf.plane, *tbl);
    }
    std::cout << root.dump(2) << "\n";
    return 0;
}

int cmd_constants(const CliState& st)
{
    const Config cfg = build_config(st);
    const psm::NonexistenceConstants c = psm::nonexistence_constants(cfg.alpha, cfg.p);
    std::cout << psm::constants_csv_header() << "\n" << psm::constants_csv_row(c) << "\n";
    return 0;
}

int cmd_scan(const CliState& st)
{
    const Config cfg = build_config(st);
    const psm::RunManifest m = psm::run_scan(psm::scan_spec_from_config(cfg));
    std::cout << m.doc.dump(2) << "\n";
    if (m.reused) std::cerr << "scan: manifest up to date, no solves performed\n";
    return 0;
}

// ---------------------------------------------------------------------------
// verify: inequality and identity suites over the shared field library

struct VerifyRow {
    std::string name;
    long cases = 0;
    long violations = 0;
    double worst = 0.0; // smallest slack (bounds) or largest error (identities)
    std::string note;
};

int cmd_verify(const CliState& st, int nfields)
{
    const Config cfg = build_config(st);
    std::vector<VerifyRow> rows;

    const psm::Grid2D g(8.0, 48);
    const psm::RadialGrid rg(12.0, 512);
    const std::vector<psm::Field2D> lib = psm::field_library(g, nfields);
    const std::vector<psm::RadialField> rlib = psm::radial_field_library(rg, nfields);

    { // weighted log-moment bound
        VerifyRow r;
        r.name = "log-moment-bound";
        psm::LemmaParams lp;
        lp.alpha = cfg.alpha;
        lp.p = cfg.p;
        lp.beta = cfg.p > 4.0 ? (2.0 * cfg.p - 4.0) / (cfg.p - 4.0) : 4.0;
        if (lp.admissible()) {
            r.worst = std::numeric_limits<double>::infinity();
            for (const psm::Field2D& u : lib) {
                const psm::BoundCheck c = psm::verify_lemma(u, lp);
                ++r.cases;
                if (!c.satisfied()) ++r.violations;
                r.worst = std::min(r.worst, c.slack());
            }
        } else {
            r.note = "inadmissible (alpha, p, beta); skipped";
        }
        rows.push_back(r);
    }
    { // radial decay bound
        VerifyRow r;
        r.name = "radial-decay-bound";
        r.worst = std::numeric_limits<double>::infinity();
        for (const psm::RadialField& u : rlib) {
            const psm::BoundCheck c = psm::strauss_bound(u, cfg.alpha);
            ++r.cases;
            if (!c.satisfied()) ++r.violations;
            r.worst = std::min(r.worst, c.slack());
        }
        rows.push_back(r);
    }
    { // interaction-energy split consistency
        VerifyRow r;
        r.name = "v-split-consistency";
        const auto tbl = psm::kernel_table(g);
        for (const psm::Field2D& u : lib) {
            ++r.cases;
            try {
                const psm::V0Split s = psm::v_split(u, *tbl);
                r.worst = std::max(r.worst, s.consistency);
            } catch (const std::exception&) {
                ++r.violations;
            }
        }
        rows.push_back(r);
    }
    { // Lp interpolation bound
        VerifyRow r;
        r.name = "lp-interpolation-bound";
        r.worst = std::numeric_limits<double>::infinity();
        for (const psm::Field2D& u : lib) {
            const auto [lhs, rhs] = psm::gagliardo_nirenberg_check(u, cfg.p);
            ++r.cases;
            if (lhs > rhs * (1.0 + 1e-12)) ++r.violations;
            r.worst = std::min(r.worst, rhs - lhs);
        }
        rows.push_back(r);
    }
    { // quartic dilation identity for the interaction energy
        VerifyRow r;
        r.name = "dilation-identity";
        const auto tbl = psm::kernel_table(g);
        const psm::Field2D u = psm::Field2D::sample(
            g, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)); });
        const double v0u = psm::v0(u, *tbl);
        const double l2u = psm::l2_norm_sq(u);
        for (double t : {0.5, 2.0}) {
            const psm::DilateResult d = psm::resample_dilate(u, t, 0.0);
            const double direct = psm::v0(d.field, *tbl);
            const double predicted = psm::dilated_v0(t, v0u, l2u);
            const double err = std::fabs(direct - predicted) /
                               std::max(1.0, std::fabs(predicted));
            ++r.cases;
            if (err > 1e-3) ++r.violations;
            r.worst = std::max(r.worst, err);
        }
        rows.push_back(r);
    }
    { // <grad, u> pairing identity
        VerifyRow r;
        r.name = "gradient-pairing";
        const auto tbl = psm::kernel_table(g);
        const psm::ProblemParams params = cfg.problem_params();
        for (const psm::Field2D& u : lib) {
            const psm::Field2D gr = psm::grad_I(u, params, *tbl);
            const double lhs = psm::dot_l2(gr, u);
            const double rhs = psm::nehari(u, params, *tbl);
            const double err = std::fabs(lhs - rhs) / std::max(1.0, std::fabs(rhs));
            ++r.cases;
            if (err > 1e-10) ++r.violations;
            r.worst = std::max(r.worst, err);
        }
        rows.push_back(r);
    }

    bool all_pass = true;
    std::printf("%-24s %8s %11s %14s  %s\n", "check", "cases", "violations", "worst",
                "status");
    for (const VerifyRow& r : rows) {
        const bool pass = r.violations == 0;
        all_pass = all_pass && pass;
        std::printf("%-24s %8ld %11ld %14.6g  %s%s%s\n", r.name.c_str(), r.cases,
                    r.violations, r.worst, pass ? "PASS" : "FAIL",
                    r.note.empty() ? "" : "  # ", r.note.c_str());
    }
    return all_pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"planar log-Coulomb Schrodinger system: solvers, checks, scans"};
    app.require_subcommand(1);
    CliState st;
    app.add_option("--config", st.config_path, "key=value configuration file");
    app.add_option("--set", st.sets, "override KEY=VALUE (repeatable)");
    app.add_option("--jobs", st.jobs, "worker threads (default: logical cores)");
    register_config_flags(&app, st);

    std::string save_path, in_path, out_path;
    int k_opt = 0;
    int nfields = 100;

    CLI::App* solve_radial =
        app.add_subcommand("solve-radial", "radial descent on the coupled functional");
    solve_radial->add_option("--save-field", save_path, "write the solution field here");
    solve_radial->fallthrough();

    CLI::App* solve_nonradial = app.add_subcommand(
        "solve-nonradial", "constrained minimization on the unit interaction sphere");
    solve_nonradial->add_option("--save-field", save_path,
                                "write the solution field here");
    solve_nonradial->fallthrough();

    CLI::App* solve_mp =
        app.add_subcommand("solve-mp", "dihedral mountain-pass saddle search");
    solve_mp->add_option("--save-field", save_path, "write the solution field here");
    solve_mp->add_option("--k", k_opt, "dihedral order (default: from symmetry)");
    solve_mp->fallthrough();

    CLI::App* potential =
        app.add_subcommand("potential", "log-kernel potential of a stored field");
    potential->add_option("--in", in_path, "input field file")->required();
    potential->add_option("--out", out_path, "output field file (default <in>.phi.psm2)");
    potential->fallthrough();

    CLI::App* verify =
        app.add_subcommand("verify", "inequality and identity suites (pass/fail table)");
    verify->add_option("--fields", nfields, "library size per suite (default 100)");
    verify->fallthrough();

    CLI::App* constants =
        app.add_subcommand("constants", "nonexistence threshold constants as CSV");
    constants->fallthrough();

    CLI::App* scan = app.add_subcommand("scan", "run a (p, alpha, q) scan");
    scan->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (st.jobs > 0) omp_set_num_threads(st.jobs);

    try {
        if (solve_radial->parsed()) return cmd_solve_radial(st, save_path);
        if (solve_nonradial->parsed()) return cmd_solve_nonradial(st, save_path);
        if (solve_mp->parsed()) return cmd_solve_mp(st, save_path, k_opt);
        if (potential->parsed()) return cmd_potential(st, in_path, out_path);
        if (verify->parsed()) return cmd_verify(st, nfields);
        if (constants->parsed()) return cmd_constants(st);
        if (scan->parsed()) return cmd_scan(st);
    } catch (const psm::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
