#include "psm/phase.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <limits>
#include <stdexcept>

#include "psm/energy.hpp"
#include "psm/inequalities.hpp"
#include "psm/io.hpp"
#include "psm/solver.hpp"
#include "psm/symmetry.hpp"

namespace psm {

namespace {

std::string fmt_g(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string fmt_list(const std::vector<double>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ",";
        out += fmt_g(xs[i]);
    }
    return out;
}

std::string problem_name(LocalSign s)
{
    switch (s) {
        case LocalSign::plus: return "p1";
        case LocalSign::minus: return "p2";
        case LocalSign::general_W: return "pw";
    }
    return "p1";
}

std::string iso_utc_now()
{
    const std::time_t t =
        std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool radial_range_ok(double p, double alpha)
{
    return p > 4.0 && alpha > (2.0 * p - 4.0) / (p - 4.0);
}

struct CellRecord {
    std::string id;
    double p = 0.0, alpha = 0.0, q = 0.0;
    double qbar = std::numeric_limits<double>::quiet_NaN();
    double qtilde = std::numeric_limits<double>::quiet_NaN();
    SolveOutcome outcome;
    bool solved = false;
    std::string error;
    double wall_seconds = 0.0;
};

CellRecord run_cell(const ScanSpec& spec, std::size_t index, double p, double alpha,
                    double q)
{
    CellRecord cell;
    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "cell_%04zu", index);
    cell.id = idbuf;
    cell.p = p;
    cell.alpha = alpha;
    cell.q = q;

    SolverOptions opt;
    opt.max_iters = spec.max_iters;
    opt.tol_grad = spec.tol_grad;
    opt.multistarts = spec.multistarts;
    opt.path_points = spec.path_points;
    opt.seed = spec.seed;

    ProblemParams params;
    params.alpha = alpha;
    params.p = p;
    params.q = q;
    params.local_sign = spec.problem;
    if (spec.problem == LocalSign::general_W) {
        params.w_c1 = 0.0;
        params.w_c2 = 1.0 / p;
    }

    const auto t0 = std::chrono::steady_clock::now();
    try {
        if (spec.problem == LocalSign::plus && radial_range_ok(p, alpha)) {
            cell.qbar = nonexistence_constants(alpha, p).qbar;
            cell.qtilde = find_q_tilde(params, RadialGrid(spec.radial_R, spec.radial_m),
                                       33);
        }
        switch (spec.problem) {
            case LocalSign::plus:
                cell.outcome = minimize_I_radial(
                    params, RadialGrid(spec.radial_R, spec.radial_m), opt);
                break;
            case LocalSign::minus:
                cell.outcome =
                    mountain_pass(params, 1, Grid2D(spec.grid_L, spec.grid_n), opt);
                break;
            case LocalSign::general_W: {
                const Grid2D g(spec.grid_L, spec.grid_n);
                const Field2D seed = Field2D::sample(
                    g, [](double x, double y) { return x * std::exp(-(x * x + y * y)); });
                cell.outcome = minimize_on_H(seed, params, nonlinearity_for(params),
                                             SymmetryClass::odd_even(), opt);
                break;
            }
        }
        cell.solved = true;
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    cell.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cell;
}

nlohmann::ordered_json cell_json(const CellRecord& c)
{
    nlohmann::ordered_json j;
    j["id"] = c.id;
    j["p"] = c.p;
    j["alpha"] = c.alpha;
    j["q"] = c.q;
    j["qbar"] = std::isnan(c.qbar) ? nlohmann::ordered_json(nullptr)
                                   : nlohmann::ordered_json(c.qbar);
    j["qtilde_est"] = std::isnan(c.qtilde) ? nlohmann::ordered_json(nullptr)
                                           : nlohmann::ordered_json(c.qtilde);
    if (!c.error.empty()) {
        j["error"] = c.error;
        j["classification"] = classification_name(Classification::trivial_collapse);
    } else {
        const SolveOutcome& o = c.outcome;
        j["classification"] = classification_name(o.classification);
        j["level"] = o.level;
        j["q_effective"] = o.q_effective;
        if (o.multiplier_lambda)
            j["multiplier_lambda"] = *o.multiplier_lambda;
        else
            j["multiplier_lambda"] = nullptr;
        j["residual_grad"] = o.residual_grad;
        j["residual_nehari"] = o.residual_nehari;
        j["residual_pohozaev"] = o.residual_pohozaev;
        j["iterations"] = o.iterations;
        j["converged"] = o.converged;
        j["sign_change"] = o.sign_change;
        j["solution_x_norm"] = o.solution_x_norm;
        j["solution_l2_norm"] = o.solution_l2_norm;
        j["start_norms"] = o.start_norms;
        j["anomaly"] = o.anomaly;
        j["field_file"] = "fields/" + c.id + ".psm2";
    }
    j["wall_seconds"] = c.wall_seconds;
    return j;
}

std::string csv_text(const std::vector<CellRecord>& cells)
{
    std::string out = "p,alpha,q,qbar,qtilde_est,classification,level,residual\n";
    for (const CellRecord& c : cells) {
        const std::string cls = c.error.empty()
                                    ? classification_name(c.outcome.classification)
                                    : "error";
        const double level = c.error.empty() ? c.outcome.level
                                             : std::numeric_limits<double>::quiet_NaN();
        const double resid = c.error.empty() ? c.outcome.residual_grad
                                             : std::numeric_limits<double>::quiet_NaN();
        out += fmt_g(c.p) + "," + fmt_g(c.alpha) + "," + fmt_g(c.q) + "," +
               fmt_g(c.qbar) + "," + fmt_g(c.qtilde) + "," + cls + "," + fmt_g(level) +
               "," + fmt_g(resid) + "\n";
    }
    return out;
}

int classification_code(const CellRecord& c)
{
    if (!c.error.empty()) return -1;
    return static_cast<int>(c.outcome.classification);
}

std::string thresholds_table(const std::vector<CellRecord>& cells)
{
    // one row per distinct (p, alpha), in first-seen order
    std::string out = "# p alpha qbar qtilde_est\n";
    std::vector<std::pair<double, double>> seen;
    for (const CellRecord& c : cells) {
        const std::pair<double, double> key{c.p, c.alpha};
        if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
        seen.push_back(key);
        out += fmt_g(c.p) + " " + fmt_g(c.alpha) + " " + fmt_g(c.qbar) + " " +
               fmt_g(c.qtilde) + "\n";
    }
    return out;
}

std::string classification_table(const std::vector<CellRecord>& cells)
{
    std::string out = "# p alpha q class level\n";
    for (const CellRecord& c : cells) {
        const double level = c.error.empty() ? c.outcome.level
                                             : std::numeric_limits<double>::quiet_NaN();
        out += fmt_g(c.p) + " " + fmt_g(c.alpha) + " " + fmt_g(c.q) + " " +
               std::to_string(classification_code(c)) + " " + fmt_g(level) + "\n";
    }
    return out;
}

} // namespace

void ScanSpec::validate() const
{
    if (p_values.empty() || alpha_values.empty() || q_values.empty())
        throw std::invalid_argument("scan: p, alpha and q lists must be nonempty");
    for (double p : p_values)
        if (!(p > 2.0)) throw std::invalid_argument("scan: every p must be > 2");
    for (double a : alpha_values)
        if (!(a > 0.0)) throw std::invalid_argument("scan: every alpha must be > 0");
    for (double q : q_values)
        if (!(q >= 0.0)) throw std::invalid_argument("scan: every q must be >= 0");
    if (max_iters < 1 || multistarts < 1 || path_points < 3)
        throw std::invalid_argument("scan: solver budget out of range");
    if (!(tol_grad > 0.0)) throw std::invalid_argument("scan: tol_grad must be > 0");
    Grid2D(grid_L, grid_n);     // validates
    RadialGrid(radial_R, radial_m);
    if (out_dir.empty()) throw std::invalid_argument("scan: output directory is empty");
}

std::string ScanSpec::canonical() const
{
    std::string out;
    out += "budget.max_iters=" + std::to_string(max_iters) + "\n";
    out += "budget.multistarts=" + std::to_string(multistarts) + "\n";
    out += "budget.path_points=" + std::to_string(path_points) + "\n";
    out += "geometry.grid_L=" + fmt_g(grid_L) + "\n";
    out += "geometry.grid_n=" + std::to_string(grid_n) + "\n";
    out += "geometry.radial_R=" + fmt_g(radial_R) + "\n";
    out += "geometry.radial_m=" + std::to_string(radial_m) + "\n";
    out += "problem=" + problem_name(problem) + "\n";
    out += "scan.alpha=" + fmt_list(alpha_values) + "\n";
    out += "scan.p=" + fmt_list(p_values) + "\n";
    out += "scan.q=" + fmt_list(q_values) + "\n";
    out += "seeds.rng=" + std::to_string(seed) + "\n";
    out += "tolerances.grad=" + fmt_g(tol_grad) + "\n";
    return out;
}

std::string ScanSpec::spec_hash() const { return sha256_hex(canonical()); }

ScanSpec scan_spec_from_config(const Config& cfg)
{
    ScanSpec spec;
    spec.p_values = cfg.scan_p.empty() ? std::vector<double>{cfg.p} : cfg.scan_p;
    spec.alpha_values =
        cfg.scan_alpha.empty() ? std::vector<double>{cfg.alpha} : cfg.scan_alpha;
    spec.q_values = cfg.scan_q.empty() ? std::vector<double>{cfg.q} : cfg.scan_q;
    spec.problem = cfg.local_sign();
    spec.max_iters = cfg.max_iters;
    spec.multistarts = cfg.multistarts;
    spec.path_points = cfg.path_points;
    spec.tol_grad = cfg.tol_grad;
    spec.seed = cfg.seed;
    spec.grid_n = cfg.grid_n;
    spec.grid_L = cfg.grid_L;
    spec.radial_m = cfg.radial_m;
    spec.radial_R = cfg.radial_R;
    spec.out_dir = cfg.out_dir;
    spec.config_echo = cfg.canonical();
    return spec;
}

RunManifest load_manifest(const std::filesystem::path& path)
{
    RunManifest m;
    try {
        m.doc = nlohmann::ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("manifest: not valid JSON: " + path.string() + ": " +
                                 e.what());
    }
    if (!m.doc.is_object() || !m.doc.contains("spec_hash") ||
        !m.doc["spec_hash"].is_string() || !m.doc.contains("cells"))
        throw std::runtime_error("manifest: missing spec_hash or cells: " +
                                 path.string());
    m.spec_hash = m.doc["spec_hash"].get<std::string>();
    m.reused = true;
    return m;
}

RunManifest run_scan(const ScanSpec& spec)
{
    spec.validate();
    const std::string hash = spec.spec_hash();
    const std::filesystem::path out(spec.out_dir);
    const std::filesystem::path manifest_path = out / "manifest.json";

    if (std::filesystem::exists(manifest_path)) {
        RunManifest existing = load_manifest(manifest_path);
        if (existing.spec_hash == hash) return existing; // idempotent: no work
    }

    const std::string started = iso_utc_now();
    std::vector<std::array<double, 3>> grid;
    for (double p : spec.p_values)
        for (double a : spec.alpha_values)
            for (double q : spec.q_values) grid.push_back({p, a, q});

    std::vector<CellRecord> cells(grid.size());
    const std::size_t ncells = grid.size();
#pragma omp parallel for schedule(dynamic) if (ncells > 1)
    for (std::size_t i = 0; i < ncells; ++i)
        cells[i] = run_cell(spec, i, grid[i][0], grid[i][1], grid[i][2]);

    // single-threaded assembly after the join barrier
    std::filesystem::create_directories(out / "fields");
    std::filesystem::create_directories(out / "plots");
    for (const CellRecord& c : cells) {
        if (!c.solved) continue;
        const std::filesystem::path f = out / "fields" / (c.id + ".psm2");
        if (c.outcome.is_radial)
            save_field(f, c.outcome.radial, "scan:" + c.id);
        else
            save_field(f, c.outcome.plane, "scan:" + c.id);
    }
    write_file(out / "scan.csv", csv_text(cells));
    write_file(out / "plots" / "thresholds.dat", thresholds_table(cells));
    write_file(out / "plots" / "classification.dat", classification_table(cells));

    RunManifest m;
    m.spec_hash = hash;
    nlohmann::ordered_json doc;
    doc["format"] = "psm-scan-manifest";
    doc["version"] = 1;
    doc["psm_version"] = kPsmVersion;
    doc["spec_hash"] = hash;
    doc["started_at"] = started;
    doc["finished_at"] = iso_utc_now();
    doc["spec"] = nlohmann::ordered_json::parse(R"({})");
    doc["spec"]["problem"] = problem_name(spec.problem);
    doc["spec"]["p_values"] = spec.p_values;
    doc["spec"]["alpha_values"] = spec.alpha_values;
    doc["spec"]["q_values"] = spec.q_values;
    doc["spec"]["max_iters"] = spec.max_iters;
    doc["spec"]["multistarts"] = spec.multistarts;
    doc["spec"]["path_points"] = spec.path_points;
    doc["spec"]["tol_grad"] = spec.tol_grad;
    doc["spec"]["seed"] = spec.seed;
    doc["spec"]["grid_n"] = spec.grid_n;
    doc["spec"]["grid_L"] = spec.grid_L;
    doc["spec"]["radial_m"] = spec.radial_m;
    doc["spec"]["radial_R"] = spec.radial_R;
    doc["config_echo"] = spec.config_echo;
    nlohmann::ordered_json constants = nlohmann::ordered_json::array();
    {
        std::vector<std::pair<double, double>> seen;
        for (const CellRecord& c : cells) {
            const std::pair<double, double> key{c.p, c.alpha};
            if (std::find(seen.begin(), seen.end(), key) != seen.end()) continue;
            seen.push_back(key);
            nlohmann::ordered_json row;
            row["p"] = c.p;
            row["alpha"] = c.alpha;
            row["qbar"] = std::isnan(c.qbar) ? nlohmann::ordered_json(nullptr)
                                             : nlohmann::ordered_json(c.qbar);
            row["qtilde_est"] = std::isnan(c.qtilde)
                                    ? nlohmann::ordered_json(nullptr)
                                    : nlohmann::ordered_json(c.qtilde);
            constants.push_back(std::move(row));
        }
    }
    doc["constants"] = std::move(constants);
    nlohmann::ordered_json jcells = nlohmann::ordered_json::array();
    for (const CellRecord& c : cells) jcells.push_back(cell_json(c));
    doc["cells"] = std::move(jcells);
    m.doc = std::move(doc);
    write_file(manifest_path, m.doc.dump(2) + "\n");
    return m;
}

nlohmann::ordered_json solve_manifest(const Config& cfg, double wall_seconds)
{
    nlohmann::ordered_json j;
    j["format"] = "psm-run-manifest";
    j["version"] = 1;
    j["psm_version"] = kPsmVersion;
    j["params"] = {{"problem", cfg.problem},
                   {"alpha", cfg.alpha},
                   {"p", cfg.p},
                   {"q", cfg.q}};
    j["grid"] = {{"n", cfg.grid_n},
                 {"L", cfg.grid_L},
                 {"radial_m", cfg.radial_m},
                 {"radial_R", cfg.radial_R}};
    j["symmetry"] = cfg.symmetry;
    j["seed"] = cfg.seed;
    j["tolerances"] = {{"grad", cfg.tol_grad}};
    j["config_hash"] = sha256_hex(cfg.canonical());
    j["config_echo"] = cfg.canonical();
    j["wall_seconds"] = wall_seconds;
    return j;
}

} // namespace psm
