#include "psm/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "psm/io.hpp"

namespace psm {

LocalSign Config::local_sign() const
{
    if (problem == "p1") return LocalSign::plus;
    if (problem == "p2") return LocalSign::minus;
    if (problem == "pw") return LocalSign::general_W;
    throw ConfigError("config: problem must be one of p1, p2, pw (got '" + problem + "')");
}

SymmetryClass Config::symmetry_class() const
{
    if (symmetry == "none") return SymmetryClass::none();
    if (symmetry == "radial") return SymmetryClass::radial();
    if (symmetry == "odd_even") return SymmetryClass::odd_even();
    if (symmetry.rfind("dihedral:", 0) == 0) {
        try {
            return SymmetryClass::dihedral(std::stoi(symmetry.substr(9)));
        } catch (const std::exception&) {
            throw ConfigError("config: bad dihedral order in symmetry '" + symmetry + "'");
        }
    }
    throw ConfigError("config: symmetry must be none, radial, odd_even, or dihedral:k");
}

ProblemParams Config::problem_params() const
{
    ProblemParams pp;
    pp.alpha = alpha;
    pp.p = p;
    pp.q = q;
    pp.local_sign = local_sign();
    if (pp.local_sign == LocalSign::general_W) {
        pp.w_c1 = 0.0;
        pp.w_c2 = 1.0 / p; // quartic-style |s|^p/p unless overridden in code
    }
    pp.validate();
    return pp;
}

namespace {

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

std::string fmt(const std::vector<double>& xs)
{
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ',';
        s += fmt(xs[i]);
    }
    return s;
}

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v)
{
    std::size_t pos = 0;
    double x = 0.0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': not a number: '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config: key '" + key + "': trailing junk in '" + v + "'");
    return x;
}

int parse_int(const std::string& key, const std::string& v)
{
    const double x = parse_double(key, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("config: key '" + key + "': expected an integer, got '" + v + "'");
    return i;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        const std::uint64_t x = std::stoull(v, &pos, 0);
        if (pos != v.size()) throw std::invalid_argument("junk");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "': expected an unsigned integer, got '" +
                          v + "'");
    }
}

} // namespace

std::vector<double> parse_double_list(const std::string& s)
{
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError("config: empty entry in list '" + s + "'");
        out.push_back(parse_double("list", item));
    }
    return out;
}

void set_config_key(Config& cfg, const std::string& key, const std::string& value)
{
    if (key == "problem") cfg.problem = value;
    else if (key == "alpha") cfg.alpha = parse_double(key, value);
    else if (key == "p") cfg.p = parse_double(key, value);
    else if (key == "q") cfg.q = parse_double(key, value);
    else if (key == "grid.n") cfg.grid_n = parse_int(key, value);
    else if (key == "grid.L") cfg.grid_L = parse_double(key, value);
    else if (key == "radial.m") cfg.radial_m = parse_int(key, value);
    else if (key == "radial.R") cfg.radial_R = parse_double(key, value);
    else if (key == "symmetry") cfg.symmetry = value;
    else if (key == "tolerances.grad") cfg.tol_grad = parse_double(key, value);
    else if (key == "seeds.rng") cfg.seed = parse_u64(key, value);
    else if (key == "solver.max_iters") cfg.max_iters = parse_int(key, value);
    else if (key == "solver.multistarts") cfg.multistarts = parse_int(key, value);
    else if (key == "mp.path_points") cfg.path_points = parse_int(key, value);
    else if (key == "scan.p") cfg.scan_p = parse_double_list(value);
    else if (key == "scan.alpha") cfg.scan_alpha = parse_double_list(value);
    else if (key == "scan.q") cfg.scan_q = parse_double_list(value);
    else if (key == "out.dir") cfg.out_dir = value;
    else throw ConfigError("config: unknown key '" + key + "'");
}

Config parse_config_text(const std::string& text, Config base)
{
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: line " + std::to_string(lineno) +
                              ": expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            set_config_key(base, key, value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return base;
}

Config load_config_file(const std::filesystem::path& path, Config base)
{
    return parse_config_text(read_file(path), std::move(base));
}

void apply_env_seed(Config& cfg)
{
    if (const char* env = std::getenv("PSM_SEED"))
        cfg.seed = parse_u64("PSM_SEED", env);
}

std::string Config::canonical() const
{
    std::ostringstream os;
    os << "alpha=" << fmt(alpha) << '\n'
       << "grid.L=" << fmt(grid_L) << '\n'
       << "grid.n=" << grid_n << '\n'
       << "mp.path_points=" << path_points << '\n'
       << "out.dir=" << out_dir << '\n'
       << "p=" << fmt(p) << '\n'
       << "problem=" << problem << '\n'
       << "q=" << fmt(q) << '\n'
       << "radial.R=" << fmt(radial_R) << '\n'
       << "radial.m=" << radial_m << '\n'
       << "scan.alpha=" << fmt(scan_alpha) << '\n'
       << "scan.p=" << fmt(scan_p) << '\n'
       << "scan.q=" << fmt(scan_q) << '\n'
       << "seeds.rng=" << seed << '\n'
       << "solver.max_iters=" << max_iters << '\n'
       << "solver.multistarts=" << multistarts << '\n'
       << "symmetry=" << symmetry << '\n'
       << "tolerances.grad=" << fmt(tol_grad) << '\n';
    return os.str();
}

std::string Config::to_json() const
{
    nlohmann::ordered_json j;
    j["problem"] = problem;
    j["alpha"] = alpha;
    j["p"] = p;
    j["q"] = q;
    j["grid.n"] = grid_n;
    j["grid.L"] = grid_L;
    j["radial.m"] = radial_m;
    j["radial.R"] = radial_R;
    j["symmetry"] = symmetry;
    j["tolerances.grad"] = tol_grad;
    j["seeds.rng"] = seed;
    j["solver.max_iters"] = max_iters;
    j["solver.multistarts"] = multistarts;
    j["mp.path_points"] = path_points;
    j["scan.p"] = scan_p;
    j["scan.alpha"] = scan_alpha;
    j["scan.q"] = scan_q;
    j["out.dir"] = out_dir;
    return j.dump(2);
}

} // namespace psm
