#include "psm/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "psm/fieldlib.hpp"
#include "psm/fields.hpp"
#include "psm/inequalities.hpp"
#include "psm/logkernel.hpp"
#include "psm/quadrature.hpp"
#include "psm/symmetry.hpp"

namespace psm {

namespace {

// ---------------------------------------------------------------------------
// Preconditioners: M = -Delta_h + diag(1+|x|^alpha), SPD in the discrete L2
// inner product. Radial M is tridiagonal (Thomas); the plane M is solved by
// Jacobi-preconditioned CG. Both are deterministic (fixed reduction order).

class RadialPrecond {
  public:
    RadialPrecond(const RadialGrid& g, double alpha) : g_(g)
    {
        const int m = g.m;
        const double h = g.h();
        lower_.resize(m);
        diag_.resize(m);
        upper_.resize(m);
        for (int i = 0; i < m; ++i) {
            const double r = g.r(i);
            const double rl = i * h;
            const double rr = (i + 1) * h;
            lower_[i] = -rl / (r * h * h);
            upper_[i] = -rr / (r * h * h);
            diag_[i] = (rl + rr) / (r * h * h) + 1.0 + std::pow(r, alpha);
        }
    }

    RadialField solve(const RadialField& rhs) const
    {
        const int m = g_.m;
        std::vector<double> c(m), d(m);
        c[0] = upper_[0] / diag_[0];
        d[0] = rhs.v[0] / diag_[0];
        for (int i = 1; i < m; ++i) {
            const double w = diag_[i] - lower_[i] * c[i - 1];
            c[i] = upper_[i] / w;
            d[i] = (rhs.v[i] - lower_[i] * d[i - 1]) / w;
        }
        RadialField z(g_);
        z.v[m - 1] = d[m - 1];
        for (int i = m - 2; i >= 0; --i) z.v[i] = d[i] - c[i] * z.v[i + 1];
        return z;
    }

  private:
    RadialGrid g_;
    std::vector<double> lower_, diag_, upper_;
};

class PlanePrecond {
  public:
    PlanePrecond(const Grid2D& g, double alpha) : g_(g), alpha_(alpha)
    {
        inv_diag_.resize(g.size());
        const double d0 = 4.0 / (g.h() * g.h());
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix) {
                const double w = 1.0 + std::pow(std::hypot(g.x(ix), g.y(iy)), alpha_);
                inv_diag_[g.idx(ix, iy)] = 1.0 / (d0 + w);
            }
    }

    Field2D apply_m(const Field2D& u) const
    {
        Field2D out(g_);
        apply_neg_laplacian(u, out);
        for (int iy = 0; iy < g_.n; ++iy)
            for (int ix = 0; ix < g_.n; ++ix) {
                const std::size_t k = g_.idx(ix, iy);
                const double w = 1.0 + std::pow(std::hypot(g_.x(ix), g_.y(iy)), alpha_);
                out.v[k] += w * u.v[k];
            }
        return out;
    }

    Field2D solve(const Field2D& rhs) const
    {
        Field2D x(g_);
        Field2D r = rhs;
        Field2D z = jacobi(r);
        Field2D p = z;
        double rz = dot_l2(r, z);
        const double target = 1e-10 * std::sqrt(std::max(dot_l2(rhs, rhs), 1e-300));
        for (int it = 0; it < 400; ++it) {
            if (std::sqrt(dot_l2(r, r)) <= target) break;
            const Field2D mp = apply_m(p);
            const double a = rz / dot_l2(p, mp);
            axpy(x, a, p);
            axpy(r, -a, mp);
            z = jacobi(r);
            const double rz_new = dot_l2(r, z);
            scale(p, rz_new / rz);
            axpy(p, 1.0, z);
            rz = rz_new;
        }
        return x;
    }

  private:
    Field2D jacobi(const Field2D& r) const
    {
        Field2D z(g_);
        for (std::size_t k = 0; k < z.v.size(); ++k) z.v[k] = r.v[k] * inv_diag_[k];
        return z;
    }

    Grid2D g_;
    double alpha_;
    std::vector<double> inv_diag_;
};

double sign_of(LocalSign s) { return s == LocalSign::minus ? -1.0 : 1.0; }

// Dual (operator) norm of a gradient field through the Riesz map of
// M = -Delta_h + (1+|x|^alpha): sqrt(<g, M^{-1} g>_L2). M is SPD, so the
// radicand is nonnegative up to roundoff.
double dual_norm(const RadialField& g, const RadialPrecond& precond)
{
    const double s = dot_l2(g, precond.solve(g));
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

double dual_norm(const Field2D& g, const PlanePrecond& precond)
{
    const double s = dot_l2(g, precond.solve(g));
    if (!std::isfinite(s)) return std::numeric_limits<double>::infinity();
    return s > 0.0 ? std::sqrt(s) : 0.0;
}

void fill_solution_stats(SolveOutcome& out)
{
    const std::vector<double>& v = out.is_radial ? out.radial.v : out.plane.v;
    double lo = 0.0, hi = 0.0;
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    out.sign_change = lo < 0.0 && 0.0 < hi;
}

// Sum of the absolute term magnitudes of the dilation identity at exponent r;
// the natural scale against which a defect of P(u;r) is judged.
double pohozaev_term_scale(const EnergyBreakdown& b, const ProblemParams& params,
                           double r)
{
    const double amom = b.star_sq - b.l2_sq;
    const double s = std::fabs(r * b.grad_sq) + std::fabs((r + 1.0) * b.l2_sq) +
                     std::fabs((r + 1.0 + 0.5 * params.alpha) * amom) +
                     params.q / (8.0 * M_PI) * b.l2_sq * b.l2_sq +
                     std::fabs(params.q * (r + 1.0) * b.v0) +
                     std::fabs((params.p * r + 2.0) / params.p * b.lp_p);
    return std::max(s, 1e-300);
}

double pohozaev_general_term_scale(const EnergyBreakdown& b, double alpha, double q,
                                   const Nonlinearity& W, double r)
{
    const double amom = b.star_sq - b.l2_sq;
    const double int_w = W.c1 * b.l2_sq + W.c2 * b.lp_p;
    const double int_wpu = 2.0 * W.c1 * b.l2_sq + W.p * W.c2 * b.lp_p;
    const double s = std::fabs(r * b.grad_sq) + std::fabs((r + 1.0) * b.l2_sq) +
                     std::fabs((r + 1.0 + 0.5 * alpha) * amom) +
                     q / (8.0 * M_PI) * b.l2_sq * b.l2_sq +
                     std::fabs(q * (r + 1.0) * b.v0) + std::fabs(2.0 * int_w) +
                     std::fabs(r * int_wpu);
    return std::max(s, 1e-300);
}

Field2D plane_gaussian(const Grid2D& g, double t)
{
    return Field2D::sample(g, [t](double x, double y) {
        return std::exp(-0.5 * (x * x + y * y) / (t * t));
    });
}

// Length scale of a field from its weighted moments, (amom/l2)^{1/alpha},
// clamped to the band the grid can resolve. The lower clamp matters: the
// calibration reference must stay smooth on the grid, or its quadrature
// defect would be as large as that of the object it is meant to certify.
double gyration_scale(const EnergyBreakdown& b, double alpha, double h, double cap)
{
    const double amom = std::max(b.star_sq - b.l2_sq, 1e-300);
    const double l2 = std::max(b.l2_sq, 1e-300);
    const double t = std::pow(amom / l2, 1.0 / alpha);
    return std::clamp(t, std::min(8.0 * h, cap), cap);
}

// Grid-calibrated relative tolerance for the dilation identity: the identity
// holds exactly in the continuum, so its value on a smooth reference Gaussian
// at the solution's own scale is pure quadrature defect. A Richardson pass at
// (h, 2h) estimates that defect relative to the identity's own term scale;
// solutions are then judged against 10x the estimate on their own term scale.
double calibrated_poho_rel(const Grid2D& g, const ProblemParams& params,
                           double t_star, double r)
{
    auto defect = [&](int n) {
        const Grid2D gg(g.L, n);
        const Field2D w = plane_gaussian(gg, t_star);
        const EnergyBreakdown b = breakdown(w, params, *kernel_table(gg));
        return std::pair(pohozaev(b, params, r), pohozaev_term_scale(b, params, r));
    };
    const auto [ph, sh] = defect(g.n);
    const auto [p2h, s2h] = defect(std::max(16, (g.n / 4) * 2));
    (void)s2h;
    const double p_lim = (4.0 * ph - p2h) / 3.0;
    return 10.0 * std::fabs(ph - p_lim) / sh;
}

double calibrated_poho_rel(const Grid2D& g, double alpha, double q,
                           const Nonlinearity& W, double t_star, double r)
{
    auto defect = [&](int n) {
        const Grid2D gg(g.L, n);
        const Field2D w = plane_gaussian(gg, t_star);
        const auto tbl = kernel_table(gg);
        EnergyBreakdown b;
        b.grad_sq = grad_sq_norm(w);
        b.star_sq = star_norm_sq(w, alpha);
        b.l2_sq = l2_norm_sq(w);
        b.lp_p = lp_norm_pow(w, W.p);
        const V0Split split = v_split(w, *tbl);
        b.v0 = split.v0;
        b.v1 = split.v1;
        b.v2 = split.v2;
        return std::pair(pohozaev_general(b, alpha, q, W, r),
                         pohozaev_general_term_scale(b, alpha, q, W, r));
    };
    const auto [ph, sh] = defect(g.n);
    const auto [p2h, s2h] = defect(std::max(16, (g.n / 4) * 2));
    (void)s2h;
    const double p_lim = (4.0 * ph - p2h) / 3.0;
    return 10.0 * std::fabs(ph - p_lim) / sh;
}

} // namespace

std::string classification_name(Classification c)
{
    switch (c) {
        case Classification::trivial_collapse: return "trivial_collapse";
        case Classification::negative_level_minimizer: return "negative_level_minimizer";
        case Classification::mountain_pass_solution: return "mountain_pass_solution";
        case Classification::constrained_minimizer: return "constrained_minimizer";
    }
    return "trivial_collapse";
}

std::string SolveOutcome::to_json() const
{
    nlohmann::ordered_json j;
    j["classification"] = classification_name(classification);
    j["geometry"] = is_radial ? "radial" : "plane";
    j["level"] = level;
    if (multiplier_lambda)
        j["multiplier_lambda"] = *multiplier_lambda;
    else
        j["multiplier_lambda"] = nullptr;
    j["q_effective"] = q_effective;
    j["residual_grad"] = residual_grad;
    j["residual_nehari"] = residual_nehari;
    j["residual_pohozaev"] = residual_pohozaev;
    j["residual_pohozaev_half"] = residual_pohozaev_half;
    j["iterations"] = iterations;
    j["converged"] = converged;
    j["sign_change"] = sign_change;
    j["solution_x_norm"] = solution_x_norm;
    j["solution_l2_norm"] = solution_l2_norm;
    j["start_norms"] = start_norms;
    j["anomaly"] = anomaly;
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Dilation scalar formulas

double dilated_v0(double t, double v0_u, double l2_sq_u)
{
    const double t4 = t * t * t * t;
    return t4 * v0_u + t4 * std::log(t) / (2.0 * M_PI) * l2_sq_u * l2_sq_u;
}

DilationMoments dilation_moments(const RadialField& u, double alpha, double p)
{
    DilationMoments m;
    m.grad_sq = grad_sq_norm(u);
    m.l2_sq = l2_norm_sq(u);
    m.alpha_moment = star_norm_sq(u, alpha) - m.l2_sq;
    m.lp_p = lp_norm_pow(u, p);
    m.v0 = v0(u);
    return m;
}

double dilated_level(double t, const DilationMoments& m, const ProblemParams& params)
{
    const double t2 = t * t;
    const double star_t = t2 * m.l2_sq + std::pow(t, params.alpha + 2.0) * m.alpha_moment;
    return 0.5 * m.grad_sq + 0.5 * star_t - 0.25 * params.q * dilated_v0(t, m.v0, m.l2_sq) +
           sign_of(params.local_sign) * t2 / params.p * m.lp_p;
}

double find_t0_on_H(double v0_u, double l2_sq_u)
{
    if (!(l2_sq_u > 0.0))
        throw std::invalid_argument("find_t0_on_H: field has zero L2 norm");
    const double m2 = l2_sq_u * l2_sq_u;
    // g(t) = t^4 v0 + (t^4 log t / 2pi) m2 has a single interior minimum at
    // log t_min = -(8 pi v0 / m2 + 1)/4 and grows to +inf afterwards, so the
    // level set g = 1 has exactly one root on the increasing branch.
    const double t_min = std::exp(-(8.0 * M_PI * v0_u / m2 + 1.0) / 4.0);
    double lo = t_min;
    double hi = std::max(2.0 * t_min, 1.0);
    while (dilated_v0(hi, v0_u, l2_sq_u) < 1.0) {
        hi *= 2.0;
        if (hi > 1e100) throw std::runtime_error("find_t0_on_H: bracketing failed");
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (dilated_v0(mid, v0_u, l2_sq_u) < 1.0)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) <= 1e-12 * hi) break;
    }
    return 0.5 * (lo + hi);
}

double find_t0_on_H(const Field2D& u, const KernelTable& tbl)
{
    return find_t0_on_H(v0(u, tbl), l2_norm_sq(u));
}

Field2D retract_to_H(const Field2D& u, const KernelTable& tbl)
{
    const double v = v0(u, tbl);
    if (v > 0.0) {
        Field2D w = u;
        scale(w, std::pow(v, -0.25));
        return w;
    }
    const double t0 = find_t0_on_H(v, l2_norm_sq(u));
    const DilateResult d = resample_dilate(u, t0, 0.0);
    const double v2 = v0(d.field, tbl);
    if (!(v2 > 0.0))
        throw std::runtime_error("retract_to_H: dilation failed to reach V0 > 0");
    Field2D w = d.field;
    scale(w, std::pow(v2, -0.25));
    return w;
}

// ---------------------------------------------------------------------------
// Constrained minimization of G on {V0 = 1}

SolveOutcome minimize_on_H(const Field2D& seed, const ProblemParams& params,
                           const Nonlinearity& W, const SymmetryClass& cls,
                           const SolverOptions& opt)
{
    params.validate();
    W.audit();
    const auto tbl = kernel_table(seed.grid);
    const double alpha = params.alpha;

    Field2D u = project(seed, cls);
    if (!(x_norm(u, alpha) > 1e-12))
        throw std::invalid_argument("minimize_on_H: seed is annihilated by the projector");
    u = retract_to_H(u, *tbl);
    u = project(u, cls); // roundoff cleanup; retraction preserves the class

    const PlanePrecond precond(seed.grid, alpha);
    double lambda = 0.0;
    double step = 1.0;
    double resid = std::numeric_limits<double>::infinity();
    long iters = 0;
    bool converged = false;

    for (int it = 0; it < opt.max_iters; ++it) {
        iters = it + 1;
        const Field2D g = grad_G(u, alpha, W);
        const Field2D gv = v0_gradient_action(u, *tbl);
        const double gv2 = dot_l2(gv, gv);
        if (!(gv2 > 0.0)) break; // degenerate constraint gradient
        lambda = dot_l2(g, gv) / gv2;
        Field2D d = g;
        axpy(d, -lambda, gv); // L2-tangent gradient
        const double gval = eval_G(u, alpha, W);
        resid = x_norm(d, alpha);
        if (resid <= opt.tol_grad * std::max(1.0, std::fabs(gval))) {
            converged = true;
            break;
        }

        Field2D z = precond.solve(d);
        axpy(z, -dot_l2(z, gv) / gv2, gv); // re-tangentialize after M^{-1}
        double slope = dot_l2(d, z);
        if (!(slope > 0.0)) { // fall back to the unpreconditioned direction
            z = d;
            slope = dot_l2(d, d);
        }

        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            Field2D trial = u;
            axpy(trial, -step, z);
            trial = project(trial, cls);
            trial = retract_to_H(trial, *tbl);
            const double gtrial = eval_G(trial, alpha, W);
            if (gtrial <= gval - 1e-4 * step * slope) {
                u = std::move(trial);
                step = std::min(step * 1.5, 1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search stagnated
    }

    SolveOutcome out;
    out.is_radial = false;
    out.plane = u;
    out.plane.sym = cls;
    out.iterations = iters;
    out.converged = converged;
    out.multiplier_lambda = lambda;
    out.q_effective = 4.0 * lambda;
    out.residual_grad = resid;

    const V0Split split = v_split(u, *tbl);
    EnergyBreakdown b;
    b.grad_sq = grad_sq_norm(u);
    b.star_sq = star_norm_sq(u, alpha);
    b.l2_sq = l2_norm_sq(u);
    b.lp_p = lp_norm_pow(u, W.p);
    b.v0 = split.v0;
    b.v1 = split.v1;
    b.v2 = split.v2;
    out.level = eval_G(u, alpha, W);
    {
        const Field2D g = grad_G(u, alpha, W);
        const Field2D gv = v0_gradient_action(u, *tbl);
        Field2D d = g;
        axpy(d, -lambda, gv);
        out.residual_nehari = dot_l2(d, u);
        out.residual_grad = dual_norm(d, precond); // dual norm of the tangent gradient
    }
    out.residual_pohozaev = pohozaev_general(b, alpha, out.q_effective, W, 0.0);
    out.residual_pohozaev_half = pohozaev_general(b, alpha, out.q_effective, W, 0.5 * alpha);
    out.solution_x_norm = x_norm(u, alpha);
    out.solution_l2_norm = std::sqrt(b.l2_sq);
    fill_solution_stats(out);

    const double poho_cert = pohozaev_uncoupled(u, alpha, W);
    if (!(poho_cert > 0.0)) out.anomaly += "uncoupled dilation certificate not positive;";
    if (std::fabs(split.v0 - 1.0) > 1e-8) out.anomaly += "constraint drift |V0-1| > 1e-8;";
    if (converged && lambda > 0.0 && out.solution_l2_norm >= 1e-3 && out.anomaly.empty())
        out.classification = Classification::constrained_minimizer;
    else if (converged && lambda <= 0.0)
        out.anomaly += "multiplier not positive;";
    // Informational certificate, appended after classification: the dilation
    // identity should vanish up to quadrature error on a faithful solution.
    if (converged && out.solution_l2_norm >= 1e-3) {
        const double t_star = gyration_scale(b, alpha, u.grid.h(), 0.25 * u.grid.L);
        const double rel =
            calibrated_poho_rel(u.grid, alpha, out.q_effective, W, t_star, 0.0);
        if (std::fabs(out.residual_pohozaev) >
                rel * pohozaev_general_term_scale(b, alpha, out.q_effective, W, 0.0) ||
            std::fabs(out.residual_pohozaev_half) >
                rel * pohozaev_general_term_scale(b, alpha, out.q_effective, W,
                                                  0.5 * alpha))
            out.anomaly += "dilation identity defect above grid-calibrated tolerance;";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Radial descent on I

namespace {

RadialField gaussian_profile(const RadialGrid& g, double t)
{
    return RadialField::sample(
        g, [t](double r) { return std::exp(-0.5 * (r / t) * (r / t)); });
}

// Radial counterpart of calibrated_poho_rel: Richardson study of the
// dilation identity's quadrature defect on a Gaussian at the solve's scale.
double calibrated_poho_rel_radial(const RadialGrid& g, const ProblemParams& params,
                                  double t_star, double r)
{
    const double t = std::clamp(t_star, 4.0 * g.h(), 0.25 * g.R);
    auto defect = [&](int m) {
        const RadialGrid gg(g.R, m);
        const RadialField w = gaussian_profile(gg, t);
        const EnergyBreakdown b = breakdown(w, params);
        return std::pair(pohozaev(b, params, r), pohozaev_term_scale(b, params, r));
    };
    const auto [ph, sh] = defect(g.m);
    const auto [p2h, s2h] = defect(std::max(16, g.m / 2));
    (void)s2h;
    const double p_lim = (4.0 * ph - p2h) / 3.0;
    return 10.0 * std::fabs(ph - p_lim) / sh;
}

struct RadialRun {
    RadialField u;
    double resid = 0.0;
    bool converged = false;
    bool collapsed = false;
    long iterations = 0;
};

// Action of the second variation of I at u on v (matrix-free):
//   -Delta_h v + (1+r^alpha) v - q phi_u v + sign (p-1)|u|^{p-2} v
//   - 2 q u * Phi[u v],
// where Phi[w] is the log-kernel potential of the density w. Self-adjoint in
// the discrete L2(mu) inner product.
RadialField second_variation_apply(const RadialField& u, const RadialField& phi,
                                   const std::vector<double>& local_coeff,
                                   double q, const RadialField& v)
{
    RadialField out(u.grid);
    apply_neg_laplacian(v, out);
    RadialField prod(u.grid);
    for (std::size_t i = 0; i < prod.v.size(); ++i) prod.v[i] = u.v[i] * v.v[i];
    const RadialField mixed = radial_potential_density(prod);
    for (std::size_t i = 0; i < out.v.size(); ++i)
        out.v[i] += (local_coeff[i] - q * phi.v[i]) * v.v[i] -
                    2.0 * q * u.v[i] * mixed.v[i];
    return out;
}

// Damped Newton polish toward a stationary point: inner preconditioned CG on
// the second variation (truncated at nonpositive curvature), backtracking on
// the dual norm of the gradient. Returns true when the dual residual meets
// tol; partial progress is left in u either way.
bool newton_polish(RadialField& u, const ProblemParams& params,
                   const RadialPrecond& precond, double tol, int max_newton,
                   long& iterations)
{
    const int m = u.grid.m;
    for (int nt = 0; nt < max_newton; ++nt) {
        const RadialField g = grad_I(u, params);
        const double res = dual_norm(g, precond);
        if (!std::isfinite(res)) return false;
        if (res <= tol) return true;
        ++iterations;

        const RadialField phi = radial_potential(u);
        std::vector<double> local_coeff(static_cast<std::size_t>(m));
        const double sgn = sign_of(params.local_sign);
        for (int i = 0; i < m; ++i)
            local_coeff[static_cast<std::size_t>(i)] =
                1.0 + std::pow(u.grid.r(i), params.alpha) +
                sgn * (params.p - 1.0) * std::pow(std::fabs(u.v[i]), params.p - 2.0);

        // PCG on (second variation) d = -g in the L2(mu) inner product.
        RadialField d(u.grid);
        RadialField r(u.grid);
        for (int i = 0; i < m; ++i) r.v[i] = -g.v[i];
        RadialField z = precond.solve(r);
        RadialField pdir = z;
        double rz = dot_l2(r, z);
        const double rz0 = rz;
        bool advanced = false;
        for (int cg = 0; cg < 200 && rz > 1e-4 * rz0; ++cg) {
            const RadialField hp =
                second_variation_apply(u, phi, local_coeff, params.q, pdir);
            const double php = dot_l2(pdir, hp);
            if (!(php > 0.0)) {
                // Nonpositive curvature: keep the partial CG solution, or fall
                // back to the preconditioned gradient on the first pass.
                if (!advanced) d = z;
                break;
            }
            const double a = rz / php;
            axpy(d, a, pdir);
            axpy(r, -a, hp);
            advanced = true;
            z = precond.solve(r);
            const double rz_new = dot_l2(r, z);
            scale(pdir, rz_new / rz);
            axpy(pdir, 1.0, z);
            rz = rz_new;
        }

        double step = 1.0;
        bool accepted = false;
        for (int bt = 0; bt < 50; ++bt) {
            RadialField trial = u;
            axpy(trial, step, d);
            const double res_t = dual_norm(grad_I(trial, params), precond);
            if (res_t < res * (1.0 - 1e-4 * step)) {
                u = std::move(trial);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) return false;
    }
    return dual_norm(grad_I(u, params), precond) <= tol;
}

RadialRun descend_I_radial(RadialField u, const ProblemParams& params,
                           const SolverOptions& opt, const RadialPrecond& precond)
{
    RadialRun run;
    double step = 1.0;
    const double alpha = params.alpha;

    const auto nontrivial = [&](const RadialField& v) {
        return std::sqrt(l2_norm_sq(v)) >= 1e-3;
    };
    // Polish aims a decade below the tolerance (margin against the rounding
    // floor of large-amplitude states); success is judged against tol itself.
    const auto try_polish = [&](RadialField& v) {
        newton_polish(v, params, precond, 0.1 * opt.tol_grad, 40, run.iterations);
        return dual_norm(grad_I(v, params), precond);
    };

    int next_polish = 39;
    for (int it = 0; it < opt.max_iters; ++it) {
        ++run.iterations;
        const double xn = x_norm(u, alpha);
        if (xn < 1e-8) {
            run.collapsed = true;
            run.converged = true;
            run.resid = dual_norm(grad_I(u, params), precond);
            break;
        }
        const RadialField g = grad_I(u, params);
        const RadialField z = precond.solve(g);
        const double slope = dot_l2(g, z); // dual residual squared; > 0 (SPD)
        run.resid = slope > 0.0 ? std::sqrt(slope) : 0.0;
        // A tiny iterate that already meets the tolerance is still collapsing;
        // let it contract to the collapse floor instead of reporting a
        // borderline-norm stationary point.
        if (run.resid <= opt.tol_grad && xn >= 1e-3) {
            run.converged = true;
            break;
        }
        const double ival = eval_I(u, params);

        // Negative-level iterates sit in a stiff bowl where first-order steps
        // creep; hand them to the Newton polish periodically.
        if (it == next_polish && ival < 0.0 && nontrivial(u)) {
            run.resid = try_polish(u);
            if (run.resid <= opt.tol_grad) {
                run.converged = true;
                break;
            }
            next_polish = it + 160; // cooldown after a failed polish
        }

        bool accepted = false;
        for (int bt = 0; bt < 40; ++bt) {
            RadialField trial = u;
            axpy(trial, -step, z);
            if (eval_I(trial, params) <= ival - 1e-4 * step * slope) {
                u = std::move(trial);
                step = std::min(step * 1.5, 1e3);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break; // line search stagnated at this resolution
    }

    if (!run.converged && !run.collapsed && eval_I(u, params) < 0.0 && nontrivial(u)) {
        run.resid = try_polish(u);
        run.converged = run.resid <= opt.tol_grad;
    }
    run.u = std::move(u);
    return run;
}

void require_radial_range(const ProblemParams& params)
{
    if (!(params.p > 4.0))
        throw std::invalid_argument("radial minimization requires p > 4");
    const double ptilde = (2.0 * params.p - 4.0) / (params.p - 4.0);
    if (!(params.alpha > ptilde))
        throw std::invalid_argument("radial minimization requires alpha > (2p-4)/(p-4)");
}

} // namespace

SolveOutcome minimize_I_radial(const ProblemParams& params, const RadialGrid& g,
                               const SolverOptions& opt)
{
    params.validate();
    require_radial_range(params);
    if (!(params.q > 0.0))
        throw std::invalid_argument("minimize_I_radial requires q > 0");

    const RadialPrecond precond(g, params.alpha);

    // Deterministic seed: dilate a Gaussian by the scalar rescaling formula,
    // picking the trial t with the lowest level (negative when possible).
    const DilationMoments m = dilation_moments(gaussian_profile(g, 1.0), params.alpha,
                                               params.p);
    double best_t = 1.0;
    double best_level = std::numeric_limits<double>::infinity();
    for (int j = 0; j < 64; ++j) {
        const double t = 0.25 * std::pow(32.0, j / 63.0);
        const double level = dilated_level(t, m, params);
        if (level < best_level) {
            best_level = level;
            best_t = t;
        }
    }

    // Closed-form amplitude optimum along the chosen ray: I(c u_t) is a cubic
    // in x = c^2 with coefficients from the scalar dilation laws; its interior
    // minimum (when the discriminant allows one) seeds the second start deep
    // in the negative-level basin.
    double best_c = 0.0;
    {
        const double t2 = best_t * best_t;
        const double star_t =
            t2 * m.l2_sq + std::pow(best_t, params.alpha + 2.0) * m.alpha_moment;
        const double A = 0.5 * (m.grad_sq + star_t);
        const double B = -0.25 * params.q * dilated_v0(best_t, m.v0, m.l2_sq);
        const double C = sign_of(params.local_sign) * t2 / params.p * m.lp_p;
        const double disc = 4.0 * B * B - 12.0 * A * C;
        if (B < 0.0 && C > 0.0 && disc > 0.0) {
            const double x2 = (-2.0 * B + std::sqrt(disc)) / (6.0 * C);
            if (x2 > 0.0 && A * x2 + B * x2 * x2 + C * x2 * x2 * x2 < 0.0)
                best_c = std::sqrt(x2);
        }
    }

    SolveOutcome best;
    bool have_best = false;
    std::vector<double> start_norms;
    const int starts = std::max(1, opt.multistarts);
    for (int s = 0; s < starts; ++s) {
        RadialField seed = gaussian_profile(g, best_t);
        if (s == 1 && best_c > 0.0)
            scale(seed, best_c);
        else if (s >= 1)
            seed = random_radial_field(g, opt.seed, s);
        RadialRun run = descend_I_radial(std::move(seed), params, opt, precond);
        const double xn = x_norm(run.u, params.alpha);
        start_norms.push_back(xn);

        SolveOutcome out;
        out.is_radial = true;
        out.iterations = run.iterations;
        out.converged = run.converged;
        out.residual_grad = run.resid;
        const EnergyBreakdown b = breakdown(run.u, params);
        out.level = eval_I(b, params);
        out.residual_nehari = nehari(b, params);
        out.residual_pohozaev = pohozaev(b, params, 0.0);
        out.residual_pohozaev_half = pohozaev(b, params, 0.5 * params.alpha);
        out.q_effective = params.q;
        out.solution_x_norm = xn;
        out.solution_l2_norm = std::sqrt(b.l2_sq);
        out.radial = std::move(run.u);
        fill_solution_stats(out);
        if (run.collapsed) {
            out.classification = Classification::trivial_collapse;
        } else if (run.converged && out.level < 0.0 && out.solution_l2_norm >= 1e-3) {
            out.classification = Classification::negative_level_minimizer;
            const double t_star =
                gyration_scale(b, params.alpha, g.h(), 0.25 * g.R);
            const double poho_rel =
                calibrated_poho_rel_radial(g, params, t_star, 0.0);
            if (std::fabs(out.residual_pohozaev) >
                    poho_rel * pohozaev_term_scale(b, params, 0.0) ||
                std::fabs(out.residual_pohozaev_half) >
                    poho_rel * pohozaev_term_scale(b, params, 0.5 * params.alpha))
                out.anomaly += "dilation identity defect above grid-calibrated tolerance;";
            const RadialField gr = grad_I(out.radial, params);
            if (std::sqrt(dot_l2(gr, gr)) > 10.0 * opt.tol_grad)
                out.anomaly += "system residual above 10x gradient tolerance;";
        } else {
            out.classification = Classification::trivial_collapse;
            if (!run.converged)
                out.anomaly += "descent did not reach tolerance;";
            else if (out.solution_l2_norm >= 1e-3)
                out.anomaly += "converged at nonnegative level;";
        }

        // Rank: converged negative-level minimizers by level, then any
        // converged outcome, then lowest residual among failures.
        const auto rank = [](const SolveOutcome& o) {
            if (o.classification == Classification::negative_level_minimizer) return 2;
            return o.converged ? 1 : 0;
        };
        bool better = false;
        if (!have_best) {
            better = true;
        } else {
            const int ro = rank(out), rb = rank(best);
            if (ro != rb)
                better = ro > rb;
            else if (ro == 2)
                better = out.level < best.level;
            else if (ro == 0)
                better = out.residual_grad < best.residual_grad;
        }
        if (better) {
            best = std::move(out);
            have_best = true;
        }
    }
    best.start_norms = std::move(start_norms);
    return best;
}

double find_q_tilde(const ProblemParams& params, const RadialGrid& g,
                    int trial_family_size)
{
    params.validate();
    require_radial_range(params);
    if (trial_family_size < 2)
        throw std::invalid_argument("find_q_tilde: trial family needs >= 2 members");

    const DilationMoments m =
        dilation_moments(gaussian_profile(g, 1.0), params.alpha, params.p);
    std::vector<double> ts(trial_family_size);
    for (int j = 0; j < trial_family_size; ++j)
        ts[j] = 0.25 * std::pow(16.0, static_cast<double>(j) / (trial_family_size - 1));

    const auto reaches_negative = [&](double q) {
        ProblemParams pq = params;
        pq.q = q;
        for (double t : ts)
            if (dilated_level(t, m, pq) < 0.0) return true;
        return false;
    };

    const double q0 = 1e-6;
    double hi = q0;
    double lo = 0.0;
    if (reaches_negative(q0)) {
        lo = q0;
        for (int j = 0; j < 64 && reaches_negative(lo); ++j) {
            hi = lo;
            lo *= 0.5;
        }
        if (reaches_negative(lo)) return lo; // negative all the way down
    } else {
        lo = q0;
        bool found = false;
        for (int j = 1; j <= 64; ++j) {
            hi = q0 * std::pow(2.0, j);
            if (reaches_negative(hi)) {
                found = true;
                break;
            }
            lo = hi;
        }
        if (!found) return std::numeric_limits<double>::infinity();
    }
    while (hi - lo > 0.01 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (reaches_negative(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

// ---------------------------------------------------------------------------
// Mountain pass in the dihedral class

MountainPassFloor mountain_pass_floor(const ProblemParams& params)
{
    const double ca = embedding_constants(params.alpha, params.p).c_alpha;
    const double cemb = lp_embedding_constant(params.alpha, params.p);
    const double a = params.q * ca / (4.0 * M_PI);
    const double b = cemb / params.p;
    const auto psi = [&](double rho) {
        return 0.5 - a * rho * rho - b * std::pow(rho, params.p - 2.0);
    };
    double rho_hi = 1e-3;
    while (psi(rho_hi) > 0.0 && rho_hi < 1e6) rho_hi *= 2.0;
    const auto f = [&](double rho) { return rho * rho * psi(rho); };
    MountainPassFloor out;
    out.rho = golden_section_max(f, 0.0, rho_hi);
    out.floor = f(out.rho);
    return out;
}

namespace {

double level_J(const Field2D& u, const ProblemParams& params, const KernelTable& tbl)
{
    return 0.5 * grad_sq_norm(u) + 0.5 * star_norm_sq(u, params.alpha) -
           0.25 * params.q * v0(u, tbl) - lp_norm_pow(u, params.p) / params.p;
}

std::vector<Field2D> retension(const std::vector<Field2D>& path)
{
    const std::size_t n = path.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        Field2D d = path[i];
        axpy(d, -1.0, path[i - 1]);
        cum[i] = cum[i - 1] + std::sqrt(l2_norm_sq(d));
    }
    std::vector<Field2D> out;
    out.reserve(n);
    out.push_back(path.front());
    if (!(cum.back() > 0.0)) return path; // degenerate path, leave untouched
    std::size_t seg = 0;
    for (std::size_t j = 1; j + 1 < n; ++j) {
        const double target = cum.back() * static_cast<double>(j) / (n - 1);
        while (seg + 2 < n && cum[seg + 1] < target) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double th = len > 0.0 ? (target - cum[seg]) / len : 0.0;
        Field2D node = path[seg];
        scale(node, 1.0 - th);
        axpy(node, th, path[seg + 1]);
        out.push_back(std::move(node));
    }
    out.push_back(path.back());
    return out;
}

// One transverse-descent update of node i (tangent from its neighbors).
// Returns whether a step was accepted; `step` is the node's warm step size.
// `clamp` bounds the displacement x-norm and trials must keep J positive:
// J is unbounded below in amplitude, and a ridge node whose level dives
// negative has fallen off the saddle region (the saddle level is positive),
// after which descent runs away.
bool transverse_step(std::vector<Field2D>& path, std::size_t i,
                     const ProblemParams& params, const KernelTable& tbl,
                     const PlanePrecond& precond, const SymmetryClass& cls,
                     double& step, int max_backtracks, double clamp)
{
    Field2D tau = path[i + 1];
    axpy(tau, -1.0, path[i - 1]);
    const double tn = std::sqrt(l2_norm_sq(tau));
    if (tn > 0.0) scale(tau, 1.0 / tn);

    const Field2D g = grad_J(path[i], params, tbl);
    Field2D d0 = g;
    if (tn > 0.0) axpy(d0, -dot_l2(g, tau), tau);
    Field2D z = precond.solve(d0);
    if (tn > 0.0) axpy(z, -dot_l2(z, tau), tau);
    double slope = dot_l2(d0, z);
    if (!(slope > 0.0)) {
        z = d0;
        slope = dot_l2(d0, d0);
        if (!(slope > 0.0)) return false;
    }

    const double zn = x_norm(z, params.alpha);
    if (clamp > 0.0 && zn > 0.0 && step * zn > clamp) step = clamp / zn;

    const double j0 = level_J(path[i], params, tbl);
    for (int bt = 0; bt < max_backtracks; ++bt) {
        Field2D trial = path[i];
        axpy(trial, -step, z);
        trial = project(trial, cls);
        const double jt = level_J(trial, params, tbl);
        if (jt <= j0 - 1e-4 * step * slope && jt > 0.0) {
            path[i] = std::move(trial);
            step = std::min(step * 1.5, 1e2);
            return true;
        }
        step *= 0.5;
    }
    return false;
}

// Gauss-Newton polish of ||grad_J||^2 with matrix-free Hessian actions
// (central differences of grad_J) and CG on the normal equations.
void polish_critical_point(Field2D& u, const ProblemParams& params,
                           const KernelTable& tbl, const SymmetryClass& cls,
                           double tol, long& iters)
{
    const double alpha = params.alpha;
    const auto grad = [&](const Field2D& w) { return grad_J(w, params, tbl); };
    const auto hess_apply = [&](const Field2D& w, const Field2D& v) {
        const double vn = x_norm(v, alpha);
        Field2D out(w.grid);
        if (!(vn > 0.0)) return out;
        const double eps = 1e-6 * std::max(1.0, x_norm(w, alpha)) / vn;
        Field2D wp = w, wm = w;
        axpy(wp, eps, v);
        axpy(wm, -eps, v);
        out = grad(wp);
        axpy(out, -1.0, grad(wm));
        scale(out, 1.0 / (2.0 * eps));
        return out;
    };

    for (int gn = 0; gn < 30; ++gn) {
        ++iters;
        const Field2D g = grad(u);
        const double gnorm = x_norm(g, alpha);
        if (gnorm <= 0.01 * tol) break;
        // CG on H^2 d = -H g (H symmetric), i.e. least squares for H d = -g.
        Field2D rhs = hess_apply(u, g);
        scale(rhs, -1.0);
        Field2D d(u.grid);
        Field2D r = rhs;
        Field2D p = r;
        double rr = dot_l2(r, r);
        const double cg_target = 1e-4 * std::sqrt(std::max(rr, 1e-300));
        for (int it = 0; it < 25 && std::sqrt(rr) > cg_target; ++it) {
            const Field2D hp = hess_apply(u, p);
            const Field2D h2p = hess_apply(u, hp);
            const double denom = dot_l2(p, h2p);
            if (!(denom > 0.0)) break;
            const double a = rr / denom;
            axpy(d, a, p);
            axpy(r, -a, h2p);
            const double rr_new = dot_l2(r, r);
            scale(p, rr_new / rr);
            axpy(p, 1.0, r);
            rr = rr_new;
        }
        bool accepted = false;
        for (double s : {1.0, 0.5, 0.25, 0.1, 0.03}) {
            Field2D trial = u;
            axpy(trial, s, d);
            trial = project(trial, cls);
            if (x_norm(grad(trial), alpha) < gnorm && x_norm(trial, alpha) > 1e-3) {
                u = std::move(trial);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }
}

} // namespace

SolveOutcome mountain_pass(const ProblemParams& params, int k, const Grid2D& g,
                           const SolverOptions& opt)
{
    params.validate();
    if (k < 1) throw std::invalid_argument("mountain_pass: dihedral order must be >= 1");
    const auto tbl = kernel_table(g);
    const SymmetryClass cls = SymmetryClass::dihedral(k);
    const double alpha = params.alpha;

    SolveOutcome out;
    out.is_radial = false;
    if (!((params.p > 2.0 && params.p < 3.0) || params.p >= 4.0))
        out.anomaly += "p outside the guaranteed range (needs 2<p<3 or p>=4);";

    // Seed: harmonic-polynomial angular factor times a Gaussian, projected.
    Field2D w = Field2D::sample(g, [k](double x, double y) {
        const std::complex<double> zc(x, y);
        std::complex<double> zp(1.0, 0.0);
        for (int j = 0; j < k; ++j) zp *= zc;
        return zp.real() * std::exp(-0.5 * (x * x + y * y));
    });
    w = project(w, cls);

    const MountainPassFloor floor = mountain_pass_floor(params);
    const double r_pow = std::max(2.0, 0.5 * alpha);

    double t_bar = 1.0;
    Field2D endpoint;
    bool endpoint_ok = false;
    for (int j = 0; j < 9; ++j) {
        const DilateResult d = resample_dilate(w, t_bar, r_pow);
        if (d.truncation_warn && out.anomaly.find("endpoint truncation") == std::string::npos)
            out.anomaly += "endpoint truncation above 1%;";
        Field2D cand = project(d.field, cls);
        if (level_J(cand, params, *tbl) < 0.0 && x_norm(cand, alpha) > floor.rho) {
            endpoint = std::move(cand);
            endpoint_ok = true;
            break;
        }
        t_bar *= 2.0;
    }
    if (!endpoint_ok) {
        out.anomaly += "no endpoint with a negative level found;";
        out.plane = w;
        out.converged = false;
        return out;
    }

    const PlanePrecond precond(g, alpha);
    int n_nodes = std::max(5, opt.path_points);
    std::vector<Field2D> path;
    const auto init_path = [&]() {
        path.clear();
        path.reserve(n_nodes);
        for (int i = 0; i < n_nodes; ++i) {
            Field2D node = endpoint;
            scale(node, static_cast<double>(i) / (n_nodes - 1));
            path.push_back(std::move(node));
        }
    };
    init_path();

    long iters = 0;
    int restarts = 0;
    int edge_streak = 0;
    std::vector<double> steps(n_nodes, 1.0);
    double resid = std::numeric_limits<double>::infinity();
    std::size_t imax = 1;
    bool coarse_done = false;

    // The coarse phase only has to park the maximal node near the saddle;
    // the Gauss-Newton polish finishes the job. Budget it accordingly.
    const int coarse_cap = std::min(opt.max_iters, 150);
    for (int it = 0; it < coarse_cap && !coarse_done; ++it) {
        ++iters;
        // locate the maximal interior node
        double jmax = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < path.size(); ++i) {
            const double ji = level_J(path[i], params, *tbl);
            if (ji > jmax) {
                jmax = ji;
                imax = i;
            }
        }
        edge_streak = (imax == 1 || imax + 2 == path.size()) ? edge_streak + 1 : 0;
        if (edge_streak > 25 && restarts < 3) {
            ++restarts;
            n_nodes = 2 * n_nodes - 1;
            steps.assign(n_nodes, 1.0);
            init_path();
            edge_streak = 0;
            continue;
        }

        resid = x_norm(grad_J(path[imax], params, *tbl), alpha);
        if (resid <= std::max(1e-3, 10.0 * opt.tol_grad)) {
            coarse_done = true;
            break;
        }

        const double clamp = 0.25 * x_norm(path.back(), alpha);
        for (int sub = 0; sub < 3; ++sub)
            transverse_step(path, imax, params, *tbl, precond, cls, steps[imax], 30, clamp);
        if (imax > 1) {
            double s = 0.5 * steps[imax - 1];
            transverse_step(path, imax - 1, params, *tbl, precond, cls, s, 10, clamp);
        }
        if (imax + 2 < path.size()) {
            double s = 0.5 * steps[imax + 1];
            transverse_step(path, imax + 1, params, *tbl, precond, cls, s, 10, clamp);
        }
        path = retension(path);
        for (std::size_t i = 1; i + 1 < path.size(); ++i) path[i] = project(path[i], cls);
    }

    Field2D u = path[imax];
    polish_critical_point(u, params, *tbl, cls, opt.tol_grad, iters);

    out.plane = u;
    out.plane.sym = cls;
    out.iterations = iters;
    const EnergyBreakdown b = breakdown(u, params, *tbl);
    out.level = eval_J(b, params);
    const Field2D gJ = grad_J(u, params, *tbl);
    out.residual_grad = dual_norm(gJ, precond);
    out.residual_nehari = nehari(b, params);
    out.residual_pohozaev = pohozaev(b, params, 0.0);
    out.residual_pohozaev_half = pohozaev(b, params, 0.5 * alpha);
    out.q_effective = params.q;
    out.solution_x_norm = x_norm(u, alpha);
    out.solution_l2_norm = std::sqrt(b.l2_sq);
    fill_solution_stats(out);
    out.converged = out.residual_grad <= opt.tol_grad;
    if (out.level < floor.floor) out.anomaly += "level below the small-sphere floor;";
    if (!out.sign_change) out.anomaly += "no sign change;";
    if (out.converged && out.level > 0.0 && out.solution_l2_norm >= 1e-3)
        out.classification = Classification::mountain_pass_solution;
    if (out.classification == Classification::mountain_pass_solution) {
        const double t_star = gyration_scale(b, alpha, u.grid.h(), 0.25 * u.grid.L);
        const double rel = calibrated_poho_rel(u.grid, params, t_star, 0.0);
        if (std::fabs(out.residual_pohozaev) >
                rel * pohozaev_term_scale(b, params, 0.0) ||
            std::fabs(out.residual_pohozaev_half) >
                rel * pohozaev_term_scale(b, params, 0.5 * alpha))
            out.anomaly += "dilation identity defect above grid-calibrated tolerance;";
        if (std::sqrt(dot_l2(gJ, gJ)) > 10.0 * opt.tol_grad)
            out.anomaly += "system residual above 10x gradient tolerance;";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Independent PDE residual assembly (own stencils, serial potential)

namespace {

double power_term_indep(double s, double p)
{
    return s == 0.0 ? 0.0 : std::pow(std::fabs(s), p - 2.0) * s;
}

} // namespace

double pde_residual_l2(const Field2D& u, double alpha, double q, const Nonlinearity& W,
                       const KernelTable& tbl)
{
    const Grid2D& g = u.grid;
    const double h2 = g.h() * g.h();
    const Field2D phi = newtonian_potential_serial(u, tbl);
    Field2D res(g);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix) {
            const double c = u.at(ix, iy);
            const double e = ix + 1 < g.n ? u.at(ix + 1, iy) : 0.0;
            const double wv = ix > 0 ? u.at(ix - 1, iy) : 0.0;
            const double no = iy + 1 < g.n ? u.at(ix, iy + 1) : 0.0;
            const double so = iy > 0 ? u.at(ix, iy - 1) : 0.0;
            const double lap = (4.0 * c - e - wv - no - so) / h2;
            const double weight = 1.0 + std::pow(std::hypot(g.x(ix), g.y(iy)), alpha);
            res.v[g.idx(ix, iy)] =
                lap + weight * c - q * phi.v[g.idx(ix, iy)] * c + W.Wp(c);
        }
    return std::sqrt(l2_norm_sq(res));
}

double pde_residual_l2(const Field2D& u, const ProblemParams& params,
                       const KernelTable& tbl)
{
    Nonlinearity local;
    const double sgn = sign_of(params.local_sign);
    const double p = params.p;
    if (params.local_sign == LocalSign::general_W) {
        local = builtin_W(params.w_c1, params.w_c2, p);
    } else {
        local.p = p;
        local.W = [sgn, p](double s) { return sgn * std::pow(std::fabs(s), p) / p; };
        local.Wp = [sgn, p](double s) { return sgn * power_term_indep(s, p); };
    }
    return pde_residual_l2(u, params.alpha, params.q, local, tbl);
}

double pde_residual_l2(const RadialField& u, const ProblemParams& params)
{
    const RadialGrid& g = u.grid;
    const double h = g.h();
    const RadialField phi = radial_potential(u);
    const double sgn = sign_of(params.local_sign);
    RadialField res(g);
    for (int i = 0; i < g.m; ++i) {
        const double r = g.r(i);
        const double rl = i * h;
        const double rr = (i + 1) * h;
        const double um = i > 0 ? u.v[i - 1] : 0.0; // origin face has weight 0
        const double up = i + 1 < g.m ? u.v[i + 1] : 0.0;
        const double lap = -(rr * (up - u.v[i]) - rl * (u.v[i] - um)) / (r * h * h);
        res.v[i] = lap + (1.0 + std::pow(r, params.alpha)) * u.v[i] -
                   params.q * phi.v[i] * u.v[i] + sgn * power_term_indep(u.v[i], params.p);
    }
    return std::sqrt(l2_norm_sq(res));
}

} // namespace psm
