#pragma once

#include <string>

#include "psm/grid.hpp"

namespace psm {

// Parameter triple (alpha, p, beta) plus the Young weight epsilon for the
// weighted log-moment bound
//   (int log(2+|x|) u^2)^2  <=  (2 eps / beta) int (1+|x|^alpha) u^2
//                               + C ||u||_p^{4(beta-1)/(beta-2)}.
struct LemmaParams {
    double alpha = 6.0;
    double p = 6.0;
    double beta = 4.0;
    double epsilon = 1.0;

    // alpha p / ((p-2)(beta-1)) - 2; the constant exists iff this is > 0.
    double margin() const { return alpha * p / ((p - 2.0) * (beta - 1.0)) - 2.0; }
    bool admissible() const
    {
        return alpha > 0.0 && p > 2.0 && beta > 2.0 && epsilon > 0.0 && margin() > 0.0;
    }
    void validate() const; // throws std::invalid_argument when inadmissible
};

// C(alpha, p, beta, eps) =
//   ((beta-2)/(beta eps^{2/(beta-2)})) *
//   [ 2 pi int_0^inf log^a(2+r) (1+r^alpha)^{-b} r dr ]^{2(beta-1)(p-2)/((beta-2)p)}
// with a = beta p/((beta-1)(p-2)), b = p/((beta-1)(p-2)); the improper
// integral is split at r = 1 with the tail mapped through r -> 1/s.
double lemma_constant(const LemmaParams& lp);

// A one-sided bound check; satisfied() allows roundoff at an equality case.
struct BoundCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    bool satisfied() const { return lhs <= rhs + 1e-12 * (1.0 + (rhs < 0 ? -rhs : rhs)); }
    double slack() const { return rhs - lhs; }
};

// Both sides of the weighted log-moment bound at u.
BoundCheck verify_lemma(const Field2D& u, const LemmaParams& lp);
BoundCheck verify_lemma(const RadialField& u, const LemmaParams& lp);

// Constants of the small-coupling nonexistence threshold at (alpha, p):
// beta = (2p-4)/(p-4), eps = 1, C from lemma_constant,
// C1 = 2/(beta pi log 2), C2 = C/(pi log 2), qbar = min(1/C1, 1/C2).
// Requires p > 4 and alpha > (2p-4)/(p-4).
struct NonexistenceConstants {
    double alpha = 0.0, p = 0.0, beta = 0.0, epsilon = 1.0;
    double C = 0.0, C1 = 0.0, C2 = 0.0;
    double qbar = 0.0;
};

NonexistenceConstants nonexistence_constants(double alpha, double p);
double nonexistence_qbar(double alpha, double p);

// CSV export of the constants table (fixed column order).
std::string constants_csv_header();
std::string constants_csv_row(const NonexistenceConstants& c);

// Coefficient of the radial decay bound |u(r)| <= C x_norm(u) / r^{(alpha+2)/4}
// for r >= 1: with k = (alpha+2)/2, C = ((k+1)/sqrt(2 pi) + 1/(2 pi))^{1/2}.
double strauss_coefficient(double alpha);

// lhs = max over grid samples with r >= 1 of r^{(alpha+2)/4} |u(r)|,
// rhs = strauss_coefficient(alpha) * x_norm(u, alpha).
BoundCheck strauss_bound(const RadialField& u, double alpha);

// Scalar embedding constants at a given weight exponent:
//   c_alpha        max_{r>=0} log(2+r)/(1+r^alpha)   (clamped below at 1+1e-9,
//                  the clamp is flagged; downstream bounds assume > 1)
//   c_alpha_prime  max_{r>=0} log^2(2+r)/(1+r^alpha)
//   c_gn           library constant of ||u||_p^p <= c ||u||_2^2 ||grad||_2^{p-2}
//   d_est          library max of V2(u)/||u||_{8/3}^4
// Library constants are quoted against the versioned field-library seed.
struct EmbeddingConstants {
    double c_alpha = 0.0;
    bool c_alpha_clamped = false;
    double c_alpha_prime = 0.0;
    double c_gn = 0.0;
    double d_est = 0.0;
};

EmbeddingConstants embedding_constants(double alpha, double p = 4.0);

// Empirical max of ||u||_p^p / x_norm(u)^p over the field library; the
// mountain-pass floor uses it as the L^p embedding constant.
double lp_embedding_constant(double alpha, double p);

} // namespace psm
