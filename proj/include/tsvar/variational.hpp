#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "tsvar/expr.hpp"
#include "tsvar/inverse.hpp"
#include "tsvar/timescale.hpp"

namespace tsvar {

/// Any Lagrangian the verifier can interrogate: (grid index on the
/// kappa-domain, x, v) -> value with (x,v)-partials.
using LagrangianFn = std::function<HyperDual(std::size_t, double, double)>;

/// Minimize the integral of L(t, y^sigma, y^Delta) over [a,b) subject
/// to y(a) = alpha, y(b) = beta.
struct VariationalProblem {
    GridPtr grid;
    LagrangianFn L;
    double alpha = 0.0;
    double beta = 0.0;
};

/// Problem whose Lagrangian is a synthesized form and whose boundary
/// conditions come from the form's extremal.
VariationalProblem make_problem(const LagrangianForm& form);

/// Problem with a hand-written Lagrangian expression in (t, x, v).
VariationalProblem make_problem(GridPtr grid, const Expr& lagrangian, double alpha, double beta);

/// The functional value: sum of mu(t) L(t, y^sigma(t), y^Delta(t))
/// over [a,b). Throws verification_error if y misses the boundary
/// conditions (tolerance 1e-12).
double evaluate_functional(const VariationalProblem& prob, const GridFunction& y);

struct ElResidual {
    GridFunction g;   ///< L_v - integral of L_x, on the kappa-domain
    double constancy; ///< max |g - mean(g)|; ~0 iff the EL equation holds
    double mean;      ///< the EL constant c
};

/// Integral-form Euler-Lagrange residual along y.
ElResidual el_residual(const VariationalProblem& prob, const GridFunction& y);

/// Legendre left-hand side on the kappa^2-domain:
///   A + mu { 2 C + mu B + dagger(mu(sigma)) A(sigma) }
/// with A = L_vv, B = L_xx, C = L_xv along y. Nonnegative everywhere
/// is necessary for a local minimum; strictly positive is the
/// strengthened condition.
GridFunction legendre_lhs(const VariationalProblem& prob, const GridFunction& y);

/// Sup-norm of the gradient of the discretized functional with respect
/// to the interior trajectory values, from exact partials of L.
double stationarity_gradient(const VariationalProblem& prob, const GridFunction& y);

/// sup |y^sigma| + sup |y^Delta| over the kappa-domain.
double c1rd_norm(const GridFunction& y);

/// Draws `count` seeded zero-boundary perturbations of size at most
/// `radius` in the C1_rd norm and returns the smallest observed change
/// of the functional. Reported, not asserted nonnegative: the
/// necessary conditions verified here are not sufficient.
double perturbation_sample(const VariationalProblem& prob, const GridFunction& y0, int count,
                           double radius, std::uint64_t seed);

/// Results of the checks that ran; absent optionals mean a check was
/// not requested.
struct VerificationReport {
    struct El {
        GridFunction g;
        double constancy = 0.0;
        double mean = 0.0;
    };
    struct Legendre {
        GridFunction lhs;
        double min = 0.0;
        bool strictly_positive = false;
    };
    std::optional<El> el;
    std::optional<Legendre> legendre;
    std::optional<double> grad_norm;
    std::optional<double> perturbation_min_delta;
};

struct VerifyOptions {
    bool with_gradient = true;
    int perturbations = 0;
    double radius = 0.1;
    std::uint64_t seed = 0;
};

/// Runs the EL, Legendre and (optionally) gradient/perturbation checks
/// along y and assembles the report.
VerificationReport run_verification(const VariationalProblem& prob, const GridFunction& y,
                                    const VerifyOptions& opts = {});

} // namespace tsvar
