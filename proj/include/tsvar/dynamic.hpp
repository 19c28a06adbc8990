#pragma once

#include "tsvar/timescale.hpp"

namespace tsvar {

/// Data of the first-order dynamic IVP  y^Delta = p(t) y + f(t).
/// Both coefficients live on the kappa-domain.
struct CoefficientPair {
    GridFunction p;
    GridFunction f;
};

/// True iff 1 + mu(t) p(t) != 0 at every kappa-point p covers.
bool is_regressive(const GridFunction& p);

/// Time-scale exponential e_p(t, t0): product of (1 + mu p) over grid
/// points in [t0, t). e_p(t, t0) = 1/e_p(t0, t) when t < t0. Throws
/// validation_error if p is not regressive on the span.
double exp_ts(const GridFunction& p, double t, double t0);

/// Index-based variant used by the solvers.
double exp_ts_at(const GridFunction& p, std::size_t i, std::size_t i0);

enum class IvpMethod {
    recurrence,       ///< advance y(sigma(t)) = y(t) + mu (p y + f); reference method
    var_of_constants, ///< e_p(t,t0) y0 + sum of mu e_p(t,sigma(tau)) f(tau)
    factored          ///< e_p(t,t0) [y0 + sum of mu e_p(t0,sigma(tau)) f(tau)]
};

/// Forward solve of the IVP from t0 = a with y(a) = y0. All three
/// methods produce the same solution up to rounding; `recurrence` is
/// exact on isolated scales and is the default. var_of_constants
/// recomputes each exponential factor from scratch, so it costs
/// O(n^2); use it as a cross-check, not on large grids.
GridFunction solve_ivp(const CoefficientPair& pair, double t0, double y0,
                       IvpMethod method = IvpMethod::recurrence);

} // namespace tsvar
