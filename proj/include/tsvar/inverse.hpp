#pragma once

#include <string>
#include <vector>

#include "tsvar/dynamic.hpp"
#include "tsvar/expr.hpp"
#include "tsvar/timescale.hpp"

namespace tsvar {

/// The free data of the synthesis: expressions P(t,x), p(t), q(t,x),
/// w(t,x,v) plus the constants C and R0. Variable restrictions are
/// enforced at construction; the original source strings are kept for
/// serialization.
struct IngredientBundle {
    Expr P, p, q, w;
    std::string P_src = "0", p_src = "1", q_src = "0", w_src = "0";
    double C = 0.0;
    double R0 = 1.0;

    static IngredientBundle from_sources(const std::string& P_src, const std::string& p_src,
                                         const std::string& q_src, const std::string& w_src,
                                         double C, double R0);

    /// Checks p(t) > 0 at every kappa^2-point of `grid`; throws
    /// validation_error otherwise.
    void validate_on(const GridPtr& grid) const;
};

/// Which trajectory the synthesized functional should be extremal at.
struct ExtremalSpec {
    enum class Kind { zero, expression, values };
    Kind kind = Kind::zero;
    Expr expr; // t-only, kind == expression
    std::string expr_src;
    std::vector<double> values; // kind == values

    static ExtremalSpec zero() { return {}; }
    static ExtremalSpec from_expression(const std::string& source);
    static ExtremalSpec from_values(std::vector<double> values);

    /// Trajectory values at every grid point.
    GridFunction sample(const GridPtr& grid) const;
};

/// Coefficients of the dynamic equation satisfied by the profile
/// R(t,0,0): R^Delta = r R + s on the kappa^2-domain.
struct RSCoefficients {
    GridFunction r;
    GridFunction s;
};

/// Q(t, x) splits into a t-only offset plus q(t,x) - q(t,0); this is
/// the offset: C + integral of P_x(tau, 0) over [a, t). Defined at
/// every grid point.
GridFunction build_offset_q(const GridPtr& grid, const IngredientBundle& ing);

/// r and s on the kappa^2-domain. r is always regressive on isolated
/// grids: 1 + mu r = -mu(sigma)/mu != 0.
RSCoefficients rs_coefficients(const GridPtr& grid, const IngredientBundle& ing);

enum class RMethod {
    recurrence,     ///< advance R(sigma) = R + mu (r R + s); reference method
    closed_form,    ///< e_r(t,a) R0 + sum of mu e_r(t,sigma(tau)) s(tau)
    closed_form_alt ///< e_r(t,a) [R0 + sum of mu e_r(a,sigma(tau)) s(tau)]
};

/// The profile R(t,0,0) on the points a..rho(b), from R(a) = R0. The
/// closed forms are independent cross-checks of the recurrence.
GridFunction solve_r_profile(const GridPtr& grid, const IngredientBundle& ing,
                             RMethod method = RMethod::recurrence);

/// A synthesized Lagrangian
///   L(t,x,v) = P(t,xs) + [offsetQ(t) + q(t,xs) - qbase(t)] vs
///              + 1/2 [R(t) + w(t,xs,vs) - wbase(t)] vs^2
/// where (xs, vs) = (x - y0^sigma(t), v - y0^Delta(t)). The default
/// construction shifts a null-extremal form onto y0, with baselines
/// qbase = q(t,0), wbase = w(t,0,0); the literal variant instead uses
/// baselines at -y0^sigma as printed in the general theorem, kept for
/// side-by-side residual comparison.
///
/// Immutable; evaluation is pure and may run concurrently.
class LagrangianForm {
  public:
    /// Value and all (x,v)-partials at grid index i (kappa-domain).
    HyperDual eval(std::size_t i, double x, double v) const {
        return eval(i, HyperDual::var_x(x), HyperDual::var_v(v));
    }
    HyperDual eval(std::size_t i, const HyperDual& x, const HyperDual& v) const;

    const GridPtr& grid() const { return grid_; }
    const IngredientBundle& ingredients() const { return ing_; }
    const ExtremalSpec& extremal() const { return extremal_; }
    const GridFunction& extremal_values() const { return y0_; }
    const GridFunction& offset_q() const { return offset_q_; }
    const GridFunction& r_profile() const { return r_profile_; }
    bool literal_general() const { return literal_; }

    double alpha() const { return y0_.values.front(); }
    double beta() const { return y0_.values.back(); }

    /// Reassemble from stored arrays (bundle files); recomputes only
    /// the derived per-point baselines.
    static LagrangianForm from_parts(GridPtr grid, IngredientBundle ing, ExtremalSpec extremal,
                                     std::vector<double> offset_q, std::vector<double> r_profile,
                                     bool literal_general);

  private:
    friend LagrangianForm assemble_lagrangian(const GridPtr&, const IngredientBundle&,
                                              const ExtremalSpec&);
    friend LagrangianForm literal_general_form(const GridPtr&, const IngredientBundle&,
                                               const ExtremalSpec&);

    LagrangianForm() = default;

    GridPtr grid_;
    IngredientBundle ing_;
    ExtremalSpec extremal_;
    GridFunction y0_;        // all points
    GridFunction offset_q_;  // all points
    GridFunction r_profile_; // a..rho(b)
    std::vector<double> shift_x_, shift_v_; // kappa: y0^sigma, y0^Delta
    std::vector<double> q_base_, w_base_;   // kappa
    bool literal_ = false;
};

/// Default synthesis: null-extremal construction shifted onto the
/// requested extremal.
LagrangianForm assemble_lagrangian(const GridPtr& grid, const IngredientBundle& ing,
                                   const ExtremalSpec& extremal);

/// The general theorem's printed formula, with integrand baselines at
/// -y0^sigma instead of 0. Coincides with assemble_lagrangian when the
/// extremal is zero.
LagrangianForm literal_general_form(const GridPtr& grid, const IngredientBundle& ing,
                                    const ExtremalSpec& extremal);

/// Null-extremal Lagrangian with the R profile taken from the
/// alternating-sum form specific to uniform grids. Oracle for
/// assemble_lagrangian; throws domain_error if the grid is not uniform.
LagrangianForm closed_form_hz(const GridPtr& grid, const IngredientBundle& ing);

/// Same, with the product form specific to q-power grids.
LagrangianForm closed_form_q(const GridPtr& grid, const IngredientBundle& ing);

} // namespace tsvar
