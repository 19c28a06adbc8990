#include "tsvar/inverse.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace tsvar {

namespace {

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// Partials of the ingredient expressions along the x-axis at v = 0.
double P_x(const IngredientBundle& ing, double t, double x_base) {
    return ing.P.eval2(t, x_base, 0.0).dx;
}
double P_xx(const IngredientBundle& ing, double t) { return ing.P.eval2(t, 0.0, 0.0).dxx; }
// Q_x(t,0) equals q_x(t,0): the rest of Q does not depend on x.
double Q_x(const IngredientBundle& ing, double t) { return ing.q.eval2(t, 0.0, 0.0).dx; }

} // namespace

IngredientBundle IngredientBundle::from_sources(const std::string& P_src, const std::string& p_src,
                                                const std::string& q_src, const std::string& w_src,
                                                double C, double R0) {
    IngredientBundle b;
    b.P = Expr::parse(P_src);
    b.p = Expr::parse(p_src);
    b.q = Expr::parse(q_src);
    b.w = Expr::parse(w_src);
    require_variables(b.P, var_t | var_x, "ingredient P");
    require_variables(b.p, var_t, "ingredient p");
    require_variables(b.q, var_t | var_x, "ingredient q");
    require_variables(b.w, var_t | var_x | var_v, "ingredient w");
    b.P_src = P_src;
    b.p_src = p_src;
    b.q_src = q_src;
    b.w_src = w_src;
    b.C = C;
    b.R0 = R0;
    return b;
}

void IngredientBundle::validate_on(const GridPtr& grid) const {
    for (std::size_t i = 0; i < grid->kappa2_size(); ++i) {
        const double t = grid->point(i);
        const double value = p.eval_t(t);
        if (!(value > 0.0))
            throw validation_error("ingredient p must satisfy p(t) > 0 on the kappa^2-domain; "
                                   "p(" +
                                   format_value(t) + ") = " + format_value(value));
    }
}

ExtremalSpec ExtremalSpec::from_expression(const std::string& source) {
    ExtremalSpec s;
    s.kind = Kind::expression;
    s.expr = Expr::parse(source);
    require_variables(s.expr, var_t, "extremal y0");
    s.expr_src = source;
    return s;
}

ExtremalSpec ExtremalSpec::from_values(std::vector<double> values) {
    ExtremalSpec s;
    s.kind = Kind::values;
    s.values = std::move(values);
    return s;
}

GridFunction ExtremalSpec::sample(const GridPtr& grid) const {
    switch (kind) {
        case Kind::zero: return GridFunction::zeros(grid);
        case Kind::expression:
            return GridFunction::sample(grid, [this](double t) { return expr.eval_t(t); });
        case Kind::values:
            if (values.size() != grid->size())
                throw config_error("extremal values: expected " + std::to_string(grid->size()) +
                                   " entries, got " + std::to_string(values.size()));
            return GridFunction(grid, values);
    }
    throw config_error("unknown extremal kind");
}

GridFunction build_offset_q(const GridPtr& grid, const IngredientBundle& ing) {
    auto integrand = GridFunction::sample(
        grid, [&](double t) { return P_x(ing, t, 0.0); }, grid->kappa_size());
    GridFunction offset = delta_integral_from_start(integrand);
    for (double& v : offset.values) v += ing.C;
    return offset;
}

RSCoefficients rs_coefficients(const GridPtr& grid, const IngredientBundle& ing) {
    const std::size_t m = grid->kappa2_size();
    std::vector<double> r(m), s(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double t = grid->point(i);
        const double mu = grid->mu_at(i);
        const double dag = dagger(grid->mu_at(i + 1));
        const double denom = mu * mu * dag;
        r[i] = -(1.0 + mu * dag) / denom;
        s[i] = (ing.p.eval_t(t) - mu * (2.0 * Q_x(ing, t) + mu * P_xx(ing, t))) / denom;
    }
    return {GridFunction(grid, std::move(r)), GridFunction(grid, std::move(s))};
}

GridFunction solve_r_profile(const GridPtr& grid, const IngredientBundle& ing, RMethod method) {
    ing.validate_on(grid);
    const RSCoefficients rs = rs_coefficients(grid, ing);
    const std::size_t m = grid->kappa_size(); // profile covers a .. rho(b)
    std::vector<double> R(m);

    switch (method) {
        case RMethod::recurrence: {
            R[0] = ing.R0;
            for (std::size_t i = 0; i + 1 < m; ++i) {
                const double mu = grid->mu_at(i);
                R[i + 1] = R[i] + mu * (rs.r[i] * R[i] + rs.s[i]);
            }
            break;
        }
        case RMethod::closed_form: {
            for (std::size_t i = 0; i < m; ++i) {
                double acc = exp_ts_at(rs.r, i, 0) * ing.R0;
                for (std::size_t j = 0; j < i; ++j)
                    acc += grid->mu_at(j) * exp_ts_at(rs.r, i, j + 1) * rs.s[j];
                R[i] = acc;
            }
            break;
        }
        case RMethod::closed_form_alt: {
            double inner = ing.R0;
            for (std::size_t i = 0; i < m; ++i) {
                if (i > 0)
                    inner += grid->mu_at(i - 1) * exp_ts_at(rs.r, 0, i) * rs.s[i - 1];
                R[i] = exp_ts_at(rs.r, i, 0) * inner;
            }
            break;
        }
    }
    return GridFunction(grid, std::move(R));
}

HyperDual LagrangianForm::eval(std::size_t i, const HyperDual& x, const HyperDual& v) const {
    if (i >= shift_x_.size())
        throw domain_error("Lagrangian evaluation is restricted to the kappa-domain");
    const double t = grid_->point(i);
    const HyperDual X = x - HyperDual{shift_x_[i]};
    const HyperDual V = v - HyperDual{shift_v_[i]};
    const HyperDual p_term = ing_.P.eval(t, X, V);
    const HyperDual q_term = ing_.q.eval(t, X, V);
    const HyperDual w_term = ing_.w.eval(t, X, V);
    const HyperDual Q = HyperDual{offset_q_[i]} + q_term - HyperDual{q_base_[i]};
    const HyperDual R = HyperDual{r_profile_[i]} + w_term - HyperDual{w_base_[i]};
    return p_term + Q * V + HyperDual{0.5} * R * V * V;
}

LagrangianForm LagrangianForm::from_parts(GridPtr grid, IngredientBundle ing,
                                          ExtremalSpec extremal, std::vector<double> offset_q,
                                          std::vector<double> r_profile, bool literal_general) {
    LagrangianForm L;
    L.grid_ = grid;
    L.ing_ = std::move(ing);
    L.extremal_ = std::move(extremal);
    L.y0_ = L.extremal_.sample(grid);
    if (offset_q.size() != grid->size())
        throw config_error("offset Q array must cover every grid point");
    if (r_profile.size() != grid->kappa_size())
        throw config_error("R profile array must cover a .. rho(b)");
    L.offset_q_ = GridFunction(grid, std::move(offset_q));
    L.r_profile_ = GridFunction(grid, std::move(r_profile));
    L.literal_ = literal_general;

    const std::size_t kappa = grid->kappa_size();
    L.shift_x_.resize(kappa);
    L.shift_v_.resize(kappa);
    L.q_base_.resize(kappa);
    L.w_base_.resize(kappa);
    for (std::size_t i = 0; i < kappa; ++i) {
        const double t = grid->point(i);
        L.shift_x_[i] = L.y0_[i + 1];
        L.shift_v_[i] = (L.y0_[i + 1] - L.y0_[i]) / grid->mu_at(i);
        const double bx = literal_general ? -L.shift_x_[i] : 0.0;
        const double bv = literal_general ? -L.shift_v_[i] : 0.0;
        L.q_base_[i] = L.ing_.q.eval2(t, bx, 0.0).val;
        L.w_base_[i] = L.ing_.w.eval2(t, bx, bv).val;
    }
    return L;
}

LagrangianForm assemble_lagrangian(const GridPtr& grid, const IngredientBundle& ing,
                                   const ExtremalSpec& extremal) {
    ing.validate_on(grid);
    GridFunction offset = build_offset_q(grid, ing);
    GridFunction profile = solve_r_profile(grid, ing);
    return LagrangianForm::from_parts(grid, ing, extremal, std::move(offset.values),
                                      std::move(profile.values), false);
}

LagrangianForm literal_general_form(const GridPtr& grid, const IngredientBundle& ing,
                                    const ExtremalSpec& extremal) {
    ing.validate_on(grid);
    const GridFunction y0 = extremal.sample(grid);
    // Offset integrand at the shifted baseline -y0^sigma(tau).
    std::vector<double> px(grid->kappa_size());
    for (std::size_t i = 0; i < px.size(); ++i)
        px[i] = P_x(ing, grid->point(i), -y0[i + 1]);
    GridFunction offset = delta_integral_from_start(GridFunction(grid, std::move(px)));
    for (double& v : offset.values) v += ing.C;
    GridFunction profile = solve_r_profile(grid, ing);
    return LagrangianForm::from_parts(grid, ing, extremal, std::move(offset.values),
                                      std::move(profile.values), true);
}

LagrangianForm closed_form_hz(const GridPtr& grid, const IngredientBundle& ing) {
    const std::size_t n = grid->size();
    const double h = (grid->b() - grid->a()) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(grid->mu_at(i) - h) > 1e-12 * h)
            throw domain_error("closed_form_hz requires a uniform grid");
    ing.validate_on(grid);

    std::vector<double> offset(n);
    offset[0] = ing.C;
    for (std::size_t i = 1; i < n; ++i)
        offset[i] = offset[i - 1] + h * P_x(ing, grid->point(i - 1), 0.0);

    // R(kh) = (-1)^k R0 + sum_{i<k} (-1)^(k-i-1) (p - 2h Q_x - h^2 P_xx).
    const std::size_t m = n - 1;
    std::vector<double> R(m);
    for (std::size_t k = 0; k < m; ++k) {
        double acc = (k % 2 == 0 ? 1.0 : -1.0) * ing.R0;
        for (std::size_t i = 0; i < k; ++i) {
            const double t = grid->point(i);
            const double term =
                ing.p.eval_t(t) - 2.0 * h * Q_x(ing, t) - h * h * P_xx(ing, t);
            acc += ((k - i - 1) % 2 == 0 ? 1.0 : -1.0) * term;
        }
        R[k] = acc;
    }
    return LagrangianForm::from_parts(grid, ing, ExtremalSpec::zero(), std::move(offset),
                                      std::move(R), false);
}

LagrangianForm closed_form_q(const GridPtr& grid, const IngredientBundle& ing) {
    const std::size_t n = grid->size();
    if (!(grid->a() > 0.0)) throw domain_error("closed_form_q requires positive grid points");
    const double q = grid->point(1) / grid->point(0);
    if (!(q > 1.0)) throw domain_error("closed_form_q requires ratio q > 1");
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (std::abs(grid->point(i + 1) / grid->point(i) - q) > 1e-12 * q)
            throw domain_error("closed_form_q requires a q-power grid");
    ing.validate_on(grid);

    // integral of P_x over [a,t) = (q-1) sum tau P_x(tau, 0).
    std::vector<double> offset(n);
    offset[0] = ing.C;
    double px_sum = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double tau = grid->point(i - 1);
        px_sum += tau * P_x(ing, tau, 0.0);
        offset[i] = ing.C + (q - 1.0) * px_sum;
    }

    // e_r(t,a) is the running product of (-q); the bracketed sum uses
    // e_r(a, sigma(tau)) = 1/((-q)^(j+1)) spelled out per term.
    const std::size_t m = n - 1;
    std::vector<double> R(m);
    double power = 1.0; // (-q)^i
    double inner = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        R[i] = power * (ing.R0 + inner);
        const double tau = grid->point(i);
        const double term = q * ing.p.eval_t(tau) / (tau * (q - 1.0)) -
                            2.0 * q * Q_x(ing, tau) - q * (q - 1.0) * tau * P_xx(ing, tau);
        inner += (1.0 - q) * tau / (q * power) * term;
        power *= -q;
    }
    return LagrangianForm::from_parts(grid, ing, ExtremalSpec::zero(), std::move(offset),
                                      std::move(R), false);
}

} // namespace tsvar
