#include "tsvar/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tsvar {

namespace {

void check_admissible(const VariationalProblem& prob, const GridFunction& y) {
    if (y.size() != prob.grid->size())
        throw verification_error("trajectory must cover every grid point");
    const double tol_a = 1e-12 * std::max(1.0, std::abs(prob.alpha));
    const double tol_b = 1e-12 * std::max(1.0, std::abs(prob.beta));
    if (std::abs(y.values.front() - prob.alpha) > tol_a ||
        std::abs(y.values.back() - prob.beta) > tol_b) {
        std::ostringstream os;
        os.precision(17);
        os << "trajectory misses the boundary conditions: y(a) = " << y.values.front()
           << " vs alpha = " << prob.alpha << ", y(b) = " << y.values.back()
           << " vs beta = " << prob.beta;
        throw verification_error(os.str());
    }
}

// L and its partials at kappa-index i along y.
HyperDual eval_along(const VariationalProblem& prob, const GridFunction& y, std::size_t i) {
    const double mu = prob.grid->mu_at(i);
    const double y_sigma = y[i + 1];
    const double y_delta = (y[i + 1] - y[i]) / mu;
    return prob.L(i, y_sigma, y_delta);
}

} // namespace

VariationalProblem make_problem(const LagrangianForm& form) {
    VariationalProblem prob;
    prob.grid = form.grid();
    prob.alpha = form.alpha();
    prob.beta = form.beta();
    prob.L = [form](std::size_t i, double x, double v) { return form.eval(i, x, v); };
    return prob;
}

VariationalProblem make_problem(GridPtr grid, const Expr& lagrangian, double alpha, double beta) {
    VariationalProblem prob;
    prob.grid = std::move(grid);
    prob.alpha = alpha;
    prob.beta = beta;
    GridPtr g = prob.grid;
    prob.L = [g, lagrangian](std::size_t i, double x, double v) {
        return lagrangian.eval(g->point(i), HyperDual::var_x(x), HyperDual::var_v(v));
    };
    return prob;
}

double evaluate_functional(const VariationalProblem& prob, const GridFunction& y) {
    check_admissible(prob, y);
    double acc = 0.0;
    for (std::size_t i = 0; i < prob.grid->kappa_size(); ++i)
        acc += prob.grid->mu_at(i) * eval_along(prob, y, i).val;
    return acc;
}

ElResidual el_residual(const VariationalProblem& prob, const GridFunction& y) {
    check_admissible(prob, y);
    const std::size_t kappa = prob.grid->kappa_size();
    std::vector<double> lv(kappa), lx(kappa);
    for (std::size_t i = 0; i < kappa; ++i) {
        const HyperDual L = eval_along(prob, y, i);
        lv[i] = L.dv;
        lx[i] = L.dx;
    }
    const GridFunction lx_integral =
        delta_integral_from_start(GridFunction(prob.grid, std::move(lx)));

    std::vector<double> g(kappa);
    for (std::size_t i = 0; i < kappa; ++i) g[i] = lv[i] - lx_integral[i];

    const double mean = std::accumulate(g.begin(), g.end(), 0.0) / static_cast<double>(kappa);
    double constancy = 0.0;
    for (double gi : g) constancy = std::max(constancy, std::abs(gi - mean));
    return {GridFunction(prob.grid, std::move(g)), constancy, mean};
}

GridFunction legendre_lhs(const VariationalProblem& prob, const GridFunction& y) {
    check_admissible(prob, y);
    const std::size_t kappa = prob.grid->kappa_size();
    std::vector<double> A(kappa), B(kappa), C(kappa);
    for (std::size_t i = 0; i < kappa; ++i) {
        const HyperDual L = eval_along(prob, y, i);
        A[i] = L.dvv;
        B[i] = L.dxx;
        C[i] = L.dxv;
    }
    std::vector<double> lhs(prob.grid->kappa2_size());
    for (std::size_t i = 0; i < lhs.size(); ++i) {
        const double mu = prob.grid->mu_at(i);
        lhs[i] = A[i] + mu * (2.0 * C[i] + mu * B[i] + dagger(prob.grid->mu_at(i + 1)) * A[i + 1]);
    }
    return GridFunction(prob.grid, std::move(lhs));
}

double stationarity_gradient(const VariationalProblem& prob, const GridFunction& y) {
    check_admissible(prob, y);
    const std::size_t n = prob.grid->size();
    std::vector<HyperDual> L(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) L[i] = eval_along(prob, y, i);

    // d/dy_k of sum mu_i L(t_i, y_{i+1}, (y_{i+1}-y_i)/mu_i), interior k.
    double sup = 0.0;
    for (std::size_t k = 1; k + 1 < n; ++k) {
        const double gk = prob.grid->mu_at(k - 1) * L[k - 1].dx + L[k - 1].dv - L[k].dv;
        sup = std::max(sup, std::abs(gk));
    }
    return sup;
}

double c1rd_norm(const GridFunction& y) {
    if (y.size() != y.grid->size())
        throw domain_error("C1_rd norm needs values at every grid point");
    double sup_sigma = 0.0, sup_delta = 0.0;
    for (std::size_t i = 0; i < y.grid->kappa_size(); ++i) {
        sup_sigma = std::max(sup_sigma, std::abs(y[i + 1]));
        sup_delta = std::max(sup_delta, std::abs((y[i + 1] - y[i]) / y.grid->mu_at(i)));
    }
    return sup_sigma + sup_delta;
}

double perturbation_sample(const VariationalProblem& prob, const GridFunction& y0, int count,
                           double radius, std::uint64_t seed) {
    if (count < 1) throw config_error("perturbation_sample needs count >= 1");
    if (radius < 0.0) throw config_error("perturbation_sample needs radius >= 0");
    const double base = evaluate_functional(prob, y0);
    const std::size_t n = prob.grid->size();

    // splitmix64-seeded xorshift mix: deterministic across platforms,
    // unlike std::uniform_real_distribution.
    std::uint64_t state = seed + 0x9e3779b97f4a7c15ull;
    auto next_unit = [&state]() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z = z ^ (z >> 31);
        return static_cast<double>(z >> 11) * 0x1.0p-53; // [0,1)
    };

    double min_delta = 0.0;
    bool first = true;
    GridFunction trial = y0;
    for (int sample = 0; sample < count; ++sample) {
        GridFunction eta = GridFunction::zeros(prob.grid);
        for (std::size_t i = 1; i + 1 < n; ++i) eta[i] = 2.0 * next_unit() - 1.0;
        const double amplitude = next_unit();
        const double norm = c1rd_norm(eta);
        const double scale = norm > 0.0 ? radius * amplitude / norm : 0.0;
        for (std::size_t i = 0; i < n; ++i) trial[i] = y0[i] + scale * eta[i];
        const double delta = evaluate_functional(prob, trial) - base;
        if (first || delta < min_delta) min_delta = delta;
        first = false;
    }
    return min_delta;
}

VerificationReport run_verification(const VariationalProblem& prob, const GridFunction& y,
                                    const VerifyOptions& opts) {
    VerificationReport report;

    const ElResidual el = el_residual(prob, y);
    report.el = VerificationReport::El{el.g, el.constancy, el.mean};

    GridFunction lhs = legendre_lhs(prob, y);
    double min_lhs = lhs[0];
    for (double v : lhs.values) min_lhs = std::min(min_lhs, v);
    report.legendre = VerificationReport::Legendre{std::move(lhs), min_lhs, min_lhs > 0.0};

    if (opts.with_gradient) report.grad_norm = stationarity_gradient(prob, y);
    if (opts.perturbations > 0)
        report.perturbation_min_delta =
            perturbation_sample(prob, y, opts.perturbations, opts.radius, opts.seed);
    return report;
}

} // namespace tsvar
