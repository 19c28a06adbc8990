#include "tsvar/dynamic.hpp"

#include <algorithm>
#include <cmath>

namespace tsvar {

namespace {

void require_regressive(const GridFunction& p) {
    if (!is_regressive(p))
        throw validation_error("coefficient is not regressive: 1 + mu(t) p(t) vanishes");
}

void check_pair(const CoefficientPair& pair) {
    if (!pair.p.grid || !pair.f.grid) throw config_error("coefficient pair needs a grid");
    const std::size_t kappa = pair.p.grid->kappa_size();
    if (pair.p.size() < kappa || pair.f.size() < kappa)
        throw config_error("coefficient pair must cover the kappa-domain");
    require_regressive(pair.p);
}

} // namespace

bool is_regressive(const GridFunction& p) {
    const std::size_t m = std::min(p.size(), p.grid->kappa_size());
    for (std::size_t i = 0; i < m; ++i)
        if (1.0 + p.grid->mu_at(i) * p[i] == 0.0) return false;
    return true;
}

double exp_ts_at(const GridFunction& p, std::size_t i, std::size_t i0) {
    if (i0 > i) return 1.0 / exp_ts_at(p, i0, i);
    double prod = 1.0;
    for (std::size_t j = i0; j < i; ++j) {
        const double factor = 1.0 + p.grid->mu_at(j) * p[j];
        if (factor == 0.0)
            throw validation_error("coefficient is not regressive at t = " +
                                   std::to_string(p.grid->point(j)));
        prod *= factor;
    }
    return prod;
}

double exp_ts(const GridFunction& p, double t, double t0) {
    return exp_ts_at(p, p.grid->index_of(t), p.grid->index_of(t0));
}

GridFunction solve_ivp(const CoefficientPair& pair, double t0, double y0, IvpMethod method) {
    check_pair(pair);
    const GridPtr& grid = pair.p.grid;
    if (t0 != grid->a())
        throw validation_error("forward solve must start at the grid's left endpoint");

    const std::size_t n = grid->size();
    std::vector<double> y(n);

    switch (method) {
        case IvpMethod::recurrence: {
            y[0] = y0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                const double mu = grid->mu_at(i);
                y[i + 1] = y[i] + mu * (pair.p[i] * y[i] + pair.f[i]);
            }
            break;
        }
        case IvpMethod::var_of_constants: {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = exp_ts_at(pair.p, i, 0) * y0;
                for (std::size_t j = 0; j < i; ++j)
                    acc += grid->mu_at(j) * exp_ts_at(pair.p, i, j + 1) * pair.f[j];
                y[i] = acc;
            }
            break;
        }
        case IvpMethod::factored: {
            // Prefix products E[i] = e_p(t_i, a); e_p(a, sigma(tau_j)) = 1/E[j+1].
            std::vector<double> prefix(n);
            prefix[0] = 1.0;
            for (std::size_t i = 0; i + 1 < n; ++i)
                prefix[i + 1] = prefix[i] * (1.0 + grid->mu_at(i) * pair.p[i]);
            double inner = y0;
            y[0] = prefix[0] * inner;
            for (std::size_t i = 1; i < n; ++i) {
                inner += grid->mu_at(i - 1) * pair.f[i - 1] / prefix[i];
                y[i] = prefix[i] * inner;
            }
            break;
        }
    }
    return GridFunction(grid, std::move(y));
}

} // namespace tsvar
