#include "tsvar/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsvar {

namespace {

std::string format_point(double t) {
    std::ostringstream os;
    os.precision(17);
    os << t;
    return os.str();
}

} // namespace

TimeScaleGrid::TimeScaleGrid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 3)
        throw config_error("a time scale grid needs at least three points, got " +
                           std::to_string(points_.size()));
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]))
            throw config_error("grid point " + std::to_string(i) + " is not finite");
        if (i > 0 && !(points_[i - 1] < points_[i]))
            throw config_error("grid points must be strictly increasing; violated at index " +
                               std::to_string(i) + " (" + format_point(points_[i - 1]) +
                               " then " + format_point(points_[i]) + ")");
    }
}

GridPtr TimeScaleGrid::uniform(double a, double b, double h) {
    if (!(h > 0.0)) throw config_error("uniform grid: h must be positive");
    if (!(b > a)) throw config_error("uniform grid: b must exceed a");
    const double steps = (b - a) / h;
    const double rounded = std::round(steps);
    if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, std::abs(steps)))
        throw config_error("uniform grid: b-a must be an integer multiple of h");
    const auto n = static_cast<std::size_t>(rounded);
    std::vector<double> pts(n + 1);
    for (std::size_t i = 0; i <= n; ++i) pts[i] = a + static_cast<double>(i) * h;
    pts[n] = b; // pin the right endpoint exactly
    return GridPtr(new TimeScaleGrid(std::move(pts)));
}

GridPtr TimeScaleGrid::qpow(double q, int kmin, int kmax) {
    if (!(q > 1.0)) throw config_error("q-power grid: q must exceed 1");
    if (kmax < kmin) throw config_error("q-power grid: kmax must be >= kmin");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(kmax - kmin) + 1);
    for (int k = kmin; k <= kmax; ++k) pts.push_back(std::pow(q, k));
    return GridPtr(new TimeScaleGrid(std::move(pts)));
}

GridPtr TimeScaleGrid::from_points(std::vector<double> points) {
    return GridPtr(new TimeScaleGrid(std::move(points)));
}

std::size_t TimeScaleGrid::index_of(double t) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), t);
    if (it == points_.end() || *it != t)
        throw domain_error("t = " + format_point(t) + " is not a grid point");
    return static_cast<std::size_t>(it - points_.begin());
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v)
    : grid(std::move(g)), values(std::move(v)) {
    if (!grid) throw config_error("grid function needs a grid");
    if (values.size() > grid->size())
        throw config_error("grid function has more values than grid points");
}

GridFunction GridFunction::zeros(GridPtr g, std::size_t count) {
    return GridFunction(std::move(g), std::vector<double>(count, 0.0));
}

GridFunction delta_derivative(const GridFunction& f) {
    if (f.size() < 2) throw domain_error("delta derivative needs at least two values");
    std::vector<double> d(f.size() - 1);
    for (std::size_t i = 0; i + 1 < f.size(); ++i)
        d[i] = (f[i + 1] - f[i]) / f.grid->mu_at(i);
    return GridFunction(f.grid, std::move(d));
}

double delta_integral(const GridFunction& f, double lo, double hi) {
    const std::size_t ilo = f.grid->index_of(lo);
    const std::size_t ihi = f.grid->index_of(hi);
    if (ilo > ihi) throw domain_error("delta integral bounds reversed (lo > hi)");
    if (f.size() < ihi)
        throw domain_error("delta integral: integrand not defined on all of [lo, hi)");
    double acc = 0.0;
    for (std::size_t i = ilo; i < ihi; ++i) acc += f.grid->mu_at(i) * f[i];
    return acc;
}

GridFunction delta_integral_from_start(const GridFunction& f) {
    const std::size_t n = f.grid->size();
    if (f.size() + 1 < n)
        throw domain_error("antiderivative: integrand must cover the kappa-domain");
    std::vector<double> acc(n);
    acc[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i)
        acc[i] = acc[i - 1] + f.grid->mu_at(i - 1) * f[i - 1];
    return GridFunction(f.grid, std::move(acc));
}

GridSpec GridSpec::make_uniform(double a, double b, double h) {
    GridSpec s;
    s.kind = Kind::uniform;
    s.a = a;
    s.b = b;
    s.h = h;
    return s;
}

GridSpec GridSpec::make_qpow(double q, int kmin, int kmax) {
    GridSpec s;
    s.kind = Kind::qpow;
    s.q = q;
    s.kmin = kmin;
    s.kmax = kmax;
    return s;
}

GridSpec GridSpec::make_explicit(std::vector<double> points) {
    GridSpec s;
    s.kind = Kind::explicit_points;
    s.points = std::move(points);
    return s;
}

GridPtr GridSpec::build() const {
    switch (kind) {
        case Kind::uniform: return TimeScaleGrid::uniform(a, b, h);
        case Kind::qpow: return TimeScaleGrid::qpow(q, kmin, kmax);
        case Kind::explicit_points: return TimeScaleGrid::from_points(points);
    }
    throw config_error("unknown grid spec kind");
}

} // namespace tsvar
