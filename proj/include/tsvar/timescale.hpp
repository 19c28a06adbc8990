#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "tsvar/errors.hpp"

namespace tsvar {

class TimeScaleGrid;
using GridPtr = std::shared_ptr<const TimeScaleGrid>;

/// A bounded isolated time scale [a,b]_T held as its finite, strictly
/// increasing list of points. Immutable after construction; safe to
/// share across threads. Membership checks use exact equality: points
/// are generated once and never recomputed, so a caller that got `t`
/// from this grid can always look it up again.
class TimeScaleGrid {
  public:
    /// {a, a+h, ..., b}; requires h > 0 and b-a an integer multiple of h.
    static GridPtr uniform(double a, double b, double h);
    /// {q^kmin, ..., q^kmax}; requires q > 1.
    static GridPtr qpow(double q, int kmin, int kmax);
    /// Any strictly increasing list of at least three finite points.
    static GridPtr from_points(std::vector<double> points);

    std::size_t size() const { return points_.size(); }
    double point(std::size_t i) const { return points_[i]; }
    const std::vector<double>& points() const { return points_; }
    double a() const { return points_.front(); }
    double b() const { return points_.back(); }

    /// Number of points in [a,b]^kappa (everything except b).
    std::size_t kappa_size() const { return points_.size() - 1; }
    /// Number of points in [a,b]^kappa^2.
    std::size_t kappa2_size() const { return points_.size() - 2; }

    // Index-based jump data. sigma(b)=b and rho(a)=a by convention,
    // so mu is zero at the last point.
    double sigma_at(std::size_t i) const {
        return points_[i + 1 < points_.size() ? i + 1 : i];
    }
    double rho_at(std::size_t i) const { return points_[i > 0 ? i - 1 : 0]; }
    double mu_at(std::size_t i) const {
        return i + 1 < points_.size() ? points_[i + 1] - points_[i] : 0.0;
    }

    /// Exact-match lookup; throws domain_error if t is not a grid point.
    std::size_t index_of(double t) const;

    double sigma(double t) const { return sigma_at(index_of(t)); }
    double rho(double t) const { return rho_at(index_of(t)); }
    double mu(double t) const { return mu_at(index_of(t)); }

  private:
    explicit TimeScaleGrid(std::vector<double> points);
    std::vector<double> points_;
};

/// Extended reciprocal: 1/alpha for alpha != 0, and 0 for alpha == 0.
inline double dagger(double alpha) { return alpha == 0.0 ? 0.0 : 1.0 / alpha; }

/// Real values attached to grid points. `values[i]` belongs to
/// `grid->point(i)`. A function may cover only a leading prefix of the
/// grid: full functions have grid->size() values, functions on the
/// kappa-domain one fewer, on the kappa^2-domain two fewer.
struct GridFunction {
    GridPtr grid;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(GridPtr g, std::vector<double> v);

    static GridFunction zeros(GridPtr g, std::size_t count);
    static GridFunction zeros(GridPtr g) { return zeros(g, g->size()); }

    /// Sample fn(t) at the first `count` grid points.
    template <typename F>
    static GridFunction sample(GridPtr g, F&& fn, std::size_t count) {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = fn(g->point(i));
        return GridFunction(std::move(g), std::move(v));
    }
    template <typename F>
    static GridFunction sample(GridPtr g, F&& fn) {
        std::size_t n = g->size();
        return sample(std::move(g), std::forward<F>(fn), n);
    }

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Forward-difference quotient (f(sigma(t)) - f(t)) / mu(t), defined on
/// one point fewer than f covers.
GridFunction delta_derivative(const GridFunction& f);

/// Sum of mu(t) * f(t) over grid points in [lo, hi). Both bounds must
/// be grid points with lo <= hi.
double delta_integral(const GridFunction& f, double lo, double hi);

/// Antiderivative from the left endpoint: F(t_i) = sum_{j<i} mu_j f_j,
/// defined at every grid point (F(a) = 0). f must cover at least the
/// kappa-domain.
GridFunction delta_integral_from_start(const GridFunction& f);

/// How a grid was requested; builds the grid and survives round-trips
/// through config and bundle files.
struct GridSpec {
    enum class Kind { uniform, qpow, explicit_points };
    Kind kind = Kind::uniform;
    double a = 0.0, b = 0.0, h = 0.0; // uniform
    double q = 0.0;                   // qpow
    int kmin = 0, kmax = 0;           // qpow
    std::vector<double> points;       // explicit

    static GridSpec make_uniform(double a, double b, double h);
    static GridSpec make_qpow(double q, int kmin, int kmax);
    static GridSpec make_explicit(std::vector<double> points);

    GridPtr build() const;
};

} // namespace tsvar
