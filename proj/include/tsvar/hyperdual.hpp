#pragma once

#include <cmath>

namespace tsvar {

/// Forward-mode differentiation number carrying a value and all
/// partial derivatives up to second order in the two variables (x, v).
/// Arithmetic propagates truncated Taylor data, so results are exact
/// to machine precision (no finite differencing). There is a single
/// mixed slot `dxv`; symmetry of mixed partials holds by construction.
struct HyperDual {
    double val = 0.0;
    double dx = 0.0, dv = 0.0;
    double dxx = 0.0, dxv = 0.0, dvv = 0.0;

    constexpr HyperDual() = default;
    constexpr HyperDual(double v) : val(v) {}
    constexpr HyperDual(double v, double x1, double v1, double x2, double xv, double v2)
        : val(v), dx(x1), dv(v1), dxx(x2), dxv(xv), dvv(v2) {}

    /// Independent variable x at value `x0` (dx seeded to 1).
    static constexpr HyperDual var_x(double x0) { return {x0, 1.0, 0.0, 0.0, 0.0, 0.0}; }
    /// Independent variable v at value `v0` (dv seeded to 1).
    static constexpr HyperDual var_v(double v0) { return {v0, 0.0, 1.0, 0.0, 0.0, 0.0}; }

    constexpr bool is_constant() const {
        return dx == 0.0 && dv == 0.0 && dxx == 0.0 && dxv == 0.0 && dvv == 0.0;
    }

    constexpr HyperDual operator-() const { return {-val, -dx, -dv, -dxx, -dxv, -dvv}; }

    HyperDual& operator+=(const HyperDual& o) {
        val += o.val;
        dx += o.dx;
        dv += o.dv;
        dxx += o.dxx;
        dxv += o.dxv;
        dvv += o.dvv;
        return *this;
    }
    HyperDual& operator-=(const HyperDual& o) {
        val -= o.val;
        dx -= o.dx;
        dv -= o.dv;
        dxx -= o.dxx;
        dxv -= o.dxv;
        dvv -= o.dvv;
        return *this;
    }
    HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
    HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

    friend constexpr HyperDual operator+(const HyperDual& a, const HyperDual& b) {
        return {a.val + b.val, a.dx + b.dx,   a.dv + b.dv,
                a.dxx + b.dxx, a.dxv + b.dxv, a.dvv + b.dvv};
    }
    friend constexpr HyperDual operator-(const HyperDual& a, const HyperDual& b) {
        return {a.val - b.val, a.dx - b.dx,   a.dv - b.dv,
                a.dxx - b.dxx, a.dxv - b.dxv, a.dvv - b.dvv};
    }

    // Leibniz rule through order two.
    friend constexpr HyperDual operator*(const HyperDual& a, const HyperDual& b) {
        return {a.val * b.val,
                a.dx * b.val + a.val * b.dx,
                a.dv * b.val + a.val * b.dv,
                a.dxx * b.val + 2.0 * a.dx * b.dx + a.val * b.dxx,
                a.dxv * b.val + a.dx * b.dv + a.dv * b.dx + a.val * b.dxv,
                a.dvv * b.val + 2.0 * a.dv * b.dv + a.val * b.dvv};
    }

    friend constexpr HyperDual operator/(const HyperDual& a, const HyperDual& b) {
        return a * reciprocal(b);
    }

    /// Chain rule for a univariate map applied to `u`, given the map's
    /// value `f0` and derivatives `f1`, `f2` at u.val.
    friend constexpr HyperDual compose(const HyperDual& u, double f0, double f1, double f2) {
        return {f0,
                f1 * u.dx,
                f1 * u.dv,
                f2 * u.dx * u.dx + f1 * u.dxx,
                f2 * u.dx * u.dv + f1 * u.dxv,
                f2 * u.dv * u.dv + f1 * u.dvv};
    }

    friend constexpr HyperDual reciprocal(const HyperDual& b) {
        const double r = 1.0 / b.val;
        return compose(b, r, -r * r, 2.0 * r * r * r);
    }
};

inline HyperDual sin(const HyperDual& u) {
    const double s = std::sin(u.val), c = std::cos(u.val);
    return compose(u, s, c, -s);
}

inline HyperDual cos(const HyperDual& u) {
    const double s = std::sin(u.val), c = std::cos(u.val);
    return compose(u, c, -s, -c);
}

inline HyperDual exp(const HyperDual& u) {
    const double e = std::exp(u.val);
    return compose(u, e, e, e);
}

/// Natural log; caller must ensure u.val > 0.
inline HyperDual log(const HyperDual& u) {
    const double r = 1.0 / u.val;
    return compose(u, std::log(u.val), r, -r * r);
}

/// Square root; caller must ensure u.val > 0 (or u constant and zero).
inline HyperDual sqrt(const HyperDual& u) {
    const double s = std::sqrt(u.val);
    if (u.is_constant()) return {s};
    const double d1 = 0.5 / s;
    return compose(u, s, d1, -0.5 * d1 / u.val);
}

/// Integer power of any base, by binary exponentiation; n < 0 goes
/// through the reciprocal (caller must ensure u.val != 0 then).
inline HyperDual pow_int(HyperDual u, long long n) {
    if (n < 0) {
        u = reciprocal(u);
        n = -n;
    }
    HyperDual result{1.0};
    while (n > 0) {
        if (n & 1) result = result * u;
        u = u * u;
        n >>= 1;
    }
    return result;
}

/// Real power u^c; caller must ensure u.val > 0 (or u constant).
inline HyperDual pow_real(const HyperDual& u, double c) {
    if (u.is_constant()) return {std::pow(u.val, c)};
    const double f0 = std::pow(u.val, c);
    const double f1 = c * std::pow(u.val, c - 1.0);
    const double f2 = c * (c - 1.0) * std::pow(u.val, c - 2.0);
    return compose(u, f0, f1, f2);
}

} // namespace tsvar
