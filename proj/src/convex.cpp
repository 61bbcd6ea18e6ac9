#include "fplab/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <utility>

#include "fplab/powers.hpp"

namespace fplab {

void ProxSpec::validate() const {
    if (!(m >= 2.0) || !std::isfinite(m)) throw ParameterError("prox exponent m must be >= 2");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ParameterError("prox parameter lambda must be > 0");
}

double scalar_resolvent(double u, const ProxSpec& spec) {
    if (u == 0.0) return 0.0;
    const double m = spec.m;
    const double lam = spec.lambda;
    if (m == 2.0) return u / (1.0 + lam);

    // Solve on |u| and restore the sign; the map is odd.
    const double a = std::fabs(u);
    const double tol = 1e-13 * std::max(1.0, a);
    double lo = 0.0;
    double hi = a;
    double v = a;
    for (int it = 0; it < 200; ++it) {
        const double f = v + lam * signed_pow(v, m) - a;
        if (std::fabs(f) <= tol) break;
        if (f > 0.0) {
            hi = v;
        } else {
            lo = v;
        }
        const double df = 1.0 + lam * (m - 1.0) * abs_pow(v, m - 2.0);
        double next = v - f / df;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (next == v || hi - lo <= std::numeric_limits<double>::epsilon() * hi) {
            v = next;
            break;
        }
        v = next;
    }
    return std::copysign(v, u);
}

Field field_resolvent(const Field& u, const ProxSpec& spec) {
    spec.validate();
    Field out(u.grid());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = scalar_resolvent(u[i], spec);
    return out;
}

double power_functional(const Field& u, double m) {
    double acc = 0.0;
    for (double v : u.values()) acc += abs_pow(v, m);
    return acc * u.grid().cell_volume() / m;
}

double moreau_yosida_value(const Field& u, const ProxSpec& spec) {
    const Field j = field_resolvent(u, spec);
    double dist2 = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double d = u[i] - j[i];
        dist2 += d * d;
    }
    dist2 *= u.grid().cell_volume();
    return dist2 / (2.0 * spec.lambda) + power_functional(j, spec.m);
}

void yosida_apply(std::span<const double> u, const ProxSpec& spec, std::span<double> out) {
    // (u - J u)/lambda equals |J u|^{m-2} J u by the resolvent equation; the
    // right side avoids the 1/lambda amplification of the solver residual.
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = signed_pow(scalar_resolvent(u[i], spec), spec.m);
}

Field yosida_apply(const Field& u, const ProxSpec& spec) {
    spec.validate();
    Field out(u.grid());
    yosida_apply(u.values(), spec, out.values());
    return out;
}

double stroock_varopoulos_constant(double p, double r) {
    return (r - 1.0) * std::pow(p / (p + r - 2.0), p);
}

namespace {

struct GTerms {
    long double lhs;
    long double rhs;
};

// Both terms of g in floating type F. Near the diagonal each is a difference
// of nearly equal powers.
template <class F>
GTerms g_terms_in(double z, double t, double p, double r) {
    const F zl = z;
    const F tl = t;
    const F pl = p;
    const F rl = r;
    const F d = zl - tl;
    auto spow = [](F x, F m) -> F {
        if (x == F(0)) return F(0);
        return std::pow(std::fabs(x), m - F(2)) * x;
    };
    // |z|^{m-2}z - |t|^{m-2}t; for equal signs via expm1/log1p of the exact
    // difference, which keeps full relative accuracy as z -> t.
    auto spow_diff = [&](F m) -> F {
        if (zl == F(0) || tl == F(0) || (zl > F(0)) != (tl > F(0))) return spow(zl, m) - spow(tl, m);
        const F sign = tl > F(0) ? F(1) : F(-1);
        const F at = std::fabs(tl);
        return sign * std::pow(at, m - F(1)) * std::expm1((m - F(1)) * std::log1p(sign * d / at));
    };
    const F lhs = spow(d, pl) * spow_diff(rl);
    const F e = (rl - F(2)) / pl + F(2);
    const F w = spow_diff(e);
    const F c = (rl - F(1)) * std::pow(pl / (pl + rl - F(2)), pl);
    const F rhs = c * std::pow(std::fabs(w), pl);
    return {lhs, rhs};
}

// Double precision settles the sign whenever the terms are well separated;
// only near-equality cases are redone in extended precision.
GTerms g_terms(double z, double t, double p, double r) {
    const GTerms fast = g_terms_in<double>(z, t, p, r);
    const long double scale = std::max(std::fabs(fast.lhs), std::fabs(fast.rhs));
    if (fast.lhs - fast.rhs > 1e-6L * scale) return fast;
    return g_terms_in<long double>(z, t, p, r);
}

/// g is invariant under swapping and under joint negation; evaluating on one
/// fixed representative of the orbit makes both symmetries exact in floating point.
std::pair<double, double> canonical_pair(double z, double t) {
    if (z < t) std::swap(z, t);
    if (z + t < 0.0) return {-t, -z};
    return {z, t};
}

}  // namespace

double g_scalar(double z, double t, double p, double r) {
    const auto [a, b] = canonical_pair(z, t);
    const GTerms g = g_terms(a, b, p, r);
    return static_cast<double>(g.lhs - g.rhs);
}

double g_scale(double z, double t, double p, double r) {
    const auto [a, b] = canonical_pair(z, t);
    const GTerms g = g_terms(a, b, p, r);
    return static_cast<double>(std::max(std::fabs(g.lhs), std::fabs(g.rhs)));
}

SvSweepReport check_stroock_varopoulos(const SvSweepOptions& opts) {
    if (!(opts.lo < opts.hi)) throw std::invalid_argument("sweep range must be non-empty");
    SvSweepReport rep;
    rep.min_normalized = std::numeric_limits<double>::infinity();
    std::mt19937_64 gen(opts.seed);
    auto visit = [&](double z, double t, double p, double r) {
        const GTerms g = g_terms(z, t, p, r);
        const long double scale = std::max(std::fabs(g.lhs), std::fabs(g.rhs));
        const double normalized = scale > 0.0L ? static_cast<double>((g.lhs - g.rhs) / scale) : 0.0;
        ++rep.evaluations;
        if (normalized < rep.min_normalized) {
            rep.min_normalized = normalized;
            rep.worst_z = z;
            rep.worst_t = t;
            rep.worst_p = p;
            rep.worst_r = r;
        }
    };
    const double width = opts.hi - opts.lo;
    for (double p : opts.exponents) {
        for (double r : opts.exponents) {
            for (std::size_t k = 0; k < opts.samples; ++k) {
                const double z = opts.lo + width * uniform01(gen());
                const double t = opts.lo + width * uniform01(gen());
                visit(z, t, p, r);
            }
            for (int a = 0; a < opts.lattice; ++a) {
                for (int b = 0; b < opts.lattice; ++b) {
                    const double z = opts.lo + width * a / std::max(1, opts.lattice - 1);
                    const double t = opts.lo + width * b / std::max(1, opts.lattice - 1);
                    visit(z, t, p, r);
                }
                const double z = opts.lo + width * a / std::max(1, opts.lattice - 1);
                rep.max_abs_diagonal = std::max(rep.max_abs_diagonal, std::fabs(g_scalar(z, z, p, r)));
            }
        }
    }
    if (rep.evaluations == 0) rep.min_normalized = 0.0;
    rep.pass = rep.min_normalized >= -opts.tol && rep.max_abs_diagonal == 0.0;
    return rep;
}

ComparisonMargin check_energy_comparison(const Field& u, const Kernel& kernel, double p, double r,
                                         const OperatorContext& ctx) {
    Field w(u.grid());
    Field v(u.grid());
    const double ev = (r - 2.0) / p + 2.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        w[i] = signed_pow(u[i], r);
        v[i] = signed_pow(u[i], ev);
    }
    const double lhs = dirichlet_form(u, w, kernel, ctx, p);
    const double rhs = stroock_varopoulos_constant(p, r) * dirichlet_form(v, v, kernel, ctx, p);
    return {lhs - rhs, std::max(std::fabs(lhs), std::fabs(rhs))};
}

double resolvent_seminorm_decrease(const Field& u, const ProxSpec& spec, const OperatorContext& ctx) {
    return seminorm_p(u, ctx) - seminorm_p(field_resolvent(u, spec), ctx);
}

void project_lr_ball(std::span<double> u, double cell_volume, double sigma, double r) {
    if (!(sigma > 0.0)) throw ParameterError("ball radius sigma must be > 0");
    auto phi = [&] {
        double acc = 0.0;
        for (double v : u) acc += abs_pow(v, r);
        return acc * cell_volume / r;
    };
    const double current = phi();
    if (current <= sigma) return;
    double factor = std::pow(sigma / current, 1.0 / r);
    for (double& v : u) v *= factor;
    // Rounding can leave phi a hair above sigma; pull inside.
    for (int k = 0; k < 8 && phi() > sigma; ++k) {
        factor = 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
        for (double& v : u) v *= factor;
    }
}

Field project_lr_ball(const Field& u, double sigma, double r) {
    Field out = u;
    project_lr_ball(out.values(), u.grid().cell_volume(), sigma, r);
    return out;
}

}  // namespace fplab
