#include "fplab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fplab/powers.hpp"

namespace fplab {

EnergyRecord measure_energy(const Field& u, const OperatorContext& ctx, double q, double r) {
    EnergyRecord rec;
    rec.norm2 = lp_norm(u, 2.0);
    rec.normr = lp_norm(u, r);
    rec.normq = lp_norm(u, q);
    rec.norminf = lp_norm(u, kInfinity);
    rec.seminorm_p = seminorm_p(u, ctx);
    rec.Phi = rec.seminorm_p / ctx.p();
    rec.psi = psi_q(u, q);
    rec.E = rec.Phi - rec.psi;
    return rec;
}

double phi_cap(const Field& u, const OperatorContext& ctx) { return seminorm_p(u, ctx) / ctx.p(); }

namespace {

double power_integral(const Field& u, double m) {
    double acc = 0.0;
    for (double v : u.values()) acc += abs_pow(v, m);
    return acc * u.grid().cell_volume();
}

}  // namespace

double psi_q(const Field& u, double q) { return power_integral(u, q) / q; }

double phi_r(const Field& u, double r) { return power_integral(u, r) / r; }

double total_energy(const Field& u, const OperatorContext& ctx, double q) { return phi_cap(u, ctx) - psi_q(u, q); }

double gn_exponent(const ModelParams& params, int dim) {
    const double n = dim;
    const double s = params.s;
    const double p = params.p;
    const double q = params.q;
    const double r = params.r;
    if (r > q) throw HolderBranch("r > q: L^q is controlled by L^r alone (Hoelder branch)");
    if (r == q) return 0.0;
    // 1/q - 1/r = alpha ((N-sp)/(Np) - 1/r), cleared of fractions:
    // alpha = (r - q) N p / (q (r (N-sp) - N p)).
    const double denom = r * (n - s * p) - n * p;
    if (std::fabs(denom) <= 1e-14 * n * p) throw ParameterError("interpolation exponent degenerates at r = p*");
    const double alpha = (r - q) * n * p / (q * denom);
    if (!(alpha * q > 0.0 && alpha * q < p)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "interpolation exponent alpha = " << alpha << " violates 0 < alpha q < p (embedding condition fails)";
        throw ParameterError(msg.str());
    }
    return alpha;
}

double rayleigh_ratio(const Field& u, const OperatorContext& ctx, double q) {
    const double semi = seminorm_p(u, ctx);
    if (semi == 0.0) return 0.0;
    return lp_norm(u, q) / std::pow(semi, 1.0 / ctx.p());
}

namespace {

struct AscentResult {
    double ratio = 0.0;
    bool converged = false;
    int iters = 0;
};

// Nonlinear conjugate-gradient ascent (Polak-Ribiere+) on
//   J(u) = log(sum |u|^q h^N) / q - log(S(u)) / p,
// which is scale invariant; iterates are renormalized to S(u) = 1.
// S(u) is taken from the duality pairing <Au, u> so each trial point costs
// one operator application.
AscentResult ascend(std::vector<double> u, const OperatorContext& ctx, double q, const SobolevOptions& opts) {
    const std::size_t n = u.size();
    const double p = ctx.p();
    const double hn = ctx.grid().cell_volume();
    std::vector<double> au(n), trial(n), atrial(n), grad(n), prev_grad(n, 0.0), dir(n, 0.0);

    auto pairing = [&](const std::vector<double>& a, const std::vector<double>& b) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
        return acc * hn;
    };
    auto lq = [&](const std::vector<double>& v) {
        double acc = 0.0;
        for (double x : v) acc += abs_pow(x, q);
        return acc * hn;
    };
    auto try_step = [&](double a) {
        for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + a * dir[i];
        apply_flap(trial, ctx, atrial);
    };
    // d/da J(u + a dir), exact up to rounding of the gradient itself.
    auto directional = [&](double a) {
        try_step(a);
        const double s_val = pairing(atrial, trial);
        const double l_val = lq(trial);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += (signed_pow(trial[i], q) / l_val - atrial[i] / s_val) * dir[i];
        return acc * hn;
    };
    // Exact line search on the directional derivative: expand until it turns
    // negative, then Illinois false position until |phi'| <= 0.1 phi'(0).
    // J itself stops resolving increments near the optimum; phi' does not.
    auto line_search = [&](double a0, double d0) {
        double lo = 0.0;
        double dlo = d0;
        double hi = a0;
        double dhi = directional(hi);
        for (int grow = 0; dhi > 0.0; ++grow) {
            // J can rise monotonically toward J(dir) as a -> inf; phi' then
            // decays without changing sign.
            if (dhi <= 0.1 * d0) return hi;
            if (grow > 60) return 0.0;
            lo = hi;
            dlo = dhi;
            hi *= 2.0;
            dhi = directional(hi);
        }
        if (!std::isfinite(dhi)) return lo;
        int side = 0;
        double a = hi;
        for (int k = 0; k < 60; ++k) {
            a = (lo * dhi - hi * dlo) / (dhi - dlo);
            if (!(a > lo && a < hi)) a = 0.5 * (lo + hi);
            const double da = directional(a);
            if (std::fabs(da) <= 0.1 * d0) break;
            if (da > 0.0) {
                lo = a;
                dlo = da;
                if (side == 1) dhi *= 0.5;
                side = 1;
            } else {
                hi = a;
                dhi = da;
                if (side == -1) dlo *= 0.5;
                side = -1;
            }
            if (hi - lo <= 1e-15 * hi) break;
        }
        return a;
    };

    apply_flap(u, ctx, au);
    double semi = pairing(au, u);
    if (!(semi > 0.0)) return {};
    // Normalize to unit seminorm: u -> c u scales Au by c^{p-1}.
    auto normalize = [&](std::vector<double>& v, std::vector<double>& av, double& s_val) {
        const double c = std::pow(s_val, -1.0 / p);
        const double ca = std::pow(c, p - 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] *= c;
            av[i] *= ca;
        }
        s_val = 1.0;
    };
    normalize(u, au, semi);
    double lq_val = lq(u);
    double step = 0.0;
    AscentResult res;

    for (int it = 0; it < opts.max_iters; ++it) {
        res.iters = it;
        for (std::size_t i = 0; i < n; ++i) grad[i] = signed_pow(u[i], q) / lq_val - au[i] / semi;
        const double gg = pairing(grad, grad);
        const double uu = pairing(u, u);
        if (std::sqrt(gg * uu) < opts.grad_tol) {
            res.converged = true;
            break;
        }
        const double prev_gg = pairing(prev_grad, prev_grad);
        double beta = 0.0;
        if (it > 0 && prev_gg > 0.0) {
            double num = 0.0;
            for (std::size_t i = 0; i < n; ++i) num += grad[i] * (grad[i] - prev_grad[i]);
            beta = std::max(0.0, num * hn / prev_gg);
        }
        for (std::size_t i = 0; i < n; ++i) dir[i] = grad[i] + beta * dir[i];
        double slope = pairing(grad, dir);
        if (!(slope > 0.0)) {
            dir = grad;
            slope = gg;
        }

        if (step == 0.0) step = std::sqrt(uu / pairing(dir, dir));
        step = line_search(step, slope);
        if (!(step > 0.0)) {
            res.converged = std::sqrt(gg * uu) < opts.grad_tol;
            break;
        }
        try_step(step);
        const double trial_semi = pairing(atrial, trial);
        if (!(trial_semi > 0.0)) break;
        std::swap(u, trial);
        std::swap(au, atrial);
        semi = trial_semi;
        normalize(u, au, semi);
        lq_val = lq(u);
        prev_grad = grad;
        res.iters = it + 1;
    }
    res.ratio = std::pow(lq_val, 1.0 / q) / std::pow(semi, 1.0 / p);
    return res;
}

}  // namespace

SobolevEstimate estimate_sobolev_constant(const Grid& grid, const ModelParams& params, const SobolevOptions& opts) {
    if (opts.starts < 1) throw std::invalid_argument("Sobolev estimator needs at least one start");
    const auto report = validate_params(params, grid);
    if (!report.q_leq_pstar) throw HypothesisError("q exceeds the critical exponent p*; the embedding constant is infinite");
    const OperatorContext ctx(grid, params);
    const Field bump = make_initial_data({InitialSpec::Kind::bump, 1.0, 0}, grid);

    // Starts: the bump, then bump-modulated noise, then signed noise.
    std::vector<std::vector<double>> starts(static_cast<std::size_t>(opts.starts));
    std::mt19937_64 gen(opts.seed);
    for (std::size_t k = 0; k < starts.size(); ++k) {
        auto& v = starts[k];
        v.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double noise = uniform01(gen());
            if (k == 0) {
                v[i] = bump[i];
            } else if (k % 2 == 1) {
                v[i] = bump[i] * (0.5 + noise);
            } else {
                v[i] = 2.0 * noise - 1.0;
            }
            v[i] *= opts.initial_scale;
        }
    }

    SobolevEstimate est;
    est.per_start.assign(starts.size(), 0.0);
    est.per_start_converged.assign(starts.size(), false);
    est.per_start_iters.assign(starts.size(), 0);
    std::vector<AscentResult> results(starts.size());
    const auto count = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
        results[static_cast<std::size_t>(k)] = ascend(starts[static_cast<std::size_t>(k)], ctx, params.q, opts);
    }
    for (std::size_t k = 0; k < results.size(); ++k) {
        est.per_start[k] = results[k].ratio;
        est.per_start_converged[k] = results[k].converged;
        est.per_start_iters[k] = results[k].iters;
        if (results[k].ratio > est.value) {
            est.value = results[k].ratio;
            est.best_start = static_cast<int>(k);
        }
    }
    est.converged = results[static_cast<std::size_t>(est.best_start)].converged;
    return est;
}

Thresholds blowup_thresholds(double p, double q, double c_star) {
    if (!(q > p)) throw ParameterError("thresholds need q > p");
    if (!(c_star > 0.0)) throw ParameterError("Sobolev constant must be positive");
    Thresholds t;
    t.alpha_crit = std::pow(c_star, -q / (q - p));
    t.E0 = (1.0 / p - 1.0 / q) * std::pow(c_star, -q * p / (q - p));
    return t;
}

double potential_well(double x, double p, double q, double c_star) {
    return std::pow(x, p) / p - std::pow(c_star, q) / q * std::pow(x, q);
}

double solve_beta(double energy0, double p, double q, double c_star) {
    const Thresholds th = blowup_thresholds(p, q, c_star);
    if (!(energy0 < th.E0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "E(0) = " << energy0 << " is not below the well height E0 = " << th.E0;
        throw HypothesisError(msg.str());
    }
    // h decreases strictly on (alpha, inf) and tends to -inf, so the root is unique.
    double lo = th.alpha_crit;
    double hi = 2.0 * th.alpha_crit;
    while (potential_well(hi, p, q, c_star) > energy0) {
        lo = hi;
        hi *= 2.0;
    }
    for (int it = 0; it < 400 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (potential_well(mid, p, q, c_star) > energy0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double h_lo = potential_well(lo, p, q, c_star) - energy0;
    const double h_hi = potential_well(hi, p, q, c_star) - energy0;
    return std::fabs(h_lo) <= std::fabs(h_hi) ? lo : hi;
}

double blowup_time_bound(double u0_l2, double domain_measure, double p, double q, double alpha_crit, double beta) {
    if (!(q > 2.0)) throw ParameterError("blow-up time bound needs q > 2");
    if (!(q > p)) throw ParameterError("blow-up time bound needs q > p");
    if (!(beta > alpha_crit)) throw HypothesisError("blow-up time bound needs beta > alpha");
    const double num = std::pow(0.5, q - 1.0) * std::pow(u0_l2, q - 2.0) * std::pow(domain_measure, q / 2.0 - 1.0);
    const double den = (q / 2.0 - 1.0) * (1.0 - std::pow(alpha_crit / beta, q)) * (q - p);
    return num / den;
}

double blowup_time_bound(const Field& u0, double p, double q, double alpha_crit, double beta) {
    return blowup_time_bound(lp_norm(u0, 2.0), u0.grid().measure(), p, q, alpha_crit, beta);
}

double check_gn_inequality(const Field& u, const ModelParams& params, const OperatorContext& ctx, double c_gn) {
    const double alpha = gn_exponent(params, ctx.grid().dim());
    const double semi = seminorm_p(u, ctx);
    return c_gn * std::pow(semi, alpha / params.p) * std::pow(lp_norm(u, params.r), 1.0 - alpha) - lp_norm(u, params.q);
}

double interpolation_margin(const Field& u, const ModelParams& params, const OperatorContext& ctx, double c) {
    const double q = params.q;
    const double r = params.r;
    const double psi = psi_q(u, q);
    const double phi = phi_r(u, r);
    if (r >= q) return c * std::pow(phi, q / r) - psi;
    const double alpha = gn_exponent(params, ctx.grid().dim());
    const double one_minus_eps = alpha * q / params.p;
    return c * std::pow(phi, (1.0 - alpha) * q / r) * std::pow(phi_cap(u, ctx) + 1.0, one_minus_eps) - psi;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::certified: return "certified";
        case Verdict::bound_violated: return "bound-violated";
        case Verdict::hypotheses_unmet: return "hypotheses-unmet";
        case Verdict::no_blowup_observed: return "no-blowup-observed";
    }
    return "?";
}

}  // namespace fplab
