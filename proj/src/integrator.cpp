#include "fplab/integrator.hpp"

#include <algorithm>
#include <cmath>

#include "fplab/convex.hpp"
#include "fplab/powers.hpp"

namespace fplab {

namespace {

double weighted_l2(std::span<const double> v, double weight) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc * weight);
}

}  // namespace

ModelRhs::ModelRhs(const ModelParams& params, const OperatorContext& ctx) : params_(&params), ctx_(&ctx) {}

void ModelRhs::reaction(std::span<const double> u, std::span<double> out) const {
    const double q = params_->q;
    if (params_->lambda > 0.0) {
        yosida_apply(u, ProxSpec{q, params_->lambda}, out);
        return;
    }
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = signed_pow(u[i], q);
}

void ModelRhs::operator()(double t, std::span<const double> u, std::span<double> out) const {
    const std::size_t n = u.size();
    std::vector<double> tmp(n);
    apply_flap(u, *ctx_, out);
    reaction(u, tmp);
    for (std::size_t i = 0; i < n; ++i) out[i] = tmp[i] - out[i];
    if (!params_->forcing.is_zero()) {
        params_->forcing.evaluate(t, tmp);
        for (std::size_t i = 0; i < n; ++i) out[i] += tmp[i];
    }
}

bool ModelRhs::reaction_dominated(std::span<const double> u) const {
    std::vector<double> a(u.size());
    std::vector<double> r(u.size());
    apply_flap(u, *ctx_, a);
    reaction(u, r);
    double na = 0.0;
    double nr = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        na += a[i] * a[i];
        nr += r[i] * r[i];
    }
    return nr > na;
}

Field rhs(const Field& u, double t, const ModelParams& params, const OperatorContext& ctx) {
    require_same_grid(u, ctx.grid());
    Field out(u.grid());
    ModelRhs(params, ctx)(t, u.values(), out.values());
    return out;
}

HeunStep step_heun(std::span<const double> u, double t, double dt, const RhsFn& f, double weight) {
    const std::size_t n = u.size();
    std::vector<double> k1(n);
    std::vector<double> k2(n);
    std::vector<double> euler(n);
    HeunStep out;
    out.next.resize(n);
    f(t, u, k1);
    for (std::size_t i = 0; i < n; ++i) euler[i] = u[i] + dt * k1[i];
    f(t + dt, euler, k2);
    double diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out.next[i] = u[i] + 0.5 * dt * (k1[i] + k2[i]);
        const double d = out.next[i] - euler[i];
        diff += d * d;
        if (!std::isfinite(out.next[i])) out.finite = false;
    }
    if (!out.finite) {
        out.err = kInfinity;
        return out;
    }
    out.err = std::sqrt(diff * weight) / std::max(1.0, weighted_l2(u, weight));
    return out;
}

DtUpdate adapt_dt(double dt, double err, const ControllerOptions& opts) {
    double factor = 5.0;
    if (err > 0.0) factor = std::clamp(0.9 * std::sqrt(opts.tol / err), 0.2, 5.0);
    DtUpdate upd;
    upd.dt = std::min(dt * factor, opts.dt_max);
    upd.underflow = upd.dt < opts.dt_min;
    return upd;
}

bool detect_blowup(const SimState& state, const BlowupPolicy& policy) {
    return lp_norm(state.u, 2.0) > policy.norm_cap;
}

const char* to_string(SimStatus s) {
    switch (s) {
        case SimStatus::completed: return "completed";
        case SimStatus::blowup_detected: return "blowup_detected";
        case SimStatus::step_underflow: return "step_underflow";
    }
    return "?";
}

OdeOutcome integrate(const OdeProblem& problem) {
    const TimeOptions& tm = problem.time;
    if (!(tm.T > 0.0)) throw std::invalid_argument("final time must be positive");
    ControllerOptions ctl;
    ctl.tol = tm.tol;
    ctl.dt_min = tm.dt_min > 0.0 ? tm.dt_min : 1e-14 * tm.T;
    ctl.dt_max = tm.dt_max > 0.0 ? tm.dt_max : tm.T;
    if (tm.fixed_dt && !(*tm.fixed_dt > 0.0)) throw std::invalid_argument("fixed dt must be positive");

    OdeOutcome out;
    out.u = problem.u0;
    const double u0_norm = weighted_l2(out.u, problem.weight);
    const double cap = tm.norm_cap ? *tm.norm_cap : (u0_norm > 0.0 ? tm.norm_cap_factor * u0_norm : kInfinity);
    double dt = tm.fixed_dt ? *tm.fixed_dt : std::min(tm.dt0 > 0.0 ? tm.dt0 : 1e-6 * tm.T, ctl.dt_max);
    const double t_eps = 1e-13 * tm.T;

    auto underflow = [&] {
        const bool blowup = problem.reaction_dominated && problem.reaction_dominated(out.u);
        out.status = blowup ? SimStatus::blowup_detected : SimStatus::step_underflow;
    };

    while (tm.T - out.t > t_eps) {
        if (out.steps >= tm.max_steps) {
            out.status = SimStatus::step_underflow;
            return out;
        }
        const double h = std::min(dt, tm.T - out.t);
        HeunStep step = step_heun(out.u, out.t, h, problem.f, problem.weight);
        if (!step.finite) {
            dt = 0.5 * h;
            if (dt < ctl.dt_min || tm.fixed_dt) {
                underflow();
                return out;
            }
            continue;
        }
        if (!tm.fixed_dt && step.err > ctl.tol) {
            const DtUpdate upd = adapt_dt(h, step.err, ctl);
            if (upd.underflow) {
                underflow();
                return out;
            }
            dt = upd.dt;
            continue;
        }
        out.u = std::move(step.next);
        out.t = (tm.T - (out.t + h) <= t_eps) ? tm.T : out.t + h;
        out.last_dt = h;
        ++out.steps;
        if (!tm.fixed_dt) dt = std::max(adapt_dt(h, step.err, ctl).dt, ctl.dt_min);
        if (problem.project) problem.project(out.u);
        if (problem.on_accept) problem.on_accept(out.t, h, out.u);
        if (weighted_l2(out.u, problem.weight) > cap) {
            out.status = SimStatus::blowup_detected;
            return out;
        }
    }
    out.status = SimStatus::completed;
    return out;
}

SimOutcome run(const SimulationSpec& spec) {
    const Grid& grid = spec.u0.grid();
    validate_params(spec.params, grid);
    if (!spec.u0.all_finite()) throw std::invalid_argument("initial data must be finite");

    const OperatorContext ctx(grid, spec.params);
    const ModelRhs model(spec.params, ctx);
    const double q = spec.params.q;
    const double r = spec.params.r;
    const double hn = grid.cell_volume();

    SimOutcome outcome;
    SimState& state = outcome.final_state;
    state.u = spec.u0;

    double sigma = 0.0;
    if (spec.sigma_mode) {
        sigma = spec.params.sigma ? *spec.params.sigma : phi_r(spec.u0, r) + 1.0;
        project_lr_ball(state.u.values(), hn, sigma, r);
    }

    EnergyRecord first = measure_energy(state.u, ctx, q, r);
    state.records.push_back(first);
    if (spec.keep_trajectory) outcome.trajectory.push_back({0.0, std::vector<double>(state.u.values().begin(), state.u.values().end())});
    if (spec.on_accept) spec.on_accept(state);

    std::vector<double> prev(state.u.values().begin(), state.u.values().end());

    OdeProblem problem;
    problem.f = [&model](double t, std::span<const double> u, std::span<double> out) { model(t, u, out); };
    problem.u0 = prev;
    problem.weight = hn;
    problem.time = spec.time;
    problem.reaction_dominated = [&model](std::span<const double> u) { return model.reaction_dominated(u); };

    if (spec.sigma_mode) problem.project = [&](std::span<double> u) { project_lr_ball(u, hn, sigma, r); };
    problem.on_accept = [&](double t, double dt, std::span<const double> u) {
        std::copy(u.begin(), u.end(), state.u.values().begin());
        EnergyRecord rec = measure_energy(state.u, ctx, q, r);
        rec.t = t;
        rec.dt = dt;
        double du2 = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = (u[i] - prev[i]) / dt;
            du2 += d * d;
        }
        rec.dissipation_rhs = du2 * hn;
        rec.dissipation_lhs = -(rec.E - state.records.back().E) / dt;
        state.records.push_back(rec);
        state.t = t;
        state.dt = dt;
        ++state.step_count;
        std::copy(u.begin(), u.end(), prev.begin());
        if (spec.keep_trajectory) outcome.trajectory.push_back({t, prev});
        if (spec.on_accept) spec.on_accept(state);
    };

    const OdeOutcome ode = integrate(problem);
    outcome.status = ode.status;
    if (ode.status == SimStatus::blowup_detected) {
        outcome.blowup_time_estimate = state.t;
        outcome.blowup_window = std::array<double, 2>{state.t, state.t + ode.last_dt};
    }
    return outcome;
}

DissipationReport check_dissipation(std::span<const EnergyRecord> records, double c) {
    DissipationReport rep;
    rep.max_increase = -kInfinity;
    for (std::size_t k = 1; k < records.size(); ++k) {
        const EnergyRecord& a = records[k - 1];
        const EnergyRecord& b = records[k];
        const double inc = b.E - a.E;
        const double tol = c * b.dt * (1.0 + b.dissipation_rhs);
        rep.max_increase = std::max(rep.max_increase, inc);
        if (inc > tol) rep.monotone_ok = false;
        rep.max_violation = std::max(rep.max_violation, std::fabs(inc + b.dt * b.dissipation_rhs));
        const double denom = std::max({std::fabs(b.dissipation_lhs), std::fabs(b.dissipation_rhs), 1e-300});
        rep.max_relative_mismatch = std::max(rep.max_relative_mismatch, std::fabs(b.dissipation_lhs - b.dissipation_rhs) / denom);
        ++rep.steps_checked;
    }
    if (rep.steps_checked == 0) rep.max_increase = 0.0;
    return rep;
}

double strong_form_residual(std::span<const TrajectoryPoint> window, const ModelParams& params,
                            const OperatorContext& ctx) {
    if (window.size() < 3) throw std::invalid_argument("residual window needs at least 3 records");
    const ModelRhs model(params, ctx);
    const double hn = ctx.grid().cell_volume();
    const std::size_t n = ctx.grid().size();
    std::vector<double> f(n);
    double acc = 0.0;
    for (std::size_t k = 1; k + 1 < window.size(); ++k) {
        const auto& prev = window[k - 1];
        const auto& cur = window[k];
        const auto& next = window[k + 1];
        if (cur.u.size() != n || prev.u.size() != n || next.u.size() != n) throw GridMismatch("trajectory does not match the grid");
        const double span = next.t - prev.t;
        model(cur.t, cur.u, f);
        double res2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (next.u[i] - prev.u[i]) / span - f[i];
            res2 += d * d;
        }
        acc += res2 * hn * 0.5 * span;
    }
    return std::sqrt(acc);
}

}  // namespace fplab
