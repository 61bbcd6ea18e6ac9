#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/functionals.hpp"
#include "fplab/operator.hpp"

namespace fplab {

/// du/dt = F(t, u) written into out.
using RhsFn = std::function<void(double t, std::span<const double> u, std::span<double> out)>;

/// Right-hand side of the semi-discrete model: -A u + R(u) + f(t), with
/// R(u) = |u|^{q-2} u, or its Yosida approximation when lambda > 0.
class ModelRhs {
public:
    ModelRhs(const ModelParams& params, const OperatorContext& ctx);

    void operator()(double t, std::span<const double> u, std::span<double> out) const;
    void reaction(std::span<const double> u, std::span<double> out) const;
    /// ||R(u)|| > ||A u||: growth is driven by the source, not the diffusion.
    bool reaction_dominated(std::span<const double> u) const;

    const OperatorContext& context() const { return *ctx_; }
    const ModelParams& params() const { return *params_; }

private:
    const ModelParams* params_;
    const OperatorContext* ctx_;
};

Field rhs(const Field& u, double t, const ModelParams& params, const OperatorContext& ctx);

struct HeunStep {
    std::vector<double> next;
    /// ||heun - euler||_2 / max(1, ||u||_2)
    double err = 0.0;
    bool finite = true;
};

/// One explicit Heun step with the embedded Euler solution as error estimate.
/// weight is the quadrature weight of one entry (h^N for grid fields).
HeunStep step_heun(std::span<const double> u, double t, double dt, const RhsFn& f, double weight = 1.0);

struct ControllerOptions {
    double tol = 1e-6;
    double dt_min = 1e-14;
    double dt_max = 1.0;
};

struct DtUpdate {
    double dt = 0.0;
    bool underflow = false;
};

/// dt * clip(0.9 sqrt(tol/err), 0.2, 5), capped at dt_max; flags dt < dt_min.
DtUpdate adapt_dt(double dt, double err, const ControllerOptions& opts);

struct TimeOptions {
    double T = 1.0;
    double tol = 1e-6;
    double dt0 = 0.0;     // 0 selects 1e-6 T
    double dt_min = 0.0;  // 0 selects 1e-14 T
    double dt_max = 0.0;  // 0 selects T
    /// Blow-up when ||u||_2 exceeds norm_cap_factor * ||u0||_2 (or norm_cap if set).
    double norm_cap_factor = 1e8;
    std::optional<double> norm_cap;
    /// Constant step, no error control.
    std::optional<double> fixed_dt;
    std::size_t max_steps = 100'000'000;
};

struct BlowupPolicy {
    double norm_cap = kInfinity;
};

struct SimState {
    double t = 0.0;
    Field u;
    double dt = 0.0;
    std::size_t step_count = 0;
    std::vector<EnergyRecord> records;
};

/// ||u||_2 above the cap.
bool detect_blowup(const SimState& state, const BlowupPolicy& policy);

enum class SimStatus { completed, blowup_detected, step_underflow };
const char* to_string(SimStatus s);

struct TrajectoryPoint {
    double t = 0.0;
    std::vector<double> u;
};

struct SimOutcome {
    SimStatus status = SimStatus::completed;
    SimState final_state;
    /// Last accepted time; present iff status == blowup_detected.
    std::optional<double> blowup_time_estimate;
    /// [t_last_accepted, t_last_accepted + last dt].
    std::optional<std::array<double, 2>> blowup_window;
    std::vector<TrajectoryPoint> trajectory;
};

struct SimulationSpec {
    ModelParams params;
    Field u0;
    TimeOptions time;
    /// Project onto {phi_r <= sigma} after every accepted step; sigma is
    /// params.sigma or phi_r(u0) + 1.
    bool sigma_mode = false;
    bool keep_trajectory = false;
    /// Called after the initial state and after every accepted step.
    std::function<void(const SimState&)> on_accept;
};

SimOutcome run(const SimulationSpec& spec);

/// Result of the generic driver, exposed for test seams with a custom F.
struct OdeOutcome {
    SimStatus status = SimStatus::completed;
    double t = 0.0;
    double last_dt = 0.0;
    std::size_t steps = 0;
    std::vector<double> u;
};

struct OdeProblem {
    RhsFn f;
    std::vector<double> u0;
    double weight = 1.0;
    TimeOptions time;
    /// Decides whether a step underflow counts as blow-up; null means never.
    std::function<bool(std::span<const double>)> reaction_dominated;
    /// Applied in place to every accepted state before on_accept.
    std::function<void(std::span<double>)> project;
    std::function<void(double t, double dt, std::span<const double> u)> on_accept;
};

OdeOutcome integrate(const OdeProblem& problem);

struct DissipationReport {
    std::size_t steps_checked = 0;
    /// Largest E_k - E_{k-1} observed (negative when E strictly decreases).
    double max_increase = 0.0;
    /// All increases within c dt_k (1 + ||du/dt||^2).
    bool monotone_ok = true;
    /// max_k |E_k - E_{k-1} + dt_k ||(u_k - u_{k-1})/dt_k||^2|, the defect of
    /// the discrete energy balance.
    double max_violation = 0.0;
    /// max_k |lhs - rhs| / max(lhs, rhs, tiny); reported only.
    double max_relative_mismatch = 0.0;
};

DissipationReport check_dissipation(std::span<const EnergyRecord> records, double c = 1e-4);

/// Discrete L2(time x space) norm of the central-difference residual
/// du/dt + A u - R(u) - f over the interior points of the window.
double strong_form_residual(std::span<const TrajectoryPoint> window, const ModelParams& params,
                            const OperatorContext& ctx);

}  // namespace fplab
