#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/operator.hpp"

namespace fplab {

/// A theorem hypothesis does not hold for the given data.
class HypothesisError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// gn_exponent was asked for the interpolation branch while r > q (Hoelder case).
class HolderBranch : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

struct EnergyRecord {
    double t = 0.0;
    double dt = 0.0;
    double norm2 = 0.0;
    double normr = 0.0;
    double normq = 0.0;
    double norminf = 0.0;
    double seminorm_p = 0.0;  // |||u|||^p
    double Phi = 0.0;
    double psi = 0.0;
    double E = 0.0;
    double dissipation_lhs = 0.0;  // -(E_k - E_{k-1}) / dt
    double dissipation_rhs = 0.0;  // ||(u_k - u_{k-1}) / dt||^2
};

/// Energy-related scalars of a snapshot; dissipation fields are left at 0.
EnergyRecord measure_energy(const Field& u, const OperatorContext& ctx, double q, double r);

double phi_cap(const Field& u, const OperatorContext& ctx);
double psi_q(const Field& u, double q);
double phi_r(const Field& u, double r);
double total_energy(const Field& u, const OperatorContext& ctx, double q);

/// Interpolation weight alpha with 1/q = alpha (N-sp)/(Np) + (1-alpha)/r.
/// Requires r <= q; throws HolderBranch for r > q and ParameterError when the
/// equation degenerates (r = p*) or the result violates 0 < alpha q < p.
double gn_exponent(const ModelParams& params, int dim);

/// ||u||_q / |||u|||, the quotient maximized by the best Sobolev constant.
double rayleigh_ratio(const Field& u, const OperatorContext& ctx, double q);

struct SobolevOptions {
    int starts = 8;
    int max_iters = 20000;
    /// Stop once ||grad J|| * ||u|| falls below this (J = log of the ratio).
    double grad_tol = 1e-9;
    std::uint64_t seed = 1;
    /// Multiplies every start; the ratio is scale invariant so this must not matter.
    double initial_scale = 1.0;
};

struct SobolevEstimate {
    double value = 0.0;
    bool converged = false;
    int best_start = 0;
    std::vector<double> per_start;
    std::vector<bool> per_start_converged;
    std::vector<int> per_start_iters;
};

/// Discrete best constant: maximizes ||u||_q / |||u||| by normalized gradient
/// ascent with backtracking from several deterministic starts.
SobolevEstimate estimate_sobolev_constant(const Grid& grid, const ModelParams& params, const SobolevOptions& opts = {});

struct Thresholds {
    double alpha_crit = 0.0;
    double E0 = 0.0;
};

/// alpha = C^{-q/(q-p)}, E0 = (1/p - 1/q) C^{-qp/(q-p)}.
Thresholds blowup_thresholds(double p, double q, double c_star);

/// Potential well h(x) = x^p/p - (C^q/q) x^q.
double potential_well(double x, double p, double q, double c_star);

/// Root of h(beta) = E(0) on (alpha, inf). Throws HypothesisError if E(0) >= E0.
double solve_beta(double energy0, double p, double q, double c_star);

/// Upper bound on the blow-up time:
///   (1/2)^{q-1} ||u0||_2^{q-2} |Omega|^{q/2-1} / ((q/2-1)(1 - alpha^q/beta^q)(q-p)).
double blowup_time_bound(const Field& u0, double p, double q, double alpha_crit, double beta);
double blowup_time_bound(double u0_l2, double domain_measure, double p, double q, double alpha_crit, double beta);

/// c_gn |||u|||^alpha ||u||_r^{1-alpha} - ||u||_q; nonnegative when the
/// Gagliardo-Nirenberg bound holds with constant c_gn.
double check_gn_inequality(const Field& u, const ModelParams& params, const OperatorContext& ctx, double c_gn);

/// c phi(u)^{(1-alpha)q/r} [Phi(u)+1]^{alpha q/p} - psi(u) for r < q,
/// c phi(u)^{q/r} - psi(u) for r >= q.
double interpolation_margin(const Field& u, const ModelParams& params, const OperatorContext& ctx, double c);

enum class Verdict { certified, bound_violated, hypotheses_unmet, no_blowup_observed };
const char* to_string(Verdict v);

struct BlowupCertificate {
    double c_star = 0.0;
    double alpha_crit = 0.0;
    double E0 = 0.0;
    double energy_initial = 0.0;
    double u0_seminorm = 0.0;  // |||u0|||, not its p-th power
    std::optional<double> beta;
    std::optional<double> t_star_bound;
    std::optional<double> observed_blowup_time;
    bool hypotheses_met = false;
    Verdict verdict = Verdict::hypotheses_unmet;
    std::vector<std::string> messages;
};

}  // namespace fplab
