#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fplab/core.hpp"
#include "fplab/operator.hpp"

namespace fplab {

/// theta(s) = |s|^m / m with Moreau-Yosida parameter lambda.
struct ProxSpec {
    double m = 2.0;
    double lambda = 1.0;

    void validate() const;
};

/// J_lambda u: the unique v with v + lambda |v|^{m-2} v = u.
double scalar_resolvent(double u, const ProxSpec& spec);
Field field_resolvent(const Field& u, const ProxSpec& spec);

/// theta_lambda(u) = ||u - J u||^2 / (2 lambda) + theta(J u), theta(u) = int |u|^m / m.
double moreau_yosida_value(const Field& u, const ProxSpec& spec);
/// theta(u) = int |u|^m / m.
double power_functional(const Field& u, double m);

/// A_lambda u = (u - J u) / lambda.
Field yosida_apply(const Field& u, const ProxSpec& spec);
void yosida_apply(std::span<const double> u, const ProxSpec& spec, std::span<double> out);

/// C_{r,p} = (r-1) (p/(p+r-2))^p.
double stroock_varopoulos_constant(double p, double r);

/// |z-t|^{p-2}(z-t)(|z|^{r-2}z - |t|^{r-2}t) - C_{r,p} | |z|^{(r-2)/p}z - |t|^{(r-2)/p}t |^p.
double g_scalar(double z, double t, double p, double r);

/// Magnitude of the larger of the two terms of g_scalar, used to scale tolerances.
double g_scale(double z, double t, double p, double r);

struct SvSweepOptions {
    std::size_t samples = 100000;
    double lo = -10.0;
    double hi = 10.0;
    std::vector<double> exponents{2.0, 2.5, 3.0, 4.0, 6.0};
    int lattice = 101;  // lattice points per axis
    std::uint64_t seed = 1;
    double tol = 1e-12;
};

struct SvSweepReport {
    double min_normalized = 0.0;  // min of g / scale over everything sampled
    double worst_z = 0.0;
    double worst_t = 0.0;
    double worst_p = 0.0;
    double worst_r = 0.0;
    double max_abs_diagonal = 0.0;
    std::size_t evaluations = 0;
    bool pass = false;
};

/// Samples g over random points and a lattice for every (p, r) pair.
SvSweepReport check_stroock_varopoulos(const SvSweepOptions& opts);

struct ComparisonMargin {
    double margin = 0.0;  // E(u, |u|^{r-2}u) - C_{r,p} E(v, v)
    double scale = 0.0;   // max of the two terms
};

/// Energy comparison for v = |u|^{(r-2)/p} u under an arbitrary positive kernel.
ComparisonMargin check_energy_comparison(const Field& u, const Kernel& kernel, double p, double r,
                                         const OperatorContext& ctx);

/// seminorm_p(u) - seminorm_p(J u); nonnegative because J is a contraction through 0.
double resolvent_seminorm_decrease(const Field& u, const ProxSpec& spec, const OperatorContext& ctx);

/// Radial rescaling onto {phi_r <= sigma}; identity inside the ball.
Field project_lr_ball(const Field& u, double sigma, double r);
void project_lr_ball(std::span<double> u, double cell_volume, double sigma, double r);

}  // namespace fplab
