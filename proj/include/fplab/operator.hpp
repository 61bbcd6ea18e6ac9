#pragma once

#include <variant>
#include <vector>

#include "fplab/core.hpp"

namespace fplab {

/// C_{N,p,s} = s 2^{2s} Gamma((ps+p+N-2)/2) / (pi^{N/2} Gamma(1-s)).
double normalization_constant(int dim, double p, double s);

/// Exact exterior integral of |x - y|^{-(N+sp)} over the complement of the box.
/// 1D is closed form; 2D integrates rho(theta)^{-sp}/(sp) over the four sides.
double exterior_tail_weight(const Grid& grid, const Point& x, double sp);

/// Quadrature data for the fractional p-Laplacian on a fixed grid.
///
/// The singular integral is replaced by the symmetric double sum over grid
/// nodes with the diagonal omitted (truncation radius h/2), plus the exterior
/// contribution of the zero extension, which is integrated exactly per node.
/// With that split the discrete operator is the exact gradient of the discrete
/// seminorm, so sum_i (Au)_i u_i h^N == seminorm_p(u) up to rounding.
class OperatorContext {
public:
    OperatorContext(Grid grid, double s, double p);
    OperatorContext(Grid grid, const ModelParams& params) : OperatorContext(std::move(grid), params.s, params.p) {}

    const Grid& grid() const { return grid_; }
    double s() const { return s_; }
    double p() const { return p_; }
    double c_nps() const { return c_nps_; }
    std::span<const double> tail_weights() const { return tail_; }

    /// |x_i - x_j|^{-(N+sp)} for i != j, 0 on the diagonal.
    double kernel(std::size_t i, std::size_t j) const {
        const auto a = grid_.multi_index(i);
        const auto b = grid_.multi_index(j);
        return offset_kernel_[offset_index(b[0] - a[0], b[1] - a[1])];
    }

    std::size_t offset_index(int di, int dj) const {
        const std::size_t span = 2 * static_cast<std::size_t>(grid_.n()) - 1;
        const auto n1 = static_cast<std::ptrdiff_t>(grid_.n()) - 1;
        return static_cast<std::size_t>(di + n1) + (grid_.dim() == 2 ? static_cast<std::size_t>(dj + n1) * span : 0);
    }
    std::span<const double> offset_kernel() const { return offset_kernel_; }

private:
    Grid grid_;
    double s_;
    double p_;
    double c_nps_;
    std::vector<double> tail_;
    std::vector<double> offset_kernel_;
};

/// (Au)_i = C [ sum_{j!=i} |u_i-u_j|^{p-2}(u_i-u_j) h^N K_ij + |u_i|^{p-2} u_i tail_i ].
Field apply_flap(const Field& u, const OperatorContext& ctx);
void apply_flap(std::span<const double> u, const OperatorContext& ctx, std::span<double> out);

/// |||u|||^p, the p-th power of the Gagliardo seminorm with the zero exterior.
double seminorm_p(const Field& u, const OperatorContext& ctx);
double seminorm_p(std::span<const double> u, const OperatorContext& ctx);

/// Symmetric positive pair weights K(i,j) for a user-defined energy form.
class KernelTable {
public:
    /// Validates symmetry and positivity of the off-diagonal entries.
    KernelTable(std::size_t nodes, std::vector<double> weights);

    std::size_t nodes() const { return nodes_; }
    double operator()(std::size_t i, std::size_t j) const { return w_[i * nodes_ + j]; }

private:
    std::size_t nodes_;
    std::vector<double> w_;
};

/// Default kernel: (C_{N,p,s}/2) |x-y|^{-(N+sp)} with the exterior tail.
struct DefaultKernel {};
using Kernel = std::variant<DefaultKernel, KernelTable>;

/// E(u,v) = sum_{i!=j} |du|^{p-2} du dv K(i,j) h^{2N} (+ exterior tail for the
/// default kernel). E(u,u) == seminorm_p(u) for the default kernel.
double dirichlet_form(const Field& u, const Field& v, const Kernel& kernel, const OperatorContext& ctx);
/// Same form with an explicit power p; the default kernel keeps ctx's exponent.
double dirichlet_form(const Field& u, const Field& v, const Kernel& kernel, const OperatorContext& ctx, double p);

/// |sum_i (Au)_i u_i h^N - seminorm_p(u)| / max(1, seminorm_p(u)).
double duality_identity_gap(const Field& u, const OperatorContext& ctx);

}  // namespace fplab
