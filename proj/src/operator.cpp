#include "fplab/operator.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "fplab/powers.hpp"

namespace fplab {

double normalization_constant(int dim, double p, double s) {
    if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0,1)");
    if (dim != 1 && dim != 2) throw ParameterError("dimension must be 1 or 2");
    if (!(p >= 2.0)) throw ParameterError("p must be >= 2");
    const double n = dim;
    return s * std::pow(2.0, 2.0 * s) * std::tgamma((p * s + p + n - 2.0) / 2.0) /
           (std::pow(std::numbers::pi, n / 2.0) * std::tgamma(1.0 - s));
}

namespace {

// Integral of rho(theta)^{-a} / a over the directions that leave the box
// through one side: foot distance d, side extends e_lo and e_hi either way.
double side_integral(double d, double e_lo, double e_hi, double a) {
    const double lo = -std::atan2(e_lo, d);
    const double hi = std::atan2(e_hi, d);
    auto f = [a](double phi) { return std::pow(std::cos(phi), a); };
    const double val = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, lo, hi, 15, 1e-12);
    return val * std::pow(d, -a) / a;
}

}  // namespace

double exterior_tail_weight(const Grid& grid, const Point& x, double sp) {
    const GridSpec& g = grid.spec();
    if (grid.dim() == 1) {
        return (std::pow(x[0] - g.box_min[0], -sp) + std::pow(g.box_max[0] - x[0], -sp)) / sp;
    }
    const double left = x[0] - g.box_min[0];
    const double right = g.box_max[0] - x[0];
    const double bottom = x[1] - g.box_min[1];
    const double top = g.box_max[1] - x[1];
    return side_integral(right, bottom, top, sp) + side_integral(top, right, left, sp) +
           side_integral(left, top, bottom, sp) + side_integral(bottom, left, right, sp);
}

OperatorContext::OperatorContext(Grid grid, double s, double p)
    : grid_(std::move(grid)), s_(s), p_(p), c_nps_(normalization_constant(grid_.dim(), p, s)) {
    const double sp = s * p;
    tail_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) {
        tail_[i] = exterior_tail_weight(grid_, grid_.coord(i), sp);
    }

    const int n = grid_.n();
    const std::size_t span = 2 * static_cast<std::size_t>(n) - 1;
    const double expo = -(grid_.dim() + sp) / 2.0;
    if (grid_.dim() == 1) {
        offset_kernel_.resize(span);
        for (int d = -(n - 1); d <= n - 1; ++d) {
            const double dx = d * grid_.spacing(0);
            offset_kernel_[offset_index(d, 0)] = d == 0 ? 0.0 : std::pow(dx * dx, expo);
        }
    } else {
        offset_kernel_.resize(span * span);
        for (int dj = -(n - 1); dj <= n - 1; ++dj) {
            for (int di = -(n - 1); di <= n - 1; ++di) {
                const double dx = di * grid_.spacing(0);
                const double dy = dj * grid_.spacing(1);
                offset_kernel_[offset_index(di, dj)] = (di == 0 && dj == 0) ? 0.0 : std::pow(dx * dx + dy * dy, expo);
            }
        }
    }
}

namespace {

// Calls body(j, K_ij) for every j != i with the default kernel.
template <class Body>
inline void for_each_neighbor(const OperatorContext& ctx, std::size_t i, Body&& body) {
    const Grid& g = ctx.grid();
    const int n = g.n();
    const auto kern = ctx.offset_kernel();
    const auto a = g.multi_index(i);
    if (g.dim() == 1) {
        const std::size_t base = static_cast<std::size_t>(n - 1 - a[0]);
        for (std::size_t j = 0; j < g.size(); ++j) {
            if (j != i) body(j, kern[base + j]);
        }
        return;
    }
    const std::size_t span = 2 * static_cast<std::size_t>(n) - 1;
    for (int jy = 0; jy < n; ++jy) {
        const std::size_t row = static_cast<std::size_t>(jy - a[1] + n - 1) * span + static_cast<std::size_t>(n - 1 - a[0]);
        const std::size_t jbase = static_cast<std::size_t>(jy) * static_cast<std::size_t>(n);
        for (int jx = 0; jx < n; ++jx) {
            const std::size_t j = jbase + static_cast<std::size_t>(jx);
            if (j != i) body(j, kern[row + static_cast<std::size_t>(jx)]);
        }
    }
}

// Sums per-row partials in index order so results do not depend on threading.
double ordered_sum(const std::vector<double>& parts) {
    double acc = 0.0;
    for (double v : parts) acc += v;
    return acc;
}

}  // namespace

void apply_flap(std::span<const double> u, const OperatorContext& ctx, std::span<double> out) {
    const Grid& g = ctx.grid();
    if (u.size() != g.size() || out.size() != g.size()) throw GridMismatch("apply_flap: size mismatch");
    const double p = ctx.p();
    const double hn = g.cell_volume();
    const double c = ctx.c_nps();
    const auto tail = ctx.tail_weights();
    const auto count = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double ui = u[i];
        double acc = 0.0;
        for_each_neighbor(ctx, i, [&](std::size_t j, double k) { acc += signed_pow(ui - u[j], p) * k; });
        out[i] = c * (acc * hn + signed_pow(ui, p) * tail[i]);
    }
}

Field apply_flap(const Field& u, const OperatorContext& ctx) {
    require_same_grid(u, ctx.grid());
    Field out(ctx.grid());
    apply_flap(u.values(), ctx, out.values());
    return out;
}

double seminorm_p(std::span<const double> u, const OperatorContext& ctx) {
    const Grid& g = ctx.grid();
    if (u.size() != g.size()) throw GridMismatch("seminorm_p: size mismatch");
    const double p = ctx.p();
    const double hn = g.cell_volume();
    const auto tail = ctx.tail_weights();
    std::vector<double> pair_rows(g.size(), 0.0);
    std::vector<double> tail_rows(g.size(), 0.0);
    const auto count = static_cast<std::ptrdiff_t>(g.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < count; ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double ui = u[i];
        double acc = 0.0;
        for_each_neighbor(ctx, i, [&](std::size_t j, double k) { acc += abs_pow(ui - u[j], p) * k; });
        pair_rows[i] = acc;
        tail_rows[i] = abs_pow(ui, p) * tail[i];
    }
    return 0.5 * ctx.c_nps() * (ordered_sum(pair_rows) * hn * hn + 2.0 * ordered_sum(tail_rows) * hn);
}

double seminorm_p(const Field& u, const OperatorContext& ctx) {
    require_same_grid(u, ctx.grid());
    return seminorm_p(u.values(), ctx);
}

KernelTable::KernelTable(std::size_t nodes, std::vector<double> weights) : nodes_(nodes), w_(std::move(weights)) {
    if (w_.size() != nodes_ * nodes_) throw std::invalid_argument("kernel table must be nodes x nodes");
    for (std::size_t i = 0; i < nodes_; ++i) {
        for (std::size_t j = 0; j < nodes_; ++j) {
            if (i == j) continue;
            const double k = w_[i * nodes_ + j];
            if (!(k > 0.0) || !std::isfinite(k)) throw std::invalid_argument("kernel table must be positive off the diagonal");
            if (k != w_[j * nodes_ + i]) throw std::invalid_argument("kernel table must be symmetric");
        }
    }
}

double dirichlet_form(const Field& u, const Field& v, const Kernel& kernel, const OperatorContext& ctx) {
    return dirichlet_form(u, v, kernel, ctx, ctx.p());
}

double dirichlet_form(const Field& u, const Field& v, const Kernel& kernel, const OperatorContext& ctx, double p) {
    require_same_grid(u, v);
    require_same_grid(u, ctx.grid());
    const Grid& g = ctx.grid();
    const double hn = g.cell_volume();
    const auto uv = u.values();
    const auto vv = v.values();
    std::vector<double> rows(g.size(), 0.0);

    if (const auto* table = std::get_if<KernelTable>(&kernel)) {
        if (table->nodes() != g.size()) throw GridMismatch("kernel table does not match the grid");
        for (std::size_t i = 0; i < g.size(); ++i) {
            double acc = 0.0;
            for (std::size_t j = 0; j < g.size(); ++j) {
                if (j == i) continue;
                acc += signed_pow(uv[i] - uv[j], p) * (vv[i] - vv[j]) * (*table)(i, j);
            }
            rows[i] = acc;
        }
        return ordered_sum(rows) * hn * hn;
    }

    const auto tail = ctx.tail_weights();
    std::vector<double> tail_rows(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double ui = uv[i];
        const double vi = vv[i];
        double acc = 0.0;
        for_each_neighbor(ctx, i, [&](std::size_t j, double k) { acc += signed_pow(ui - uv[j], p) * (vi - vv[j]) * k; });
        rows[i] = acc;
        tail_rows[i] = signed_pow(ui, p) * vi * tail[i];
    }
    // Exterior pairs (x in box, y outside) appear twice in the full double integral.
    return 0.5 * ctx.c_nps() * (ordered_sum(rows) * hn * hn + 2.0 * ordered_sum(tail_rows) * hn);
}

double duality_identity_gap(const Field& u, const OperatorContext& ctx) {
    const Field au = apply_flap(u, ctx);
    double pairing = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) pairing += au[i] * u[i];
    pairing *= ctx.grid().cell_volume();
    const double semi = seminorm_p(u, ctx);
    return std::fabs(pairing - semi) / std::max(1.0, semi);
}

}  // namespace fplab
