#include "fplab/core.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "fplab/powers.hpp"

namespace fplab {

Grid::Grid(const GridSpec& spec) : spec_(spec) {
    if (spec.dim != 1 && spec.dim != 2) {
        throw ParameterError("grid dimension must be 1 or 2");
    }
    if (spec.n < 4) {
        throw ParameterError("grid needs at least 4 interior nodes per axis");
    }
    size_ = 1;
    measure_ = 1.0;
    cell_volume_ = 1.0;
    for (int k = 0; k < spec.dim; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        const double lo = spec.box_min[ku];
        const double hi = spec.box_max[ku];
        if (!(std::isfinite(lo) && std::isfinite(hi) && lo < hi)) {
            throw ParameterError("box_min must be < box_max on every axis");
        }
        spacing_[ku] = (hi - lo) / (spec.n + 1);
        size_ *= static_cast<std::size_t>(spec.n);
        measure_ *= hi - lo;
        cell_volume_ *= spacing_[ku];
    }
}

std::array<int, 2> Grid::multi_index(std::size_t flat) const {
    const auto n = static_cast<std::size_t>(spec_.n);
    if (spec_.dim == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat % n), static_cast<int>(flat / n)};
}

std::size_t Grid::flat_index(int i, int j) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(j) * static_cast<std::size_t>(spec_.n);
}

Point Grid::coord(std::size_t flat) const {
    const auto idx = multi_index(flat);
    Point x{0.0, 0.0};
    for (int k = 0; k < spec_.dim; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        x[ku] = spec_.box_min[ku] + (idx[ku] + 1) * spacing_[ku];
    }
    return x;
}

Point Grid::center() const {
    Point c{0.0, 0.0};
    for (int k = 0; k < spec_.dim; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        c[ku] = 0.5 * (spec_.box_min[ku] + spec_.box_max[ku]);
    }
    return c;
}

Field::Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw GridMismatch("field has " + std::to_string(values_.size()) + " values for a grid of " +
                           std::to_string(grid_.size()) + " nodes");
    }
}

bool Field::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Field& Field::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

Field operator-(const Field& a) {
    Field out = a;
    for (double& v : out.values_) v = -v;
    return out;
}

void require_same_grid(const Field& a, const Field& b) {
    if (!(a.grid() == b.grid())) throw GridMismatch("fields live on different grids");
}

void require_same_grid(const Field& a, const Grid& g) {
    if (!(a.grid() == g)) throw GridMismatch("field does not live on the operator grid");
}

Forcing Forcing::constant(double value) {
    Forcing f;
    f.kind_ = value == 0.0 ? Kind::zero : Kind::constant;
    f.value_ = value;
    return f;
}

Forcing Forcing::table(std::vector<double> nodal) {
    Forcing f;
    f.kind_ = Kind::table;
    f.table_ = std::move(nodal);
    return f;
}

Forcing Forcing::custom(NodalFn fn) {
    Forcing f;
    f.kind_ = Kind::custom;
    f.fn_ = std::move(fn);
    return f;
}

void Forcing::evaluate(double t, std::span<double> out) const {
    switch (kind_) {
        case Kind::zero:
            std::fill(out.begin(), out.end(), 0.0);
            return;
        case Kind::constant:
            std::fill(out.begin(), out.end(), value_);
            return;
        case Kind::table:
            if (table_.size() != out.size()) throw GridMismatch("forcing table size does not match the grid");
            std::copy(table_.begin(), table_.end(), out.begin());
            return;
        case Kind::custom:
            fn_(t, out);
            return;
    }
}

double critical_exponent(int dim, double p, double s) {
    const double n = dim;
    if (n > s * p) return n * p / (n - s * p);
    return kInfinity;
}

AdmissibilityReport validate_params(const ModelParams& params, const Grid& grid) {
    const double s = params.s;
    const double p = params.p;
    const double q = params.q;
    const double r = params.r;
    if (!(s > 0.0 && s < 1.0)) throw ParameterError("s must lie in (0,1)");
    if (!(p >= 2.0) || !std::isfinite(p)) throw ParameterError("p must be >= 2");
    if (!(q > p) || !std::isfinite(q)) throw ParameterError("q must be > p");
    if (!(r >= 2.0) || !std::isfinite(r)) throw ParameterError("r must be >= 2");
    if (!(params.lambda >= 0.0)) throw ParameterError("lambda must be >= 0");
    if (params.sigma && !(*params.sigma > 0.0)) throw ParameterError("sigma must be > 0");

    const double n = grid.dim();
    AdmissibilityReport rep;
    rep.cond7_lhs = r;
    rep.cond7_rhs = n * (q - p) / (s * p);
    rep.cond7_ok = rep.cond7_lhs > rep.cond7_rhs;
    rep.q_bound = (n + s * r) * p / n;
    rep.cond7_alt_ok = q < rep.q_bound;
    rep.pstar = critical_exponent(grid.dim(), p, s);
    rep.q_leq_pstar = q <= rep.pstar;

    std::ostringstream msg;
    msg.precision(17);
    if (!rep.cond7_ok) {
        msg << "embedding condition fails: r = " << r << " is not > N(q-p)/(sp) = " << rep.cond7_rhs;
        rep.messages.push_back(msg.str());
        msg.str("");
    }
    if (rep.cond7_ok != rep.cond7_alt_ok) {
        // The two forms can only disagree by rounding at the boundary.
        msg << "embedding condition forms disagree at the boundary (q = " << q << ", bound " << rep.q_bound << ")";
        rep.messages.push_back(msg.str());
        msg.str("");
    }
    if (!rep.q_leq_pstar) {
        msg << "q = " << q << " exceeds the critical exponent p* = " << rep.pstar;
        rep.messages.push_back(msg.str());
    }
    return rep;
}

double lp_norm(const Field& u, double m) {
    if (!(m >= 1.0)) throw std::invalid_argument("lp_norm exponent must be >= 1");
    double umax = 0.0;
    for (double v : u.values()) umax = std::max(umax, std::fabs(v));
    if (std::isinf(m) || umax == 0.0) return umax;
    // Scale by the maximum so large exponents do not overflow.
    double acc = 0.0;
    for (double v : u.values()) acc += abs_pow(v / umax, m);
    return umax * std::pow(acc * u.grid().cell_volume(), 1.0 / m);
}

InitialSpec::Kind parse_initial_kind(const std::string& name) {
    if (name == "zero") return InitialSpec::Kind::zero;
    if (name == "bump") return InitialSpec::Kind::bump;
    if (name == "indicator") return InitialSpec::Kind::indicator;
    if (name == "random") return InitialSpec::Kind::random;
    throw std::invalid_argument("unknown initial data kind '" + name + "'");
}

const char* to_string(InitialSpec::Kind kind) {
    switch (kind) {
        case InitialSpec::Kind::zero: return "zero";
        case InitialSpec::Kind::bump: return "bump";
        case InitialSpec::Kind::indicator: return "indicator";
        case InitialSpec::Kind::random: return "random";
    }
    return "?";
}

double uniform01(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

Field make_initial_data(const InitialSpec& spec, const Grid& grid) {
    Field u(grid);
    const GridSpec& gs = grid.spec();
    const Point c = grid.center();
    switch (spec.kind) {
        case InitialSpec::Kind::zero:
            break;
        case InitialSpec::Kind::bump:
            for (std::size_t i = 0; i < u.size(); ++i) {
                const Point x = grid.coord(i);
                double v = spec.amplitude;
                for (int k = 0; k < grid.dim(); ++k) {
                    const auto ku = static_cast<std::size_t>(k);
                    const double len = gs.box_max[ku] - gs.box_min[ku];
                    v *= std::max(0.0, std::cos(std::numbers::pi * (x[ku] - c[ku]) / len));
                }
                u[i] = v;
            }
            break;
        case InitialSpec::Kind::indicator:
            for (std::size_t i = 0; i < u.size(); ++i) {
                const Point x = grid.coord(i);
                bool inside = true;
                for (int k = 0; k < grid.dim(); ++k) {
                    const auto ku = static_cast<std::size_t>(k);
                    const double len = gs.box_max[ku] - gs.box_min[ku];
                    inside = inside && std::fabs(x[ku] - c[ku]) <= 0.25 * len;
                }
                u[i] = inside ? spec.amplitude : 0.0;
            }
            break;
        case InitialSpec::Kind::random: {
            std::mt19937_64 gen(spec.seed);
            for (std::size_t i = 0; i < u.size(); ++i) {
                u[i] = spec.amplitude * (2.0 * uniform01(gen()) - 1.0);
            }
            break;
        }
    }
    return u;
}

}  // namespace fplab
