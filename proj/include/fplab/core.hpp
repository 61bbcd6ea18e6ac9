#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fplab {

/// Raised when a model parameter lies outside its admissible domain.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when two objects defined on different grids are combined.
class GridMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using Point = std::array<double, 2>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Box domain Omega = (box_min, box_max) in dimension 1 or 2 with n interior
/// nodes per axis. Node i sits at box_min + i*h, i = 1..n.
struct GridSpec {
    int dim = 1;
    Point box_min{0.0, 0.0};
    Point box_max{1.0, 1.0};
    int n = 64;

    bool operator==(const GridSpec&) const = default;
};

/// Validated uniform grid. Exterior nodes are never stored: fields are
/// implicitly zero outside the box.
class Grid {
public:
    Grid() : Grid(GridSpec{}) {}
    explicit Grid(const GridSpec& spec);

    const GridSpec& spec() const { return spec_; }
    int dim() const { return spec_.dim; }
    int n() const { return spec_.n; }
    std::size_t size() const { return size_; }

    double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
    /// h^N, the quadrature weight of a single node.
    double cell_volume() const { return cell_volume_; }
    /// Lebesgue measure of the box.
    double measure() const { return measure_; }

    /// Node index along each axis, 0-based (node coordinate uses index + 1).
    std::array<int, 2> multi_index(std::size_t flat) const;
    std::size_t flat_index(int i, int j = 0) const;
    Point coord(std::size_t flat) const;
    Point center() const;

    bool operator==(const Grid& other) const { return spec_ == other.spec_; }

private:
    GridSpec spec_;
    std::size_t size_ = 0;
    std::array<double, 2> spacing_{0.0, 0.0};
    double cell_volume_ = 0.0;
    double measure_ = 0.0;
};

/// Nodal values on the interior of a grid.
class Field {
public:
    Field() : Field(Grid{}) {}
    explicit Field(Grid grid);
    Field(Grid grid, std::vector<double> values);

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return values_.size(); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }

    bool all_finite() const;

    Field& operator*=(double c);
    friend Field operator*(double c, Field u) { return u *= c; }
    friend Field operator-(const Field& a);

private:
    Grid grid_;
    std::vector<double> values_;
};

void require_same_grid(const Field& a, const Field& b);
void require_same_grid(const Field& a, const Grid& g);

/// Source term f(x, t). Time-independent kinds evaluate the same way for all t.
class Forcing {
public:
    enum class Kind { zero, constant, table, custom };
    using NodalFn = std::function<void(double t, std::span<double> out)>;

    Forcing() = default;
    static Forcing zero() { return {}; }
    static Forcing constant(double value);
    /// Fixed nodal values, constant in time.
    static Forcing table(std::vector<double> nodal);
    /// Arbitrary time-dependent nodal generator (manufactured solutions, tests).
    static Forcing custom(NodalFn fn);

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    /// Writes f(., t) into out (out.size() == number of grid nodes).
    void evaluate(double t, std::span<double> out) const;

private:
    Kind kind_ = Kind::zero;
    double value_ = 0.0;
    std::vector<double> table_;
    NodalFn fn_;
};

struct ModelParams {
    double s = 0.5;
    double p = 2.0;
    double q = 4.0;
    double r = 3.0;
    double lambda = 0.0;
    std::optional<double> sigma;
    Forcing forcing;
};

struct AdmissibilityReport {
    bool cond7_ok = false;
    double cond7_lhs = 0.0;  // r
    double cond7_rhs = 0.0;  // N(q-p)/(sp)
    /// Second form: q < (N + s r) p / N.
    bool cond7_alt_ok = false;
    double q_bound = 0.0;
    bool q_leq_pstar = false;
    double pstar = kInfinity;  // +inf when N <= sp
    std::vector<std::string> messages;
};

/// Checks the parameter domain (throws ParameterError) and evaluates the
/// embedding condition r > N(q-p)/(sp) in both of its equivalent forms.
AdmissibilityReport validate_params(const ModelParams& params, const Grid& grid);

/// Critical Sobolev exponent Np/(N-sp), or +inf when N <= sp.
double critical_exponent(int dim, double p, double s);

/// (sum |u_i|^m h^N)^(1/m); max |u_i| for m = inf.
double lp_norm(const Field& u, double m);

struct InitialSpec {
    enum class Kind { zero, bump, indicator, random };
    Kind kind = Kind::bump;
    double amplitude = 1.0;
    std::uint64_t seed = 1;
};

InitialSpec::Kind parse_initial_kind(const std::string& name);
const char* to_string(InitialSpec::Kind kind);

/// Builders: zero; bump A * prod cos(pi (x_k - c_k) / L_k); indicator A on the
/// middle half of the box; random uniform in [-A, A].
Field make_initial_data(const InitialSpec& spec, const Grid& grid);

/// Uniform double in [0, 1) from a 64-bit generator, portable across platforms.
double uniform01(std::uint64_t bits);

}  // namespace fplab
