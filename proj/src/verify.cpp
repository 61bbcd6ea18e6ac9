#include "fplab/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

#include "fplab/convex.hpp"
#include "fplab/core.hpp"
#include "fplab/functionals.hpp"
#include "fplab/operator.hpp"

namespace fplab {

namespace {

constexpr double kSlack = 1e-10;

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(gen()); }
    std::size_t pick(std::size_t n) { return static_cast<std::size_t>(uniform01(gen()) * static_cast<double>(n)) % n; }
};

Grid unit_grid(int n) {
    GridSpec g;
    g.dim = 1;
    g.n = n;
    return Grid(g);
}

/// Random field with a random overall magnitude over four decades.
Field random_field(const Grid& grid, Rng& rng) {
    Field u(grid);
    const double amp = std::pow(10.0, rng.uniform(-2.0, 2.0));
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = amp * rng.uniform(-1.0, 1.0);
    return u;
}

void record(SuiteResult& res, double margin, const std::string& where) {
    if (margin < res.min_margin) {
        res.min_margin = margin;
        res.detail = where;
    }
}

double normalized(double slack, double scale) {
    return slack / std::max(scale, std::numeric_limits<double>::min());
}

SuiteResult suite_stroock_varopoulos(std::uint64_t seed, std::size_t samples) {
    SvSweepOptions opts;
    opts.samples = samples;
    opts.seed = seed;
    const SvSweepReport rep = check_stroock_varopoulos(opts);
    SuiteResult res;
    res.samples = samples;
    res.min_margin = rep.min_normalized;
    res.tolerance = opts.tol;
    res.pass = rep.pass;
    std::ostringstream os;
    os.precision(17);
    os << "worst z=" << rep.worst_z << " t=" << rep.worst_t << " p=" << rep.worst_p << " r=" << rep.worst_r
       << " diagonal=" << rep.max_abs_diagonal;
    res.detail = os.str();
    return res;
}

SuiteResult suite_energy_comparison(std::uint64_t seed, std::size_t samples) {
    static constexpr std::array<double, 3> ps{2.0, 2.5, 3.0};
    static constexpr std::array<double, 4> rs{2.0, 2.5, 3.0, 4.0};
    const Grid grid = unit_grid(16);
    const OperatorContext ctx(grid, 0.5, 2.0);
    const std::size_t nodes = grid.size();
    Rng rng(seed);
    SuiteResult res;
    res.samples = samples;
    res.tolerance = kSlack;
    res.min_margin = kInfinity;
    for (std::size_t k = 0; k < samples; ++k) {
        const double p = ps[rng.pick(ps.size())];
        const double r = rs[rng.pick(rs.size())];
        std::vector<double> w(nodes * nodes, 0.0);
        for (std::size_t i = 0; i < nodes; ++i) {
            for (std::size_t j = i + 1; j < nodes; ++j) {
                const double x = rng.uniform(0.1, 2.0);
                w[i * nodes + j] = x;
                w[j * nodes + i] = x;
            }
        }
        const Kernel kernel = KernelTable(nodes, std::move(w));
        const Field u = random_field(grid, rng);
        const ComparisonMargin m = check_energy_comparison(u, kernel, p, r, ctx);
        record(res, normalized(m.margin, m.scale), "sample=" + std::to_string(k));
    }
    res.pass = res.min_margin >= -res.tolerance;
    return res;
}

/// ||a - b||_m with h^N weights; m = inf gives the max norm.
double diff_norm(const Field& a, const Field& b, double m) {
    Field d(a.grid());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return lp_norm(d, m);
}

SuiteResult suite_resolvent(std::uint64_t seed, std::size_t samples) {
    static constexpr std::array<double, 5> ms{2.0, 2.5, 3.0, 4.0, 6.0};
    static constexpr std::array<double, 3> rs{2.0, 3.0, 4.0};
    static constexpr std::array<double, 3> ss{0.25, 0.5, 0.75};
    static constexpr std::array<double, 3> ps{2.0, 2.5, 3.0};
    const Grid grid = unit_grid(16);
    std::vector<std::unique_ptr<OperatorContext>> ctxs;
    for (double s : ss)
        for (double p : ps) ctxs.push_back(std::make_unique<OperatorContext>(grid, s, p));
    Rng rng(seed);
    SuiteResult res;
    res.samples = samples;
    res.tolerance = kSlack;
    res.min_margin = kInfinity;
    for (std::size_t k = 0; k < samples; ++k) {
        const ProxSpec spec{ms[rng.pick(ms.size())], std::pow(10.0, rng.uniform(-3.0, 1.0))};
        const double r = rs[rng.pick(rs.size())];
        const OperatorContext& ctx = *ctxs[rng.pick(ctxs.size())];
        const Field u = random_field(grid, rng);
        const Field v = random_field(grid, rng);
        const Field ju = field_resolvent(u, spec);
        const Field jv = field_resolvent(v, spec);
        const std::string tag = "sample=" + std::to_string(k);
        const Field au = yosida_apply(u, spec);
        const Field av = yosida_apply(v, spec);
        for (double m : {1.0, 2.0, r, kInfinity}) {
            const double rhs = diff_norm(u, v, m);
            const std::string mm = " m=" + std::to_string(m);
            record(res, normalized(rhs - diff_norm(ju, jv, m), rhs), tag + " contraction" + mm);
            const double lip = 2.0 / spec.lambda * rhs;
            record(res, normalized(lip - diff_norm(au, av, m), lip), tag + " yosida-lipschitz" + mm);
        }
        const double su = seminorm_p(u, ctx);
        record(res, normalized(resolvent_seminorm_decrease(u, spec, ctx), su), tag + " seminorm");
    }
    res.pass = res.min_margin >= -res.tolerance;
    return res;
}

SuiteResult suite_moreau_yosida(std::uint64_t seed, std::size_t samples) {
    static constexpr std::array<double, 5> ms{2.0, 2.5, 3.0, 4.0, 6.0};
    static constexpr std::array<double, 3> ladder{1.0, 0.1, 0.01};
    const Grid grid = unit_grid(16);
    Rng rng(seed);
    SuiteResult res;
    res.samples = samples;
    res.tolerance = kSlack;
    res.min_margin = kInfinity;
    for (std::size_t k = 0; k < samples; ++k) {
        const double m = ms[rng.pick(ms.size())];
        const Field u = random_field(grid, rng);
        const double full = power_functional(u, m);
        const std::string tag = "sample=" + std::to_string(k);
        double prev = -kInfinity;
        for (double lambda : ladder) {
            const ProxSpec spec{m, lambda};
            const double env = moreau_yosida_value(u, spec);
            const double inner = power_functional(field_resolvent(u, spec), m);
            record(res, normalized(env - inner, full), tag + " lower");
            record(res, normalized(full - env, full), tag + " upper");
            if (prev > -kInfinity) record(res, normalized(env - prev, full), tag + " ladder");
            prev = env;
        }
    }
    res.pass = res.min_margin >= -res.tolerance;
    return res;
}

SuiteResult suite_gn_exponent(std::uint64_t seed, std::size_t samples) {
    Rng rng(seed);
    SuiteResult res;
    res.samples = samples;
    res.tolerance = 0.0;
    res.min_margin = kInfinity;
    for (std::size_t k = 0; k < samples; ++k) {
        ModelParams prm;
        int dim = 1;
        // Rejection sampling: keep tuples with r < q and the embedding condition.
        for (;;) {
            dim = 1 + static_cast<int>(rng.pick(2));
            prm.s = rng.uniform(0.05, 0.95);
            prm.p = rng.uniform(2.0, 6.0);
            prm.q = prm.p * rng.uniform(1.01, 3.0);
            const double lower = std::max(2.0, dim * (prm.q - prm.p) / (prm.s * prm.p));
            if (!(lower < prm.q)) continue;
            prm.r = rng.uniform(lower, prm.q);
            if (prm.r > lower && prm.r < prm.q) break;
        }
        const std::string tag = "sample=" + std::to_string(k);
        try {
            const double alpha = gn_exponent(prm, dim);
            const double aq = alpha * prm.q;
            record(res, std::min(aq, prm.p - aq) / prm.p, tag);
        } catch (const std::exception& e) {
            record(res, -1.0, tag + " " + e.what());
        }
    }
    res.pass = res.min_margin > 0.0;
    return res;
}

SuiteResult suite_duality(std::uint64_t seed, std::size_t samples) {
    static constexpr std::array<double, 3> ps{2.0, 2.5, 3.0};
    static constexpr std::array<double, 3> ss{0.25, 0.5, 0.75};
    const Grid grid = unit_grid(64);
    std::vector<std::unique_ptr<OperatorContext>> ctxs;
    for (double p : ps)
        for (double s : ss) ctxs.push_back(std::make_unique<OperatorContext>(grid, s, p));
    Rng rng(seed);
    SuiteResult res;
    res.samples = samples;
    res.tolerance = kSlack;
    res.min_margin = kInfinity;
    for (std::size_t k = 0; k < samples; ++k) {
        const OperatorContext& ctx = *ctxs[k % ctxs.size()];
        const Field u = random_field(grid, rng);
        const double gap = duality_identity_gap(u, ctx);
        record(res, -gap, "sample=" + std::to_string(k));
    }
    res.pass = res.min_margin >= -res.tolerance;
    return res;
}

using SuiteFn = SuiteResult (*)(std::uint64_t, std::size_t);

struct SuiteEntry {
    const char* name;
    SuiteFn fn;
    std::size_t samples;
};

const std::vector<SuiteEntry>& registry() {
    static const std::vector<SuiteEntry> entries{
        {"stroock-varopoulos", suite_stroock_varopoulos, 100000},
        {"energy-comparison", suite_energy_comparison, 1000},
        {"resolvent", suite_resolvent, 1000},
        {"moreau-yosida", suite_moreau_yosida, 1000},
        {"gn-exponent", suite_gn_exponent, 10000},
        {"duality", suite_duality, 100},
    };
    return entries;
}

const SuiteEntry& find(const std::string& name) {
    for (const auto& e : registry())
        if (name == e.name) return e;
    throw std::invalid_argument("unknown suite '" + name + "'");
}

}  // namespace

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& e : registry()) out.emplace_back(e.name);
        return out;
    }();
    return names;
}

std::size_t default_samples(const std::string& suite) { return find(suite).samples; }

SuiteResult run_verify_suite(const std::string& suite, std::uint64_t seed, std::size_t samples) {
    const SuiteEntry& entry = find(suite);
    if (samples == 0) throw std::invalid_argument("samples must be positive");
    SuiteResult res = entry.fn(seed, samples);
    res.name = entry.name;
    return res;
}

}  // namespace fplab
