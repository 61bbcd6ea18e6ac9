#include "fplab/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "fplab/verify.hpp"

namespace fplab::cli {

namespace fs = std::filesystem;

const char* const kRecordsHeader =
    "t,dt,norm2,normr,normq,norminf,seminorm_p,Phi,psi,E,dissipation_lhs,dissipation_rhs";

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& text, double& out) {
    const char* first = text.data();
    const char* last = first + text.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

template <class Int>
bool parse_int(const std::string& text, Int& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_bool(const std::string& text, bool& out) {
    if (text == "true" || text == "1") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0") {
        out = false;
        return true;
    }
    return false;
}

/// Relative paths in a config resolve against the config file's directory.
std::string resolve(const std::string& base_dir, const std::string& path) {
    if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
    return (fs::path(base_dir) / path).string();
}

struct Pending {
    std::string forcing_kind = "zero";
    double forcing_value = 0.0;
};

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.time.T = 1.0;
    Pending pend;
    std::map<std::string, int> seen;
    std::string line;
    int lineno = 0;

    auto fail = [&](const std::string& msg) -> ConfigError {
        return ConfigError(source + ":" + std::to_string(lineno) + ": " + msg);
    };

    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw fail("expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw fail("empty key");
        if (val.empty()) throw fail("empty value for '" + key + "'");
        if (seen.count(key)) throw fail("duplicate key '" + key + "' (first on line " + std::to_string(seen[key]) + ")");
        seen[key] = lineno;

        auto num = [&](double& dst) {
            if (!parse_double(val, dst)) throw fail("'" + key + "' expects a number, got '" + val + "'");
        };
        auto opt_num = [&](std::optional<double>& dst) {
            double v = 0.0;
            num(v);
            dst = v;
        };
        auto integer = [&](auto& dst) {
            if (!parse_int(val, dst)) throw fail("'" + key + "' expects an integer, got '" + val + "'");
        };
        auto boolean = [&](bool& dst) {
            if (!parse_bool(val, dst)) throw fail("'" + key + "' expects true or false, got '" + val + "'");
        };

        if (key == "grid.dim") integer(cfg.grid.dim);
        else if (key == "grid.n") integer(cfg.grid.n);
        else if (key == "grid.x_min") num(cfg.grid.box_min[0]);
        else if (key == "grid.x_max") num(cfg.grid.box_max[0]);
        else if (key == "grid.y_min") num(cfg.grid.box_min[1]);
        else if (key == "grid.y_max") num(cfg.grid.box_max[1]);
        else if (key == "params.s") num(cfg.params.s);
        else if (key == "params.p") num(cfg.params.p);
        else if (key == "params.q") num(cfg.params.q);
        else if (key == "params.r") num(cfg.params.r);
        else if (key == "params.lambda") num(cfg.params.lambda);
        else if (key == "params.sigma_mode") boolean(cfg.sigma_mode);
        else if (key == "params.sigma") opt_num(cfg.params.sigma);
        else if (key == "initial.kind") {
            try {
                cfg.initial.kind = parse_initial_kind(val);
            } catch (const std::exception& e) {
                throw fail(e.what());
            }
        } else if (key == "initial.amplitude") num(cfg.initial.amplitude);
        else if (key == "forcing.kind") {
            if (val != "zero" && val != "constant" && val != "table")
                throw fail("forcing.kind must be zero, constant or table, got '" + val + "'");
            pend.forcing_kind = val;
        } else if (key == "forcing.value") num(pend.forcing_value);
        else if (key == "forcing.table") cfg.forcing_table = val;
        else if (key == "time.T") num(cfg.time.T);
        else if (key == "time.tol") num(cfg.time.tol);
        else if (key == "time.dt0") num(cfg.time.dt0);
        else if (key == "time.dt_min") num(cfg.time.dt_min);
        else if (key == "time.dt_max") num(cfg.time.dt_max);
        else if (key == "time.norm_cap_factor") num(cfg.time.norm_cap_factor);
        else if (key == "time.norm_cap") opt_num(cfg.time.norm_cap);
        else if (key == "time.fixed_dt") opt_num(cfg.time.fixed_dt);
        else if (key == "time.max_steps") integer(cfg.time.max_steps);
        else if (key == "output.records") cfg.records_csv = val;
        else if (key == "output.snapshot_stride") integer(cfg.snapshot_stride);
        else if (key == "output.snapshot_stem") cfg.snapshot_stem = val;
        else if (key == "output.certificate") cfg.certificate_path = val;
        else if (key == "seed") integer(cfg.seed);
        else if (key == "cstar.starts") integer(cfg.cstar.starts);
        else if (key == "cstar.max_iters") integer(cfg.cstar.max_iters);
        else if (key == "cstar.grad_tol") num(cfg.cstar.grad_tol);
        else if (key == "cert.scale_to_hypotheses") boolean(cfg.cert_scale_to_hypotheses);
        else if (key == "cert.scale_factor") num(cfg.cert_scale_factor);
        else if (key == "cert.max_scalings") integer(cfg.cert_max_scalings);
        else throw fail("unknown key '" + key + "'");
    }

    auto at = [&](const char* key) { return seen.count(key) ? seen[key] : lineno; };
    auto check = [&](bool ok, const char* key, const std::string& msg) {
        if (!ok) throw ConfigError(source + ":" + std::to_string(at(key)) + ": " + msg);
    };
    check(cfg.grid.dim == 1 || cfg.grid.dim == 2, "grid.dim", "grid.dim must be 1 or 2");
    check(cfg.grid.n >= 4, "grid.n", "grid.n must be at least 4");
    check(cfg.grid.box_min[0] < cfg.grid.box_max[0], "grid.x_max", "grid.x_min must be below grid.x_max");
    check(cfg.grid.box_min[1] < cfg.grid.box_max[1], "grid.y_max", "grid.y_min must be below grid.y_max");
    check(cfg.time.T > 0.0, "time.T", "time.T must be positive");
    check(cfg.time.tol > 0.0, "time.tol", "time.tol must be positive");
    check(cfg.time.norm_cap_factor > 1.0, "time.norm_cap_factor", "time.norm_cap_factor must exceed 1");
    check(!cfg.time.fixed_dt || *cfg.time.fixed_dt > 0.0, "time.fixed_dt", "time.fixed_dt must be positive");
    check(cfg.time.max_steps > 0, "time.max_steps", "time.max_steps must be positive");
    check(cfg.cstar.starts > 0, "cstar.starts", "cstar.starts must be positive");
    check(cfg.cstar.max_iters > 0, "cstar.max_iters", "cstar.max_iters must be positive");
    check(cfg.cert_scale_factor > 1.0, "cert.scale_factor", "cert.scale_factor must exceed 1");
    check(pend.forcing_kind == "table" || cfg.forcing_table.empty(), "forcing.table",
          "forcing.table is only valid with forcing.kind = table");
    check(pend.forcing_kind != "table" || !cfg.forcing_table.empty(), "forcing.kind",
          "forcing.kind = table needs forcing.table");
    check(pend.forcing_kind == "constant" || !seen.count("forcing.value"), "forcing.value",
          "forcing.value is only valid with forcing.kind = constant");

    cfg.initial.seed = cfg.seed;
    cfg.cstar.seed = cfg.seed;
    if (pend.forcing_kind == "constant") cfg.params.forcing = Forcing::constant(pend.forcing_value);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":0: cannot open config file");
    RunConfig cfg = parse_config(in, path);
    const std::string dir = fs::path(path).parent_path().string();
    cfg.records_csv = resolve(dir, cfg.records_csv);
    cfg.certificate_path = resolve(dir, cfg.certificate_path);
    cfg.forcing_table = resolve(dir, cfg.forcing_table);
    if (!cfg.snapshot_stem.empty() && cfg.snapshot_stride > 0) cfg.snapshot_stem = resolve(dir, cfg.snapshot_stem);
    return cfg;
}

std::vector<double> load_forcing_table(const std::string& path, const Grid& grid) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ":0: cannot open forcing table");
    const std::size_t cols = static_cast<std::size_t>(grid.dim()) + 1;
    std::vector<double> values;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            if (!parse_double(trim(cell), v)) numeric = false;
            row.push_back(v);
        }
        if (!numeric) {
            if (values.empty() && lineno == 1) continue;  // header
            throw ConfigError(path + ":" + std::to_string(lineno) + ": non-numeric entry");
        }
        if (row.size() != cols)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) + " columns");
        const std::size_t idx = values.size();
        if (idx >= grid.size()) throw ConfigError(path + ":" + std::to_string(lineno) + ": more rows than grid nodes");
        const Point x = grid.coord(idx);
        for (int a = 0; a < grid.dim(); ++a) {
            if (std::fabs(row[static_cast<std::size_t>(a)] - x[static_cast<std::size_t>(a)]) > 1e-9 * (1.0 + std::fabs(x[static_cast<std::size_t>(a)])))
                throw ConfigError(path + ":" + std::to_string(lineno) + ": coordinates do not match grid node " + std::to_string(idx));
        }
        values.push_back(row.back());
    }
    if (values.size() != grid.size())
        throw ConfigError(path + ":" + std::to_string(lineno) + ": table has " + std::to_string(values.size()) +
                          " rows, grid has " + std::to_string(grid.size()) + " nodes");
    return values;
}

void write_record_row(std::ostream& os, const EnergyRecord& r) {
    os << fmt(r.t) << ',' << fmt(r.dt) << ',' << fmt(r.norm2) << ',' << fmt(r.normr) << ',' << fmt(r.normq) << ','
       << fmt(r.norminf) << ',' << fmt(r.seminorm_p) << ',' << fmt(r.Phi) << ',' << fmt(r.psi) << ',' << fmt(r.E) << ','
       << fmt(r.dissipation_lhs) << ',' << fmt(r.dissipation_rhs) << '\n';
}

void write_snapshot(const std::string& path, const Field& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write snapshot " + path);
    const Grid& g = u.grid();
    os << (g.dim() == 1 ? "x,u\n" : "x,y,u\n");
    for (std::size_t i = 0; i < u.size(); ++i) {
        const Point x = g.coord(i);
        os << fmt(x[0]) << ',';
        if (g.dim() == 2) os << fmt(x[1]) << ',';
        os << fmt(u[i]) << '\n';
    }
}

std::string snapshot_path(const std::string& stem, std::size_t step) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%06zu", step);
    return stem + "-" + buf + ".csv";
}

namespace {

RunConfig load_with_overrides(const CommonArgs& args) {
    if (args.config_path.empty()) throw ConfigError("<args>:0: --config is required");
    RunConfig cfg = load_config(args.config_path);
    if (args.seed) {
        cfg.seed = *args.seed;
        cfg.initial.seed = *args.seed;
        cfg.cstar.seed = *args.seed;
    }
    return cfg;
}

/// Grid + forcing, validated. Throws ConfigError with the config path.
Grid build_grid(const RunConfig& cfg, const std::string& source) {
    try {
        return Grid(cfg.grid);
    } catch (const std::exception& e) {
        throw ConfigError(source + ":0: " + e.what());
    }
}

void attach_forcing(RunConfig& cfg, const Grid& grid) {
    if (!cfg.forcing_table.empty()) cfg.params.forcing = Forcing::table(load_forcing_table(cfg.forcing_table, grid));
}

AdmissibilityReport admissible(const RunConfig& cfg, const Grid& grid, const std::string& source) {
    try {
        return validate_params(cfg.params, grid);
    } catch (const ParameterError& e) {
        throw ConfigError(source + ":0: " + e.what());
    }
}

void require_cond7(const AdmissibilityReport& rep, const std::string& source) {
    if (!rep.cond7_ok)
        throw ConfigError(source + ":0: embedding condition r > N(q-p)/(sp) fails: r = " + fmt(rep.cond7_lhs) +
                          ", bound = " + fmt(rep.cond7_rhs));
}

int handle(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_code::config_error;
    }
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError(path + ":0: cannot open output file for writing");
    return os;
}

}  // namespace

int cmd_simulate(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return handle([&] {
        RunConfig cfg = load_with_overrides(args);
        const std::string& src = args.config_path;
        const Grid grid = build_grid(cfg, src);
        attach_forcing(cfg, grid);
        require_cond7(admissible(cfg, grid, src), src);
        const std::string records = args.out ? *args.out : cfg.records_csv;

        std::ofstream csv;
        if (!records.empty()) {
            csv = open_out(records);
            csv << kRecordsHeader << '\n';
        }

        SimulationSpec spec;
        spec.params = cfg.params;
        spec.u0 = make_initial_data(cfg.initial, grid);
        spec.time = cfg.time;
        spec.sigma_mode = cfg.sigma_mode;
        std::size_t written = 0;
        spec.on_accept = [&](const SimState& st) {
            if (csv.is_open()) {
                for (; written < st.records.size(); ++written) write_record_row(csv, st.records[written]);
            }
            if (cfg.snapshot_stride > 0 && st.step_count % cfg.snapshot_stride == 0)
                write_snapshot(snapshot_path(cfg.snapshot_stem, st.step_count), st.u);
        };
        const SimOutcome res = run(spec);
        if (csv.is_open()) csv.flush();

        out << "status=" << to_string(res.status) << '\n';
        out << "t_final=" << fmt(res.final_state.t) << '\n';
        out << "steps=" << res.final_state.step_count << '\n';
        out << "E_final=" << fmt(res.final_state.records.back().E) << '\n';
        if (res.blowup_window) {
            out << "blowup_time=" << fmt((*res.blowup_window)[1]) << '\n';
            out << "blowup_window=" << fmt((*res.blowup_window)[0]) << ',' << fmt((*res.blowup_window)[1]) << '\n';
        }
        switch (res.status) {
            case SimStatus::completed: return exit_code::ok;
            case SimStatus::blowup_detected: return exit_code::blowup_detected;
            case SimStatus::step_underflow: return exit_code::step_underflow;
        }
        return exit_code::ok;
    }, err);
}

int cmd_verify(const std::string& suite, const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return handle([&] {
        std::vector<std::string> names;
        if (suite == "all") {
            names = verify_suite_names();
        } else {
            const auto& known = verify_suite_names();
            if (std::find(known.begin(), known.end(), suite) == known.end())
                throw ConfigError("<args>:0: unknown suite '" + suite + "'");
            names.push_back(suite);
        }
        if (args.samples && *args.samples == 0) throw ConfigError("<args>:0: --samples must be positive");
        const std::uint64_t seed = args.seed ? *args.seed : 1;

        std::ostringstream report;
        bool all_pass = true;
        for (const auto& name : names) {
            const std::size_t n = args.samples ? *args.samples : default_samples(name);
            const SuiteResult res = run_verify_suite(name, seed, n);
            all_pass = all_pass && res.pass;
            report << "suite=" << res.name << " seed=" << seed << " samples=" << res.samples
                   << " min_margin=" << fmt(res.min_margin) << " tolerance=" << fmt(res.tolerance)
                   << " pass=" << (res.pass ? "true" : "false") << '\n';
            if (!res.pass) report << "  worst: " << res.detail << '\n';
        }
        out << report.str();
        if (args.out) open_out(*args.out) << report.str();
        return all_pass ? exit_code::ok : exit_code::verify_failed;
    }, err);
}

namespace {

void write_cstar(std::ostream& os, const SobolevEstimate& est) {
    os << "c_star=" << fmt(est.value) << '\n';
    os << "converged=" << (est.converged ? "true" : "false") << '\n';
    os << "best_start=" << est.best_start << '\n';
    for (std::size_t k = 0; k < est.per_start.size(); ++k) {
        os << "start=" << k << " value=" << fmt(est.per_start[k])
           << " converged=" << (est.per_start_converged[k] ? "true" : "false") << " iters=" << est.per_start_iters[k]
           << '\n';
    }
}

}  // namespace

int cmd_estimate_cstar(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return handle([&] {
        RunConfig cfg = load_with_overrides(args);
        const Grid grid = build_grid(cfg, args.config_path);
        const AdmissibilityReport rep = admissible(cfg, grid, args.config_path);
        if (!rep.q_leq_pstar) {
            err << "error: q = " << fmt(cfg.params.q) << " exceeds the critical exponent p* = " << fmt(rep.pstar) << '\n';
            return exit_code::embedding_unmet;
        }
        const SobolevEstimate est = estimate_sobolev_constant(grid, cfg.params, cfg.cstar);
        std::ostringstream text;
        write_cstar(text, est);
        out << text.str();
        const std::string path = args.out ? *args.out : cfg.certificate_path;
        if (!path.empty()) open_out(path) << text.str();
        return exit_code::ok;
    }, err);
}

int verdict_exit_code(Verdict v) {
    switch (v) {
        case Verdict::certified: return exit_code::ok;
        case Verdict::bound_violated: return exit_code::bound_violated;
        case Verdict::hypotheses_unmet: return exit_code::hypotheses_unmet;
        case Verdict::no_blowup_observed: return exit_code::no_blowup_observed;
    }
    return exit_code::config_error;
}

CertificateRun run_certificate(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    const Grid grid(cfg.grid);
    attach_forcing(cfg, grid);
    const AdmissibilityReport adm = validate_params(cfg.params, grid);
    require_cond7(adm, "config");
    if (cfg.params.lambda > 0.0) throw ConfigError("config:0: blow-up certificate needs params.lambda = 0");
    if (cfg.sigma_mode) throw ConfigError("config:0: blow-up certificate does not run in sigma mode");

    CertificateRun out;
    BlowupCertificate& cert = out.cert;
    out.amplitude = cfg.initial.amplitude;
    const double p = cfg.params.p;
    const double q = cfg.params.q;

    auto unmet = [&](const std::string& why) {
        cert.hypotheses_met = false;
        cert.verdict = Verdict::hypotheses_unmet;
        cert.messages.push_back(why);
        return out;
    };

    if (!cfg.params.forcing.is_zero()) return unmet("hypothesis f = 0 failed: forcing is not zero");
    if (!adm.q_leq_pstar) return unmet("hypothesis q <= p* failed: q = " + fmt(q) + ", p* = " + fmt(adm.pstar));

    const SobolevEstimate est = estimate_sobolev_constant(grid, cfg.params, cfg.cstar);
    cert.c_star = est.value;
    if (!est.converged) cert.messages.push_back("warning: best-constant estimate did not converge in every start");
    const Thresholds th = blowup_thresholds(p, q, cert.c_star);
    cert.alpha_crit = th.alpha_crit;
    cert.E0 = th.E0;

    const OperatorContext ctx(grid, cfg.params);
    Field u0 = make_initial_data(cfg.initial, grid);
    auto measure = [&] {
        cert.energy_initial = total_energy(u0, ctx, q);
        cert.u0_seminorm = std::pow(seminorm_p(u0, ctx), 1.0 / p);
    };
    auto holds = [&] { return cert.energy_initial < cert.E0 && cert.u0_seminorm > cert.alpha_crit; };
    measure();
    if (cfg.cert_scale_to_hypotheses) {
        for (int k = 0; k < cfg.cert_max_scalings && !holds(); ++k) {
            out.amplitude *= cfg.cert_scale_factor;
            u0 *= cfg.cert_scale_factor;
            measure();
        }
        if (out.amplitude != cfg.initial.amplitude)
            cert.messages.push_back("amplitude scaled from " + fmt(cfg.initial.amplitude) + " to " + fmt(out.amplitude));
    }
    if (!(cert.energy_initial < cert.E0)) {
        cert.messages.push_back("hypothesis E(0) < E0 failed: E(0) = " + fmt(cert.energy_initial) +
                                ", E0 = " + fmt(cert.E0));
    }
    if (!(cert.u0_seminorm > cert.alpha_crit)) {
        cert.messages.push_back("hypothesis |||u0||| > alpha_crit failed: |||u0||| = " + fmt(cert.u0_seminorm) +
                                ", alpha_crit = " + fmt(cert.alpha_crit));
    }
    if (!holds()) {
        cert.verdict = Verdict::hypotheses_unmet;
        return out;
    }
    cert.hypotheses_met = true;
    cert.beta = solve_beta(cert.energy_initial, p, q, cert.c_star);
    cert.t_star_bound = blowup_time_bound(u0, p, q, cert.alpha_crit, *cert.beta);

    SimulationSpec spec;
    spec.params = cfg.params;
    spec.u0 = u0;
    spec.time = cfg.time;
    spec.time.T = std::max(cfg.time.T, 2.0 * *cert.t_star_bound);
    out.simulation = run(spec);
    const SimOutcome& sim = *out.simulation;
    if (sim.status != SimStatus::blowup_detected) {
        cert.verdict = Verdict::no_blowup_observed;
        cert.messages.push_back(std::string("simulation ended with status ") + to_string(sim.status) + " at t = " +
                                fmt(sim.final_state.t));
        return out;
    }
    cert.observed_blowup_time = (*sim.blowup_window)[1];
    cert.verdict = *cert.observed_blowup_time <= *cert.t_star_bound ? Verdict::certified : Verdict::bound_violated;
    return out;
}

void write_certificate(std::ostream& os, const BlowupCertificate& cert, double amplitude) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); };
    os << "schema_version=1\n";
    os << "verdict=" << to_string(cert.verdict) << '\n';
    os << "hypotheses_met=" << (cert.hypotheses_met ? "true" : "false") << '\n';
    os << "amplitude=" << fmt(amplitude) << '\n';
    os << "c_star=" << fmt(cert.c_star) << '\n';
    os << "alpha_crit=" << fmt(cert.alpha_crit) << '\n';
    os << "E0=" << fmt(cert.E0) << '\n';
    os << "energy_initial=" << fmt(cert.energy_initial) << '\n';
    os << "u0_seminorm=" << fmt(cert.u0_seminorm) << '\n';
    os << "beta=" << opt(cert.beta) << '\n';
    os << "t_star_bound=" << opt(cert.t_star_bound) << '\n';
    os << "observed_blowup_time=" << opt(cert.observed_blowup_time) << '\n';
    for (const auto& m : cert.messages) os << "message=" << m << '\n';
}

int cmd_blowup_cert(const CommonArgs& args, std::ostream& out, std::ostream& err) {
    return handle([&] {
        RunConfig cfg = load_with_overrides(args);
        build_grid(cfg, args.config_path);
        CertificateRun res;
        try {
            res = run_certificate(cfg);
        } catch (const ConfigError& e) {
            std::string msg = e.what();
            if (msg.rfind("config:", 0) == 0) msg = args.config_path + msg.substr(6);
            throw ConfigError(msg);
        } catch (const ParameterError& e) {
            throw ConfigError(args.config_path + ":0: " + e.what());
        }
        std::ostringstream text;
        write_certificate(text, res.cert, res.amplitude);
        out << text.str();
        const std::string path = args.out ? *args.out : cfg.certificate_path;
        if (!path.empty()) open_out(path) << text.str();
        if (res.cert.verdict == Verdict::hypotheses_unmet) {
            for (const auto& m : res.cert.messages)
                if (m.rfind("hypothesis", 0) == 0) err << m << '\n';
        }
        return verdict_exit_code(res.cert.verdict);
    }, err);
}

}  // namespace fplab::cli
