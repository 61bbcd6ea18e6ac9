#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fplab/cli.hpp"
#include "fplab/verify.hpp"

using namespace fplab;
namespace fs = std::filesystem;

namespace {

/// Fresh scratch directory per test case.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("fplab-test-cli-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path);
    os << text;
    return path.string();
}

std::string read_file(const fs::path& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

const std::string kBase =
    "grid.n = 32\n"
    "params.s = 0.5\n"
    "params.p = 2\n"
    "params.q = 4\n"
    "params.r = 3\n"
    "time.T = 0.2\n";

cli::RunConfig parse(const std::string& text) {
    std::istringstream in(text);
    return cli::parse_config(in, "t.cfg");
}

std::string parse_error(const std::string& text) {
    try {
        parse(text);
    } catch (const cli::ConfigError& e) {
        return e.what();
    }
    return "";
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run simulate(const std::string& cfg, std::optional<std::string> out = std::nullopt) {
    cli::CommonArgs a;
    a.config_path = cfg;
    a.out = std::move(out);
    std::ostringstream o, e;
    const int code = cli::cmd_simulate(a, o, e);
    return {code, o.str(), e.str()};
}

Run verify(const std::string& suite, std::uint64_t seed, std::optional<std::size_t> samples) {
    cli::CommonArgs a;
    a.seed = seed;
    a.samples = samples;
    std::ostringstream o, e;
    const int code = cli::cmd_verify(suite, a, o, e);
    return {code, o.str(), e.str()};
}

Run cert(const std::string& cfg) {
    cli::CommonArgs a;
    a.config_path = cfg;
    std::ostringstream o, e;
    const int code = cli::cmd_blowup_cert(a, o, e);
    return {code, o.str(), e.str()};
}

Run cstar(const std::string& cfg) {
    cli::CommonArgs a;
    a.config_path = cfg;
    std::ostringstream o, e;
    const int code = cli::cmd_estimate_cstar(a, o, e);
    return {code, o.str(), e.str()};
}

}  // namespace

TEST_CASE("config parsing") {
    const cli::RunConfig c = parse("# comment\n" + kBase + "params.lambda = 1e-3  # trailing\nseed = 7\ninitial.kind = bump\n");
    CHECK(c.grid.n == 32);
    CHECK(c.params.q == 4.0);
    CHECK(c.params.lambda == 1e-3);
    CHECK(c.seed == 7);
    CHECK(c.initial.seed == 7);
    CHECK(c.cstar.seed == 7);
    CHECK(c.time.T == 0.2);
    CHECK(c.initial.kind == InitialSpec::Kind::bump);

    CHECK(parse_error(kBase + "params.bogus = 1\n") == "t.cfg:7: unknown key 'params.bogus'");
    CHECK(parse_error("grid.n = 32\nparams.s 0.5\n").rfind("t.cfg:2:", 0) == 0);
    CHECK(parse_error("grid.n = 32\n\nparams.s = half\n").rfind("t.cfg:3:", 0) == 0);
    CHECK(parse_error("grid.n = 3.5\n").rfind("t.cfg:1:", 0) == 0);
    CHECK(parse_error("grid.n = 32\ngrid.n = 16\n").rfind("t.cfg:2:", 0) == 0);
    CHECK(parse_error("params.sigma_mode = maybe\n").rfind("t.cfg:1:", 0) == 0);
    CHECK(parse_error("initial.kind = gaussian\n").rfind("t.cfg:1:", 0) == 0);
    CHECK(parse_error("grid.n = 32\nforcing.value = 2\n").rfind("t.cfg:2:", 0) == 0);
    CHECK(parse_error("time.tol = 0\n").rfind("t.cfg:1:", 0) == 0);
    CHECK(parse_error("forcing.kind = table\n").rfind("t.cfg:1:", 0) == 0);
    CHECK(parse_error("forcing.kind = constant\nforcing.value = 1.5\n").empty());
    CHECK_THROWS_AS(cli::load_config("/nonexistent/fplab.cfg"), cli::ConfigError);
}

TEST_CASE("number and file formats") {
    CHECK(cli::fmt(0.1) == "0.10000000000000001");
    CHECK(cli::fmt(-0.0) == "0");
    CHECK(cli::fmt(2.0) == "2");
    CHECK(std::stod(cli::fmt(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(std::string(cli::kRecordsHeader) ==
          "t,dt,norm2,normr,normq,norminf,seminorm_p,Phi,psi,E,dissipation_lhs,dissipation_rhs");
    CHECK(cli::snapshot_path("out/snap", 12) == "out/snap-000012.csv");

    const fs::path dir = scratch("formats");
    GridSpec gs;
    gs.n = 4;
    const Grid g(gs);
    Field u(g);
    u[1] = 0.5;
    cli::write_snapshot((dir / "s.csv").string(), u);
    std::istringstream lines(read_file(dir / "s.csv"));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "x,u");
    std::getline(lines, line);
    CHECK(line == "0.20000000000000001,0");
    std::getline(lines, line);
    CHECK(line == "0.40000000000000002,0.5");
}

TEST_CASE("forcing table") {
    const fs::path dir = scratch("forcing");
    GridSpec gs;
    gs.n = 4;
    const Grid g(gs);
    const std::string good = write_file(dir / "f.csv", "x,value\n0.2,1\n0.4,2\n0.6,3\n0.8,4\n");
    CHECK(cli::load_forcing_table(good, g) == std::vector<double>{1, 2, 3, 4});
    const std::string shifted = write_file(dir / "g.csv", "0.2,1\n0.45,2\n0.6,3\n0.8,4\n");
    CHECK_THROWS(cli::load_forcing_table(shifted, g));
    const std::string shorter = write_file(dir / "h.csv", "0.2,1\n0.4,2\n");
    CHECK_THROWS(cli::load_forcing_table(shorter, g));

    const std::string cfg =
        write_file(dir / "run.cfg", "grid.n = 4\nparams.q = 2.5\nforcing.kind = table\nforcing.table = f.csv\ntime.T = 0.01\n");
    const cli::RunConfig c = cli::load_config(cfg);
    CHECK(fs::path(c.forcing_table) == dir / "f.csv");
    CHECK(simulate(cfg).code == cli::exit_code::ok);
}

TEST_CASE("simulate exit codes and outputs") {
    const fs::path dir = scratch("simulate");
    const std::string zero = write_file(dir / "zero.cfg", kBase + "initial.kind = zero\noutput.records = zero.csv\n");
    const Run z = simulate(zero);
    CHECK(z.code == cli::exit_code::ok);
    CHECK(z.out.find("status=completed") != std::string::npos);
    std::istringstream rows(read_file(dir / "zero.csv"));
    std::string line;
    std::getline(rows, line);
    CHECK(line == cli::kRecordsHeader);
    int count = 0;
    while (std::getline(rows, line)) {
        std::vector<std::string> cols;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cols.push_back(c);
        REQUIRE(cols.size() == 12);
        CHECK(cols[9] == "0");
        ++count;
    }
    CHECK(count >= 2);

    const std::string big = write_file(dir / "big.cfg",
                                       "grid.n = 64\nparams.q = 4\ninitial.kind = bump\ninitial.amplitude = 4\ntime.T = 2\n"
                                       "output.records = big.csv\noutput.snapshot_stride = 50\noutput.snapshot_stem = snaps/u\n");
    fs::create_directories(dir / "snaps");
    const Run b = simulate(big);
    CHECK(b.code == cli::exit_code::blowup_detected);
    CHECK(b.out.find("status=blowup_detected") != std::string::npos);
    CHECK(b.out.find("blowup_time=") != std::string::npos);
    CHECK(b.out.find("blowup_window=") != std::string::npos);
    CHECK(fs::exists(dir / "snaps" / "u-000000.csv"));
    CHECK(fs::exists(dir / "snaps" / "u-000050.csv"));
    CHECK(read_file(dir / "snaps" / "u-000050.csv").rfind("x,u\n", 0) == 0);

    const std::string capped = write_file(dir / "capped.cfg", kBase + "initial.kind = bump\ntime.max_steps = 3\noutput.records = c.csv\n");
    CHECK(simulate(capped).code == cli::exit_code::step_underflow);

    const std::string bad = write_file(dir / "bad.cfg", kBase + "params.bogus = 1\n");
    const Run e = simulate(bad);
    CHECK(e.code == cli::exit_code::config_error);
    CHECK(e.err.find("bad.cfg:7: unknown key 'params.bogus'") != std::string::npos);

    // The embedding condition r > N(q-p)/(sp) fails: 2 > 1*(4-2)/(0.5*2) is false.
    const std::string c7 = write_file(dir / "c7.cfg", "grid.n = 16\nparams.r = 2\nparams.q = 4\n");
    CHECK(simulate(c7).code == cli::exit_code::config_error);
    CHECK(simulate((dir / "missing.cfg").string()).code == cli::exit_code::config_error);
}

TEST_CASE("verify exit codes") {
    const Run ok = verify("stroock-varopoulos", 1, 1000);
    CHECK(ok.code == cli::exit_code::ok);
    CHECK(ok.out.rfind("suite=stroock-varopoulos seed=1 samples=1000 min_margin=", 0) == 0);
    CHECK(ok.out.find("pass=true") != std::string::npos);
    CHECK(verify("stroock-varopoulos", 1, 0).code == cli::exit_code::config_error);
    CHECK(verify("no-such-suite", 1, 10).code == cli::exit_code::config_error);
    const Run all = verify("all", 2, 20);
    CHECK(all.code == cli::exit_code::ok);
    std::size_t lines = 0;
    for (char ch : all.out) lines += ch == '\n';
    CHECK(lines == verify_suite_names().size());
}

TEST_CASE("estimate-cstar") {
    const fs::path dir = scratch("cstar");
    const std::string cfg = write_file(dir / "c.cfg", "grid.n = 64\nparams.q = 4\nparams.r = 3\noutput.certificate = c.txt\n");
    const Run r = cstar(cfg);
    CHECK(r.code == cli::exit_code::ok);
    CHECK(r.out.find("converged=true") != std::string::npos);
    CHECK(r.out.find("start=7 ") != std::string::npos);
    CHECK(read_file(dir / "c.txt") == r.out);
    const double value = std::stod(r.out.substr(r.out.find("c_star=") + 7));
    CHECK(value > 0.0);

    const std::string other = write_file(dir / "o.cfg", "grid.n = 64\nparams.q = 4\nparams.r = 3\nseed = 99\n");
    const Run r2 = cstar(other);
    const double value2 = std::stod(r2.out.substr(r2.out.find("c_star=") + 7));
    CHECK(std::fabs(value2 / value - 1.0) <= 0.01);

    // p* = 4 for N = 1, s = 0.25, p = 2.
    const std::string beyond = write_file(dir / "b.cfg", "grid.n = 16\nparams.s = 0.25\nparams.q = 5\nparams.r = 8\n");
    CHECK(cstar(beyond).code == cli::exit_code::embedding_unmet);
}

TEST_CASE("blowup-cert") {
    const fs::path dir = scratch("cert");
    const std::string base = "grid.n = 64\nparams.q = 4\nparams.r = 3\ninitial.kind = bump\ntime.T = 4\n";
    const std::string tiny = write_file(dir / "tiny.cfg", base + "initial.amplitude = 0.01\n");
    const Run t = cert(tiny);
    CHECK(t.code == cli::exit_code::hypotheses_unmet);
    CHECK(t.out.rfind("schema_version=1\n", 0) == 0);
    CHECK(t.out.find("verdict=hypotheses-unmet") != std::string::npos);
    CHECK(t.err.find("hypothesis") != std::string::npos);
    CHECK(t.err.find("alpha") != std::string::npos);

    const std::string flat = write_file(dir / "flat.cfg", "grid.n = 16\nparams.q = 2\n");
    CHECK(cert(flat).code == cli::exit_code::config_error);

    const std::string planted = write_file(dir / "planted.cfg", base + "initial.amplitude = 2\noutput.certificate = cert.txt\n");
    const Run p = cert(planted);
    CHECK(p.code == cli::exit_code::ok);
    CHECK(p.out.find("verdict=certified") != std::string::npos);
    CHECK(p.out.find("hypotheses_met=true") != std::string::npos);
    CHECK(read_file(dir / "cert.txt") == p.out);

    const std::string scaled =
        write_file(dir / "scaled.cfg", base + "initial.amplitude = 0.05\ncert.scale_to_hypotheses = true\n");
    const Run s = cert(scaled);
    CHECK(s.code == cli::exit_code::ok);
    CHECK(s.out.find("amplitude=0.10000000000000001") == std::string::npos);
    CHECK(s.out.find("amplitude scaled") != std::string::npos);
}

TEST_CASE("repeated invocations are byte identical") {
    const fs::path dir = scratch("determinism");
    const std::string cfg =
        write_file(dir / "r.cfg", kBase + "initial.kind = random\ninitial.amplitude = 0.5\nseed = 3\n");
    const Run a = simulate(cfg, (dir / "a.csv").string());
    const Run b = simulate(cfg, (dir / "b.csv").string());
    CHECK(a.code == cli::exit_code::ok);
    CHECK(a.out == b.out);
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(!read_file(dir / "a.csv").empty());
    CHECK(verify("all", 5, 50).out == verify("all", 5, 50).out);
    CHECK(verify("resolvent", 5, 50).out != verify("resolvent", 6, 50).out);
}
