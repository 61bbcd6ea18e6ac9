#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include "fplab/core.hpp"
#include "fplab/functionals.hpp"
#include "fplab/integrator.hpp"

namespace fplab::cli {

/// Exit codes shared by every subcommand.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int config_error = 2;
inline constexpr int embedding_unmet = 3;
inline constexpr int blowup_detected = 10;
inline constexpr int step_underflow = 11;
inline constexpr int bound_violated = 20;
inline constexpr int hypotheses_unmet = 21;
inline constexpr int no_blowup_observed = 22;
}  // namespace exit_code

/// Problem with a config file; what() is anchored as "source:line: message".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    GridSpec grid;
    ModelParams params;
    bool sigma_mode = false;
    InitialSpec initial;
    std::string forcing_table;  // path, when forcing.kind = table
    TimeOptions time;
    std::string records_csv;
    std::size_t snapshot_stride = 0;
    std::string snapshot_stem = "snapshot";
    std::string certificate_path;
    std::uint64_t seed = 1;
    SobolevOptions cstar;
    bool cert_scale_to_hypotheses = false;
    double cert_scale_factor = 2.0;
    int cert_max_scalings = 60;
};

/// Flat "section.key = value" lines; '#' starts a comment.
RunConfig parse_config(std::istream& in, const std::string& source = "config");
RunConfig load_config(const std::string& path);

/// Loads the nodal forcing table (CSV with columns x[,y],value) for the grid.
std::vector<double> load_forcing_table(const std::string& path, const Grid& grid);

/// 17 significant digits, shortest exact round trip for doubles.
std::string fmt(double v);

/// Records CSV header, in column order.
extern const char* const kRecordsHeader;
void write_record_row(std::ostream& os, const EnergyRecord& rec);
void write_snapshot(const std::string& path, const Field& u);
std::string snapshot_path(const std::string& stem, std::size_t step);

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<std::string> out;
};

int cmd_simulate(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_verify(const std::string& suite, const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_estimate_cstar(const CommonArgs& args, std::ostream& out, std::ostream& err);
int cmd_blowup_cert(const CommonArgs& args, std::ostream& out, std::ostream& err);

struct CertificateRun {
    BlowupCertificate cert;
    /// Amplitude actually used, after any scaling toward the hypotheses.
    double amplitude = 0.0;
    std::optional<SimOutcome> simulation;
};

/// The certificate pipeline behind blowup-cert: best constant, thresholds,
/// hypothesis checks, beta, t_*, then a simulation to compare against.
/// Throws ConfigError/ParameterError for inputs the pipeline does not accept.
CertificateRun run_certificate(const RunConfig& cfg);
int verdict_exit_code(Verdict v);

/// Key-value rendering of a certificate, led by schema_version=1.
void write_certificate(std::ostream& os, const BlowupCertificate& cert, double amplitude);

}  // namespace fplab::cli
