// cli.hpp — configuration and orchestration behind the dhc executable

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dhc/lattice.hpp"

namespace dhc::cli {

enum class Command { spectrum, bloch_scan, ep_ring, pt_scan, dynamics, ness_count, verify };
enum class GaugeChoice { uniform, from_file, ness_representative };

const char* to_string(Command c);
const char* to_string(GaugeChoice g);

struct RunConfig {
    Command command = Command::spectrum;
    LatticeSpec lattice{4, 4, Boundary::periodic};
    double J = 1.0;
    std::vector<double> gammas;   // one value, or the expanded grid
    std::string gamma_text;       // as given, for the manifest
    bool gamma_is_grid = false;
    GaugeChoice gauge = GaugeChoice::uniform;
    std::string gauge_file;
    std::string output_dir = "dhc_out";
    std::size_t threads = 1;
    double tol_class = 1e-9;
    double precision = 1e-4;
    std::uint64_t seed = 0;

    // command specific
    int resolution = 101;           // bloch-scan grid per axis
    int rays = 720;                 // ep-ring
    std::string method = "momentum";  // pt-scan: momentum | real
    double t_max = 10.0;            // dynamics
    double dt = 0.01;
    std::string envelope = "per-site";  // dynamics: per-site | total
    std::size_t sites = 2;          // verify

    double gamma() const;  // the single value; ConfigError for a grid
};

/// "a:b:c" → inclusive grid, or a single number.
std::vector<double> parse_gamma(const std::string& text, bool& is_grid);

/// Parses flags (and an optional --config INI file; flags win). DHC_OUT overrides --out.
/// Throws ConfigError on invalid input. Returns nullopt when help was printed.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Runs one command and writes its artifacts plus manifest.json. Returns the exit code;
/// dhc::Error escapes to the caller.
int run(const RunConfig& config, std::ostream& log);

/// parse + run with the error contract: JSON on stderr and exit codes 0/1/2/3.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes via a temporary file in the same directory followed by rename.
void write_atomic(const std::string& path, const std::string& contents);

}  // namespace dhc::cli
