#pragma once

#include "knds/errors.hpp"
#include "knds/inverse.hpp"
#include "knds/sl_spectrum.hpp"
#include "knds/spacetime.hpp"
#include "knds/trace_forms.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace knds {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchemaVersion = "1";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitRegime = 2,
    kExitConvergence = 3,
    kExitReconstruction = 4,
};

/// Malformed or incomplete input document.
class SchemaError : public Error {
public:
    using Error::Error;
};

enum class Command { forward, spectrum, inverse, roundtrip };
enum class OutputFormat { json, csv };

struct JobConfig {
    Command command = Command::forward;
    OutputFormat format = OutputFormat::json;

    std::optional<double> mass;
    std::optional<double> spin;
    std::optional<double> charge;
    std::optional<double> lambda;

    std::vector<int> ks;
    int grid_size = 2048;
    int count = 256;

    // spectrum: "round", "horizon" or "explicit"; empty infers from the other flags.
    std::string profile_source;
    std::string horizon = "event";
    std::optional<double> xi;
    std::optional<double> beta_sq;

    // inverse
    std::string traces_path;
    std::optional<double> gamma0_event;
    std::optional<double> gamma1_event;
    std::optional<double> gamma0_cosmo;
    std::optional<double> gamma1_cosmo;

    // roundtrip
    bool use_numerical_traces = false;
    int random_draws = 0;
    std::uint64_t seed = 0;
};

/// Dispatches on config.command. Reports go to `out`, diagnostics to `err`;
/// the return value is one of ExitCode.
int run(const JobConfig& config, std::ostream& out, std::ostream& err);

int run_forward(const JobConfig& config, std::ostream& out, std::ostream& err);
int run_spectrum(const JobConfig& config, std::ostream& out, std::ostream& err);
int run_inverse(const JobConfig& config, std::ostream& out, std::ostream& err);
int run_roundtrip(const JobConfig& config, std::ostream& out, std::ostream& err);

/// Serializes a trace set in the trace-file schema:
/// {"schema_version", "gamma0_event", "gamma1_event", "gamma0_cosmo",
///  "gamma1_cosmo", "optional_gammak": {"event": {"2": ...}, "cosmo": {...}},
///  "provenance"}.
Json traces_to_json(const TraceSet& traces);

/// Parses the trace-file schema. Accepts either a bare trace document or a
/// `forward` report (whose "traces" member is one). Throws SchemaError.
TraceSet traces_from_json(const Json& doc);

Json params_to_json(const SpacetimeParams& params);
Json regime_to_json(const RegimeReport& report);
Json horizons_to_json(const HorizonSet& horizons);
Json geometry_to_json(const HorizonGeometry& geometry);
Json reconstruction_to_json(const ReconstructionResult& result);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(std::ostream& out, const Json& doc);

/// Sampling box for randomized round trips.
struct ParamRange {
    double mass = 1.0;
    double spin_min = 0.02, spin_max = 0.5;
    double charge_min = 0.0, charge_max = 0.4;
    double lambda_min = 0.005, lambda_max = 0.1;
};

SpacetimeParams draw_params(std::mt19937_64& rng, const ParamRange& range = {});

/// |recovered - truth| / |truth|, or the absolute error when truth is zero.
double relative_error(double truth, double recovered);

}  // namespace knds
