#include "knds/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace knds {

namespace {

constexpr int kCurvatureSamples = 2001;
constexpr double kAgreementTolerance = 5e-3;

Json null_or(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

double require_number(const Json& doc, const char* key) {
    const auto it = doc.find(key);
    if (it == doc.end()) throw SchemaError(std::string("missing field \"") + key + "\"");
    if (!it->is_number()) throw SchemaError(std::string("field \"") + key + "\" is not a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw SchemaError(std::string("field \"") + key + "\" is not finite");
    return v;
}

std::map<int, double> parse_gammak(const Json& obj, const char* which) {
    std::map<int, double> out;
    if (!obj.is_object()) throw SchemaError(std::string("optional_gammak.") + which + " is not an object");
    for (const auto& [key, value] : obj.items()) {
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(key, &used);
            if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
            throw SchemaError("optional_gammak key \"" + key + "\" is not an integer");
        }
        if (k == 0) throw SchemaError("optional_gammak may not contain k = 0");
        if (!value.is_number() || !std::isfinite(value.get<double>())) {
            throw SchemaError("optional_gammak value for k = " + key + " is not a finite number");
        }
        out[std::abs(k)] = value.get<double>();
    }
    return out;
}

SpacetimeParams params_from_config(const JobConfig& c) {
    if (!c.mass || !c.spin || !c.charge || !c.lambda) {
        throw SchemaError("--mass, --spin, --charge and --lambda are all required");
    }
    return SpacetimeParams(*c.mass, *c.spin, *c.charge, *c.lambda);
}

Json error_report(const char* command, const std::string& stage, const std::string& message) {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    doc["error"] = {{"stage", stage}, {"message", message}};
    return doc;
}

Json recovered_to_json(const ReconstructionResult& r) {
    Json j;
    j["mass"] = r.mass;
    j["spin"] = std::sqrt(r.spin_sq);
    j["charge"] = r.charge_physical() ? Json(std::sqrt(std::max(r.charge_sq, 0.0))) : Json(nullptr);
    j["cosmological_constant"] = r.cosmological_constant;
    j["spin_sq"] = r.spin_sq;
    j["charge_sq"] = r.charge_sq;
    return j;
}

struct RoundTripOutcome {
    Json report;
    double max_error = 0.0;
};

RoundTripOutcome round_trip(const SpacetimeParams& p, const JobConfig& c) {
    const TraceSet traces = c.use_numerical_traces ? spectral_traces(p, 1, c.grid_size, c.count)
                                                   : forward_traces(p, 1);
    const ReconstructionResult r = reconstruct(traces);
    const double charge = std::sqrt(std::max(r.charge_sq, 0.0));

    RoundTripOutcome out;
    Json errors;
    errors["mass"] = relative_error(p.mass(), r.mass);
    errors["spin"] = relative_error(p.spin(), std::sqrt(r.spin_sq));
    errors["charge"] = relative_error(p.charge(), charge);
    errors["cosmological_constant"] = relative_error(p.cosmological_constant(), r.cosmological_constant);
    for (const auto& [key, value] : errors.items()) out.max_error = std::max(out.max_error, value.get<double>());

    out.report["params"] = params_to_json(p);
    out.report["traces"] = traces_to_json(traces);
    out.report["recovered"] = recovered_to_json(r);
    out.report["relative_errors"] = errors;
    out.report["max_relative_error"] = out.max_error;
    out.report["flags"] = r.flags;
    return out;
}

}  // namespace

double relative_error(double truth, double recovered) {
    const double diff = std::abs(recovered - truth);
    return truth == 0.0 ? diff : diff / std::abs(truth);
}

void write_json(std::ostream& out, const Json& doc) { out << doc.dump(2) << '\n'; }

Json params_to_json(const SpacetimeParams& p) {
    Json j;
    j["mass"] = p.mass();
    j["spin"] = p.spin();
    j["charge"] = p.charge();
    j["cosmological_constant"] = p.cosmological_constant();
    j["chi"] = p.chi();
    j["xi"] = p.xi();
    return j;
}

Json regime_to_json(const RegimeReport& r) {
    Json j;
    j["ok"] = r.ok();
    j["mass_positive"] = r.mass_positive;
    j["spin_positive"] = r.spin_positive;
    j["charge_positive"] = r.charge_positive;
    j["lambda_positive"] = r.lambda_positive;
    j["horizons_found"] = r.horizons_found;
    j["horizons_distinct"] = r.horizons_distinct;
    j["degeneracy_margin"] = r.degeneracy_margin;
    j["lambda_formula_applicable"] = r.lambda_formula_applicable;
    j["flags"] = r.flags;
    return j;
}

Json horizons_to_json(const HorizonSet& h) {
    Json j;
    j["negative"] = std::isnan(h.negative_root) ? Json(nullptr) : Json(h.negative_root);
    j["cauchy"] = null_or(h.cauchy);
    j["event"] = h.event;
    j["cosmological"] = h.cosmological;
    j["residuals"] = {{"negative", h.residuals.negative},
                      {"cauchy", null_or(h.residuals.cauchy)},
                      {"event", h.residuals.event},
                      {"cosmological", h.residuals.cosmological}};
    Json complex = Json::array();
    for (const auto& z : h.complex_roots) complex.push_back({{"re", z.real()}, {"im", z.imag()}});
    j["complex_roots"] = complex;
    return j;
}

Json geometry_to_json(const HorizonGeometry& g) {
    double k_min = std::numeric_limits<double>::infinity();
    double k_max = -k_min;
    for (int i = 0; i < kCurvatureSamples; ++i) {
        const double x = -1.0 + 2.0 * i / (kCurvatureSamples - 1);
        const double k = gauss_curvature(g, x);
        k_min = std::min(k_min, k);
        k_max = std::max(k_max, k);
    }
    Json j;
    j["radius"] = g.radius;
    j["eta"] = g.eta;
    j["beta"] = g.beta;
    j["xi"] = g.xi;
    j["area"] = g.area;
    j["curvature_min"] = k_min;
    j["curvature_max"] = k_max;
    return j;
}

Json traces_to_json(const TraceSet& t) {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["gamma0_event"] = t.event.gamma0;
    j["gamma1_event"] = t.event.gamma1();
    j["gamma0_cosmo"] = t.cosmological.gamma0;
    j["gamma1_cosmo"] = t.cosmological.gamma1();
    Json optional;
    Json event = Json::object();
    Json cosmo = Json::object();
    for (const auto& [k, v] : t.event.gammak) {
        if (k != 1) event[std::to_string(k)] = v;
    }
    for (const auto& [k, v] : t.cosmological.gammak) {
        if (k != 1) cosmo[std::to_string(k)] = v;
    }
    optional["event"] = event;
    optional["cosmo"] = cosmo;
    j["optional_gammak"] = optional;
    j["provenance"] = std::string(to_string(t.provenance));
    return j;
}

TraceSet traces_from_json(const Json& input) {
    if (!input.is_object()) throw SchemaError("trace document is not a JSON object");
    const Json& doc = input.contains("traces") && input["traces"].is_object() ? input["traces"] : input;
    const auto version = doc.find("schema_version");
    if (version == doc.end()) throw SchemaError("missing field \"schema_version\"");
    if (!version->is_string() || version->get<std::string>() != kSchemaVersion) {
        throw SchemaError("unsupported schema_version (expected \"1\")");
    }
    TraceSet t;
    t.provenance = TraceProvenance::external_input;
    t.event.gamma0 = require_number(doc, "gamma0_event");
    t.cosmological.gamma0 = require_number(doc, "gamma0_cosmo");
    t.event.gammak[1] = require_number(doc, "gamma1_event");
    t.cosmological.gammak[1] = require_number(doc, "gamma1_cosmo");
    if (const auto opt = doc.find("optional_gammak"); opt != doc.end() && !opt->is_null()) {
        if (!opt->is_object()) throw SchemaError("optional_gammak is not an object");
        if (opt->contains("event")) {
            for (const auto& [k, v] : parse_gammak((*opt)["event"], "event")) t.event.gammak.emplace(k, v);
        }
        if (opt->contains("cosmo")) {
            for (const auto& [k, v] : parse_gammak((*opt)["cosmo"], "cosmo")) {
                t.cosmological.gammak.emplace(k, v);
            }
        }
    }
    return t;
}

Json reconstruction_to_json(const ReconstructionResult& r) {
    Json j;
    j["cosmological_constant"] = r.cosmological_constant;
    j["xi"] = r.xi;
    j["spin_sq"] = r.spin_sq;
    j["spin"] = std::sqrt(r.spin_sq);
    j["r_event"] = r.r_event;
    j["r_cosmo"] = r.r_cosmo;
    j["mass"] = r.mass;
    j["charge_sq"] = r.charge_sq;
    j["charge"] = r.charge_physical() ? Json(std::sqrt(std::max(r.charge_sq, 0.0))) : Json(nullptr);
    const auto& d = r.diagnostics;
    j["diagnostics"] = {{"residual_event", d.residual_event},
                        {"residual_cosmo", d.residual_cosmo},
                        {"residual_tolerance", d.residual_tolerance},
                        {"h_target", d.h_target},
                        {"h_inversion_residual", d.h_inversion_residual},
                        {"spin_sq_discrepancy", d.spin_sq_discrepancy},
                        {"condition_estimate", d.condition_estimate},
                        {"horizons_consistent", d.horizons_consistent}};
    j["flags"] = r.flags;
    return j;
}

SpacetimeParams draw_params(std::mt19937_64& rng, const ParamRange& range) {
    std::uniform_real_distribution<double> spin(range.spin_min, range.spin_max);
    std::uniform_real_distribution<double> charge(range.charge_min, range.charge_max);
    std::uniform_real_distribution<double> lambda(range.lambda_min, range.lambda_max);
    const double a = spin(rng);
    const double q = charge(rng);
    const double l = lambda(rng);
    return SpacetimeParams(range.mass, a, q, l);
}

int run_forward(const JobConfig& c, std::ostream& out, std::ostream& err) {
    if (c.format != OutputFormat::json) {
        err << "error: forward supports only --format json\n";
        return kExitUsage;
    }
    std::optional<SpacetimeParams> params;
    try {
        params = params_from_config(c);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    const std::vector<int> ks = c.ks.empty() ? std::vector<int>{1, 2, 3} : c.ks;
    int k_max = 1;
    for (int k : ks) {
        if (k == 0) {
            err << "error: k = 0 is reported as gamma0; pass nonzero modes to --k\n";
            return kExitUsage;
        }
        k_max = std::max(k_max, std::abs(k));
    }

    const RegimeReport regime = validate_regime(*params);
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "forward";
    doc["params"] = params_to_json(*params);
    doc["regime"] = regime_to_json(regime);
    try {
        const HorizonSet horizons = find_horizons(*params);
        TraceSet traces = forward_traces(*params, k_max);
        // Keep only the requested modes (gamma1 is always part of the schema).
        for (auto* h : {&traces.event, &traces.cosmological}) {
            std::map<int, double> kept;
            for (const auto& [k, v] : h->gammak) {
                const bool requested = k == 1 || std::any_of(ks.begin(), ks.end(),
                                                             [k](int q) { return std::abs(q) == k; });
                if (requested) kept[k] = v;
            }
            h->gammak = std::move(kept);
        }
        doc["horizons"] = horizons_to_json(horizons);
        doc["geometry"] = {{"event", geometry_to_json(derive_geometry(*params, horizons.event))},
                           {"cosmological", geometry_to_json(derive_geometry(*params, horizons.cosmological))}};
        doc["traces"] = traces_to_json(traces);
        std::vector<std::string> flags = regime.flags;
        flags.insert(flags.end(), traces.flags.begin(), traces.flags.end());
        doc["flags"] = flags;
    } catch (const RegimeError& e) {
        doc["error"] = {{"stage", "find_horizons"}, {"message", e.what()}};
        write_json(out, doc);
        err << "regime error: " << e.what() << '\n';
        return kExitRegime;
    }
    write_json(out, doc);
    return kExitOk;
}

int run_spectrum(const JobConfig& c, std::ostream& out, std::ostream& err) {
    if (c.grid_size < kMinGridSize) {
        err << "error: --grid " << c.grid_size << " is below the minimum " << kMinGridSize << '\n';
        return kExitUsage;
    }
    if (c.count < 1 || c.count > c.grid_size / 4) {
        err << "error: --count must lie in [1, grid/4]\n";
        return kExitUsage;
    }
    std::vector<int> ks = c.ks.empty() ? std::vector<int>{0, 1} : c.ks;

    std::string source = c.profile_source;
    if (source.empty()) {
        if (c.xi || c.beta_sq) source = "explicit";
        else if (c.mass || c.spin || c.charge || c.lambda) source = "horizon";
        else source = "round";
    }

    MetricProfile profile;
    double homothety = 1.0;
    std::optional<HorizonGeometry> geometry;
    Json profile_json;
    try {
        if (source == "round") {
            profile = MetricProfile::round_sphere();
        } else if (source == "explicit") {
            if (!c.xi || !c.beta_sq) throw SchemaError("explicit profile needs --xi and --beta-sq");
            profile = MetricProfile::make(*c.xi, *c.beta_sq);
        } else if (source == "horizon") {
            const SpacetimeParams params = params_from_config(c);
            HorizonSet horizons;
            try {
                horizons = find_horizons(params);
            } catch (const RegimeError& e) {
                write_json(out, error_report("spectrum", "find_horizons", e.what()));
                err << "regime error: " << e.what() << '\n';
                return kExitRegime;
            }
            double r0 = 0.0;
            if (c.horizon == "event") r0 = horizons.event;
            else if (c.horizon == "cosmological" || c.horizon == "cosmo") r0 = horizons.cosmological;
            else throw SchemaError("--horizon must be event or cosmological");
            geometry = derive_geometry(params, r0);
            profile = geometry->profile();
            homothety = geometry->homothety();
            profile_json["params"] = params_to_json(params);
            profile_json["horizon"] = c.horizon == "cosmo" ? "cosmological" : c.horizon;
            profile_json["geometry"] = geometry_to_json(*geometry);
        } else {
            throw SchemaError("--profile must be round, horizon or explicit");
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "spectrum";
    Json prof;
    prof["source"] = source;
    prof["xi"] = profile.xi;
    prof["beta_sq"] = profile.beta_sq;
    prof["homothety"] = homothety;
    for (const auto& [key, value] : profile_json.items()) prof[key] = value;
    doc["profile"] = prof;
    doc["grid_size"] = c.grid_size;

    std::vector<SpectrumResult> spectra;
    try {
        spectra = compute_spectra(profile, ks, c.grid_size, c.count, homothety);
    } catch (const Error& e) {
        write_json(out, error_report("spectrum", "sl_spectrum", e.what()));
        err << "convergence error: " << e.what() << '\n';
        return kExitConvergence;
    }

    if (c.format == OutputFormat::csv) {
        out << "k,j,lambda,error_estimate\n";
        for (const auto& s : spectra) {
            for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
                Json row = Json::array({s.eigenvalues[j], s.error_estimates[j]});
                out << s.k << ',' << j + 1 << ',' << row[0].dump() << ',' << row[1].dump() << '\n';
            }
        }
        return kExitOk;
    }

    Json modes = Json::array();
    for (const auto& s : spectra) {
        double closed = 0.0;
        if (geometry) {
            closed = s.k == 0 ? gamma0_closed(*geometry) : gammak_closed(*geometry, s.k);
        } else {
            closed = s.k == 0 ? gamma0_normalized_closed(profile) : 1.0 / std::abs(s.k);
        }
        const double deviation = (s.trace_total - closed) / closed;
        Json m;
        m["k"] = s.k;
        m["eigenvalues"] = s.eigenvalues;
        m["error_estimates"] = s.error_estimates;
        m["trace"] = {{"partial", s.trace_partial},
                      {"tail", s.trace_tail_estimate},
                      {"total", s.trace_total},
                      {"error_bound", s.error_bound},
                      {"weyl_a", s.weyl_a},
                      {"weyl_b", s.weyl_b}};
        m["closed_form"] = closed;
        m["relative_deviation"] = deviation;
        m["agrees"] = std::abs(deviation) <= kAgreementTolerance;
        modes.push_back(m);
    }
    doc["modes"] = modes;
    write_json(out, doc);
    return kExitOk;
}

int run_inverse(const JobConfig& c, std::ostream& out, std::ostream& err) {
    if (c.format != OutputFormat::json) {
        err << "error: inverse supports only --format json\n";
        return kExitUsage;
    }
    TraceSet traces;
    try {
        if (!c.traces_path.empty()) {
            std::ifstream in(c.traces_path);
            if (!in) throw SchemaError("cannot open trace file " + c.traces_path);
            Json doc;
            try {
                doc = Json::parse(in);
            } catch (const nlohmann::json::parse_error& e) {
                throw SchemaError(std::string("trace file is not valid JSON: ") + e.what());
            }
            traces = traces_from_json(doc);
        } else {
            if (!c.gamma0_event || !c.gamma1_event || !c.gamma0_cosmo || !c.gamma1_cosmo) {
                throw SchemaError(
                    "inline traces need --gamma0-event, --gamma1-event, --gamma0-cosmo and --gamma1-cosmo");
            }
            traces.event.gamma0 = *c.gamma0_event;
            traces.event.gammak[1] = *c.gamma1_event;
            traces.cosmological.gamma0 = *c.gamma0_cosmo;
            traces.cosmological.gammak[1] = *c.gamma1_cosmo;
            traces.provenance = TraceProvenance::external_input;
        }
    } catch (const SchemaError& e) {
        err << "schema error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        const ReconstructionResult r = reconstruct(traces);
        Json doc;
        doc["schema_version"] = kSchemaVersion;
        doc["command"] = "inverse";
        doc["traces"] = traces_to_json(traces);
        doc["result"] = reconstruction_to_json(r);
        write_json(out, doc);
        return kExitOk;
    } catch (const ReconstructionError& e) {
        write_json(out, error_report("inverse", e.stage(), e.what()));
        err << "reconstruction error [" << e.stage() << "]: " << e.what() << '\n';
        return kExitReconstruction;
    }
}

int run_roundtrip(const JobConfig& c, std::ostream& out, std::ostream& err) {
    if (c.format != OutputFormat::json) {
        err << "error: roundtrip supports only --format json\n";
        return kExitUsage;
    }
    if (c.use_numerical_traces && (c.grid_size < kMinGridSize || c.count < 20 || c.count > c.grid_size / 4)) {
        err << "error: numerical traces need --grid >= " << kMinGridSize << " and 20 <= --count <= grid/4\n";
        return kExitUsage;
    }

    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "roundtrip";
    doc["traces_source"] = c.use_numerical_traces ? "numerical-spectrum" : "closed-form";

    auto fail = [&](const char* stage, const Error& e, int code) {
        doc["error"] = {{"stage", stage}, {"message", e.what()}};
        write_json(out, doc);
        err << stage << " error: " << e.what() << '\n';
        return code;
    };

    if (c.random_draws > 0) {
        std::mt19937_64 rng(c.seed);
        Json draws = Json::array();
        Json skipped = Json::array();
        double worst = 0.0;
        for (int i = 0; i < c.random_draws; ++i) {
            const SpacetimeParams p = draw_params(rng);
            if (!validate_regime(p).ok()) {
                skipped.push_back({{"params", params_to_json(p)}, {"reason", "validate_regime failed"}});
                continue;
            }
            try {
                RoundTripOutcome o = round_trip(p, c);
                worst = std::max(worst, o.max_error);
                draws.push_back(std::move(o.report));
            } catch (const ReconstructionError& e) {
                doc["draws"] = draws;
                return fail(e.stage().c_str(), e, kExitReconstruction);
            } catch (const RegimeError& e) {
                return fail("find_horizons", e, kExitRegime);
            } catch (const Error& e) {
                return fail("sl_spectrum", e, kExitConvergence);
            }
        }
        doc["seed"] = c.seed;
        doc["draws"] = draws;
        doc["skipped"] = skipped;
        doc["max_relative_error"] = worst;
        write_json(out, doc);
        return kExitOk;
    }

    std::optional<SpacetimeParams> params;
    try {
        params = params_from_config(c);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    try {
        RoundTripOutcome o = round_trip(*params, c);
        for (auto& [key, value] : o.report.items()) doc[key] = value;
    } catch (const ReconstructionError& e) {
        return fail(e.stage().c_str(), e, kExitReconstruction);
    } catch (const RegimeError& e) {
        return fail("find_horizons", e, kExitRegime);
    } catch (const Error& e) {
        return fail("sl_spectrum", e, kExitConvergence);
    }
    write_json(out, doc);
    return kExitOk;
}

int run(const JobConfig& c, std::ostream& out, std::ostream& err) {
    switch (c.command) {
        case Command::forward: return run_forward(c, out, err);
        case Command::spectrum: return run_spectrum(c, out, err);
        case Command::inverse: return run_inverse(c, out, err);
        case Command::roundtrip: return run_roundtrip(c, out, err);
    }
    return kExitUsage;
}

}  // namespace knds
