#include "knds/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace knds;

namespace {

struct Outcome {
    int code;
    Json doc;
    std::string text;
    std::string err;
};

Outcome invoke(const JobConfig& c) {
    std::ostringstream out, err;
    const int code = run(c, out, err);
    Outcome o{code, Json(), out.str(), err.str()};
    if (!o.text.empty() && c.format == OutputFormat::json) o.doc = Json::parse(o.text);
    return o;
}

JobConfig with_params(Command cmd, double m, double a, double q, double l) {
    JobConfig c;
    c.command = cmd;
    c.mass = m;
    c.spin = a;
    c.charge = q;
    c.lambda = l;
    return c;
}

}  // namespace

TEST(CliIo, TraceJsonRoundTrip) {
    const TraceSet t = forward_traces(SpacetimeParams(1, 0.3, 0.2, 0.03), 3);
    const Json j = traces_to_json(t);
    EXPECT_EQ(j["schema_version"], "1");
    EXPECT_EQ(j["provenance"], "closed-form");
    const TraceSet back = traces_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.event.gamma0, t.event.gamma0);
    EXPECT_EQ(back.cosmological.gamma1(), t.cosmological.gamma1());
    EXPECT_EQ(back.event.gammak.at(3), t.event.gammak.at(3));
    EXPECT_EQ(back.provenance, TraceProvenance::external_input);
}

TEST(CliIo, TraceSchemaErrors) {
    Json j = traces_to_json(forward_traces(SpacetimeParams(1, 0.1, 0.1, 0.05), 1));
    Json missing = j;
    missing.erase("gamma1_cosmo");
    EXPECT_THROW((void)traces_from_json(missing), SchemaError);
    Json version = j;
    version["schema_version"] = "2";
    EXPECT_THROW((void)traces_from_json(version), SchemaError);
    Json text = j;
    text["gamma0_event"] = "4.6";
    EXPECT_THROW((void)traces_from_json(text), SchemaError);
    Json bad_key = j;
    bad_key["optional_gammak"]["event"]["two"] = 1.0;
    EXPECT_THROW((void)traces_from_json(bad_key), SchemaError);
    EXPECT_THROW((void)traces_from_json(Json::array()), SchemaError);
}

TEST(CliIo, ForwardReport) {
    JobConfig c = with_params(Command::forward, 1, 0.1, 0.1, 0.05);
    const Outcome o = invoke(c);
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(o.doc["command"], "forward");
    EXPECT_NEAR(o.doc["horizons"]["event"].get<double>(), 2.1587701168023669099, 1e-13);
    EXPECT_TRUE(o.doc["traces"]["optional_gammak"]["event"].contains("3"));
    EXPECT_TRUE(o.doc["regime"]["ok"].get<bool>());
    // A forward report is itself a valid trace document.
    EXPECT_NO_THROW((void)traces_from_json(o.doc));
}

TEST(CliIo, ForwardRegimeFailure) {
    const Outcome o = invoke(with_params(Command::forward, 1, 0.998, 0.5, 3));
    EXPECT_EQ(o.code, kExitRegime);
    EXPECT_FALSE(o.doc["regime"]["ok"].get<bool>());
}

TEST(CliIo, ForwardUsageErrors) {
    JobConfig c = with_params(Command::forward, 1, 0.1, 0.1, -1);
    EXPECT_EQ(invoke(c).code, kExitUsage);
    c = with_params(Command::forward, 1, 0.1, 0.1, 0.05);
    c.ks = {0, 1};
    EXPECT_EQ(invoke(c).code, kExitUsage);
    c.ks = {};
    c.format = OutputFormat::csv;
    EXPECT_EQ(invoke(c).code, kExitUsage);
    JobConfig none;
    EXPECT_EQ(invoke(none).code, kExitUsage);
}

TEST(CliIo, SpectrumJsonAndCsv) {
    JobConfig c;
    c.command = Command::spectrum;
    c.ks = {0, 2};
    c.grid_size = 256;
    c.count = 40;
    const Outcome o = invoke(c);
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(o.doc["profile"]["source"], "round");
    ASSERT_EQ(o.doc["modes"].size(), 2u);
    EXPECT_EQ(o.doc["modes"][1]["k"], 2);
    EXPECT_NEAR(o.doc["modes"][1]["eigenvalues"][0].get<double>(), 6.0, 1e-6);
    EXPECT_TRUE(o.doc["modes"][0]["agrees"].get<bool>());

    c.format = OutputFormat::csv;
    const Outcome csv = invoke(c);
    ASSERT_EQ(csv.code, kExitOk);
    std::istringstream lines(csv.text);
    std::string header, first;
    std::getline(lines, header);
    std::getline(lines, first);
    EXPECT_EQ(header, "k,j,lambda,error_estimate");
    EXPECT_EQ(first.rfind("0,1,", 0), 0u);
}

TEST(CliIo, SpectrumOfHorizon) {
    JobConfig c = with_params(Command::spectrum, 1, 0.1, 0.1, 0.05);
    c.horizon = "cosmological";
    c.ks = {1};
    c.grid_size = 512;
    c.count = 100;
    const Outcome o = invoke(c);
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_EQ(o.doc["profile"]["source"], "horizon");
    EXPECT_LT(std::abs(o.doc["modes"][0]["relative_deviation"].get<double>()), 5e-3);
}

TEST(CliIo, SpectrumUsageErrors) {
    JobConfig c;
    c.command = Command::spectrum;
    c.grid_size = 32;
    EXPECT_EQ(invoke(c).code, kExitUsage);
    c.grid_size = 256;
    c.profile_source = "explicit";
    c.xi = 0.2;
    EXPECT_EQ(invoke(c).code, kExitUsage);
    c.beta_sq = 1.5;
    EXPECT_EQ(invoke(c).code, kExitUsage);
}

TEST(CliIo, InverseFromFileAndInline) {
    const auto path = std::filesystem::temp_directory_path() / "knds_cli_io_traces.json";
    {
        std::ofstream f(path);
        write_json(f, traces_to_json(forward_traces(SpacetimeParams(1, 0.1, 0.1, 0.05), 1)));
    }
    JobConfig c;
    c.command = Command::inverse;
    c.traces_path = path.string();
    const Outcome o = invoke(c);
    ASSERT_EQ(o.code, kExitOk) << o.err;
    EXPECT_NEAR(o.doc["result"]["cosmological_constant"].get<double>(), 0.05, 1e-11);
    EXPECT_NEAR(o.doc["result"]["mass"].get<double>(), 1.0, 1e-9);
    std::filesystem::remove(path);

    JobConfig inline_cfg;
    inline_cfg.command = Command::inverse;
    inline_cfg.gamma0_event = 4.6;
    inline_cfg.gamma1_event = 4.7;
    EXPECT_EQ(invoke(inline_cfg).code, kExitUsage);
    inline_cfg.gamma0_cosmo = 41.3;
    inline_cfg.gamma1_cosmo = 4.7;
    const Outcome bad = invoke(inline_cfg);
    EXPECT_EQ(bad.code, kExitReconstruction);
    EXPECT_EQ(bad.doc["error"]["stage"], "invert_h/denominator");

    JobConfig missing;
    missing.command = Command::inverse;
    missing.traces_path = "/nonexistent/traces.json";
    EXPECT_EQ(invoke(missing).code, kExitUsage);
}

TEST(CliIo, RoundTripSingleAndBatch) {
    const Outcome single = invoke(with_params(Command::roundtrip, 1, 0.3, 0.2, 0.03));
    ASSERT_EQ(single.code, kExitOk) << single.err;
    EXPECT_LT(single.doc["max_relative_error"].get<double>(), 1e-7);

    JobConfig batch;
    batch.command = Command::roundtrip;
    batch.random_draws = 5;
    batch.seed = 9;
    const Outcome b = invoke(batch);
    ASSERT_EQ(b.code, kExitOk) << b.err;
    EXPECT_EQ(b.doc["draws"].size() + b.doc["skipped"].size(), 5u);
    EXPECT_EQ(b.doc["seed"], 9);
}

TEST(CliIo, DrawsStayInRange) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 100; ++i) {
        const SpacetimeParams p = draw_params(rng);
        EXPECT_EQ(p.mass(), 1.0);
        EXPECT_GE(p.spin(), 0.02);
        EXPECT_LE(p.spin(), 0.5);
        EXPECT_LE(p.charge(), 0.4);
        EXPECT_GE(p.cosmological_constant(), 0.005);
        EXPECT_LE(p.cosmological_constant(), 0.1);
    }
    EXPECT_EQ(relative_error(0.0, 1e-9), 1e-9);
    EXPECT_NEAR(relative_error(2.0, 2.2), 0.1, 1e-15);
}

TEST(CliIo, SpinlessForwardIsFlagged) {
    const Outcome o = invoke(with_params(Command::forward, 1, 0, 0, 0.01));
    ASSERT_EQ(o.code, kExitOk) << o.err;
    const auto& flags = o.doc["flags"];
    EXPECT_NE(std::find(flags.begin(), flags.end(), "lambda-formula-inapplicable: a=0"), flags.end());
    EXPECT_NE(std::find(flags.begin(), flags.end(), "inverse-not-applicable: a=0"), flags.end());
}
