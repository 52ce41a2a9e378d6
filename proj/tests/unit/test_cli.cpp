#include "cli/commands.hpp"
#include "cli/config.hpp"
#include "cli/output.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace curvehedge;
using namespace curvehedge::cli;

namespace {

const char* kMinimal = R"({
  "market": {"curve": [[1.0, 0.97], [2.0, 0.94]]},
  "vol": {"family": "ho-lee", "betas": [0.2]},
  "instrument": {"kind": "bond-call", "exercise": 1.0, "bondMaturity": 2.0, "strike": 0.96}
})";

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

bool mentions(const ConfigError& e, const std::string& needle) {
    for (const auto& v : e.violations()) {
        if (v.find(needle) != std::string::npos) return true;
    }
    return false;
}

}  // namespace

TEST(Config, MinimalBondCallFillsDefaults) {
    const auto c = parse_config(kMinimal);
    EXPECT_EQ(c.run.inner_paths, 10000u);
    EXPECT_EQ(c.run.steps, (std::vector<std::size_t>{25, 50, 100, 200}));
    EXPECT_EQ(c.instrument.kind, InstrumentKind::bond_call);
    EXPECT_EQ(c.vol.family, VolFamily::ho_lee);
    const auto model = build_model(c);
    EXPECT_EQ(model.spec.nu, DiscreteMeasure::dirac(1.0));
    EXPECT_DOUBLE_EQ(model.start.at(1.0), 1.0);
}

TEST(Config, TenorOrderingViolationIsNamed) {
    const char* text = R"({
      "market": {"curve": [[1.0, 0.97], [1.5, 0.955], [2.0, 0.94]]},
      "vol": {"family": "ho-lee", "betas": [0.01]},
      "instrument": {"kind": "swaption", "exercise": 1.0, "tenor": [2.0, 1.0, 1.5], "strike": 0.03}
    })";
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e, "tenor ordering")) << e.what();
    }
}

TEST(Config, SyntaxErrorReportsLineAndColumn) {
    try {
        parse_config("{\n  \"market\": {,}\n}");
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_TRUE(mentions(e, "line 2")) << e.what();
    }
}

TEST(Config, CollectsEveryViolation) {
    const char* text = R"({
      "market": {"curve": [[1.0, 0.97], [2.0, 0.94]]},
      "vol": {"family": "ho-lee", "betas": [0.2]},
      "instrument": {"kind": "bond-call", "exercise": 1.0, "bondMaturity": 3.0, "strike": 0.96},
      "run": {"paths": 0, "colour": "blue"}
    })";
    try {
        parse_config(text);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_GE(e.violations().size(), 3u) << e.what();
        EXPECT_TRUE(mentions(e, "colour")) << e.what();
    }
}

TEST(Config, ShippedConfigsRoundTrip) {
    std::size_t seen = 0;
    for (const auto& entry : std::filesystem::directory_iterator(CURVEHEDGE_CONFIG_DIR)) {
        if (entry.path().extension() != ".json") continue;
        ++seen;
        const auto once = emit_config(load_config(entry.path().string()));
        const auto twice = emit_config(parse_config(once));
        EXPECT_EQ(once, twice) << entry.path();
    }
    EXPECT_GE(seen, 4u);
}

TEST(Config, HashIgnoresOutputAndThreads) {
    auto a = parse_config(kMinimal);
    auto b = a;
    b.run.out = "elsewhere";
    b.run.threads = 8;
    EXPECT_EQ(config_hash(a), config_hash(b));
    b.run.seed = a.run.seed + 1;
    EXPECT_NE(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
}

TEST(Output, LongFormatWithMetadataAndSe) {
    Table t;
    t.meta("seed", "7");
    t.add(Row{"price", 25, 0.0, std::nullopt, "forward", 0.1, 0.001, ""});
    const auto s = t.str();
    EXPECT_EQ(s.rfind("# seed: 7\n", 0), 0u);
    EXPECT_NE(s.find("section,steps,date,maturity,quantity,value,se,status\n"), std::string::npos);
    EXPECT_NE(s.find("price,25,0,,forward,0.10000000000000001,0.001,\n"), std::string::npos);
    EXPECT_EQ(format_number(0.5), "0.5");
}

TEST(Commands, VerifyPassesOnZeroVol) {
    auto c = load_config(std::string(CURVEHEDGE_CONFIG_DIR) + "/zero-vol.json");
    const auto table = verify_table(c);
    EXPECT_TRUE(failures(table).empty());
    for (const auto& row : table.rows()) {
        if (row.status == "info") continue;
        EXPECT_EQ(row.se, 0.0) << row.quantity;
    }
}

TEST(Commands, UnknownCommandIsUsageError) {
    auto c = parse_config(kMinimal);
    c.run.out = (std::filesystem::temp_directory_path() / "curvehedge-cli-test").string();
    std::ostringstream err;
    EXPECT_EQ(run_command("plot", c, err), 2);
}

TEST(Commands, PriceWritesCsvWithHash) {
    auto c = load_config(std::string(CURVEHEDGE_CONFIG_DIR) + "/zero-vol.json");
    c.run.out = (std::filesystem::temp_directory_path() / "curvehedge-cli-price").string();
    std::ostringstream err;
    ASSERT_EQ(run_command("price", c, err), 0);
    const auto text = read_file(std::filesystem::path(c.run.out) / "price.csv");
    EXPECT_NE(text.find("# config_hash: " + config_hash(c)), std::string::npos);
    EXPECT_NE(text.find("# curvehedge: " + std::string(kVersion)), std::string::npos);
}
