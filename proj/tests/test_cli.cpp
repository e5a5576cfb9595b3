#include <string>

#include <gtest/gtest.h>

#include <jetgroupoid/cli.hpp>

namespace jetgroupoid
{
namespace
{

using cli::Options;

Options on(const std::string &file)
{
    Options opt;
    opt.path = std::string(JETGROUPOID_SYSTEMS_DIR) + "/" + file;
    return opt;
}

TEST(Cli, CheckAcceptsDp2)
{
    const auto out = cli::cmd_check(on("dp2.sys"));
    EXPECT_EQ(out.exit_code, 0);
    EXPECT_TRUE(out.report["fibered"].get<bool>());
    EXPECT_EQ(out.report["fiber"], (cli::json{"x", "y"}));
}

TEST(Cli, CheckRejectsFiberDependentSigma)
{
    const auto out = cli::cmd_check(on("bad_sigma.sys"));
    EXPECT_EQ(out.exit_code, 1);
    EXPECT_EQ(out.report["error"]["kind"], "FiberednessViolation");
}

TEST(Cli, MissingFileIsIoError)
{
    try {
        cli::cmd_check(on("does_not_exist.sys"));
        FAIL();
    } catch (const IoError &e) {
        EXPECT_EQ(cli::exit_code_for(e), 2);
    }
}

TEST(Cli, SyntaxErrorExitsOne)
{
    EXPECT_EQ(cli::exit_code_for(SyntaxError(1, 1, "system")), 1);
    EXPECT_EQ(cli::exit_code_for(UsageError("x")), 2);
}

TEST(Cli, PinsBindParameters)
{
    auto opt = on("dp2.sys");
    opt.pins = {"a=1/2,b", "c=3"};
    const auto sys = cli::load_system(opt);
    EXPECT_EQ(sys.bindings.at("a"), mpq_class(1, 2));
    EXPECT_EQ(sys.bindings.at("c"), mpq_class(3));
    EXPECT_EQ(sys.bindings.at("b"), cli::random_pin(opt.seed, "b"));
    opt.pins = {"z=1"};
    EXPECT_THROW(cli::load_system(opt), UsageError);
}

TEST(Cli, ConfluenceOnGeneratedFamily)
{
    auto opt = on("dp2_confluence.sys");
    opt.param = "eps";
    const auto out = cli::cmd_confluence(opt);
    ASSERT_EQ(out.exit_code, 0);
    const auto &field = out.report["field"];
    ASSERT_EQ(field.size(), 6U);
    const std::vector<std::string> want{"1", "g", "2*f^3 + t*f + gamma", "0", "0", "0"};
    for (std::size_t i = 0; i < want.size(); ++i) {
        const auto got = parse_expr(field[i][1].get<std::string>());
        EXPECT_TRUE(exprs_probably_equal(got, parse_expr(want[i]), 40, i).zero) << field[i];
    }
}

TEST(Cli, ConfluenceVerdicts)
{
    auto opt = on("translation.sys");
    opt.param = "s";
    const auto t = cli::cmd_confluence(opt);
    EXPECT_EQ(t.exit_code, 0);
    EXPECT_EQ(t.report["field"][0][1], "1");
    opt = on("not_identity.sys");
    opt.param = "s";
    const auto n = cli::cmd_confluence(opt);
    EXPECT_EQ(n.exit_code, 1);
    EXPECT_EQ(n.report["error"]["kind"], "NotIdentityAtSpecialValue");
}

TEST(Cli, GeneratedFileIsUpToDate)
{
    const auto out = cli::cmd_generate("dp2-confluence", Options{});
    EXPECT_EQ(out.text, cli::read_file(std::string(JETGROUPOID_SYSTEMS_DIR) + "/dp2_confluence.sys"));
    EXPECT_THROW(cli::cmd_generate("nothing", Options{}), UsageError);
    EXPECT_EQ(parse_system(out.text).name, "dp2_confluence");
}

TEST(Cli, DimensionReportIsDeterministic)
{
    auto opt = on("dp2.sys");
    opt.seed = 7;
    opt.jobs = 1;
    const auto a = cli::cmd_dimension(opt).report.dump(2);
    opt.jobs = 4;
    const auto b = cli::cmd_dimension(opt).report.dump(2);
    EXPECT_EQ(a, b);
    const auto r = cli::json::parse(a);
    EXPECT_EQ(r["estimate"], 9);
    EXPECT_EQ(r["confidence"], "HIGH");
    EXPECT_EQ(r["seed"], 7);
    EXPECT_EQ(r["version"], cli::version);
    EXPECT_FALSE(r.contains("wall_time_ms"));
    EXPECT_GT(r["modulus"].get<std::uint64_t>(), std::uint64_t{1} << 30);
}

TEST(Cli, IdentityDimensionIsBaseDimension)
{
    const auto r = cli::cmd_dimension(on("identity.sys")).report;
    EXPECT_EQ(r["estimate"], 2);
}

TEST(Cli, StrictFailsOnLowConfidence)
{
    auto opt = on("dp2.sys");
    opt.points = 1;
    opt.iters = 5;
    opt.strict = true;
    const auto out = cli::cmd_dimension(opt);
    EXPECT_EQ(out.report["confidence"], "LOW");
    EXPECT_EQ(out.exit_code, 1);
    opt.strict = false;
    EXPECT_EQ(cli::cmd_dimension(opt).exit_code, 0);
}

TEST(Cli, RelationsVanishAsListed)
{
    auto opt = on("identity.sys");
    opt.degree = 1;
    const auto r = cli::cmd_relations(opt).report;
    ASSERT_FALSE(r["relations"].empty());
    for (const auto &rel : r["relations"]) {
        EXPECT_FALSE(rel["terms"].empty());
        EXPECT_TRUE(rel["text"].is_string());
    }
    EXPECT_LE(r["failure_bound_log10"].get<long>(), -9);
}

TEST(Cli, SpecialiseScalingFamily)
{
    auto opt = on("scaling.sys");
    opt.param = "s";
    opt.at = "1";
    const auto r = cli::cmd_specialise(opt);
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.report["verdict"], "PASS");
    EXPECT_LT(r.report["special"]["estimate"].get<int>(), r.report["relative_generic"].get<int>());
}

TEST(Cli, ProlongAndIterateReports)
{
    auto opt = on("dp2.sys");
    opt.order = 2;
    const auto p = cli::cmd_prolong(opt).report;
    EXPECT_EQ(p["frame"]["jets"].size(), 12U);
    EXPECT_EQ(p["image"]["jets"].size(), 12U);
    opt.steps = 3;
    const auto it = cli::cmd_iterate(opt).report;
    EXPECT_EQ(it["jet"].size(), jet_coordinate_names(cli::load_system(opt), 2).size());
    EXPECT_EQ(it["n"], 3);
}

} // namespace
} // namespace jetgroupoid
