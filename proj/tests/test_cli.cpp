#include "spinlab_cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace spinlab;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(const std::vector<std::string>& args, unsigned threads = 1) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err, threads);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line))
        out.push_back(line);
    return out;
}

std::filesystem::path temp_file(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("spinlab_test_" + name);
}

} // namespace

TEST(Cli, ConcurrenceExample) {
    const auto r = run_cli({"concurrence", "--kind", "xxz-dm", "--j", "1", "--delta", "0", "--d", "1", "--t", "0",
                            "--pair", "1,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2U);
    EXPECT_EQ(l[0], "i,j,t,value,lambda1,lambda2,lambda3,lambda4");
    EXPECT_EQ(l[1].rfind("1,2,0,0.45710678", 0), 0U) << l[1];
}

TEST(Cli, FigureShape) {
    const auto r = run_cli({"figure", "--id", "fig1", "--format", "csv"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    EXPECT_EQ(l[0], "delta,t,c12");
    EXPECT_EQ(l.size(), 1U + 101U * 4U);
}

TEST(Cli, FigureCustomTemperatures) {
    const auto r = run_cli({"figure", "--id", "fig6", "--points", "11", "--temps", "0,2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(lines(r.out).size(), 1U + 11U * 2U);
}

TEST(Cli, PhaseLineIsing) {
    const auto r =
        run_cli({"phase-line", "--kind", "ising-dm", "--free", "d", "--range", "0.5,1.5", "--h", "0", "--precision", "8"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2U);
    EXPECT_EQ(l[1].rfind("1.00000000,", 0), 0U) << l[1];
}

TEST(Cli, PhaseLineNegativeRange) {
    const auto r = run_cli({"phase-line", "--d", "1", "--free", "delta", "--range=-3,0"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    ASSERT_EQ(l.size(), 2U);
    EXPECT_NEAR(std::stod(l[1].substr(0, l[1].find(','))), -std::sqrt(2.0), 1e-9);
}

TEST(Cli, SpectrumJson) {
    const auto r = run_cli({"spectrum", "--n", "2", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.size(), 4U);
    EXPECT_NEAR(j[0]["energy"].get<double>(), -0.5, 1e-15);
    EXPECT_NEAR(j[3]["energy"].get<double>(), 0.5, 1e-15);
}

TEST(Cli, SweepTwoAxes) {
    const auto r = run_cli({"sweep", "--axis", "d:0:2:3", "--axis", "t=0,1", "--observables", "c12,purity"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto l = lines(r.out);
    EXPECT_EQ(l[0], "d,t,c12,purity");
    EXPECT_EQ(l.size(), 7U);
}

TEST(Cli, CriticalTemperature) {
    const auto none = run_cli({"critical-temp", "--delta", "-5"});
    ASSERT_EQ(none.code, 0) << none.err;
    EXPECT_EQ(none.out, "i,j,t_c\n1,2,none\n");
    const auto some = run_cli({"critical-temp", "--format", "json"});
    ASSERT_EQ(some.code, 0) << some.err;
    EXPECT_GT(nlohmann::json::parse(some.out)["t_c"].get<double>(), 0.0);
}

TEST(Cli, HelpListsEveryFlag) {
    const std::map<std::string, std::vector<std::string>> expected{
        {"spectrum", {"--kind", "--j", "--delta", "--d", "--h", "--n", "--boundary", "--delta-sign", "--config",
                      "--format", "--output", "--precision"}},
        {"concurrence", {"--kind", "--t", "--pair", "--config", "--format"}},
        {"sweep", {"--kind", "--axis", "--t", "--observables"}},
        {"critical-temp", {"--kind", "--pair", "--t-hi"}},
        {"phase-line", {"--kind", "--free", "--range", "--tol", "--edge"}},
        {"figure", {"--id", "--points", "--temps", "--format"}},
    };
    for (const auto& [sub, flags] : expected) {
        const auto r = run_cli({sub, "--help"});
        ASSERT_EQ(r.code, 0) << sub;
        for (const auto& f : flags)
            EXPECT_NE(r.out.find(f), std::string::npos) << sub << " " << f;
    }
}

TEST(Cli, UsageErrors) {
    for (const auto& args : std::vector<std::vector<std::string>>{
             {"spectrum", "--bogus", "1"},
             {},
             {"concurrence", "--pair", "1,1"},
             {"concurrence", "--t", "-1"},
             {"spectrum", "--kind", "heisenberg"},
             {"spectrum", "--kind", "ising-dm", "--delta", "1"},
             {"spectrum", "--n", "13"},
             {"figure", "--id", "fig99"},
             {"sweep", "--axis", "gamma:0:1:3"},
             {"sweep", "--axis", "t=0,-1"},
             {"spectrum", "--format", "xml"},
         }) {
        const auto r = run_cli(args);
        EXPECT_EQ(r.code, 1) << testing::PrintToString(args);
        EXPECT_EQ(r.out, "");
        ASSERT_FALSE(r.err.empty());
        EXPECT_EQ(r.err.find('\n'), r.err.size() - 1) << r.err;
    }
}

TEST(Cli, ConfigFileWithOverride) {
    const auto path = temp_file("config.txt");
    {
        std::ofstream f(path);
        f << "# model\nkind = xxz-dm\ndelta = 0\nd = 2\n";
    }
    const auto base = run_cli({"concurrence", "--config", path.string()});
    ASSERT_EQ(base.code, 0) << base.err;
    EXPECT_NE(base.out.find("0.45710678"), std::string::npos);
    const auto over = run_cli({"concurrence", "--config", path.string(), "--delta", "-5"});
    ASSERT_EQ(over.code, 0) << over.err;
    EXPECT_EQ(lines(over.out)[1].rfind("1,2,0,0,", 0), 0U) << over.out;
    {
        std::ofstream f(path);
        f << "gamma = 1\n";
    }
    EXPECT_EQ(run_cli({"spectrum", "--config", path.string()}).code, 1);
    std::filesystem::remove(path);
    EXPECT_EQ(run_cli({"spectrum", "--config", path.string()}).code, 1);
}

TEST(Cli, OutputFile) {
    const auto path = temp_file("out.csv");
    const auto r = run_cli({"spectrum", "--n", "2", "-o", path.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "");
    std::ifstream f(path);
    std::stringstream text;
    text << f.rdbuf();
    EXPECT_EQ(text.str(), run_cli({"spectrum", "--n", "2"}).out);
    std::filesystem::remove(path);
}

TEST(Cli, DeterministicOutput) {
    const std::vector<std::string> args{"sweep", "--axis", "delta:-2:2:9", "--axis", "t=0,0.5", "--d", "1",
                                        "--observables", "c12,c13,energy_gap"};
    const auto a = run_cli(args, 1);
    const auto b = run_cli(args, 4);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out, run_cli(args, 1).out);
}
