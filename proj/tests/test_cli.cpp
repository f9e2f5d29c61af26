#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stlab/cache.hpp"
#include "stlab/cli.hpp"
#include "stlab/config.hpp"
#include "stlab/report.hpp"

using namespace stlab;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    fs::path path;

    explicit TempDir(const std::string& tag)
    {
        path = fs::temp_directory_path() / ("stlab-test-" + tag + "-" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string read_file(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), {}};
}

} // namespace

TEST(Cli, Primes)
{
    const auto r = cli({"primes", "--x", "20"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out, "4\n");
    EXPECT_EQ(cli({"primes", "--x", "20", "--list"}).out, "11\n13\n17\n19\n");
}

TEST(Cli, Trace)
{
    EXPECT_EQ(cli({"trace", "--k", "12", "--p", "2", "--method", "miller"}).out, "-24\n");
    EXPECT_EQ(cli({"trace", "--k", "12", "--p", "5", "--method", "birch"}).out, "4830\n");
    EXPECT_EQ(cli({"trace", "--k", "4", "--p", "7"}).out, "0\n");
}

TEST(Cli, Ap)
{
    EXPECT_EQ(cli({"ap", "--p", "5", "--a", "1", "--b", "1"}).out, "-3 good\n");
    EXPECT_EQ(cli({"ap", "--p", "7", "--a", "0", "--b", "7"}).out, "0 cusp\n");
    const auto t = cli({"ap", "--p", "5", "--table"});
    EXPECT_EQ(t.code, kExitOk);
    EXPECT_EQ(std::count(t.out.begin(), t.out.end(), '\n'), 26);
    EXPECT_EQ(t.out.substr(0, 17), "a,b,ap,reduction\n");
}

TEST(Cli, UsageErrors)
{
    EXPECT_EQ(cli({}).code, kExitUsage);
    EXPECT_EQ(cli({"primes", "--x", "20", "--bogus"}).code, kExitUsage);
    EXPECT_EQ(cli({"nonsense"}).code, kExitUsage);
    EXPECT_EQ(cli({"primes", "--x", "5"}).code, kExitUsage);
    EXPECT_EQ(cli({"ap", "--p", "9", "--a", "1", "--b", "1"}).code, kExitUsage);
    EXPECT_EQ(cli({"ap", "--p", "5", "--a", "1"}).code, kExitUsage);
    EXPECT_EQ(cli({"moments", "--profile", "grh"}).code, kExitUsage);
    const auto r = cli({"bs", "--M", "16", "--mode", "minor", "--alpha", "1.0", "--beta", "1.01"});
    EXPECT_EQ(r.code, kExitUsage);
    EXPECT_NE(r.err.find("narrower"), std::string::npos);
}

TEST(Cli, BudgetErrors)
{
    EXPECT_EQ(cli({"ap", "--p", "10007", "--table"}).code, kExitBudget);
    EXPECT_EQ(cli({"trace", "--k", "400", "--p", "997"}).code, kExitBudget);
    EXPECT_EQ(cli({"s0", "--p", "5", "--m", "300"}).code, kExitUsage);
    EXPECT_EQ(cli({"moments", "--x", "100000", "--A", "500", "--B", "500"}).code, kExitBudget);
}

TEST(Cli, Help)
{
    const auto r = cli({"--help"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_NE(r.out.find("moments"), std::string::npos);
}

TEST(Cli, HurwitzAndEichler)
{
    EXPECT_EQ(cli({"hurwitz", "--max-n", "8"}).out, "N,twelve_h\n3,4\n4,6\n7,12\n8,12\n");
    const auto e = cli({"eichler-check", "--max-p", "300"});
    EXPECT_EQ(e.code, kExitOk);
    const auto j = nlohmann::json::parse(e.out);
    EXPECT_TRUE(j.at("failures").empty());
    EXPECT_EQ(j.at("primes"), 60);
}

TEST(Cli, VerifyClassnum)
{
    const auto r = cli({"verify", "--suite", "classnum"});
    EXPECT_EQ(r.code, kExitOk) << r.out;
    EXPECT_NE(r.out.find("Eichler mass p <= 2000"), std::string::npos);
}

TEST(Cli, BirchCheckWritesCsv)
{
    TempDir dir("birch");
    const auto out = dir.path / "traces.csv";
    const auto r = cli({"birch-check", "--p-max", "30", "--j-max", "5", "--out", out.string()});
    EXPECT_EQ(r.code, kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("records"), 8 * 5);
    const auto csv = read_file(out);
    EXPECT_EQ(csv.substr(0, 16), "k,p,trace,method");
    EXPECT_NE(csv.find("12,5,4830,birch"), std::string::npos);
}

TEST(Cli, S0Json)
{
    const auto r = cli({"s0", "--p", "5", "--m", "10"});
    ASSERT_EQ(r.code, kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("formula").get<double>(), -0.2473472, 1e-10);
    EXPECT_NEAR(j.at("difference").get<double>(), 0.0, 1e-10);
}

TEST(Cli, BsCsvAndJson)
{
    const auto r = cli({"bs", "--M", "8"});
    ASSERT_EQ(r.code, kExitOk);
    EXPECT_EQ(r.out.substr(0, 6), "m,s,u\n");
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 9);

    TempDir dir("bs");
    const auto out = dir.path / "c.csv";
    const auto s = cli({"bs", "--M", "64", "--mode", "major", "--alpha", "0.5", "--beta", "2", "--out", out.string()});
    ASSERT_EQ(s.code, kExitOk);
    const auto j = nlohmann::json::parse(s.out);
    EXPECT_EQ(j.at("mode"), "major");
    EXPECT_TRUE(j.contains("cert"));
    EXPECT_TRUE(fs::exists(out));
}

TEST(Cli, Parseval)
{
    const auto r = cli({"parseval", "--M", "1000", "--alpha", "0", "--beta", "1.5707963267948966"});
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_LE(nlohmann::json::parse(r.out).at("gap").get<double>(), 0.14);
}

TEST(Cli, MomentsJsonSchema)
{
    TempDir dir("moments");
    const auto out = dir.path / "m.json";
    const auto r = cli({"moments", "--x", "200", "--A", "5", "--B", "5", "--t", "1,2", "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(valid_moment_json(j));
    EXPECT_EQ(j.at("results").size(), 2u);
    EXPECT_TRUE(j.at("results")[0].at("ratio").is_null());
    EXPECT_EQ(nlohmann::json::parse(read_file(out)), j);

    nlohmann::json broken = j;
    broken.erase("Z");
    EXPECT_FALSE(valid_moment_json(broken));
}

TEST(Cli, CltAndAlmostAll)
{
    TempDir dir("clt");
    const auto out = dir.path / "clt.csv";
    const auto r = cli({"clt", "--x", "200", "--A", "4", "--B", "4", "--bins", "8", "--out", out.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("bin_counts").size(), 8u);
    EXPECT_EQ(read_file(out).substr(0, 28), "a,b,n_i,error,standardized\n-");

    const auto a = cli({"almost-all", "--x", "200", "--A", "4", "--B", "4", "--y", "2"});
    ASSERT_EQ(a.code, kExitOk);
    EXPECT_NEAR(nlohmann::json::parse(a.out).at("y_inverse_square").get<double>(), 0.25, 1e-15);
}

TEST(Cli, Probes)
{
    const auto h1 = cli({"probe", "hyp1", "--K", "12", "--x", "20", "--pair", "12,12"});
    ASSERT_EQ(h1.code, kExitOk) << h1.err;
    const auto j1 = nlohmann::json::parse(h1.out);
    EXPECT_GT(j1.at("value").get<double>(), 0);
    EXPECT_TRUE(j1.contains("pair"));
    const auto h2 = cli({"probe", "hyp2", "--a", "1", "--b", "1", "--m", "1", "--y", "6", "--x", "12"});
    ASSERT_EQ(h2.code, kExitOk);
    EXPECT_NEAR(nlohmann::json::parse(h2.out).at("value").get<double>(), 0.530871, 1e-6);
    EXPECT_EQ(cli({"probe"}).code, kExitUsage);
}

TEST(Cache, RoundTrip)
{
    const ApTable t(5);
    std::stringstream ss;
    cache_write(ss, t);
    EXPECT_EQ(ss.str().size(), 4u + 1 + 8 + 25 * 4);
    const ApTable back = cache_read(ss, 5);
    EXPECT_EQ(back.p(), 5);
    EXPECT_EQ(back.entries(), t.entries());
}

TEST(Cache, RejectsDamage)
{
    std::stringstream ss;
    cache_write(ss, ApTable(7));
    const std::string good = ss.str();

    auto read = [](std::string bytes, std::int64_t p) {
        std::istringstream is(bytes);
        return cache_read(is, p);
    };
    std::string magic = good;
    magic[0] = 'X';
    EXPECT_THROW(read(magic, 7), CacheError);

    std::string version = good;
    version[4] = 9;
    EXPECT_THROW(read(version, 7), CacheError);

    EXPECT_THROW(read(good, 11), CacheError);
    EXPECT_THROW(read(good.substr(0, good.size() - 3), 7), CacheError);
    EXPECT_THROW(read(good + "x", 7), CacheError);

    // an a_p value beyond the Hasse bound
    std::string hasse = good;
    hasse[13] = 100;
    hasse[14] = hasse[15] = hasse[16] = 0;
    EXPECT_THROW(read(hasse, 7), CacheError);
    EXPECT_NO_THROW(read(good, 7));
}

TEST(Cache, DirectoryStore)
{
    TempDir dir("cache");
    EXPECT_FALSE(cache_load(dir.path, 11).has_value());
    const ApTable t = cached_table(dir.path, 11);
    EXPECT_TRUE(fs::exists(cache_path(dir.path, 11)));
    const auto again = cache_load(dir.path, 11);
    ASSERT_TRUE(again.has_value());
    EXPECT_EQ(again->entries(), t.entries());

    {
        std::fstream f(cache_path(dir.path, 11), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(1);
        f.put('Z');
    }
    EXPECT_THROW(cache_load(dir.path, 11), CacheError);
}

TEST(Cache, CliTableThroughCache)
{
    TempDir dir("clicache");
    const auto first = cli({"--cache-dir", dir.path.string(), "ap", "--p", "13", "--table", "--cache"});
    ASSERT_EQ(first.code, kExitOk);
    EXPECT_TRUE(fs::exists(cache_path(dir.path, 13)));
    const auto second = cli({"--cache-dir", dir.path.string(), "ap", "--p", "13", "--table", "--cache"});
    EXPECT_EQ(first.out, second.out);

    std::ofstream(cache_path(dir.path, 13), std::ios::binary) << "garbage";
    EXPECT_EQ(cli({"--cache-dir", dir.path.string(), "ap", "--p", "13", "--table", "--cache"}).code, kExitFailure);
}

TEST(Config, MergeAndValidate)
{
    RunConfig c;
    c.merge(nlohmann::json{{"threads", 2}, {"brute_cap", 150}, {"profile", "mrh"}, {"tolerances", {{"s0", 1e-8}}}});
    EXPECT_EQ(c.threads, 2);
    EXPECT_EQ(c.brute_cap, 150);
    EXPECT_EQ(c.profile, Profile::MRH);
    EXPECT_EQ(c.tolerance("s0", 1.0), 1e-8);
    EXPECT_EQ(c.tolerance("other", 0.5), 0.5);
    EXPECT_THROW(c.merge(nlohmann::json{{"threads", 0}}), std::invalid_argument);
    EXPECT_THROW(c.merge(nlohmann::json::array()), std::invalid_argument);
    EXPECT_THROW(c.merge(nlohmann::json{{"tolerances", {{"x", -1}}}}), std::invalid_argument);
}

TEST(Config, CliFile)
{
    TempDir dir("config");
    const auto good = dir.path / "good.json";
    std::ofstream(good) << R"({"ap_table_cap": 7})";
    EXPECT_EQ(cli({"--config", good.string(), "ap", "--p", "11", "--table"}).code, kExitBudget);
    EXPECT_EQ(cli({"--config", good.string(), "ap", "--p", "7", "--table"}).code, kExitOk);

    const auto bad = dir.path / "bad.json";
    std::ofstream(bad) << R"({"threads": -3})";
    EXPECT_EQ(cli({"--config", bad.string(), "primes", "--x", "20"}).code, kExitUsage);
    EXPECT_EQ(cli({"--config", (dir.path / "missing.json").string(), "primes", "--x", "20"}).code, kExitUsage);
}
