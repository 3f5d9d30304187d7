#include "delayoc/cli.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace delayoc;

namespace {

struct Outcome {
    int code;
    std::string out, err;
};

Outcome cli(const std::vector<std::string>& args)
{
    std::ostringstream out, err;
    const int code = runCli(args, out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("run reports the benchmark cost with its analytic errors")
{
    const Outcome r = cli({"run", "--problem", "ocp1", "--tau1", "1", "--tau2", "2", "--steps", "60"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("cost         2.7615") != std::string::npos);
    CHECK(r.out.find("sup error") != std::string::npos);
}

TEST_CASE("usage errors exit with 1")
{
    CHECK(cli({"run", "--problem", "nosuch"}).code == kExitUsage);
    CHECK(cli({"run"}).code == kExitUsage);
    CHECK(cli({"frobnicate"}).code == kExitUsage);
    CHECK(cli({"run", "--problem", "ocp1", "--mode", "gauss"}).code == kExitUsage);
    CHECK(cli({"run", "--problem", "ocp1", "--steps", "61"}).code == kExitUsage);
    CHECK(cli({"run", "--problem", "ocp1", "--tau1", "5"}).code == kExitUsage);
    CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("verify without a registered reference exits with 1")
{
    const Outcome r = cli({"verify", "--problem", "ocp2", "--tau1", "9"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("no reference") != std::string::npos);
    CHECK(cli({"verify", "--problem", "ocp1", "--tau1", "0.5"}).code == kExitUsage);
}

TEST_CASE("verify the scalar benchmark")
{
    const Outcome r = cli({"verify", "--problem", "ocp1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("a reference mismatch exits with 3")
{
    // Four intervals are far too coarse for the published accuracy.
    const Outcome r = cli({"verify", "--problem", "ocp1", "--steps", "4"});
    CHECK(r.code == kExitMismatch);
    CHECK(r.out.find("FAIL") != std::string::npos);
}

TEST_CASE("non-convergence exits with 2 and names the last good delay")
{
    const Outcome r =
        cli({"run", "--problem", "ocp1", "--tau1", "0.5", "--tau2", "1", "--mode", "picard"});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("last good tau") != std::string::npos);
}

TEST_CASE("trajectory files, unwritable paths and seeding from an export")
{
    const auto dir = std::filesystem::temp_directory_path();
    const std::string csv = (dir / "delayoc_cli_test.csv").string();
    const std::string json = (dir / "delayoc_cli_test.json").string();

    CHECK(cli({"run", "--problem", "ocp1", "--out", csv}).code == kExitOk);
    std::ifstream in(csv);
    int rows = 0;
    for (std::string l; std::getline(in, l);) ++rows;
    CHECK(rows == 62);

    CHECK(cli({"run", "--problem", "ocp1", "--tau1", "0", "--tau2", "0", "--out", json, "--format",
               "json"})
              .code == kExitOk);
    const Outcome seeded = cli({"run", "--problem", "ocp1", "--init-adjoint", json, "--trace"});
    CHECK(seeded.code == kExitOk);
    CHECK(seeded.out.find("supplied seed") != std::string::npos);
    CHECK(seeded.out.find("trace") != std::string::npos);

    CHECK(cli({"run", "--problem", "ocp1", "--out", "/nonexistent/dir/x.csv"}).code == kExitFailure);
    std::filesystem::remove(csv);
    std::filesystem::remove(json);
}

TEST_CASE("verify a tabulated stirred-tank delay")
{
    const Outcome r = cli({"verify", "--problem", "ocp2", "--tau1", "0.2"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.find("PASS cost") != std::string::npos);
}
