#include "delayoc/export.hpp"
#include "delayoc/problems.hpp"

#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace delayoc;

namespace {

const ContinuationResult& solved()
{
    static const ContinuationResult r = [] {
        SolverConfig c;
        c.intervals = 60;
        return continuationRun(builtinOCP1(), {1.0, 2.0}, c, {});
    }();
    return r;
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);) out.push_back(l);
    return out;
}

std::vector<double> fields(const std::string& line)
{
    std::vector<double> out;
    std::istringstream is(line);
    for (std::string f; std::getline(is, f, ',');) out.push_back(std::stod(f));
    return out;
}

}  // namespace

TEST_CASE("csv export: header, one row per node, boundary rows")
{
    std::ostringstream os;
    writeCsv(os, solved().extremal);
    const auto rows = lines(os.str());
    REQUIRE(rows.size() == 62);
    CHECK(rows[0] == "t,x1,p1,u1");

    const auto first = fields(rows[1]);
    CHECK(first[0] == 0.0);
    CHECK(first[1] == 1.0);   // history value carries into the start
    const auto last = fields(rows.back());
    CHECK(last[0] == 3.0);
    CHECK(last[2] == 0.0);    // transversality
}

TEST_CASE("csv export is byte-for-byte reproducible")
{
    std::ostringstream a, b;
    writeCsv(a, solved().extremal);
    writeCsv(b, solved().extremal);
    CHECK(a.str() == b.str());
}

TEST_CASE("json export round-trips every number exactly")
{
    const RunDocument doc{"ocp1", solved().extremal, solved().trace.records};
    std::stringstream ss;
    writeJson(ss, doc);
    const ExportedRun back = readJson(ss);

    CHECK(back.problem == "ocp1");
    CHECK(back.tau == DelayPair{1.0, 2.0});
    CHECK(back.intervals == 60);
    CHECK(back.cost == doc.extremal.cost);
    CHECK(back.t.size() == 61);
    CHECK(back.t.back() == 3.0);
    CHECK(back.x == doc.extremal.x.values());
    CHECK(back.p == doc.extremal.p.values());
    CHECK(back.u == doc.extremal.u.values());
    REQUIRE(back.trace.size() == doc.trace.size());
    CHECK(back.trace.back().cost == doc.trace.back().cost);
    CHECK(back.trace.back().stepAccepted);
}

TEST_CASE("file export and its failures")
{
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "delayoc_export_test.json").string();
    exportTrajectories({"ocp1", solved().extremal, {}}, path, ExportFormat::Json);
    CHECK(readJsonFile(path).cost == solved().extremal.cost);
    std::filesystem::remove(path);

    CHECK_THROWS_AS(exportTrajectories({"ocp1", solved().extremal, {}}, "/nonexistent/dir/x.csv",
                                       ExportFormat::Csv),
                    ExportError);
    std::istringstream broken("{\"problem\": 3");
    CHECK_THROWS_AS(readJson(broken), ExportError);
    CHECK(parseExportFormat("json") == ExportFormat::Json);
    CHECK_FALSE(parseExportFormat("xml"));
}
