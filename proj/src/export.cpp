#include "delayoc/export.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iterator>
#include <ostream>

namespace delayoc {

namespace {

using Buffer = fmt::memory_buffer;

// 17 significant digits round-trips every double.
void num(Buffer& out, double v) { fmt::format_to(std::back_inserter(out), "{:.17g}", v); }

void row(Buffer& out, const NodeMatrix& m, int k)
{
    out.push_back('[');
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j) out.push_back(',');
        num(out, m(k, j));
    }
    out.push_back(']');
}

void matrix(Buffer& out, const NodeMatrix& m)
{
    out.push_back('[');
    for (Eigen::Index k = 0; k < m.rows(); ++k) {
        if (k) out.push_back(',');
        row(out, m, static_cast<int>(k));
    }
    out.push_back(']');
}

NodeMatrix readMatrix(const nlohmann::json& j)
{
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
    NodeMatrix m(rows, cols);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const auto& r = j.at(k);
        if (static_cast<Eigen::Index>(r.size()) != cols)
            throw ExportError("json export: ragged trajectory matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(k, c) = r.at(c).get<double>();
    }
    return m;
}

}  // namespace

std::optional<ExportFormat> parseExportFormat(std::string_view name)
{
    if (name == "csv") return ExportFormat::Csv;
    if (name == "json") return ExportFormat::Json;
    return std::nullopt;
}

void writeCsv(std::ostream& os, const Extremal& ex)
{
    const Grid& g = ex.x.grid();
    Buffer out;
    out.append(std::string_view("t"));
    for (int i = 1; i <= ex.x.dim(); ++i) fmt::format_to(std::back_inserter(out), ",x{}", i);
    for (int i = 1; i <= ex.p.dim(); ++i) fmt::format_to(std::back_inserter(out), ",p{}", i);
    for (int i = 1; i <= ex.u.dim(); ++i) fmt::format_to(std::back_inserter(out), ",u{}", i);
    out.push_back('\n');

    for (int k = 0; k < g.nodes(); ++k) {
        num(out, g.node(k));
        for (const DenseTrajectory* tr : {&ex.x, &ex.p, &ex.u})
            for (int j = 0; j < tr->dim(); ++j) {
                out.push_back(',');
                num(out, tr->values()(k, j));
            }
        out.push_back('\n');
    }
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void writeJson(std::ostream& os, const RunDocument& doc)
{
    const Extremal& ex = doc.extremal;
    const Grid& g = ex.x.grid();
    Buffer out;
    auto put = [&](std::string_view s) { out.append(s); };

    put("{\"problem\":");
    put(nlohmann::json(doc.problem).dump());
    put(",\"tau\":[");
    num(out, ex.tau.state);
    put(",");
    num(out, ex.tau.control);
    fmt::format_to(std::back_inserter(out), "],\"N\":{},\"cost\":", g.intervals());
    num(out, ex.cost);

    put(",\"trace\":[");
    for (std::size_t i = 0; i < doc.trace.size(); ++i) {
        const TraceRecord& r = doc.trace[i];
        if (i) put(",");
        put("{\"tau\":[");
        num(out, r.tau.state);
        put(",");
        num(out, r.tau.control);
        fmt::format_to(std::back_inserter(out), "],\"newtonIterations\":{},\"residualNorm\":",
                       r.newtonIterations);
        num(out, r.residualNorm);
        put(",\"cost\":");
        num(out, r.cost);
        put(r.stepAccepted ? ",\"accepted\":true}" : ",\"accepted\":false}");
    }

    put("],\"trajectories\":{\"t\":[");
    for (int k = 0; k < g.nodes(); ++k) {
        if (k) put(",");
        num(out, g.node(k));
    }
    put("],\"x\":");
    matrix(out, ex.x.values());
    put(",\"p\":");
    matrix(out, ex.p.values());
    put(",\"u\":");
    matrix(out, ex.u.values());
    put("}}\n");
    os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

void exportTrajectories(const RunDocument& doc, const std::string& path, ExportFormat format)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ExportError(fmt::format("cannot open '{}' for writing", path));
    if (format == ExportFormat::Csv)
        writeCsv(os, doc.extremal);
    else
        writeJson(os, doc);
    os.flush();
    if (!os) throw ExportError(fmt::format("write to '{}' failed", path));
}

ExportedRun readJson(std::istream& is)
{
    nlohmann::json j;
    try {
        is >> j;
        ExportedRun run;
        run.problem = j.at("problem").get<std::string>();
        run.tau = {j.at("tau").at(0).get<double>(), j.at("tau").at(1).get<double>()};
        run.intervals = j.at("N").get<int>();
        run.cost = j.at("cost").get<double>();
        for (const auto& r : j.at("trace")) {
            TraceRecord rec;
            rec.tau = {r.at("tau").at(0).get<double>(), r.at("tau").at(1).get<double>()};
            rec.newtonIterations = r.at("newtonIterations").get<int>();
            rec.residualNorm = r.at("residualNorm").get<double>();
            rec.cost = r.at("cost").get<double>();
            rec.stepAccepted = r.at("accepted").get<bool>();
            run.trace.push_back(rec);
        }
        const auto& tr = j.at("trajectories");
        run.t = tr.at("t").get<std::vector<double>>();
        run.x = readMatrix(tr.at("x"));
        run.p = readMatrix(tr.at("p"));
        run.u = readMatrix(tr.at("u"));
        return run;
    } catch (const nlohmann::json::exception& e) {
        throw ExportError(fmt::format("json export: {}", e.what()));
    }
}

ExportedRun readJsonFile(const std::string& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ExportError(fmt::format("cannot open '{}'", path));
    return readJson(is);
}

}  // namespace delayoc
