#pragma once

#include "delayoc/homotopy.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace delayoc {

enum class ExportFormat { Csv, Json };
std::optional<ExportFormat> parseExportFormat(std::string_view name);

class ExportError : public Error {
public:
    using Error::Error;
};

/// Everything a run writes out. `trace` may be empty.
struct RunDocument {
    std::string problem;
    Extremal extremal;
    std::vector<TraceRecord> trace;
};

/// Node table with header t,x1..xn,p1..pn,u1..um; one row per grid node.
void writeCsv(std::ostream& os, const Extremal& ex);
/// {problem, tau, N, cost, trace[], trajectories{t, x, p, u}}.
void writeJson(std::ostream& os, const RunDocument& doc);

/// Writes to `path`, throwing ExportError when the file cannot be written.
void exportTrajectories(const RunDocument& doc, const std::string& path, ExportFormat format);

/// Parsed form of a JSON export, node values only.
struct ExportedRun {
    std::string problem;
    DelayPair tau;
    int intervals = 0;
    double cost = 0.0;
    std::vector<TraceRecord> trace;
    std::vector<double> t;
    NodeMatrix x, p, u;
};

ExportedRun readJson(std::istream& is);
ExportedRun readJsonFile(const std::string& path);

}  // namespace delayoc
