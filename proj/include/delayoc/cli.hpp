#pragma once

#include "delayoc/export.hpp"
#include "delayoc/problems.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace delayoc {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,       // bad flags, unknown problem, delay without a reference
    kExitFailure = 2,     // solver did not converge, or an output could not be written
    kExitMismatch = 3,    // verify: a reference check failed
};

struct RunOptions {
    std::string problem;
    std::optional<double> tau1;
    std::optional<double> tau2;
    std::optional<int> steps;
    double newtonTol = 1e-10;
    int newtonMax = 1500;
    double innerEps = 1e-8;
    SolveMode mode = SolveMode::Newton;
    std::string out;
    ExportFormat format = ExportFormat::Csv;
    bool trace = false;
    std::string initAdjoint;   // JSON export whose adjoint seeds the undelayed solve
    bool parallelJacobian = false;
};

/// Per-problem defaults: tau = (1, 2), N = 60 for ocp1; tau = (0, 0), N = 50 for ocp2.
DelayPair resolvedDelay(const RunOptions& opt);
int resolvedSteps(const RunOptions& opt);
SolverConfig solverConfigFrom(const RunOptions& opt);

struct RunReport {
    std::string problem;
    DelayPair tau;
    int intervals = 0;
    double cost = 0.0;
    BootstrapSeed seed = BootstrapSeed::Zero;
    int bootstrapNewtonIterations = 0;
    int continuationSteps = 0;       // accepted steps
    int continuationAttempts = 0;
    int newtonIterations = 0;        // summed over continuation attempts
    double seconds = 0.0;
    std::optional<reference::AnalyticErrors> errors;
    ContinuationTrace trace;
};

struct RunOutcome {
    RunReport report;
    Extremal extremal;
};

/// Bootstrap plus continuation to the requested delay. Throws on failure.
RunOutcome executeRun(const ProblemDef& prob, const RunOptions& opt);

void printReport(std::ostream& os, const RunReport& r, bool withTrace);

/// Parses argv (subcommands `run` and `verify`) and executes; returns an ExitCode.
int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace delayoc
