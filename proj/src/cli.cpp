#include "delayoc/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include <chrono>
#include <cmath>
#include <ostream>

namespace delayoc {

namespace {

constexpr double kOcp1CostTolerance = 5e-4;
constexpr double kOcp1ErrorBound = 0.05e-2;
constexpr double kOcp2CostTolerance = 1e-4;

// A JSON export re-read as an adjoint guess on its own grid.
DenseTrajectory adjointFromExport(const std::string& path, const ProblemDef& prob)
{
    const ExportedRun run = readJsonFile(path);
    if (run.p.cols() != prob.n || run.t.size() < 2 ||
        static_cast<Eigen::Index>(run.t.size()) != run.p.rows())
        throw ExportError(fmt::format("'{}' does not hold an adjoint of dimension {}", path, prob.n));
    const Grid grid(run.t.front(), run.t.back(), static_cast<int>(run.t.size()) - 1);
    return DenseTrajectory::fromNodes(grid, run.p, History::zero(prob.n, -prob.maxDelay));
}

void addSolverOptions(CLI::App& cmd, RunOptions& opt)
{
    cmd.add_option("--problem", opt.problem, "Builtin problem: ocp1 or ocp2")->required();
    cmd.add_option("--tau1", opt.tau1, "State delay");
    cmd.add_option("--tau2", opt.tau2, "Control delay");
    cmd.add_option("--steps", opt.steps, "Grid intervals N")->check(CLI::Range(2, 1 << 20));
    cmd.add_option("--newton-tol", opt.newtonTol, "Newton residual tolerance")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--newton-max", opt.newtonMax, "Newton iteration cap")->check(CLI::PositiveNumber);
    cmd.add_option("--inner-eps", opt.innerEps, "Outer adjoint/state iteration tolerance")
        ->check(CLI::PositiveNumber);
    cmd.add_option_function<std::string>(
           "--mode",
           [&opt](const std::string& m) {
               opt.mode = m == "picard" ? SolveMode::Picard : SolveMode::Newton;
           },
           "Inner solver: newton (default) or picard")
        ->check(CLI::IsMember({"newton", "picard"}));
    cmd.add_option("--init-adjoint", opt.initAdjoint,
                   "JSON export whose adjoint seeds the undelayed solve")
        ->check(CLI::ExistingFile);
    cmd.add_flag("--parallel-jacobian", opt.parallelJacobian,
                 "Evaluate Jacobian columns with OpenMP");
    cmd.add_flag("--trace", opt.trace, "Print the continuation trace");
}

void addOutputOptions(CLI::App& cmd, RunOptions& opt)
{
    cmd.add_option("--out", opt.out, "Write trajectories to this file");
    cmd.add_option_function<std::string>(
           "--format", [&opt](const std::string& f) { opt.format = *parseExportFormat(f); },
           "Output format: csv (default) or json")
        ->check(CLI::IsMember({"csv", "json"}));
}

struct Check {
    std::string name;
    double measured;
    double bound;
    bool pass;
};

int verify(const ProblemDef& prob, const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    const DelayPair tau = resolvedDelay(opt);
    std::vector<Check> checks;
    std::optional<reference::Ocp2Row> row;

    if (prob.name == "ocp1") {
        if (tau.state != 1.0 || tau.control != 2.0) {
            err << fmt::format("no reference for ocp1 at tau = ({}, {}); only (1, 2)\n", tau.state,
                               tau.control);
            return kExitUsage;
        }
    } else {
        row = reference::ocp2Lookup(tau.state);
        if (!row) {
            err << fmt::format("no reference for ocp2 at tau1 = {}; tabulated delays:", tau.state);
            for (const auto& r : reference::ocp2Table()) err << ' ' << r.tau;
            err << '\n';
            return kExitUsage;
        }
    }

    std::optional<RunOutcome> run;
    try {
        run = executeRun(prob, opt);
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitFailure;
    }
    printReport(out, run->report, opt.trace);

    if (row) {
        const double d = std::abs(run->report.cost - row->cost);
        checks.push_back({fmt::format("cost vs tabulated {}", row->cost), d, kOcp2CostTolerance,
                          d <= kOcp2CostTolerance});
    } else {
        const double d = std::abs(run->report.cost - reference::kOcp1ReportedCost);
        checks.push_back({fmt::format("cost vs reported {}", reference::kOcp1ReportedCost), d,
                          kOcp1CostTolerance, d <= kOcp1CostTolerance});
        const auto& e = run->report.errors;
        if (!e) {
            err << "analytic errors unavailable\n";
            return kExitMismatch;
        }
        checks.push_back({"control sup error (relative)", e->control, kOcp1ErrorBound,
                          e->control <= kOcp1ErrorBound});
        checks.push_back({"state sup error (relative)", e->state, kOcp1ErrorBound,
                          e->state <= kOcp1ErrorBound});
    }

    bool ok = true;
    for (const Check& c : checks) {
        out << fmt::format("{} {}: {:.3e} (bound {:.1e})\n", c.pass ? "PASS" : "FAIL", c.name,
                           c.measured, c.bound);
        ok = ok && c.pass;
    }
    return ok ? kExitOk : kExitMismatch;
}

int run(const ProblemDef& prob, const RunOptions& opt, std::ostream& out, std::ostream& err)
{
    std::optional<RunOutcome> run;
    try {
        run = executeRun(prob, opt);
    } catch (const ContinuationAborted& e) {
        const Extremal& g = e.lastGood();
        err << "continuation failed: " << e.what() << '\n';
        err << fmt::format("last good tau = ({}, {}), cost {:.10g}, {} accepted of {} attempts\n",
                           g.tau.state, g.tau.control, g.cost, e.trace().accepted(),
                           e.trace().attempts());
        return kExitFailure;
    } catch (const ExportError& e) {
        err << e.what() << '\n';
        return kExitFailure;
    } catch (const Error& e) {
        err << "solver failure: " << e.what() << '\n';
        return kExitFailure;
    }
    printReport(out, run->report, opt.trace);

    if (!opt.out.empty()) {
        try {
            exportTrajectories({prob.name, run->extremal, run->report.trace.records}, opt.out,
                               opt.format);
        } catch (const ExportError& e) {
            err << e.what() << '\n';
            return kExitFailure;
        }
        out << "wrote " << opt.out << '\n';
    }
    return kExitOk;
}

}  // namespace

DelayPair resolvedDelay(const RunOptions& opt)
{
    const bool first = opt.problem == "ocp1";
    return {opt.tau1.value_or(first ? 1.0 : 0.0), opt.tau2.value_or(first ? 2.0 : 0.0)};
}

int resolvedSteps(const RunOptions& opt) { return opt.steps.value_or(opt.problem == "ocp1" ? 60 : 50); }

SolverConfig solverConfigFrom(const RunOptions& opt)
{
    SolverConfig cfg;
    cfg.intervals = resolvedSteps(opt);
    cfg.newtonTol = opt.newtonTol;
    cfg.newtonMaxIter = opt.newtonMax;
    cfg.innerEps = opt.innerEps;
    cfg.mode = opt.mode;
    cfg.parallelJacobian = opt.parallelJacobian;
    cfg.validate();
    return cfg;
}

RunOutcome executeRun(const ProblemDef& prob, const RunOptions& opt)
{
    const SolverConfig cfg = solverConfigFrom(opt);
    const DelayPair tau = resolvedDelay(opt);

    std::optional<DenseTrajectory> seed;
    if (!opt.initAdjoint.empty()) seed = adjointFromExport(opt.initAdjoint, prob);

    const auto start = std::chrono::steady_clock::now();
    BootstrapResult boot = solveUndelayed(prob, cfg, seed);
    ContinuationResult cont = continueFrom(prob, boot.extremal, tau, cfg, ContinuationConfig{});
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    RunReport r;
    r.problem = prob.name;
    r.tau = tau;
    r.intervals = cfg.intervals;
    r.cost = cont.extremal.cost;
    r.seed = boot.seed;
    r.bootstrapNewtonIterations = boot.stats.newtonIterations;
    r.continuationSteps = cont.trace.accepted();
    r.continuationAttempts = cont.trace.attempts();
    for (const TraceRecord& rec : cont.trace.records) r.newtonIterations += rec.newtonIterations;
    r.seconds = seconds;
    r.errors = reference::analyticErrors(prob.name, cont.extremal);
    r.trace = std::move(cont.trace);
    return {std::move(r), std::move(cont.extremal)};
}

void printReport(std::ostream& os, const RunReport& r, bool withTrace)
{
    os << fmt::format("problem      {}\n", r.problem);
    os << fmt::format("tau          ({}, {})\n", r.tau.state, r.tau.control);
    os << fmt::format("N            {}\n", r.intervals);
    os << fmt::format("cost         {:.10g}\n", r.cost);
    os << fmt::format("bootstrap    {} seed, {} Newton iterations\n", toString(r.seed),
                      r.bootstrapNewtonIterations);
    os << fmt::format("continuation {} steps ({} attempts), {} Newton iterations\n",
                      r.continuationSteps, r.continuationAttempts, r.newtonIterations);
    os << fmt::format("wall time    {:.3f} s\n", r.seconds);
    if (r.errors)
        os << fmt::format("sup error    control {:.4f}%, state {:.4f}%\n", 100.0 * r.errors->control,
                          100.0 * r.errors->state);
    if (withTrace && !r.trace.records.empty()) {
        os << "trace\n";
        os << fmt::format("  {:>10} {:>10} {:>7} {:>12} {:>14} {}\n", "tau1", "tau2", "newton",
                          "residual", "cost", "accepted");
        for (const TraceRecord& t : r.trace.records)
            os << fmt::format("  {:>10.6g} {:>10.6g} {:>7} {:>12.3e} {:>14.10g} {}\n", t.tau.state,
                              t.tau.control, t.newtonIterations, t.residualNorm, t.cost,
                              t.stepAccepted ? "yes" : "no");
    }
}

int runCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Indirect shooting with delay continuation for delayed optimal control problems",
                 "delayoc"};
    app.require_subcommand(1);

    RunOptions runOpt, verifyOpt;
    CLI::App* runCmd = app.add_subcommand("run", "Solve a builtin problem at the given delays");
    addSolverOptions(*runCmd, runOpt);
    addOutputOptions(*runCmd, runOpt);
    CLI::App* verifyCmd =
        app.add_subcommand("verify", "Solve and compare against the built-in references");
    addSolverOptions(*verifyCmd, verifyOpt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    RunOptions& opt = runCmd->parsed() ? runOpt : verifyOpt;
    const auto prob = builtinProblem(opt.problem);
    if (!prob) {
        err << fmt::format("unknown problem '{}'; available:", opt.problem);
        for (const auto& n : builtinNames()) err << ' ' << n;
        err << "\n" << app.help();
        return kExitUsage;
    }
    const DelayPair tau = resolvedDelay(opt);
    if (runCmd->parsed() && (tau.state < 0 || tau.control < 0 || tau.state > prob->maxDelay ||
        tau.control > prob->maxDelay)) {
        err << fmt::format("delays must lie in [0, {}]\n", prob->maxDelay);
        return kExitUsage;
    }
    try {
        solverConfigFrom(opt);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return kExitUsage;
    }

    return runCmd->parsed() ? run(*prob, opt, out, err) : verify(*prob, opt, out, err);
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    std::vector<const char*> argv{"delayoc"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return runCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace delayoc
