#include "delayoc/homotopy.hpp"
#include "delayoc/integrate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace delayoc {

namespace {

/// Undelayed problem discretized by classical Runge-Kutta with continuous
/// piecewise-linear controls given by their node values. Gradients come from
/// the exact adjoint of the discrete scheme.
class RungeKuttaTranscription {
public:
    RungeKuttaTranscription(const ProblemDef& prob, const Grid& grid, int substeps)
        : prob_(prob), grid_(grid), substeps_(substeps), dt_(grid.h() / substeps)
    {}

    int steps() const { return grid_.intervals() * substeps_; }

    /// Cost of the control nodes; fills the state after every substep (plus
    /// the initial one) when `states` is given.
    double cost(const NodeMatrix& U, NodeMatrix* states = nullptr) const
    {
        Vec x = prob_.historyState(grid_.t0());
        double J = 0.0;
        if (states) {
            states->resize(steps() + 1, prob_.n);
            states->row(0) = x.transpose();
        }
        for (int j = 0; j < steps(); ++j) {
            const Step st = stage(U, j, x);
            J += 0.5 * dt_ * (rate(st.t, x, st.ua) + rate(st.t + dt_, st.next, st.uc));
            x = st.next;
            if (!x.allFinite())
                return std::numeric_limits<double>::infinity();
            if (states)
                states->row(j + 1) = x.transpose();
        }
        return J;
    }

    /// Cost and its gradient with respect to the control nodes.
    double costAndGradient(const NodeMatrix& U, NodeMatrix& grad) const
    {
        NodeMatrix X;
        const double J = cost(U, &X);
        grad = NodeMatrix::Zero(U.rows(), U.cols());
        if (!std::isfinite(J))
            return J;

        Vec lambda = Vec::Zero(prob_.n);   // dJ/dx after the current step
        for (int j = steps() - 1; j >= 0; --j) {
            const Vec x = X.row(j).transpose();
            const Step st = stage(U, j, x);
            const double h2 = 0.5 * dt_;
            Vec ua = Vec::Zero(prob_.m);
            Vec ub = Vec::Zero(prob_.m);
            Vec uc = Vec::Zero(prob_.m);

            lambda += h2 * costDx(st.t + dt_, st.next, st.uc);
            uc += h2 * costDu(st.t + dt_, st.next, st.uc);

            Vec k1 = dt_ / 6.0 * lambda;
            Vec k2 = dt_ / 3.0 * lambda;
            Vec k3 = dt_ / 3.0 * lambda;
            const Vec k4 = dt_ / 6.0 * lambda;
            Vec xb = lambda;

            const Vec x4 = dynDx(st.t + dt_, st.x4, st.uc).transpose() * k4;
            uc += dynDu(st.t + dt_, st.x4, st.uc).transpose() * k4;
            xb += x4;
            k3 += dt_ * x4;

            const Vec x3 = dynDx(st.t + h2, st.x3, st.ub).transpose() * k3;
            ub += dynDu(st.t + h2, st.x3, st.ub).transpose() * k3;
            xb += x3;
            k2 += h2 * x3;

            const Vec x2 = dynDx(st.t + h2, st.x2, st.ub).transpose() * k2;
            ub += dynDu(st.t + h2, st.x2, st.ub).transpose() * k2;
            xb += x2;
            k1 += h2 * x2;

            xb += dynDx(st.t, x, st.ua).transpose() * k1;
            ua += dynDu(st.t, x, st.ua).transpose() * k1;

            xb += h2 * costDx(st.t, x, st.ua);
            ua += h2 * costDu(st.t, x, st.ua);
            lambda = xb;

            scatter(grad, j, 0.0, ua);
            scatter(grad, j, 0.5, ub);
            scatter(grad, j, 1.0, uc);
        }
        return J;
    }

    void project(NodeMatrix& U) const
    {
        if (!prob_.controlBox)
            return;
        for (Eigen::Index k = 0; k < U.rows(); ++k)
            for (Eigen::Index i = 0; i < U.cols(); ++i)
                U(k, i) = std::clamp(U(k, i), prob_.controlBox->lower[i], prob_.controlBox->upper[i]);
    }

private:
    struct Step {
        double t;
        Vec ua, ub, uc;   // controls at the start, middle and end of the substep
        Vec x2, x3, x4;   // stage states
        Vec next;
    };

    /// Weight of the right control node at fraction `frac` of substep j.
    double weight(int j, double frac) const { return (j % substeps_ + frac) / substeps_; }

    Vec control(const NodeMatrix& U, int j, double frac) const
    {
        const int k = j / substeps_;
        const double w = weight(j, frac);
        return ((1.0 - w) * U.row(k) + w * U.row(k + 1)).transpose();
    }

    void scatter(NodeMatrix& grad, int j, double frac, const Vec& g) const
    {
        const int k = j / substeps_;
        const double w = weight(j, frac);
        grad.row(k) += (1.0 - w) * g.transpose();
        grad.row(k + 1) += w * g.transpose();
    }

    Step stage(const NodeMatrix& U, int j, const Vec& x) const
    {
        Step st;
        st.t = grid_.node(j / substeps_) + (j % substeps_) * dt_;
        st.ua = control(U, j, 0.0);
        st.ub = control(U, j, 0.5);
        st.uc = control(U, j, 1.0);
        const double h2 = 0.5 * dt_;
        const Vec k1 = dyn(st.t, x, st.ua);
        st.x2 = x + h2 * k1;
        const Vec k2 = dyn(st.t + h2, st.x2, st.ub);
        st.x3 = x + h2 * k2;
        const Vec k3 = dyn(st.t + h2, st.x3, st.ub);
        st.x4 = x + dt_ * k3;
        const Vec k4 = dyn(st.t + dt_, st.x4, st.uc);
        st.next = x + dt_ / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        return st;
    }

    // Undelayed right-hand sides: the lagged arguments coincide with the current ones.
    Vec dyn(double t, const Vec& x, const Vec& u) const { return prob_.dynamics(t, x, x, u, u); }
    double rate(double t, const Vec& x, const Vec& u) const { return prob_.costRate(t, x, x, u, u); }
    Mat dynDx(double t, const Vec& x, const Vec& u) const
    {
        return prob_.dfdx(t, x, x, u, u) + prob_.dfdy(t, x, x, u, u);
    }
    Vec costDx(double t, const Vec& x, const Vec& u) const
    {
        return prob_.dcdx(t, x, x, u, u) + prob_.dcdy(t, x, x, u, u);
    }

    // Control derivatives are not part of the problem interface; central differences.
    static double controlStep(double v) { return 1e-6 * std::max(1.0, std::abs(v)); }

    Mat dynDu(double t, const Vec& x, const Vec& u) const
    {
        Mat D(prob_.n, prob_.m);
        Vec up = u;
        Vec um = u;
        for (int i = 0; i < prob_.m; ++i) {
            const double d = controlStep(u[i]);
            up[i] = u[i] + d;
            um[i] = u[i] - d;
            D.col(i) = (dyn(t, x, up) - dyn(t, x, um)) / (2.0 * d);
            up[i] = um[i] = u[i];
        }
        return D;
    }

    Vec costDu(double t, const Vec& x, const Vec& u) const
    {
        Vec g(prob_.m);
        Vec up = u;
        Vec um = u;
        for (int i = 0; i < prob_.m; ++i) {
            const double d = controlStep(u[i]);
            up[i] = u[i] + d;
            um[i] = u[i] - d;
            g[i] = (rate(t, x, up) - rate(t, x, um)) / (2.0 * d);
            up[i] = um[i] = u[i];
        }
        return g;
    }

    const ProblemDef& prob_;
    const Grid& grid_;
    int substeps_;
    double dt_;
};

double dot(const NodeMatrix& a, const NodeMatrix& b) { return (a.array() * b.array()).sum(); }

DenseTrajectory resampleOnto(const DenseTrajectory& p, const Grid& grid)
{
    NodeMatrix P(grid.nodes(), p.dim());
    for (int k = 0; k <= grid.intervals(); ++k)
        P.row(k) = p.eval(grid.node(k)).transpose();
    return DenseTrajectory::fromNodes(grid, std::move(P), p.history());
}

}  // namespace

void DirectSeedConfig::validate() const
{
    if (controlRefinement < 1 || substeps < 1 || adjointRefinement < 1 || maxIter < 1 ||
        !(gradTol > 0) || !(ladderRatio > 1.0))
        throw Error("direct seed configuration: refinements, substeps, maxIter and gradTol must be "
                    "positive and ladderRatio above 1");
}

double directCostGradient(const ProblemDef& prob, const Grid& grid, int substeps,
                          const NodeMatrix& U, NodeMatrix& grad)
{
    return RungeKuttaTranscription(prob, grid, substeps).costAndGradient(U, grad);
}

DenseTrajectory directSeedAdjoint(const ProblemDef& prob, int intervals, const DirectSeedConfig& dcfg)
{
    dcfg.validate();
    if (prob.freeTime() || !prob.terminal.isFree())
        throw Error("direct seed: only fixed-horizon, free-endpoint problems are supported");

    const Grid target(0.0, prob.horizonGuess(), intervals);
    const Grid grid(0.0, target.T(), intervals * dcfg.controlRefinement);
    const RungeKuttaTranscription tr(prob, grid, dcfg.substeps);

    NodeMatrix U = NodeMatrix::Zero(grid.nodes(), prob.m);
    tr.project(U);
    NodeMatrix g;
    double J = tr.costAndGradient(U, g);
    if (!std::isfinite(J))
        throw Error("direct seed: the zero control does not produce a finite cost");

    // Gradient descent with Barzilai-Borwein steps and an Armijo safeguard.
    double alpha = 1.0 / std::max(1.0, g.cwiseAbs().maxCoeff());
    for (int it = 0; it < dcfg.maxIter && g.cwiseAbs().maxCoeff() > dcfg.gradTol; ++it) {
        NodeMatrix trial;
        NodeMatrix gt;
        double Jt = J;
        bool moved = false;
        for (int halving = 0; halving < 50; ++halving, alpha *= 0.5) {
            trial = U - alpha * g;
            tr.project(trial);
            Jt = tr.cost(trial);
            if (std::isfinite(Jt) && Jt <= J - 1e-4 * dot(g, U - trial)) {
                moved = true;
                break;
            }
        }
        if (!moved)
            break;
        Jt = tr.costAndGradient(trial, gt);
        const NodeMatrix s = trial - U;
        const double sy = dot(s, gt - g);
        alpha = sy > 0 ? dot(s, s) / sy : alpha * 2.0;
        U = std::move(trial);
        J = Jt;
        g = std::move(gt);
    }

    // The adjoint is integrated on a refined grid: for open-loop unstable
    // dynamics the backward sweep amplifies discretization errors strongly.
    const int r = dcfg.adjointRefinement;
    const Grid fine(0.0, grid.T(), grid.intervals() * r);
    NodeMatrix X;
    RungeKuttaTranscription(prob, grid, r).cost(U, &X);
    NodeMatrix Unodes(fine.nodes(), prob.m);
    for (int j = 0; j < fine.intervals(); ++j) {
        const double w = static_cast<double>(j % r) / r;
        Unodes.row(j) = (1.0 - w) * U.row(j / r) + w * U.row(j / r + 1);
    }
    Unodes.row(fine.intervals()) = U.row(grid.intervals());

    const DenseTrajectory x = DenseTrajectory::fromNodes(fine, std::move(X), prob.stateHistory());
    const DenseTrajectory u = piecewiseLinear(fine, std::move(Unodes), prob.controlHistory());
    const DenseTrajectory pFine =
        backwardAdjointSweep(SweepInputs{prob, DelayPair{}, fine, x}, x, u, Vec::Zero(prob.n));
    return resampleOnto(pFine, target);
}

std::vector<int> seedLadder(int intervals, const DirectSeedConfig& dcfg)
{
    dcfg.validate();
    std::vector<int> ladder{intervals * dcfg.controlRefinement};
    double n = ladder.back();
    while (ladder.back() > intervals) {
        n /= dcfg.ladderRatio;
        const int rounded = 2 * static_cast<int>(std::lround(n / 2.0));
        ladder.push_back(std::max(intervals, std::min(rounded, ladder.back() - 2)));
    }
    return ladder;
}

SolveResult solveFromDirectSeed(const ProblemDef& prob, const SolverConfig& cfg,
                                const DirectSeedConfig& dcfg)
{
    const std::vector<int> ladder = seedLadder(cfg.intervals, dcfg);
    DenseTrajectory p = directSeedAdjoint(prob, ladder.front(), dcfg);
    SolveStats total;
    for (int N : ladder) {
        SolverConfig c = cfg;
        c.intervals = N;
        const Grid grid(0.0, prob.horizonGuess(), N);
        const DenseTrajectory x0 =
            DenseTrajectory::constant(grid, prob.historyState(0.0), prob.stateHistory());
        SolveResult r = solveAtDelay(prob, DelayPair{}, resampleOnto(p, grid), x0, c);
        total.newtonIterations += r.stats.newtonIterations;
        total.outerIterations += r.stats.outerIterations;
        total.residualNorm = r.stats.residualNorm;
        total.status = r.stats.status;
        if (N == cfg.intervals)
            return {std::move(r.extremal), total};
        p = std::move(r.extremal.p);
    }
    throw Error("direct seed: grid ladder does not end at the requested grid");
}

}  // namespace delayoc
