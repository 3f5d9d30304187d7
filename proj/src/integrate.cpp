#include "delayoc/integrate.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace delayoc {

namespace {

Vec lerp(double t, double ta, const Vec& a, double tb, const Vec& b)
{
    const double w = (t - ta) / (tb - ta);
    if (w <= 0.0)
        return a;
    if (w >= 1.0)
        return b;
    return (1.0 - w) * a + w * b;
}

Vec quadraticOn(const NodeMatrix& values, const NodeMatrix& slopes, int j, double h, double s)
{
    Vec out(values.cols());
    for (Eigen::Index i = 0; i < values.cols(); ++i)
        out[i] = leftHermiteQuadratic(values(j, i), slopes(j, i), values(j + 1, i), h, s);
    return out;
}

void requireFinite(const Vec& v, const char* what, double t)
{
    if (!v.allFinite())
        throw SweepError(fmt::format("{} became non-finite at t = {}", what, t), t);
}

/// In-progress forward solution: nodes 0..k are final, slopes 0..k-1 are final,
/// and an optional stage value sits at node k+1.
struct ForwardFront {
    const Grid& grid;
    const NodeMatrix& X;
    const NodeMatrix& S;
    const NodeMatrix& U;
    const History& stateHistory;
    const History& controlHistory;
    const DenseTrajectory& ahead;
    int k = 0;
    const Vec* stageX = nullptr;   // predicted x(t_{k+1})
    const Vec* stageU = nullptr;   // control at t_{k+1} under stageX

    double snap() const { return kSnapFraction * grid.h(); }

    bool leftOfStart(double t, Side side) const
    {
        return side == Side::Left && std::abs(t - grid.t0()) <= snap();
    }

    Vec state(double t, Side side) const
    {
        const double tk = grid.node(k);
        if (t < grid.t0() - snap() || leftOfStart(t, side))
            return stateHistory.fn(t);
        if (t <= tk + snap()) {
            const Grid::Location loc = grid.locate(t);
            if (loc.node >= 0)
                return X.row(loc.node).transpose();
            return quadraticOn(X, S, loc.interval, grid.h(), loc.offset);
        }
        if (stageX && t <= grid.node(k + 1) + snap())
            return lerp(t, tk, X.row(k).transpose(), grid.node(k + 1), *stageX);
        return ahead.eval(t);
    }

    Vec control(double t, Side side) const
    {
        const double tk = grid.node(k);
        if (t < grid.t0() - snap() || leftOfStart(t, side))
            return controlHistory.fn(t);
        if (t <= tk + snap()) {
            const Grid::Location loc = grid.locate(t);
            if (loc.node >= 0)
                return U.row(loc.node).transpose();
            return lerp(t, grid.node(loc.interval), U.row(loc.interval).transpose(),
                        grid.node(loc.interval + 1), U.row(loc.interval + 1).transpose());
        }
        if (stageU && t <= grid.node(k + 1) + snap())
            return lerp(t, tk, U.row(k).transpose(), grid.node(k + 1), *stageU);
        throw Error(fmt::format("forward sweep: control requested ahead of the front at t = {}", t));
    }
};

Vec feedbackAt(const SweepInputs& in, const ForwardFront& front, const DenseTrajectory& pbar,
               double s, const Vec& xs, Side side)
{
    const double tau1 = in.tau.state;
    const double tau2 = in.tau.control;
    FeedbackContext ctx;
    ctx.t = s;
    ctx.T = in.grid.T();
    ctx.tau = in.tau;
    ctx.x = xs;
    ctx.xLag = front.state(s - tau1, side);
    ctx.xAdvMixed = front.state(s + tau2 - tau1, side);
    ctx.xAdv = front.state(s + tau2, side);
    ctx.p = pbar.eval(s);
    ctx.pAdv = pbar.eval(s + tau2);
    ctx.indicatorAdv = activeBefore(s, in.grid.T(), tau2, in.grid.h(), side) ? 1.0 : 0.0;
    Vec u = in.prob.feedback(ctx);
    if (u.size() != in.prob.m)
        throw Error("feedback law returned a control of the wrong dimension");
    return u;
}

}  // namespace

DenseTrajectory piecewiseLinear(Grid grid, NodeMatrix values, History history)
{
    const int N = grid.intervals();
    NodeMatrix slopes(values.rows(), values.cols());
    for (int j = 0; j < N; ++j)
        slopes.row(j) = (values.row(j + 1) - values.row(j)) / grid.h();
    slopes.row(N) = slopes.row(N - 1);
    return {grid, std::move(values), std::move(slopes), std::move(history)};
}

StateSweep forwardStateSweep(const SweepInputs& in, const DenseTrajectory& pbar)
{
    const ProblemDef& prob = in.prob;
    const Grid& g = in.grid;
    const int N = g.intervals();
    const double h = g.h();
    const History xHist = prob.stateHistory();
    const History uHist = prob.controlHistory();

    NodeMatrix X(N + 1, prob.n);
    NodeMatrix S(N + 1, prob.n);
    NodeMatrix U(N + 1, prob.m);
    X.row(0) = prob.historyState(g.t0()).transpose();

    ForwardFront front{g, X, S, U, xHist, uHist, in.prevX};

    // Stage at a node whose state is final: stores the control and the slope.
    // The stored control keeps closed-right switching; the slope starting the
    // next interval sees the right limit of every delayed argument.
    auto nodeStage = [&](int k) -> Vec {
        front.k = k;
        front.stageX = nullptr;
        front.stageU = nullptr;
        const double s = g.node(k);
        const Side side = k < N ? Side::Right : Side::Left;
        const Vec xs = X.row(k).transpose();
        const Vec stored = feedbackAt(in, front, pbar, s, xs, Side::Left);
        requireFinite(stored, "control", s);
        U.row(k) = stored.transpose();
        const Vec us = side == Side::Left ? stored : feedbackAt(in, front, pbar, s, xs, side);
        requireFinite(us, "control", s);
        const Vec y = front.state(s - in.tau.state, side);
        const Vec v = front.control(s - in.tau.control, side);
        const Vec f = prob.dynamics(s, xs, y, us, v);
        requireFinite(f, "state derivative", s);
        S.row(k) = f.transpose();
        return f;
    };

    for (int k = 0; k < N; ++k) {
        const Vec k1 = nodeStage(k);
        const double s = g.node(k + 1);
        const Vec xPred = X.row(k).transpose() + h * k1;

        front.stageX = &xPred;
        const Vec uPred = feedbackAt(in, front, pbar, s, xPred, Side::Left);
        front.stageU = &uPred;
        const Vec y = front.state(s - in.tau.state, Side::Left);
        const Vec v = front.control(s - in.tau.control, Side::Left);
        const Vec k2 = prob.dynamics(s, xPred, y, uPred, v);

        const Vec next = X.row(k).transpose() + 0.5 * h * (k1 + k2);
        requireFinite(next, "state", s);
        X.row(k + 1) = next.transpose();
    }
    nodeStage(N);

    return {DenseTrajectory(g, std::move(X), std::move(S), xHist),
            piecewiseLinear(g, std::move(U), uHist)};
}

DenseTrajectory backwardAdjointSweep(const SweepInputs& in, const DenseTrajectory& x,
                                     const DenseTrajectory& u, const Vec& pT)
{
    const ProblemDef& prob = in.prob;
    const Grid& g = in.grid;
    const int N = g.intervals();
    const double h = g.h();
    const double T = g.T();
    const double tau1 = in.tau.state;
    const double tau2 = in.tau.control;
    const double snap = kSnapFraction * h;

    if (pT.size() != prob.n)
        throw Error("backward sweep: terminal adjoint has the wrong dimension");

    NodeMatrix P(N + 1, prob.n);
    NodeMatrix S(N + 1, prob.n);
    P.row(N) = pT.transpose();

    // p at r >= lowT. Intervals from `ready` on have final slopes; below node
    // `ready` the value is interpolated linearly from (lowT, lowV).
    auto adjointAhead = [&](double r, int ready, double lowT, const Vec& lowV) -> Vec {
        const double tr = g.node(ready);
        if (r <= tr + snap) {
            if (r <= lowT + snap)
                return lowV;
            if (r >= tr - snap)
                return P.row(ready).transpose();
            return lerp(r, lowT, lowV, tr, P.row(ready).transpose());
        }
        const Grid::Location loc = g.locate(r);
        if (loc.node >= 0)
            return P.row(loc.node).transpose();
        return quadraticOn(P, S, loc.interval, h, loc.offset);
    };

    // Stages evaluate one-sided limits from inside the interval being swept.
    auto rate = [&](double s, const Vec& ps, int ready, Side side) -> Vec {
        const Vec xs = x.eval(s);
        const Vec y = x.eval(s - tau1, side);
        const Vec us = u.eval(s);
        const Vec v = u.eval(s - tau2, side);
        Vec r = -hamiltonianDx(prob, s, xs, y, ps, us, v);
        if (activeBefore(s, T, tau1, h, side)) {
            const double sa = s + tau1;
            const Vec pa = adjointAhead(sa, ready, s, ps);
            r -= hamiltonianDy(prob, sa, x.eval(sa), xs, pa, u.eval(sa), u.eval(sa - tau2, side));
        }
        requireFinite(r, "adjoint derivative", s);
        return r;
    };

    for (int k = N; k > 0; --k) {
        const Vec pk = P.row(k).transpose();
        const Vec g1 = rate(g.node(k), pk, std::min(k + 1, N), Side::Left);
        S.row(k) = g1.transpose();
        const Vec pPred = pk - h * g1;
        const Vec g2 = rate(g.node(k - 1), pPred, k, Side::Right);
        const Vec next = pk - 0.5 * h * (g1 + g2);
        requireFinite(next, "adjoint", g.node(k - 1));
        P.row(k - 1) = next.transpose();
    }
    S.row(0) = rate(g.t0(), P.row(0).transpose(), std::min(1, N), Side::Right).transpose();

    return {g, std::move(P), std::move(S), History::zero(prob.n, -prob.maxDelay)};
}

double costOfRun(const ProblemDef& prob, DelayPair tau, const DenseTrajectory& x,
                 const DenseTrajectory& u)
{
    const Grid& g = x.grid();
    NodeMatrix samples(g.nodes(), 1);
    for (int k = 0; k <= g.intervals(); ++k) {
        const double t = g.node(k);
        samples(k, 0) = prob.costRate(t, x.nodeValue(k), x.eval(t - tau.state), u.nodeValue(k),
                                      u.eval(t - tau.control));
    }
    return simpson(samples, g.h())[0];
}

Vec adjointRate(const ProblemDef& prob, DelayPair tau, double T, double t,
                const DenseTrajectory& x, const DenseTrajectory& p, const DenseTrajectory& u)
{
    const Vec xs = x.eval(t);
    const Vec ps = p.eval(t);
    Vec r = -hamiltonianDx(prob, t, xs, x.eval(t - tau.state), ps, u.eval(t),
                           u.eval(t - tau.control));
    if (activeBefore(t, T, tau.state, x.grid().h())) {
        const double sa = t + tau.state;
        r -= hamiltonianDy(prob, sa, x.eval(sa), xs, p.eval(sa), u.eval(sa),
                           u.eval(sa - tau.control));
    }
    return r;
}

MidpointDefects midpointDefects(const ProblemDef& prob, const Extremal& ex)
{
    const Grid& g = ex.x.grid();
    const double h = g.h();
    MidpointDefects out;
    for (int k = 0; k < g.intervals(); ++k) {
        const double t = g.node(k) + 0.5 * h;
        // The quadratic's slope at the midpoint is the node difference quotient.
        const Vec dx = (ex.x.nodeValue(k + 1) - ex.x.nodeValue(k)) / h;
        const Vec dp = (ex.p.nodeValue(k + 1) - ex.p.nodeValue(k)) / h;
        const Vec xm = ex.x.eval(t);
        const Vec pm = ex.p.eval(t);
        const Vec f = prob.dynamics(t, xm, ex.x.eval(t - ex.tau.state), ex.u.eval(t),
                                    ex.u.eval(t - ex.tau.control));
        const Vec r = adjointRate(prob, ex.tau, ex.T, t, ex.x, ex.p, ex.u);
        out.state = std::max(out.state,
                             ((dx - f).array().abs() / (1.0 + xm.array().abs())).maxCoeff());
        out.adjoint = std::max(out.adjoint,
                               ((dp - r).array().abs() / (1.0 + pm.array().abs())).maxCoeff());
    }
    return out;
}

double feedbackResampleError(const ProblemDef& prob, const Extremal& ex)
{
    const Grid& g = ex.u.grid();
    double worst = 0.0;
    for (int k = 0; k <= g.intervals(); ++k) {
        const Vec u = prob.feedback(feedbackContextFrom(ex, g.node(k)));
        worst = std::max(worst, (u - ex.u.nodeValue(k)).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace delayoc
