#include "delayoc/model.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace delayoc {

double DelayPair::norm() const { return std::hypot(state, control); }

std::optional<double> TerminalSpec::target(int component) const
{
    for (const auto& f : fixed)
        if (f.index == component)
            return f.value;
    return std::nullopt;
}

double ProblemDef::horizonGuess() const
{
    return std::visit(
        [](const auto& h) -> double {
            if constexpr (std::is_same_v<std::decay_t<decltype(h)>, FixedTime>)
                return h.T;
            else
                return h.initialGuess;
        },
        horizon);
}

double hamiltonian(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                   const Vec& u, const Vec& v)
{
    if (p.size() != prob.n || x.size() != prob.n || y.size() != prob.n || u.size() != prob.m ||
        v.size() != prob.m)
        throw Error("hamiltonian: argument dimensions do not match the problem");
    return p.dot(prob.dynamics(t, x, y, u, v)) - prob.costRate(t, x, y, u, v);
}

Vec hamiltonianDx(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                  const Vec& u, const Vec& v)
{
    return prob.dfdx(t, x, y, u, v).transpose() * p - prob.dcdx(t, x, y, u, v);
}

Vec hamiltonianDy(const ProblemDef& prob, double t, const Vec& x, const Vec& y, const Vec& p,
                  const Vec& u, const Vec& v)
{
    return prob.dfdy(t, x, y, u, v).transpose() * p - prob.dcdy(t, x, y, u, v);
}

bool activeBefore(double t, double T, double delay, double h, Side side)
{
    const double snap = kSnapFraction * h;
    return side == Side::Left ? t <= T - delay + snap : t < T - delay - snap;
}

namespace {

double relError(double supplied, double reference)
{
    return std::abs(supplied - reference) / std::max(1.0, std::abs(reference));
}

struct Worst {
    double err = 0.0;
    std::string what;
    int sample = -1;

    void offer(double e, int s, const std::string& label)
    {
        if (sample < 0 || e > err) {
            err = e;
            what = label;
            sample = s;
        }
    }
};

}  // namespace

DerivativeReport validateDerivatives(const ProblemDef& prob, const std::vector<SamplePoint>& samples,
                                     double tolerance)
{
    Worst worst;
    for (int s = 0; s < static_cast<int>(samples.size()); ++s) {
        const SamplePoint& pt = samples[s];
        const Mat fx = prob.dfdx(pt.t, pt.x, pt.y, pt.u, pt.v);
        const Mat fy = prob.dfdy(pt.t, pt.x, pt.y, pt.u, pt.v);
        const Vec cx = prob.dcdx(pt.t, pt.x, pt.y, pt.u, pt.v);
        const Vec cy = prob.dcdy(pt.t, pt.x, pt.y, pt.u, pt.v);

        for (int j = 0; j < prob.n; ++j) {
            for (int which = 0; which < 2; ++which) {
                Vec xp = pt.x, xm = pt.x, yp = pt.y, ym = pt.y;
                Vec& plus = which == 0 ? xp : yp;
                Vec& minus = which == 0 ? xm : ym;
                const double scale = std::max(1.0, std::abs(plus[j]));
                const double step = 1e-6 * scale;
                plus[j] += step;
                minus[j] -= step;
                const Vec df = (prob.dynamics(pt.t, xp, yp, pt.u, pt.v) -
                                prob.dynamics(pt.t, xm, ym, pt.u, pt.v)) /
                               (2.0 * step);
                const double dc = (prob.costRate(pt.t, xp, yp, pt.u, pt.v) -
                                   prob.costRate(pt.t, xm, ym, pt.u, pt.v)) /
                                  (2.0 * step);
                const Mat& J = which == 0 ? fx : fy;
                const char* jname = which == 0 ? "dfdx" : "dfdy";
                for (int i = 0; i < prob.n; ++i)
                    worst.offer(relError(J(i, j), df[i]), s, fmt::format("{}({},{})", jname, i, j));
                const double supplied = which == 0 ? cx[j] : cy[j];
                worst.offer(relError(supplied, dc), s,
                            fmt::format("{}({})", which == 0 ? "dcdx" : "dcdy", j));
            }
        }
    }
    DerivativeReport report;
    report.maxRelError = worst.err;
    report.worstPartial = worst.what;
    report.worstSample = worst.sample;
    report.passed = worst.err <= tolerance;
    return report;
}

FeedbackContext feedbackContextFrom(const Extremal& ex, double t)
{
    const double h = ex.x.grid().h();
    FeedbackContext ctx;
    ctx.t = t;
    ctx.T = ex.T;
    ctx.tau = ex.tau;
    ctx.x = ex.x.eval(t);
    ctx.xLag = ex.x.eval(t - ex.tau.state);
    ctx.xAdvMixed = ex.x.eval(t + ex.tau.control - ex.tau.state);
    ctx.xAdv = ex.x.eval(t + ex.tau.control);
    ctx.p = ex.p.eval(t);
    ctx.pAdv = ex.p.eval(t + ex.tau.control);
    ctx.indicatorAdv = activeBefore(t, ex.T, ex.tau.control, h) ? 1.0 : 0.0;
    return ctx;
}

Vec maximizedHamiltonianGradient(const ProblemDef& prob, const Extremal& ex, double t)
{
    const double tau1 = ex.tau.state;
    const double tau2 = ex.tau.control;
    const bool second = activeBefore(t, ex.T, tau2, ex.x.grid().h());

    const Vec x = ex.x.eval(t);
    const Vec y = ex.x.eval(t - tau1);
    const Vec p = ex.p.eval(t);
    const Vec u = ex.u.eval(t);
    const Vec uLag = ex.u.eval(t - tau2);

    const double ta = t + tau2;
    Vec xa, ya, pa, ua;
    if (second) {
        xa = ex.x.eval(ta);
        ya = ex.x.eval(ta - tau1);
        pa = ex.p.eval(ta);
        ua = ex.u.eval(ta);
    }

    auto total = [&](const Vec& w) {
        double value = hamiltonian(prob, t, x, y, p, w, uLag);
        if (second)
            value += hamiltonian(prob, ta, xa, ya, pa, ua, w);
        return value;
    };

    Vec grad(prob.m);
    for (int j = 0; j < prob.m; ++j) {
        const double step = 1e-4 * std::max(1.0, std::abs(u[j]));
        Vec wp = u, wm = u;
        wp[j] += step;
        wm[j] -= step;
        grad[j] = (total(wp) - total(wm)) / (2.0 * step);
    }
    return grad;
}

double stationarityDefect(const ProblemDef& prob, const Extremal& ex)
{
    double worst = 0.0;
    const Grid& g = ex.u.grid();
    for (int k = 0; k <= g.intervals(); ++k)
        worst = std::max(worst, maximizedHamiltonianGradient(prob, ex, g.node(k)).cwiseAbs().maxCoeff());
    return worst;
}

}  // namespace delayoc
