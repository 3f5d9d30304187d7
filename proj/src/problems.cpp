#include "delayoc/problems.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace delayoc {

ProblemDef builtinOCP1()
{
    ProblemDef p;
    p.name = "ocp1";
    p.n = 1;
    p.m = 1;
    p.maxDelay = 2.0;
    p.horizon = FixedTime{3.0};

    p.dynamics = [](double, const Vec&, const Vec& y, const Vec&, const Vec& v) {
        return Vec::Constant(1, y[0] * v[0]);
    };
    p.costRate = [](double, const Vec& x, const Vec&, const Vec& u, const Vec&) {
        return x[0] * x[0] + u[0] * u[0];
    };
    p.dfdx = [](double, const Vec&, const Vec&, const Vec&, const Vec&) { return Mat::Zero(1, 1); };
    p.dfdy = [](double, const Vec&, const Vec&, const Vec&, const Vec& v) {
        return Mat::Constant(1, 1, v[0]);
    };
    p.dcdx = [](double, const Vec& x, const Vec&, const Vec&, const Vec&) {
        return Vec::Constant(1, 2.0 * x[0]);
    };
    p.dcdy = [](double, const Vec&, const Vec&, const Vec&, const Vec&) { return Vec::Zero(1); };

    // u(t) = 1/2 1[t <= 3 - tau2] x(t + tau2 - tau1) p(t + tau2)
    p.feedback = [](const FeedbackContext& c) {
        return Vec::Constant(1, 0.5 * c.indicatorAdv * c.xAdvMixed[0] * c.pAdv[0]);
    };

    p.historyState = [](double) { return Vec::Ones(1); };
    p.historyControl = [](double) { return Vec::Zero(1); };
    return p;
}

namespace {

// R1(a, b) = (a + 0.5) E(b), R2(a, b) = (a + 0.25) E(b)
double arrhenius(double b) { return std::exp(25.0 * b / (b + 2.0)); }
double arrheniusPrime(double b) { return arrhenius(b) * 50.0 / ((b + 2.0) * (b + 2.0)); }

}  // namespace

ProblemDef builtinOCP2()
{
    ProblemDef p;
    p.name = "ocp2";
    p.n = 4;
    p.m = 2;
    p.maxDelay = 2.0;
    p.horizon = FixedTime{2.0};

    p.dynamics = [](double, const Vec& x, const Vec& y, const Vec& u, const Vec&) {
        const double r1 = (x[0] + 0.5) * arrhenius(x[1]);
        const double r2 = (x[2] + 0.25) * arrhenius(x[3]);
        Vec f(4);
        f[0] = 0.5 - x[0] - r1;
        f[1] = r1 - (u[0] + 2.0) * (x[1] + 0.25);
        f[2] = y[0] - x[2] - r2 + 0.25;
        f[3] = y[1] - 2.0 * x[3] - u[1] * (x[3] + 0.25) + r2 - 0.25;
        return f;
    };
    p.costRate = [](double, const Vec& x, const Vec&, const Vec& u, const Vec&) {
        return x.squaredNorm() + 0.1 * u.squaredNorm();
    };
    p.dfdx = [](double, const Vec& x, const Vec&, const Vec& u, const Vec&) {
        const double e2 = arrhenius(x[1]);
        const double e4 = arrhenius(x[3]);
        const double r1y = (x[0] + 0.5) * arrheniusPrime(x[1]);
        const double r2y = (x[2] + 0.25) * arrheniusPrime(x[3]);
        Mat J = Mat::Zero(4, 4);
        J(0, 0) = -1.0 - e2;
        J(0, 1) = -r1y;
        J(1, 0) = e2;
        J(1, 1) = r1y - (u[0] + 2.0);
        J(2, 2) = -1.0 - e4;
        J(2, 3) = -r2y;
        J(3, 2) = e4;
        J(3, 3) = -2.0 - u[1] + r2y;
        return J;
    };
    p.dfdy = [](double, const Vec&, const Vec&, const Vec&, const Vec&) {
        Mat J = Mat::Zero(4, 4);
        J(2, 0) = 1.0;
        J(3, 1) = 1.0;
        return J;
    };
    p.dcdx = [](double, const Vec& x, const Vec&, const Vec&, const Vec&) -> Vec { return 2.0 * x; };
    p.dcdy = [](double, const Vec&, const Vec&, const Vec&, const Vec&) { return Vec::Zero(4); };

    p.feedback = [](const FeedbackContext& c) {
        Vec u(2);
        u[0] = -5.0 * c.p[1] * (c.x[1] + 0.25);
        u[1] = -5.0 * c.p[3] * (c.x[3] + 0.25);
        return u;
    };

    // x3, x4 only have point initial values; their history is never read by the dynamics.
    p.historyState = [](double) {
        Vec h(4);
        h << 0.15, -0.03, 0.1, 0.0;
        return h;
    };
    p.historyControl = [](double) { return Vec::Zero(2); };
    return p;
}

std::optional<ProblemDef> builtinProblem(std::string_view name)
{
    if (name == "ocp1")
        return builtinOCP1();
    if (name == "ocp2")
        return builtinOCP2();
    return std::nullopt;
}

std::vector<std::string> builtinNames() { return {"ocp1", "ocp2"}; }

namespace reference {

namespace {
const double kE2 = std::exp(2.0);
}

double ocp1Control(double t)
{
    if (t < 0.0 || t > 1.0)
        return 0.0;
    return (std::exp(t) - std::exp(2.0 - t)) / (kE2 + 1.0);
}

double ocp1State(double t)
{
    if (t <= 2.0)
        return 1.0;
    return (std::exp(t - 2.0) + std::exp(4.0 - t)) / (kE2 + 1.0);
}

double ocp1ExactCost() { return 2.0 + std::tanh(1.0); }

namespace {
constexpr std::array<Ocp2Row, 10> kTable{{
    {0.0, 0.02248, 1, 0.200},
    {0.05, 0.02282, 1, 0.240},
    {0.1, 0.02313, 1, 0.450},
    {0.2, 0.02370, 1, 0.820},
    {0.4, 0.02459, 3, 2.120},
    {0.6, 0.02516, 5, 2.860},
    {0.8, 0.02547, 5, 3.260},
    {1.0, 0.02556, 5, 3.070},
    {1.2, 0.02549, 3, 2.150},
    {1.5, 0.02527, 6, 4.220},
}};
}  // namespace

std::span<const Ocp2Row> ocp2Table() { return kTable; }

std::optional<Ocp2Row> ocp2Lookup(double tau)
{
    for (const auto& row : kTable)
        if (std::abs(row.tau - tau) < 1e-9)
            return row;
    return std::nullopt;
}

std::optional<AnalyticErrors> analyticErrors(std::string_view problem, const Extremal& ex)
{
    if (problem != "ocp1" || std::abs(ex.tau.state - 1.0) > 1e-12 ||
        std::abs(ex.tau.control - 2.0) > 1e-12 || std::abs(ex.T - 3.0) > 1e-12)
        return std::nullopt;

    double eu = 0.0, eX = 0.0, mu = 0.0, mx = 0.0;
    const Grid& g = ex.x.grid();
    for (int k = 0; k < g.nodes(); ++k) {
        const double t = g.node(k);
        const double uRef = ocp1Control(t), xRef = ocp1State(t);
        eu = std::max(eu, std::abs(ex.u.values()(k, 0) - uRef));
        eX = std::max(eX, std::abs(ex.x.values()(k, 0) - xRef));
        mu = std::max(mu, std::abs(uRef));
        mx = std::max(mx, std::abs(xRef));
    }
    return AnalyticErrors{eu / mu, eX / mx};
}

}  // namespace reference

}  // namespace delayoc
