#include "delayoc/integrate.hpp"
#include "delayoc/problems.hpp"

#include "support/test_problems.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace delayoc;

namespace {

DenseTrajectory constantOn(const Grid& g, double value, const ProblemDef& p)
{
    return DenseTrajectory::constant(g, Vec::Constant(p.n, value), History::zero(p.n, -p.maxDelay));
}

DenseTrajectory sineAdjoint(const Grid& g)
{
    NodeMatrix v(g.nodes(), 1);
    for (int k = 0; k < g.nodes(); ++k) v(k, 0) = std::sin(g.node(k));
    return DenseTrajectory::fromNodes(g, v, History::zero(1, -1.0));
}

double regulatorEnd(int N)
{
    const ProblemDef p = testing::laggedRegulator();
    const Grid g(0.0, 2.0, N);
    const auto prev = DenseTrajectory::constant(g, Vec::Ones(1), p.stateHistory());
    const SweepInputs in{p, {1.0, 0.0}, g, prev};
    return forwardStateSweep(in, sineAdjoint(g)).x.nodeValue(N)[0];
}

}  // namespace

TEST_CASE("forward sweep is exact when the lagged right-hand side is linear in time")
{
    // Zero adjoint, so u = 0 and x' = -x(t - 1): x = 1 - t on [0, 1] and
    // x = 1.5 - 2t + t^2/2 on [1, 2].
    const ProblemDef p = testing::laggedRegulator();
    const Grid g(0.0, 2.0, 16);
    const auto prev = DenseTrajectory::constant(g, Vec::Ones(1), p.stateHistory());
    const SweepInputs in{p, {1.0, 0.0}, g, prev};
    const StateSweep s = forwardStateSweep(in, constantOn(g, 0.0, p));
    for (int k = 0; k < g.nodes(); ++k) {
        const double t = g.node(k);
        const double exact = t <= 1.0 ? 1.0 - t : 1.5 - 2.0 * t + 0.5 * t * t;
        CHECK(s.x.nodeValue(k)[0] == doctest::Approx(exact).epsilon(1e-13));
        CHECK(s.u.nodeValue(k)[0] == 0.0);
    }
}

TEST_CASE("delayed control with a jump is integrated exactly when the switch is a node")
{
    const ProblemDef p = testing::delayedTransfer();
    const double tau2 = 0.5, c = testing::delayedTransferAdjoint(tau2);
    const Grid g(0.0, 2.0, 20);
    const auto prev = DenseTrajectory::constant(g, Vec::Zero(1), p.stateHistory());
    const SweepInputs in{p, {0.0, tau2}, g, prev};
    const StateSweep s = forwardStateSweep(in, constantOn(g, c, p));

    for (int k = 0; k < g.nodes(); ++k) {
        const double t = g.node(k);
        CAPTURE(t);
        // closed on the right: the control is still on at 2 - tau2
        CHECK(s.u.nodeValue(k)[0] == doctest::Approx(t <= 1.5 + 1e-12 ? c / 2 : 0.0));
        CHECK(s.x.nodeValue(k)[0] == doctest::Approx(std::max(0.0, t - tau2) * c / 2).epsilon(1e-13));
    }
    CHECK(s.x.nodeValue(20)[0] == doctest::Approx(1.0).epsilon(1e-13));

    const DenseTrajectory adj = backwardAdjointSweep(in, s.x, s.u, Vec::Constant(1, c));
    for (int k = 0; k < g.nodes(); ++k) CHECK(adj.nodeValue(k)[0] == doctest::Approx(c));
}

TEST_CASE("forward sweep converges at second order")
{
    const double ref = regulatorEnd(2560);
    const double e20 = std::abs(regulatorEnd(20) - ref);
    const double e40 = std::abs(regulatorEnd(40) - ref);
    const double e80 = std::abs(regulatorEnd(80) - ref);
    CHECK(e20 / e40 == doctest::Approx(4.0).epsilon(0.15));
    CHECK(e40 / e80 == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("backward sweep applies the advanced term only before T - tau1")
{
    // Regulator with x = 0 and u = 0: the adjoint equation is
    // p'(t) = -1[t <= 1] dH/dy(t + 1) = p(t + 1); with p(T) = 1 and nothing
    // driving p on [1, 2], p stays 1 there and grows linearly below.
    const ProblemDef p = testing::laggedRegulator();
    const Grid g(0.0, 2.0, 8);
    const auto zero = constantOn(g, 0.0, p);
    const SweepInputs in{p, {1.0, 0.0}, g, zero};
    const DenseTrajectory adj = backwardAdjointSweep(in, zero, zero, Vec::Ones(1));
    for (int k = 0; k < g.nodes(); ++k) {
        const double t = g.node(k);
        CHECK(adj.nodeValue(k)[0] == doctest::Approx(t >= 1.0 ? 1.0 : t).epsilon(1e-13));
    }
}

TEST_CASE("cost quadrature of constant signals")
{
    const ProblemDef p = builtinOCP1();
    const Grid g(0.0, 3.0, 10);
    const auto x = constantOn(g, 2.0, p), u = constantOn(g, 0.5, p);
    CHECK(costOfRun(p, {0.0, 0.0}, x, u) == doctest::Approx(3.0 * (4.0 + 0.25)));
}

TEST_CASE("non-finite values abort the sweep with the time they appeared")
{
    ProblemDef p = testing::laggedRegulator();
    p.dynamics = [](double t, const Vec&, const Vec&, const Vec&, const Vec&) {
        return Vec::Constant(1, t > 0.5 ? std::numeric_limits<double>::quiet_NaN() : 1.0);
    };
    const Grid g(0.0, 2.0, 8);
    const auto prev = constantOn(g, 1.0, p);
    const SweepInputs in{p, {1.0, 0.0}, g, prev};
    try {
        forwardStateSweep(in, constantOn(g, 0.0, p));
        FAIL("expected a sweep error");
    } catch (const SweepError& e) {
        CHECK(e.time() >= 0.5 - 1e-12);
        CHECK(e.time() <= 0.75 + 1e-12);
    }
}
