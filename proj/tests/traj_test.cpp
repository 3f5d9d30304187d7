#include "delayoc/traj.hpp"

#include <doctest.h>

#include <cmath>

using namespace delayoc;

namespace {

double quad(double t) { return 1.0 + 2.0 * t - 3.0 * t * t; }
double quadSlope(double t) { return 2.0 - 6.0 * t; }

DenseTrajectory sampled(const Grid& g, double (*f)(double), double (*df)(double))
{
    NodeMatrix v(g.nodes(), 1), d(g.nodes(), 1);
    for (int k = 0; k < g.nodes(); ++k) {
        v(k, 0) = f(g.node(k));
        d(k, 0) = df(g.node(k));
    }
    return {g, v, d, History{[](double t) { return Vec::Constant(1, -t); }, -1.0}};
}

}  // namespace

TEST_CASE("grid ends exactly at T and snaps near nodes")
{
    const Grid g(0.0, 3.0, 60);
    CHECK(g.node(60) == 3.0);
    CHECK(g.h() == doctest::Approx(0.05));

    const auto at = g.locate(1.0 + 1e-13);
    CHECK(at.node == 20);
    CHECK(at.offset == 0.0);

    const auto mid = g.locate(1.025);
    CHECK(mid.node == -1);
    CHECK(mid.interval == 20);
    CHECK(mid.offset == doctest::Approx(0.025));

    CHECK(g.locate(3.0).interval == 59);
    CHECK_THROWS_AS(Grid(1.0, 1.0, 4), Error);
    CHECK_THROWS_AS(Grid(0.0, 1.0, 0), Error);
}

TEST_CASE("dense output reproduces a quadratic from values and left slopes")
{
    const Grid g(0.0, 1.0, 7);
    const DenseTrajectory q = sampled(g, quad, quadSlope);
    for (double t = 0.0; t <= 1.0; t += 0.0137)
        CHECK(q.eval(t, 0) == doctest::Approx(quad(t)).epsilon(1e-13));
}

TEST_CASE("finite-difference slopes are exact for quadratics")
{
    const Grid g(-1.0, 2.0, 9);
    NodeMatrix v(g.nodes(), 1);
    for (int k = 0; k < g.nodes(); ++k) v(k, 0) = quad(g.node(k));
    const NodeMatrix d = finiteDifferenceSlopes(v, g.h());
    for (int k = 0; k < g.nodes(); ++k) CHECK(d(k, 0) == doctest::Approx(quadSlope(g.node(k))));

    const DenseTrajectory q = DenseTrajectory::fromNodes(g, v, History::zero(1, -2.0));
    CHECK(q.eval(0.4321, 0) == doctest::Approx(quad(0.4321)));
}

TEST_CASE("history before the start, constant continuation after the end")
{
    const Grid g(0.0, 1.0, 4);
    const DenseTrajectory q = sampled(g, quad, quadSlope);
    CHECK(q.eval(-0.25, 0) == doctest::Approx(0.25));
    CHECK(q.eval(5.0, 0) == doctest::Approx(quad(1.0)));
    CHECK_THROWS_AS(q.eval(-1.5), Error);
}

TEST_CASE("one-sided limits at the grid start")
{
    const Grid g(0.0, 1.0, 4);
    // History -t is 0 at the start while the node value is 1: a jump.
    const DenseTrajectory q = sampled(g, quad, quadSlope);
    CHECK(q.eval(0.0, Side::Left)[0] == doctest::Approx(0.0));
    CHECK(q.eval(0.0, Side::Right)[0] == doctest::Approx(1.0));
    CHECK(q.eval(0.5, Side::Left)[0] == q.eval(0.5, Side::Right)[0]);
}

TEST_CASE("simpson integrates cubics exactly and rejects odd interval counts")
{
    const Grid g(0.0, 2.0, 6);
    NodeMatrix s(g.nodes(), 2);
    for (int k = 0; k < g.nodes(); ++k) {
        const double t = g.node(k);
        s(k, 0) = t * t * t;
        s(k, 1) = 1.0;
    }
    const Vec I = simpson(s, g.h());
    CHECK(I[0] == doctest::Approx(4.0));
    CHECK(I[1] == doctest::Approx(2.0));
    CHECK_THROWS_AS(simpson(NodeMatrix::Ones(4, 1), 0.1), Error);
}

TEST_CASE("sup-norm distance needs matching grids")
{
    const Grid g(0.0, 1.0, 4);
    const auto a = DenseTrajectory::constant(g, Vec::Constant(1, 2.0), History::zero(1, 0.0));
    const auto b = DenseTrajectory::constant(g, Vec::Constant(1, -0.5), History::zero(1, 0.0));
    CHECK(supNormDiff(a, b) == doctest::Approx(2.5));
    const auto c = DenseTrajectory::constant(Grid(0.0, 1.0, 8), Vec::Zero(1), History::zero(1, 0.0));
    CHECK_THROWS_AS(supNormDiff(a, c), Error);
}
