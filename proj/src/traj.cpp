#include "delayoc/traj.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace delayoc {

Grid::Grid(double t0, double T, int N) : t0_(t0), T_(T), N_(N), h_(0.0)
{
    if (!(T > t0))
        throw Error(fmt::format("grid: horizon end {} must exceed start {}", T, t0));
    if (N < 1)
        throw Error(fmt::format("grid: need at least one interval, got {}", N));
    h_ = (T - t0) / N;
}

Grid::Location Grid::locate(double t) const
{
    const double r = (t - t0_) / h_;
    const double nearest = std::round(r);
    if (std::abs(r - nearest) <= kSnapFraction) {
        const int k = std::clamp(static_cast<int>(nearest), 0, N_);
        const int interval = std::min(k, N_ - 1);
        return {interval, node(k) - node(interval), k};
    }
    const int j = std::clamp(static_cast<int>(std::floor(r)), 0, N_ - 1);
    return {j, t - node(j), -1};
}

Grid makeGrid(double t0, double T, int N) { return Grid(t0, T, N); }

History History::constant(Vec value, double lower)
{
    return {[value = std::move(value)](double) { return value; }, lower};
}

History History::zero(int dim, double lower) { return constant(Vec::Zero(dim), lower); }

NodeMatrix finiteDifferenceSlopes(const NodeMatrix& v, double h)
{
    const Eigen::Index rows = v.rows();
    NodeMatrix d(rows, v.cols());
    if (rows < 2) {
        d.setZero();
        return d;
    }
    if (rows == 2) {
        d.row(0) = (v.row(1) - v.row(0)) / h;
        d.row(1) = d.row(0);
        return d;
    }
    d.row(0) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) / (2.0 * h);
    for (Eigen::Index k = 1; k + 1 < rows; ++k)
        d.row(k) = (v.row(k + 1) - v.row(k - 1)) / (2.0 * h);
    const Eigen::Index e = rows - 1;
    d.row(e) = (3.0 * v.row(e) - 4.0 * v.row(e - 1) + v.row(e - 2)) / (2.0 * h);
    return d;
}

DenseTrajectory::DenseTrajectory(Grid grid, NodeMatrix values, NodeMatrix slopes, History history)
    : grid_(grid), values_(std::move(values)), slopes_(std::move(slopes)), history_(std::move(history))
{
    if (values_.rows() != grid_.nodes() || slopes_.rows() != grid_.nodes() ||
        slopes_.cols() != values_.cols())
        throw Error(fmt::format("trajectory: expected {} node rows, got values {}x{} slopes {}x{}",
                                grid_.nodes(), values_.rows(), values_.cols(), slopes_.rows(),
                                slopes_.cols()));
    if (values_.cols() < 1)
        throw Error("trajectory: dimension must be positive");
}

DenseTrajectory DenseTrajectory::fromNodes(Grid grid, NodeMatrix values, History history)
{
    NodeMatrix slopes = finiteDifferenceSlopes(values, grid.h());
    return {grid, std::move(values), std::move(slopes), std::move(history)};
}

DenseTrajectory DenseTrajectory::constant(Grid grid, const Vec& value, History history)
{
    NodeMatrix values(grid.nodes(), value.size());
    values.rowwise() = value.transpose();
    NodeMatrix slopes = NodeMatrix::Zero(grid.nodes(), value.size());
    return {grid, std::move(values), std::move(slopes), std::move(history)};
}

Vec DenseTrajectory::eval(double t) const
{
    const double snap = kSnapFraction * grid_.h();
    if (t < grid_.t0() - snap) {
        if (t < history_.lower - snap)
            throw Error(fmt::format("trajectory: time {} precedes history start {}", t,
                                    history_.lower));
        return history_.fn(t);
    }
    if (t > grid_.T() + snap)
        return nodeValue(grid_.intervals());

    const Grid::Location loc = grid_.locate(t);
    if (loc.node >= 0)
        return nodeValue(loc.node);

    const int j = loc.interval;
    Vec out(dim());
    for (int i = 0; i < dim(); ++i)
        out[i] = leftHermiteQuadratic(values_(j, i), slopes_(j, i), values_(j + 1, i), grid_.h(),
                                      loc.offset);
    return out;
}

double DenseTrajectory::eval(double t, int component) const { return eval(t)[component]; }

Vec DenseTrajectory::eval(double t, Side side) const
{
    if (side == Side::Left && std::abs(t - grid_.t0()) <= kSnapFraction * grid_.h())
        return history_.fn(grid_.t0());
    return eval(t);
}

double supNormDiff(const DenseTrajectory& a, const DenseTrajectory& b)
{
    if (!(a.grid() == b.grid()) || a.dim() != b.dim())
        throw Error("supNormDiff: trajectories live on different grids or dimensions");
    return (a.values() - b.values()).cwiseAbs().maxCoeff();
}

Vec simpson(const NodeMatrix& samples, double h)
{
    const Eigen::Index N = samples.rows() - 1;
    if (N < 2 || N % 2 != 0)
        throw Error(fmt::format("simpson: need an even number of intervals, got {}", N));
    Vec acc = samples.row(0).transpose() + samples.row(N).transpose();
    for (Eigen::Index k = 1; k < N; ++k)
        acc += (k % 2 == 1 ? 4.0 : 2.0) * samples.row(k).transpose();
    return acc * (h / 3.0);
}

}  // namespace delayoc
