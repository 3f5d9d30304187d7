#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace delayoc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
/// One row per grid node, one column per signal component.
using NodeMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Times closer than kSnapFraction * h to a node are treated as that node.
inline constexpr double kSnapFraction = 1e-9;

/// Which one-sided limit a point evaluation stands for. Integration stages use
/// the limit from inside the interval being integrated.
enum class Side { Left, Right };

/// Uniform grid t0 < t0 + h < ... < T with N intervals.
class Grid {
public:
    Grid(double t0, double T, int N);

    double t0() const { return t0_; }
    double T() const { return T_; }
    int intervals() const { return N_; }
    int nodes() const { return N_ + 1; }
    double h() const { return h_; }

    /// node(N) returns T exactly.
    double node(int k) const { return k == N_ ? T_ : t0_ + k * h_; }

    struct Location {
        int interval;    // 0..N-1
        double offset;   // t - node(interval), in [0, h]
        int node;        // snapped node index, or -1
    };

    /// Locates t in [t0, T] (snapping to nodes).
    Location locate(double t) const;

    bool operator==(const Grid& other) const = default;

private:
    double t0_;
    double T_;
    int N_;
    double h_;
};

Grid makeGrid(double t0, double T, int N);

/// Signal values before the grid start.
struct History {
    std::function<Vec(double)> fn;
    double lower = 0.0;   // earliest time at which fn may be queried

    static History constant(Vec value, double lower);
    static History zero(int dim, double lower);
};

/// Quadratic on [0, h] with q(0) = v0, q'(0) = d0, q(h) = v1.
inline double leftHermiteQuadratic(double v0, double d0, double v1, double h, double s)
{
    const double c = (v1 - v0 - d0 * h) / (h * h);
    return v0 + s * (d0 + c * s);
}

/// Second-order finite-difference slopes of node samples (centered inside,
/// one-sided at the ends). Exact for quadratics.
NodeMatrix finiteDifferenceSlopes(const NodeMatrix& values, double h);

/// Piecewise-quadratic dense output on a uniform grid with a history
/// extension to the left and constant continuation to the right.
class DenseTrajectory {
public:
    DenseTrajectory(Grid grid, NodeMatrix values, NodeMatrix slopes, History history);

    /// Slopes derived by finiteDifferenceSlopes.
    static DenseTrajectory fromNodes(Grid grid, NodeMatrix values, History history);
    static DenseTrajectory constant(Grid grid, const Vec& value, History history);

    Vec eval(double t) const;
    double eval(double t, int component) const;
    /// Left limit at the grid start comes from the history; elsewhere the
    /// output is continuous and this equals eval(t).
    Vec eval(double t, Side side) const;

    const Grid& grid() const { return grid_; }
    int dim() const { return static_cast<int>(values_.cols()); }
    const NodeMatrix& values() const { return values_; }
    const NodeMatrix& slopes() const { return slopes_; }
    const History& history() const { return history_; }
    Vec nodeValue(int k) const { return values_.row(k).transpose(); }

private:
    Grid grid_;
    NodeMatrix values_;
    NodeMatrix slopes_;
    History history_;
};

/// Max over nodes of the infinity norm of a - b.
double supNormDiff(const DenseTrajectory& a, const DenseTrajectory& b);

/// Composite Simpson rule over node samples; requires an even number of intervals.
Vec simpson(const NodeMatrix& samples, double h);

}  // namespace delayoc
