#ifndef VARTEST_GEOMETRY_HPP
#define VARTEST_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "vartest/poly.hpp"

namespace vartest {

// Finite list of points in the closed unit disk D^n.
struct PointCloud {
    int n = 0;
    std::vector<Eigen::VectorXd> points;

    PointCloud() = default;
    explicit PointCloud(int dim) : n(dim) {}

    int size() const { return static_cast<int>(points.size()); }
    bool empty() const { return points.empty(); }
    void add(const Eigen::VectorXd& x) { points.push_back(x); }
};

struct SolverConfig {
    int presamples = 512;     // variety samples used to seed projections
    int sample_starts = 8;    // starts taken from nearest presamples
    int random_starts = 8;    // starts from projected quasi-random points
    int newton_iters = 100;   // per-start iteration cap
    double feas_tol = 1e-10;
    double dist_tol = 1e-6;
    std::uint64_t seed = 0;
    int threads = 1;          // per-point parallelism in batch callers
};

struct ProjectionResult {
    Eigen::VectorXd nearest;
    double distance = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
    bool converged = false;
    int starts_used = 0;
};

struct SampleStats {
    long long attempts = 0;
    double max_gap = 0.0;  // max over samples of nearest-neighbor distance
};

// Approximate nearest point of Z(p) in the closed unit ball, multi-start
// Lagrange-Newton style (restore + tangential descent + polish). Throws
// NoFeasiblePoint when no start reaches the feasibility tolerance.
ProjectionResult project_to_variety(const PolyTuple& p, const Eigen::VectorXd& x,
                                    const SolverConfig& cfg = {});

// Same, seeded from an explicit sample cloud of Z(p); substream is the
// deterministic per-call RNG stream index (callers pass a point index).
ProjectionResult project_with_seeds(const PolyTuple& p, const Eigen::VectorXd& x,
                                    const PointCloud& seeds, const SolverConfig& cfg,
                                    std::uint64_t substream = 0);

// count points of Z(p) in the disk, from quasi-random starts projected
// onto the variety. Throws NoFeasiblePoint when the zero set appears
// empty in D^n.
PointCloud sample_variety(const PolyTuple& p, int count, const SolverConfig& cfg = {},
                          SampleStats* stats = nullptr);

// Hausdorff distance between finite clouds (exact max-min).
double hausdorff_estimate(const PointCloud& a, const PointCloud& b);

// Federer's pairwise reach formula on a sampled manifold with per-point
// orthonormal tangent bases. Pairs with negligible normal component are
// skipped; an everywhere-flat cloud reports the 1e6 cap.
double reach_estimate(const PointCloud& cloud, const std::vector<Eigen::MatrixXd>& tangents);

// Tangent bases from the Jacobian kernel at each cloud point.
std::vector<Eigen::MatrixXd> variety_tangents(const PolyTuple& p, const PointCloud& cloud);

struct CroftonResult {
    double estimate = 0.0;
    double bound = 0.0;
    double std_error = 0.0;
    int trials = 0;
};

// Monte Carlo Cauchy-Crofton estimate of vol_k(Z(p) cap D^n) against the
// Bezout bound vol(D^k) d^{n-k}. The normalization constant is calibrated
// once per (n, k) on a coordinate k-disk of known volume.
CroftonResult crofton_volume_estimate(const PolyTuple& p, int k, int trials,
                                      std::uint64_t rng_seed);

// Unit-ball volume in dimension k (vol(D^0) = 1).
double unit_ball_volume(int k);

}  // namespace vartest

#endif
