#include "vartest/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>

#include "vartest/rng.hpp"

namespace vartest {

namespace {

constexpr double kBallSlack = 1e-9;

// Gauss-Newton onto {p = 0}: minimum-norm correction steps.
bool gn_restore(const PolyTuple& p, Eigen::VectorXd& y, double feas_tol, int max_iters) {
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    for (int it = 0; it < max_iters; ++it) {
        p.eval_and_jacobian(y, value, jac);
        if (value.norm() <= feas_tol) return true;
        Eigen::MatrixXd gram = jac * jac.transpose();
        gram.diagonal().array() += 1e-14;
        const Eigen::VectorXd step = jac.transpose() * gram.ldlt().solve(value);
        if (!step.allFinite()) return false;
        double scale = 1.0;
        const double f0 = value.norm();
        bool moved = false;
        for (int bt = 0; bt < 20 && !moved; ++bt) {
            Eigen::VectorXd cand = y - scale * step;
            if (p.eval(cand).norm() < f0) {
                y = cand;
                moved = true;
            } else {
                scale *= 0.5;
            }
        }
        if (!moved) break;
    }
    return p.eval(y).norm() <= feas_tol;
}

// Restore onto the slice {p = 0, |y| = 1}.
bool slice_restore(const PolyTuple& p, Eigen::VectorXd& y, double feas_tol, int max_iters) {
    const int c = p.c();
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    for (int it = 0; it < max_iters; ++it) {
        p.eval_and_jacobian(y, value, jac);
        Eigen::VectorXd res(c + 1);
        res.head(c) = value;
        res(c) = 0.5 * (y.squaredNorm() - 1.0);
        if (res.norm() <= feas_tol) return true;
        Eigen::MatrixXd aug(c + 1, p.n());
        aug.topRows(c) = jac;
        aug.row(c) = y.transpose();
        Eigen::MatrixXd gram = aug * aug.transpose();
        gram.diagonal().array() += 1e-14;
        const Eigen::VectorXd step = aug.transpose() * gram.ldlt().solve(res);
        if (!step.allFinite()) return false;
        y -= step;
    }
    Eigen::VectorXd v = p.eval(y);
    return v.norm() <= feas_tol && std::abs(y.norm() - 1.0) <= 1e-9;
}

// A few Newton steps on the KKT system of min |x-y|^2 s.t. p(y)=0,
// started near a critical point; quadratic convergence when it bites.
void kkt_polish(const PolyTuple& p, const Eigen::VectorXd& x, Eigen::VectorXd& y,
                double feas_tol) {
    const int n = p.n();
    const int c = p.c();
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    p.eval_and_jacobian(y, value, jac);
    Eigen::MatrixXd gram = jac * jac.transpose();
    gram.diagonal().array() += 1e-14;
    Eigen::VectorXd lambda = -gram.ldlt().solve(jac * (y - x));

    auto kkt_norm = [&](const Eigen::VectorXd& yy, const Eigen::VectorXd& ll) {
        Eigen::VectorXd v;
        Eigen::MatrixXd J;
        p.eval_and_jacobian(yy, v, J);
        Eigen::VectorXd r(n + c);
        r.head(n) = (yy - x) + J.transpose() * ll;
        r.tail(c) = v;
        return r.norm();
    };

    double best = kkt_norm(y, lambda);
    Eigen::VectorXd y_best = y;
    for (int it = 0; it < 6; ++it) {
        p.eval_and_jacobian(y, value, jac);
        const auto hess = p.hessians(y);
        Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + c, n + c);
        Eigen::MatrixXd top = Eigen::MatrixXd::Identity(n, n);
        for (int j = 0; j < c; ++j) top += lambda(j) * hess[static_cast<size_t>(j)];
        kkt.topLeftCorner(n, n) = top;
        kkt.topRightCorner(n, c) = jac.transpose();
        kkt.bottomLeftCorner(c, n) = jac;
        Eigen::VectorXd rhs(n + c);
        rhs.head(n) = (y - x) + jac.transpose() * lambda;
        rhs.tail(c) = value;
        const Eigen::VectorXd step = kkt.partialPivLu().solve(rhs);
        if (!step.allFinite()) break;
        const Eigen::VectorXd y2 = y - step.head(n);
        const Eigen::VectorXd l2 = lambda - step.tail(c);
        const double r2 = kkt_norm(y2, l2);
        if (r2 >= best || y2.norm() > 1.0 + kBallSlack) break;
        y = y2;
        lambda = l2;
        best = r2;
        y_best = y;
        if (best < 1e-14) break;
    }
    y = y_best;
    // Never hand back an infeasible point.
    if (p.eval(y).norm() > feas_tol) gn_restore(p, y, feas_tol, 10);
}

// Tangential descent of |x - y| along {p = 0} intersected with the ball.
void descend(const PolyTuple& p, const Eigen::VectorXd& x, Eigen::VectorXd& y,
             const SolverConfig& cfg) {
    const int n = p.n();
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    double step = 0.5;
    for (int it = 0; it < cfg.newton_iters; ++it) {
        p.eval_and_jacobian(y, value, jac);
        const Eigen::VectorXd g = y - x;

        auto tangential = [&](const Eigen::MatrixXd& constraints) {
            Eigen::MatrixXd gram = constraints * constraints.transpose();
            gram.diagonal().array() += 1e-14;
            return (g - constraints.transpose() * gram.ldlt().solve(constraints * g)).eval();
        };

        Eigen::VectorXd dir = tangential(jac);
        const bool on_boundary = y.norm() >= 1.0 - 1e-12;
        bool boundary_active = false;
        if (on_boundary && -dir.dot(y) > 0.0) {
            Eigen::MatrixXd aug(p.c() + 1, n);
            aug.topRows(p.c()) = jac;
            aug.row(p.c()) = y.transpose();
            dir = tangential(aug);
            boundary_active = true;
        }
        const double dn = dir.norm();
        if (dn < 1e-13) break;

        const double f0 = (x - y).squaredNorm();
        bool moved = false;
        for (int bt = 0; bt < 25 && !moved; ++bt) {
            Eigen::VectorXd cand = y - step * dir;
            bool ok = boundary_active ? slice_restore(p, cand, cfg.feas_tol, 30)
                                      : gn_restore(p, cand, cfg.feas_tol, 30);
            if (ok && cand.norm() > 1.0 + kBallSlack)
                ok = slice_restore(p, cand, cfg.feas_tol, 30);
            if (ok && cand.norm() <= 1.0 + kBallSlack &&
                (x - cand).squaredNorm() < f0 - 1e-18) {
                y = cand;
                step = std::min(step * 1.6, 1.0);
                moved = true;
            } else {
                step *= 0.5;
            }
        }
        if (!moved) break;
        if (step * dn < 1e-13) break;
    }
    if (y.norm() <= 1.0 - 1e-12) kkt_polish(p, x, y, cfg.feas_tol);
}

Eigen::VectorXd random_ball_point(int n, Rng& rng) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.normal();
    const double norm = v.norm();
    if (norm < 1e-12) return Eigen::VectorXd::Zero(n);
    const double radius = std::pow(rng.uniform(), 1.0 / n);
    return (radius / norm) * v;
}

struct PlaneSample {
    Eigen::MatrixXd directions;  // n x (n-k), orthonormal
    Eigen::VectorXd offset;      // in the orthogonal complement, |o| <= 1
};

PlaneSample sample_affine_plane(int n, int k, Rng& rng) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) *= -1.0;  // Haar-correct sign fix

    PlaneSample plane;
    plane.directions = q.leftCols(n - k);
    if (k == 0) {
        plane.offset = Eigen::VectorXd::Zero(n);
        return plane;
    }
    Eigen::VectorXd xi(k);
    for (int i = 0; i < k; ++i) xi(i) = rng.normal();
    const double norm = xi.norm();
    const double radius = std::pow(rng.uniform(), 1.0 / k);
    if (norm < 1e-12)
        xi.setZero();
    else
        xi *= radius / norm;
    plane.offset = q.rightCols(k) * xi;
    return plane;
}

// Real roots of sum_j a_j t^j via the companion matrix.
std::vector<double> companion_real_roots(std::vector<double> a) {
    const double amax = std::accumulate(a.begin(), a.end(), 0.0, [](double m, double v) {
        return std::max(m, std::abs(v));
    });
    if (amax <= 0.0) return {};
    int deg = static_cast<int>(a.size()) - 1;
    while (deg > 0 && std::abs(a[static_cast<size_t>(deg)]) < 1e-12 * amax) --deg;
    if (deg <= 0) return {};
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i)
        comp(i, deg - 1) = -a[static_cast<size_t>(i)] / a[static_cast<size_t>(deg)];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
    std::vector<double> roots;
    for (int i = 0; i < deg; ++i) {
        const std::complex<double> z = es.eigenvalues()(i);
        if (std::abs(z.imag()) <= 1e-7 * (1.0 + std::abs(z.real())))
            roots.push_back(z.real());
    }
    return roots;
}

// Intersection count of Z(p) with a chord of the disk (c = 1).
int chord_intersections(const PolyTuple& p, const Eigen::VectorXd& o,
                        const Eigen::VectorXd& v) {
    const double half = std::sqrt(std::max(0.0, 1.0 - o.squaredNorm()));
    if (half < 1e-12) return 0;
    const int m = p.degree() + 1;

    // Chebyshev-node interpolation of t -> p(o + t v) on [-half, half].
    Eigen::MatrixXd vand(m, m);
    Eigen::VectorXd rhs(m);
    for (int i = 0; i < m; ++i) {
        const double tau = std::cos((2.0 * i + 1.0) * M_PI / (2.0 * m));
        double pw = 1.0;
        for (int j = 0; j < m; ++j) {
            vand(i, j) = pw;
            pw *= tau;
        }
        rhs(i) = p.eval(o + (half * tau) * v)(0);
    }
    const double scale = rhs.cwiseAbs().maxCoeff();
    if (scale <= 0.0) return 0;
    Eigen::VectorXd coef = vand.partialPivLu().solve((rhs / scale).eval());
    std::vector<double> a(coef.data(), coef.data() + m);

    std::vector<double> roots = companion_real_roots(std::move(a));
    std::sort(roots.begin(), roots.end());
    int count = 0;
    double last = std::numeric_limits<double>::quiet_NaN();
    for (double tau : roots) {
        if (tau < -1.0 - 1e-9 || tau > 1.0 + 1e-9) continue;
        if (!std::isnan(last) && std::abs(tau - last) < 1e-8) continue;
        last = tau;
        ++count;
    }
    return count;
}

// Intersection count for codimension >= 2: multi-start Newton on the
// restricted square system, deduplicated.
int plane_intersections_newton(const PolyTuple& p, const Eigen::VectorXd& o,
                               const Eigen::MatrixXd& V, Rng& rng) {
    const int c = p.c();
    const double radius = std::sqrt(std::max(0.0, 1.0 - o.squaredNorm()));
    if (radius < 1e-12) return 0;
    const int starts = std::min(200, 20 * (p.degree() + 1) * c);
    std::vector<Eigen::VectorXd> roots;
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    for (int s = 0; s < starts; ++s) {
        Eigen::VectorXd sv = radius * random_ball_point(c, rng);
        bool ok = false;
        for (int it = 0; it < 40; ++it) {
            const Eigen::VectorXd y = o + V * sv;
            p.eval_and_jacobian(y, value, jac);
            if (value.norm() < 1e-10) {
                ok = true;
                break;
            }
            const Eigen::MatrixXd m = jac * V;  // c x c
            const Eigen::VectorXd step = m.partialPivLu().solve(value);
            if (!step.allFinite() || step.norm() > 10.0) break;
            sv -= step;
            if (sv.norm() > radius + 0.5) break;
        }
        if (!ok || sv.norm() > radius + 1e-9) continue;
        bool dup = false;
        for (const auto& r : roots)
            if ((r - sv).norm() < 1e-7) {
                dup = true;
                break;
            }
        if (!dup) roots.push_back(sv);
    }
    return static_cast<int>(roots.size());
}

double crofton_constant(int n, int k) {
    static std::map<std::pair<int, int>, double> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find({n, k});
    if (it != cache.end()) return it->second;

    // Calibration target: the coordinate k-disk Z(x_{k+1},...,x_n), whose
    // k-volume is the unit-ball volume in dimension k.
    const int c = n - k;
    PolyTuple flat(n, c, 1);
    Eigen::MatrixXd coeffs = Eigen::MatrixXd::Zero(c, flat.basis().size());
    for (int j = 0; j < c; ++j) {
        std::vector<int> e(static_cast<size_t>(n), 0);
        e[static_cast<size_t>(k + j)] = 1;
        const int pos = flat.basis().position(MultiIndex(e));
        coeffs(j, pos) = 1.0 / flat.basis().weight(pos);
    }
    flat = PolyTuple::from_coeffs(MonomialBasis::get(n, 1), coeffs);

    Rng rng(Rng::derive(0xC0FFEE5EEDULL, static_cast<std::uint64_t>(n * 131 + k)));
    const int trials = 200000;
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
        PlaneSample plane = sample_affine_plane(n, k, rng);
        total += (c == 1)
                     ? chord_intersections(flat, plane.offset, plane.directions.col(0))
                     : plane_intersections_newton(flat, plane.offset, plane.directions, rng);
    }
    const double mean = total / trials;
    const double constant = (mean > 0.0) ? unit_ball_volume(k) / mean : 0.0;
    cache[{n, k}] = constant;
    return constant;
}

}  // namespace

double unit_ball_volume(int k) {
    return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
}

ProjectionResult project_with_seeds(const PolyTuple& p, const Eigen::VectorXd& x,
                                    const PointCloud& seeds, const SolverConfig& cfg,
                                    std::uint64_t substream) {
    if (x.size() != p.n()) throw ShapeMismatch("project_with_seeds: point dimension");
    if (x.norm() > 1.0 + kBallSlack) throw OutsideDisk("project_with_seeds: |x| > 1");

    // Start list: the query point, its nearest presamples, random ball points.
    std::vector<Eigen::VectorXd> starts;
    starts.push_back(x);
    if (!seeds.empty() && cfg.sample_starts > 0) {
        std::vector<std::pair<double, int>> order;
        order.reserve(seeds.points.size());
        for (int i = 0; i < seeds.size(); ++i)
            order.emplace_back((seeds.points[static_cast<size_t>(i)] - x).squaredNorm(), i);
        const size_t keep = std::min(order.size(), static_cast<size_t>(cfg.sample_starts));
        std::partial_sort(order.begin(), order.begin() + static_cast<long>(keep), order.end());
        for (size_t i = 0; i < keep; ++i)
            starts.push_back(seeds.points[static_cast<size_t>(order[i].second)]);
    }
    Rng rng(Rng::derive(cfg.seed, substream ^ 0x9D5EULL));
    for (int i = 0; i < cfg.random_starts; ++i) starts.push_back(random_ball_point(p.n(), rng));

    ProjectionResult best;
    int used = 0;
    for (const auto& s : starts) {
        ++used;
        Eigen::VectorXd y = s;
        bool feasible = gn_restore(p, y, cfg.feas_tol, 50);
        if (feasible && y.norm() > 1.0 + kBallSlack)
            feasible = slice_restore(p, y, cfg.feas_tol, 50);
        if (!feasible || y.norm() > 1.0 + kBallSlack) continue;
        descend(p, x, y, cfg);
        const double res = p.eval(y).norm();
        if (res > cfg.feas_tol * 10 || y.norm() > 1.0 + kBallSlack) continue;
        const double dist = (x - y).norm();
        if (dist < best.distance) {
            best.nearest = y;
            best.distance = dist;
            best.residual = res;
            best.converged = res <= cfg.feas_tol;
        }
        // A zero-distance projection cannot be improved upon.
        if (best.distance <= cfg.feas_tol) break;
    }
    best.starts_used = used;
    if (best.nearest.size() == 0)
        throw NoFeasiblePoint("project_to_variety: no start reached Z(p) in the disk");
    return best;
}

ProjectionResult project_to_variety(const PolyTuple& p, const Eigen::VectorXd& x,
                                    const SolverConfig& cfg) {
    PointCloud seeds(p.n());
    if (cfg.presamples > 0 && cfg.sample_starts > 0) {
        SolverConfig lean = cfg;
        lean.presamples = 0;
        seeds = sample_variety(p, cfg.presamples, lean);
    }
    return project_with_seeds(p, x, seeds, cfg, 0);
}

PointCloud sample_variety(const PolyTuple& p, int count, const SolverConfig& cfg,
                          SampleStats* stats) {
    const int n = p.n();
    PointCloud cloud(n);
    if (count == 0) {
        if (stats) *stats = {};
        return cloud;
    }
    if (count < 0) throw TooFewPoints("sample_variety: negative count");

    const std::uint64_t offset = (Rng::derive(cfg.seed, 0xA11CEULL) % (1u << 20)) + 1;
    long long attempts = 0;
    const long long primary_cap = std::max<long long>(4000, 80LL * count);
    for (long long i = 0; cloud.size() < count && i < primary_cap; ++i) {
        ++attempts;
        auto h = halton_point(offset + static_cast<std::uint64_t>(i), n);
        Eigen::VectorXd y(n);
        for (int j = 0; j < n; ++j) y(j) = 2.0 * h[static_cast<size_t>(j)] - 1.0;
        if (y.norm() > 1.0) continue;
        if (!gn_restore(p, y, cfg.feas_tol, 60)) continue;
        if (y.norm() > 1.0 + kBallSlack) {
            if (!slice_restore(p, y, cfg.feas_tol, 60)) continue;
            if (y.norm() > 1.0 + kBallSlack) continue;
        }
        cloud.add(y);
    }
    if (cloud.empty())
        throw NoFeasiblePoint("sample_variety: Z(p) appears empty in the disk");

    // Fill any shortfall by jittering found samples back onto the variety.
    Rng rng(Rng::derive(cfg.seed, 0xF111ULL));
    double sigma = 0.2;
    long long fill_attempts = 0;
    const long long fill_cap = 200LL * count;
    while (cloud.size() < count && fill_attempts < fill_cap) {
        ++fill_attempts;
        ++attempts;
        const Eigen::VectorXd& base =
            cloud.points[static_cast<size_t>(fill_attempts) % cloud.points.size()];
        Eigen::VectorXd y = base;
        for (int j = 0; j < n; ++j) y(j) += sigma * rng.normal();
        if (y.norm() > 1.0) y /= (y.norm() + 1e-12);
        if (!gn_restore(p, y, cfg.feas_tol, 60)) continue;
        if (y.norm() > 1.0 + kBallSlack) {
            if (!slice_restore(p, y, cfg.feas_tol, 60)) continue;
            if (y.norm() > 1.0 + kBallSlack) continue;
        }
        cloud.add(y);
        sigma = std::max(0.02, sigma * 0.999);
    }
    while (cloud.size() < count)
        cloud.add(cloud.points[static_cast<size_t>(cloud.size()) % cloud.points.size()]);

    if (stats) {
        stats->attempts = attempts;
        stats->max_gap = 0.0;
        for (int i = 0; i < cloud.size() && cloud.size() > 1; ++i) {
            double nn = std::numeric_limits<double>::infinity();
            for (int j = 0; j < cloud.size(); ++j) {
                if (i == j) continue;
                nn = std::min(nn, (cloud.points[static_cast<size_t>(i)] -
                                   cloud.points[static_cast<size_t>(j)])
                                      .norm());
            }
            stats->max_gap = std::max(stats->max_gap, nn);
        }
    }
    return cloud;
}

double hausdorff_estimate(const PointCloud& a, const PointCloud& b) {
    if (a.empty() || b.empty()) throw EmptyCloud("hausdorff_estimate: empty cloud");
    if (a.n != b.n) throw ShapeMismatch("hausdorff_estimate: dimension mismatch");

    auto directed = [](const PointCloud& from, const PointCloud& to) {
        double worst = 0.0;
        for (const auto& x : from.points) {
            double nn = std::numeric_limits<double>::infinity();
            for (const auto& y : to.points) {
                const double d = (x - y).squaredNorm();
                if (d < nn) {
                    nn = d;
                    if (nn <= worst) break;  // cannot raise the max
                }
            }
            worst = std::max(worst, nn);
        }
        return std::sqrt(worst);
    };
    return std::max(directed(a, b), directed(b, a));
}

std::vector<Eigen::MatrixXd> variety_tangents(const PolyTuple& p, const PointCloud& cloud) {
    std::vector<Eigen::MatrixXd> tangents;
    tangents.reserve(cloud.points.size());
    const int k = p.n() - p.c();
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    for (const auto& z : cloud.points) {
        p.eval_and_jacobian(z, value, jac);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
        tangents.push_back(svd.matrixV().rightCols(std::max(0, k)));
    }
    return tangents;
}

double reach_estimate(const PointCloud& cloud, const std::vector<Eigen::MatrixXd>& tangents) {
    if (cloud.size() < 2) throw TooFewPoints("reach_estimate: need at least 2 points");
    if (tangents.size() != cloud.points.size())
        throw ShapeMismatch("reach_estimate: one tangent basis per point required");
    constexpr double kCap = 1e6;
    double reach = kCap;
    bool any = false;
    for (size_t i = 0; i < cloud.points.size(); ++i) {
        const Eigen::MatrixXd& t = tangents[i];
        for (size_t j = 0; j < cloud.points.size(); ++j) {
            if (i == j) continue;
            const Eigen::VectorXd diff = cloud.points[j] - cloud.points[i];
            Eigen::VectorXd normal = diff;
            if (t.cols() > 0) normal -= t * (t.transpose() * diff);
            const double nn = normal.norm();
            if (nn < 1e-12) continue;
            any = true;
            reach = std::min(reach, diff.squaredNorm() / (2.0 * nn));
        }
    }
    return any ? reach : kCap;
}

CroftonResult crofton_volume_estimate(const PolyTuple& p, int k, int trials,
                                      std::uint64_t rng_seed) {
    const int n = p.n();
    if (k != n - p.c()) throw ShapeMismatch("crofton_volume_estimate: k must equal n - c");
    if (trials < 1) throw TooFewPoints("crofton_volume_estimate: trials must be >= 1");

    const double constant = crofton_constant(n, k);
    Rng rng(rng_seed);
    double sum = 0.0;
    double sum_sq = 0.0;
    const int c = p.c();
    for (int t = 0; t < trials; ++t) {
        PlaneSample plane = sample_affine_plane(n, k, rng);
        const int count =
            (c == 1) ? chord_intersections(p, plane.offset, plane.directions.col(0))
                     : plane_intersections_newton(p, plane.offset, plane.directions, rng);
        sum += count;
        sum_sq += static_cast<double>(count) * count;
    }
    const double mean = sum / trials;
    const double var = std::max(0.0, sum_sq / trials - mean * mean);

    CroftonResult result;
    result.trials = trials;
    result.estimate = constant * mean;
    result.std_error = constant * std::sqrt(var / trials);
    result.bound = unit_ball_volume(k) * std::pow(p.degree(), n - k);
    return result;
}

}  // namespace vartest
