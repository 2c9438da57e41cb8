#include "vartest/discriminant.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "vartest/rng.hpp"

namespace vartest {

namespace {

double margin_objective_interior(const PolyTuple& p, const Eigen::VectorXd& z) {
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    p.eval_and_jacobian(z, value, jac);
    const double s = sigma_min(jac);
    return value.squaredNorm() + s * s;
}

double margin_objective_boundary(const PolyTuple& p, const Eigen::VectorXd& z) {
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    p.eval_and_jacobian(z, value, jac);
    if (p.n() == 1) return value.squaredNorm();
    const Eigen::MatrixXd basis = sphere_tangent_basis(z / z.norm());
    const double s = sigma_min(jac * basis);
    return value.squaredNorm() + s * s;
}

// Central-difference gradient; sigma_min is only piecewise smooth, which
// backtracking descent tolerates.
Eigen::VectorXd numeric_gradient(const PolyTuple& p, const Eigen::VectorXd& z,
                                 bool boundary) {
    const double h = 1e-6;
    Eigen::VectorXd g(z.size());
    for (int i = 0; i < z.size(); ++i) {
        Eigen::VectorXd zp = z, zm = z;
        zp(i) += h;
        zm(i) -= h;
        const double fp = boundary ? margin_objective_boundary(p, zp / zp.norm())
                                   : margin_objective_interior(p, zp);
        const double fm = boundary ? margin_objective_boundary(p, zm / zm.norm())
                                   : margin_objective_interior(p, zm);
        g(i) = (fp - fm) / (2.0 * h);
    }
    return g;
}

struct DescentResult {
    Eigen::VectorXd z;
    double value;
    long long iterations;
};

DescentResult project_descend(const PolyTuple& p, Eigen::VectorXd z, bool boundary,
                              const SearchConfig& cfg) {
    auto objective = [&](const Eigen::VectorXd& w) {
        return boundary ? margin_objective_boundary(p, w) : margin_objective_interior(p, w);
    };
    if (boundary) z /= z.norm();
    double fz = objective(z);
    double step = 0.05;
    long long used = 0;
    for (int it = 0; it < cfg.refine_iters; ++it) {
        ++used;
        Eigen::VectorXd g = numeric_gradient(p, z, boundary);
        if (boundary) {
            const Eigen::VectorXd zn = z / z.norm();
            g -= g.dot(zn) * zn;
        }
        const double gn = g.norm();
        if (gn < 1e-14) break;
        bool moved = false;
        for (int bt = 0; bt < 30 && !moved; ++bt) {
            Eigen::VectorXd cand = z - (step / gn) * g;
            if (boundary || cand.norm() > 1.0) cand /= cand.norm();
            const double fc = objective(cand);
            if (fc < fz - 1e-18) {
                const double improvement = fz - fc;
                z = cand;
                fz = fc;
                step *= 1.5;
                moved = true;
                if (improvement < cfg.tol * cfg.tol && step < 1e-9) it = cfg.refine_iters;
            } else {
                step *= 0.5;
            }
        }
        if (!moved) break;
    }
    return {z, fz, used};
}

}  // namespace

std::string to_string(MarginVariant v) {
    switch (v) {
        case MarginVariant::interior: return "interior";
        case MarginVariant::boundary: return "boundary";
        case MarginVariant::sphere: return "sphere";
    }
    return "interior";
}

double interior_margin_at(const PolyTuple& p, const Eigen::VectorXd& z) {
    if (z.size() != p.n()) throw ShapeMismatch("interior_margin_at: point dimension");
    if (z.norm() > 1.0 + 1e-12) throw OutsideDisk("interior_margin_at: |z| > 1");
    return std::sqrt(margin_objective_interior(p, z));
}

double boundary_margin_at(const PolyTuple& p, const Eigen::VectorXd& z) {
    if (z.size() != p.n()) throw ShapeMismatch("boundary_margin_at: point dimension");
    if (std::abs(z.norm() - 1.0) > 1e-10)
        throw NotOnBoundary("boundary_margin_at: |z| != 1");
    return std::sqrt(margin_objective_boundary(p, z));
}

std::vector<Eigen::VectorXd> sphere_grid(int n, int count) {
    std::vector<Eigen::VectorXd> pts;
    if (n == 1) {
        pts.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double th = 2.0 * M_PI * i / count;
            Eigen::VectorXd u(2);
            u << std::cos(th), std::sin(th);
            pts.push_back(u);
        }
        return pts;
    }
    if (n == 2) {
        // Fibonacci lattice on S^2.
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        pts.reserve(static_cast<size_t>(count));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = 2.0 * M_PI * i / golden;
            Eigen::VectorXd u(3);
            u << r * std::cos(th), r * std::sin(th), z;
            pts.push_back(u);
        }
        return pts;
    }
    // Generic dimension: deterministic low-discrepancy directions.
    pts.reserve(static_cast<size_t>(count));
    for (int i = 1; i <= count; ++i) {
        auto h = halton_point(static_cast<std::uint64_t>(i), n + 1);
        Eigen::VectorXd u(n + 1);
        for (int j = 0; j <= n; ++j)
            u(j) = inverse_normal_cdf(
                std::min(std::max(h[static_cast<size_t>(j)], 1e-12), 1.0 - 1e-12));
        const double norm = u.norm();
        if (norm < 1e-12) continue;
        pts.push_back(u / norm);
    }
    return pts;
}

MarginCertificate discriminant_margin(const PolyTuple& p, const SearchConfig& cfg) {
    const int n = p.n();
    long long grid_points = 0;

    std::vector<std::pair<double, Eigen::VectorXd>> interior_cells;
    {
        const int g = std::max(2, cfg.interior_grid);
        std::vector<int> idx(static_cast<size_t>(n), 0);
        std::function<void(int)> rec = [&](int var) {
            if (var == n) {
                Eigen::VectorXd z(n);
                for (int i = 0; i < n; ++i)
                    z(i) = -1.0 + 2.0 * idx[static_cast<size_t>(i)] / (g - 1.0);
                if (z.norm() <= 1.0)
                    interior_cells.emplace_back(margin_objective_interior(p, z), z);
                return;
            }
            for (idx[static_cast<size_t>(var)] = 0; idx[static_cast<size_t>(var)] < g;
                 ++idx[static_cast<size_t>(var)])
                rec(var + 1);
        };
        rec(0);
        grid_points += static_cast<long long>(interior_cells.size());
    }

    std::vector<std::pair<double, Eigen::VectorXd>> boundary_cells;
    if (n == 1) {
        for (double s : {-1.0, 1.0}) {
            Eigen::VectorXd z(1);
            z << s;
            boundary_cells.emplace_back(margin_objective_boundary(p, z), z);
        }
    } else {
        for (const auto& u : sphere_grid(n - 1, cfg.boundary_grid))
            boundary_cells.emplace_back(margin_objective_boundary(p, u), u);
    }
    grid_points += static_cast<long long>(boundary_cells.size());

    auto take_best = [&](std::vector<std::pair<double, Eigen::VectorXd>>& cells) {
        const size_t keep = std::min(cells.size(), static_cast<size_t>(cfg.refine_topk));
        std::partial_sort(cells.begin(), cells.begin() + static_cast<long>(keep), cells.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
        cells.resize(keep);
    };
    take_best(interior_cells);
    take_best(boundary_cells);

    long long refinement = 0;
    double best_interior_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_interior_z = Eigen::VectorXd::Zero(n);
    for (const auto& [f0, z0] : interior_cells) {
        DescentResult r = project_descend(p, z0, false, cfg);
        refinement += r.iterations;
        if (r.value < best_interior_f) {
            best_interior_f = r.value;
            best_interior_z = r.z;
        }
    }

    double best_boundary_f = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_boundary_z = Eigen::VectorXd::Zero(n);
    for (const auto& [f0, z0] : boundary_cells) {
        if (n == 1) {
            if (f0 < best_boundary_f) {
                best_boundary_f = f0;
                best_boundary_z = z0;
            }
            continue;
        }
        DescentResult r = project_descend(p, z0, true, cfg);
        refinement += r.iterations;
        if (r.value < best_boundary_f) {
            best_boundary_f = r.value;
            best_boundary_z = r.z;
        }
    }

    MarginCertificate cert;
    cert.grid_points = grid_points;
    cert.refinement_iterations = refinement;
    // Ties go to the interior witness.
    if (best_interior_f <= best_boundary_f) {
        cert.variant = MarginVariant::interior;
        cert.witness = best_interior_z;
        cert.margin = std::sqrt(std::max(0.0, best_interior_f));
    } else {
        cert.variant = MarginVariant::boundary;
        cert.witness = best_boundary_z;
        cert.margin = std::sqrt(std::max(0.0, best_boundary_f));
    }
    return cert;
}

double raffalli_sphere_distance(const PolyTuple& p, const SpherePoint& u) {
    Eigen::VectorXd value;
    Eigen::MatrixXd tjac;
    sphere_lift(p, u, value, tjac);
    const double s = sigma_min(tjac);
    return std::sqrt(value.squaredNorm() + s * s / p.degree());
}

double raffalli_sphere_min(const PolyTuple& p, int grid_size) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : sphere_grid(p.n(), grid_size))
        best = std::min(best, raffalli_sphere_distance(p, SpherePoint(u)));
    return best;
}

double raffalli_cap_min(const PolyTuple& p, int grid_size) {
    const double cap = 1.0 / std::sqrt(2.0) - 1e-9;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& u : sphere_grid(p.n(), grid_size)) {
        if (u(0) < cap) continue;
        best = std::min(best, raffalli_sphere_distance(p, SpherePoint(u)));
    }
    return best;
}

}  // namespace vartest
