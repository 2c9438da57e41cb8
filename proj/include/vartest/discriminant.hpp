#ifndef VARTEST_DISCRIMINANT_HPP
#define VARTEST_DISCRIMINANT_HPP

#include <Eigen/Dense>
#include <string>

#include "vartest/poly.hpp"

namespace vartest {

// Controls for the global margin search: a dense grid followed by
// projected descent from the best cells.
struct SearchConfig {
    int interior_grid = 64;   // lattice points per axis on [-1,1]^n
    int boundary_grid = 256;  // sphere-grid size for the boundary branch
    int refine_iters = 50;
    int refine_topk = 10;
    double tol = 1e-8;
};

enum class MarginVariant { interior, boundary, sphere };

std::string to_string(MarginVariant v);

// Witnessed value of the regularity margin. Scaled by the configured
// constant a(n,k,d), the margin upper-bounds dist(p, Sigma); it is a
// one-sided certificate only.
struct MarginCertificate {
    Eigen::VectorXd witness;
    double margin = 0.0;
    MarginVariant variant = MarginVariant::interior;
    long long grid_points = 0;
    long long refinement_iterations = 0;
};

// (|p(z)|^2 + sigma_min(Jp(z))^2)^{1/2} for |z| <= 1.
double interior_margin_at(const PolyTuple& p, const Eigen::VectorXd& z);

// (|p(z)|^2 + sigma_min(Jp(z) restricted to z^perp)^2)^{1/2} for |z| = 1.
// For n = 1 the restriction is empty and the value is |p(z)|.
double boundary_margin_at(const PolyTuple& p, const Eigen::VectorXd& z);

// Global minimum of the two branches over the disk and its boundary.
MarginCertificate discriminant_margin(const PolyTuple& p, const SearchConfig& cfg = {});

// Exact BW distance from p to the singular-at-u locus on the sphere:
// (|p_hat(u)|^2 + sigma_min(D_u p_hat)^2 / d)^{1/2}.
double raffalli_sphere_distance(const PolyTuple& p, const SpherePoint& u);

// Minimum of raffalli_sphere_distance over a deterministic grid of S^n
// (full sphere), approximating dist(p, Sigma_hat).
double raffalli_sphere_min(const PolyTuple& p, int grid_size);

// Same minimum restricted to the stereographic image of the disk
// (u_0 >= 1/sqrt(2)); approximates the exact dist(p, Sigma_D).
double raffalli_cap_min(const PolyTuple& p, int grid_size);

// Deterministic grid on S^n: uniform angles for n=1, Fibonacci lattice
// for n >= 2.
std::vector<Eigen::VectorXd> sphere_grid(int n, int count);

}  // namespace vartest

#endif
