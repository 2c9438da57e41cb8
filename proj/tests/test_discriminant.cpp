#include <Eigen/Dense>
#include <cmath>
#include <iostream>

#include "doctest.h"
#include "vartest/discriminant.hpp"
#include "vartest/rng.hpp"

using namespace vartest;

namespace {

Eigen::VectorXd vec1(double a) {
    Eigen::VectorXd v(1);
    v << a;
    return v;
}

Eigen::VectorXd vec2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return v;
}

PolyTuple circle_poly(double r) {
    return PolyTuple::make(2, 1, 2,
                           {{1, MultiIndex({2, 0}), 1.0},
                            {1, MultiIndex({0, 2}), 1.0},
                            {1, MultiIndex({0, 0}), -r * r}});
}

PolyTuple random_tuple(int n, int c, int d, Rng& rng) {
    PolyTuple p(n, c, d);
    Eigen::MatrixXd m(c, p.basis().size());
    for (int j = 0; j < c; ++j)
        for (int i = 0; i < m.cols(); ++i) m(j, i) = rng.normal();
    return PolyTuple::from_coeffs(MonomialBasis::get(n, d), std::move(m));
}

}  // namespace

TEST_CASE("interior margin worked examples") {
    auto lin = PolyTuple::make(1, 1, 1, {{1, MultiIndex({1}), 1.0}});
    CHECK(interior_margin_at(lin, vec1(0.0)) == doctest::Approx(1.0));

    auto sq = PolyTuple::make(1, 1, 2, {{1, MultiIndex({2}), 1.0}});
    CHECK(interior_margin_at(sq, vec1(0.0)) == doctest::Approx(0.0));

    CHECK(interior_margin_at(circle_poly(0.5), vec2(0.5, 0.0)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(interior_margin_at(lin, vec1(1.5)), OutsideDisk);
}

TEST_CASE("boundary margin worked examples") {
    // p = x2 in (n=2, d=1); w([0,1]) = 1.
    auto px2 = PolyTuple::make(2, 1, 1, {{1, MultiIndex({0, 1}), 1.0}});
    CHECK(boundary_margin_at(px2, vec2(1.0, 0.0)) == doctest::Approx(1.0));

    // p = x1 - 1 is tangent to the boundary at (1,0).
    auto tangentp = PolyTuple::make(
        2, 1, 1, {{1, MultiIndex({1, 0}), 1.0}, {1, MultiIndex({0, 0}), -1.0}});
    CHECK(boundary_margin_at(tangentp, vec2(1.0, 0.0)) == doctest::Approx(0.0));

    auto px1 = PolyTuple::make(2, 1, 1, {{1, MultiIndex({1, 0}), 1.0}});
    CHECK(boundary_margin_at(px1, vec2(0.0, 1.0)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(boundary_margin_at(px1, vec2(0.5, 0.0)), NotOnBoundary);
}

TEST_CASE("discriminant_margin worked examples") {
    SearchConfig cfg;
    // Circle r=1/2: minimum of ((r^2-1/4)^2 + 4 r^2)^{1/2} sits at the
    // origin with value 1/4.
    auto cert = discriminant_margin(circle_poly(0.5), cfg);
    CHECK(cert.margin == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(cert.witness.norm() < 1e-3);
    CHECK(cert.variant == MarginVariant::interior);
    CHECK(cert.grid_points > 0);

    // p(x) = x^2 lies on the discriminant.
    auto sq = PolyTuple::make(1, 1, 2, {{1, MultiIndex({2}), 1.0}});
    auto cert_sq = discriminant_margin(sq, cfg);
    CHECK(cert_sq.margin < 1e-6);
    CHECK(std::abs(cert_sq.witness(0)) < 1e-3);

    // p(x) = x on [-1, 1]: interior branch attains 1 at z = 0; the n=1
    // boundary branch degenerates to |p(+-1)| = 1.
    auto lin = PolyTuple::make(1, 1, 1, {{1, MultiIndex({1}), 1.0}});
    auto cert_lin = discriminant_margin(lin, cfg);
    CHECK(cert_lin.margin == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(cert_lin.variant == MarginVariant::interior);
}

TEST_CASE("margin certificate value re-evaluates at its witness") {
    Rng rng(404);
    SearchConfig cfg;
    cfg.interior_grid = 24;
    cfg.boundary_grid = 64;
    for (int trial = 0; trial < 10; ++trial) {
        auto p = random_tuple(2, 1, 2, rng);
        auto cert = discriminant_margin(p, cfg);
        const double at_witness = (cert.variant == MarginVariant::interior)
                                      ? interior_margin_at(p, cert.witness)
                                      : boundary_margin_at(p, cert.witness);
        CHECK(cert.margin == doctest::Approx(at_witness).epsilon(1e-10));
        CHECK(cert.witness.norm() <= 1.0 + 1e-10);
        CHECK(cert.margin >= 0.0);
    }
}

TEST_CASE("margins are 1-homogeneous in p") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_tuple(2, 1, 3, rng);
        const double lambda = rng.uniform(0.1, 5.0);
        Eigen::VectorXd z = vec2(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6));
        CHECK(interior_margin_at(p.scaled(lambda), z) ==
              doctest::Approx(lambda * interior_margin_at(p, z)).epsilon(1e-9));
        Eigen::VectorXd b = vec2(std::cos(static_cast<double>(trial)),
                                 std::sin(static_cast<double>(trial)));
        CHECK(boundary_margin_at(p.scaled(lambda), b) ==
              doctest::Approx(lambda * boundary_margin_at(p, b)).epsilon(1e-9));
        SpherePoint u = stereographic_lift(z);
        CHECK(raffalli_sphere_distance(p.scaled(lambda), u) ==
              doctest::Approx(lambda * raffalli_sphere_distance(p, u)).epsilon(1e-9));
    }
}

TEST_CASE("discriminant_margin is orthogonally invariant up to grid tolerance") {
    Rng rng(2024);
    SearchConfig cfg;
    cfg.interior_grid = 32;
    cfg.boundary_grid = 128;
    for (int trial = 0; trial < 5; ++trial) {
        auto p = random_tuple(2, 1, 2, rng);
        const double th = rng.uniform(0.0, 2.0 * M_PI);
        Eigen::MatrixXd R(2, 2);
        R << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
        const double m0 = discriminant_margin(p, cfg).margin;
        const double m1 = discriminant_margin(compose_orthogonal(p, R), cfg).margin;
        CHECK(m1 == doctest::Approx(m0).epsilon(2e-2));
    }
}

TEST_CASE("singular zero in the disk forces a small margin") {
    // Nodal cross x1^2 - x2^2: singular at the origin.
    auto cross = PolyTuple::make(
        2, 1, 2, {{1, MultiIndex({2, 0}), 1.0}, {1, MultiIndex({0, 2}), -1.0}});
    auto cert = discriminant_margin(cross);
    CHECK(cert.margin < 1e-5);
}

TEST_CASE("raffalli sphere distance worked examples") {
    auto lin = PolyTuple::make(1, 1, 1, {{1, MultiIndex({1}), 1.0}});
    Eigen::VectorXd e0(2);
    e0 << 1.0, 0.0;
    CHECK(raffalli_sphere_distance(lin, SpherePoint(e0)) == doctest::Approx(1.0));

    auto one = PolyTuple::make(1, 1, 1, {{1, MultiIndex({0}), 1.0}});
    CHECK(raffalli_sphere_distance(one, SpherePoint(e0)) == doctest::Approx(1.0));

    CHECK_THROWS_AS(SpherePoint(2.0 * e0), NotOnSphere);
}

TEST_CASE("raffalli minimum tracks the margin within a logged constant") {
    Rng rng(11);
    SearchConfig cfg;
    cfg.interior_grid = 48;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int trial = 0; trial < 12; ++trial) {
        auto p = random_tuple(1, 1, 2, rng);
        const double margin = discriminant_margin(p, cfg).margin;
        const double raff = raffalli_cap_min(p, 2000);
        if (margin < 1e-9) continue;
        const double ratio = raff / margin;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        CHECK(ratio > 0.05);
        CHECK(ratio < 20.0);
    }
    std::cerr << "[discriminant] raffalli/margin ratio over random n=1,d=2 instances: ["
              << lo << ", " << hi << "]\n";
}
