#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "vartest/poly.hpp"
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

// p(x) = x1^2 + x2^2 - r^2 in the degree-2 BW basis (all three weights
// are 1 for d = 2).
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

Eigen::MatrixXd random_rotation(int n, Rng& rng) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    // Fix signs so the factorization is unique-ish; orthogonality is all
    // that matters here.
    return q;
}

}  // namespace

TEST_CASE("make_poly examples from hand-expanded weights") {
    // x^2 in the (n=1, d=2) space: weight of alpha=2 is 1.
    auto p = PolyTuple::make(1, 1, 2, {{1, MultiIndex({2}), 1.0}});
    CHECK(p.eval(vec1(0.5))(0) == doctest::Approx(0.25));
    CHECK(p.eval(vec1(-1.0))(0) == doctest::Approx(1.0));

    // Empty entry list gives the zero tuple.
    auto z = PolyTuple::make(1, 1, 2, {});
    CHECK(z.eval(vec1(0.3))(0) == 0.0);
    CHECK(bw_norm(z) == 0.0);

    // Circle of radius 1/2.
    auto c = circle_poly(0.5);
    CHECK(c.eval(vec2(0.5, 0.0))(0) == doctest::Approx(0.0));
    CHECK(c.eval(vec2(0.0, 0.0))(0) == doctest::Approx(-0.25));
}

TEST_CASE("make_poly rejects bad indices") {
    CHECK_THROWS_AS(PolyTuple::make(1, 1, 2, {{1, MultiIndex({3}), 1.0}}), DegreeExceeded);
    CHECK_THROWS_AS(PolyTuple::make(1, 1, 2, {{2, MultiIndex({1}), 1.0}}), IndexOutOfRange);
    CHECK_THROWS_AS(PolyTuple::make(2, 1, 2, {{1, MultiIndex({1}), 1.0}}), IndexOutOfRange);
}

TEST_CASE("eval_and_jacobian matches examples and finite differences") {
    auto c = circle_poly(0.5);
    Eigen::VectorXd value;
    Eigen::MatrixXd jac;
    c.eval_and_jacobian(vec2(0.5, 0.0), value, jac);
    CHECK(value(0) == doctest::Approx(0.0));
    CHECK(jac(0, 0) == doctest::Approx(1.0));
    CHECK(jac(0, 1) == doctest::Approx(0.0));

    auto sq = PolyTuple::make(1, 1, 2, {{1, MultiIndex({2}), 1.0}});
    sq.eval_and_jacobian(vec1(0.0), value, jac);
    CHECK(value(0) == 0.0);
    CHECK(jac(0, 0) == 0.0);

    // Central finite differences, step 1e-5, agreement 1e-6 relative.
    Rng rng(20240811);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 1 + static_cast<int>(rng.next_u64() % 4);
        const int cc = 1 + static_cast<int>(rng.next_u64() % 2);
        auto p = random_tuple(n, cc, d, rng);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(-0.9, 0.9);
        p.eval_and_jacobian(x, value, jac);
        const double h = 1e-5;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            Eigen::VectorXd fd = (p.eval(xp) - p.eval(xm)) / (2.0 * h);
            for (int j = 0; j < cc; ++j) {
                const double scale = std::max(1.0, std::abs(fd(j)));
                CHECK(std::abs(jac(j, i) - fd(j)) / scale < 1e-6);
            }
        }
    }
}

TEST_CASE("hessians match finite differences of the jacobian") {
    Rng rng(77);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        const int d = 2 + static_cast<int>(rng.next_u64() % 3);
        auto p = random_tuple(n, 1, d, rng);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(-0.8, 0.8);
        auto hess = p.hessians(x);
        const double h = 1e-5;
        Eigen::VectorXd v;
        Eigen::MatrixXd jp, jm;
        for (int i = 0; i < n; ++i) {
            Eigen::VectorXd xp = x, xm = x;
            xp(i) += h;
            xm(i) -= h;
            p.eval_and_jacobian(xp, v, jp);
            p.eval_and_jacobian(xm, v, jm);
            for (int u = 0; u < n; ++u) {
                const double fd = (jp(0, u) - jm(0, u)) / (2.0 * h);
                CHECK(hess[0](i, u) == doctest::Approx(fd).epsilon(1e-5));
            }
        }
    }
}

TEST_CASE("bw_inner worked examples and bilinearity") {
    auto x2 = PolyTuple::make(1, 1, 2, {{1, MultiIndex({2}), 1.0}});
    CHECK(bw_inner(x2, x2) == doctest::Approx(1.0));

    // p(x) = x in the d=2 space has stored coefficient 1/sqrt(2).
    auto lin = PolyTuple::make(1, 1, 2, {{1, MultiIndex({1}), 1.0 / std::sqrt(2.0)}});
    CHECK(lin.eval(vec1(1.0))(0) == doctest::Approx(1.0));
    CHECK(bw_norm(lin) == doctest::Approx(1.0 / std::sqrt(2.0)));

    auto zero = PolyTuple::make(1, 1, 2, {});
    CHECK(bw_inner(lin, zero) == 0.0);

    CHECK_THROWS_AS(bw_inner(x2, circle_poly(0.5)), ShapeMismatch);

    Rng rng(5);
    auto p = random_tuple(2, 1, 3, rng);
    auto q = random_tuple(2, 1, 3, rng);
    auto r = random_tuple(2, 1, 3, rng);
    CHECK(bw_inner(p, q) == doctest::Approx(bw_inner(q, p)));
    CHECK(bw_inner(p.plus(q, 2.0), r) ==
          doctest::Approx(bw_inner(p, r) + 2.0 * bw_inner(q, r)));
    CHECK(bw_inner(p, p) > 0.0);
}

TEST_CASE("compose_orthogonal preserves evaluation and BW norm") {
    auto c = circle_poly(0.5);
    Rng rng(99);

    // The circle is rotation invariant coefficient-wise.
    const double th = 0.7;
    Eigen::MatrixXd rot(2, 2);
    rot << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    auto cr = compose_orthogonal(c, rot);
    CHECK((cr.coeffs() - c.coeffs()).cwiseAbs().maxCoeff() < 1e-12);

    // Identity is a no-op.
    auto p0 = random_tuple(2, 1, 3, rng);
    auto pid = compose_orthogonal(p0, Eigen::MatrixXd::Identity(2, 2));
    CHECK((pid.coeffs() - p0.coeffs()).cwiseAbs().maxCoeff() < 1e-14);

    CHECK_THROWS_AS(compose_orthogonal(p0, 2.0 * Eigen::MatrixXd::Identity(2, 2)),
                    NotOrthogonal);

    // Norm invariance and pointwise consistency, 100 random trials.
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_u64() % 2);
        const int d = 1 + static_cast<int>(rng.next_u64() % 4);
        auto p = random_tuple(n, 1, d, rng);
        Eigen::MatrixXd R = random_rotation(n, rng);
        auto pr = compose_orthogonal(p, R);
        CHECK(std::abs(bw_norm(pr) - bw_norm(p)) < 1e-9 * std::max(1.0, bw_norm(p)));
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(-0.7, 0.7);
        CHECK(pr.eval(x)(0) == doctest::Approx(p.eval(R * x)(0)).epsilon(1e-9));
    }
}

TEST_CASE("sphere lift: worked examples and homogenization identity") {
    // p(x) = x with n=1, d=1: p_hat = x1.
    auto lin = PolyTuple::make(1, 1, 1, {{1, MultiIndex({1}), 1.0}});
    Eigen::VectorXd u0(2);
    u0 << 1.0, 0.0;
    Eigen::VectorXd value;
    Eigen::MatrixXd tjac;
    sphere_lift(lin, SpherePoint(u0), value, tjac);
    CHECK(value(0) == doctest::Approx(0.0));
    CHECK(std::abs(tjac(0, 0)) == doctest::Approx(1.0));

    // Constant 1 in the d=1 space: p_hat = x0.
    auto one = PolyTuple::make(1, 1, 1, {{1, MultiIndex({0}), 1.0}});
    sphere_lift(one, SpherePoint(u0), value, tjac);
    CHECK(value(0) == doctest::Approx(1.0));
    CHECK(std::abs(tjac(0, 0)) < 1e-14);

    // stereographic_lift lands on the sphere with first coordinate
    // 1/sqrt(1+|x|^2).
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(-1.0, 1.0);
        SpherePoint sp = stereographic_lift(x);
        CHECK(sp.coords.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(sp.coords(0) == doctest::Approx(1.0 / std::sqrt(1.0 + x.squaredNorm())));
    }

    // Homogenization identity p_hat(pi(x)) (1+|x|^2)^{d/2} = p(x); the
    // exponent d/2 was pinned by this very check.
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 2);
        const int d = 1 + static_cast<int>(rng.next_u64() % 4);
        auto p = random_tuple(n, 1, d, rng);
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = rng.uniform(-1.0, 1.0);
        sphere_lift(p, stereographic_lift(x), value, tjac);
        const double lhs = value(0) * std::pow(1.0 + x.squaredNorm(), d / 2.0);
        CHECK(lhs == doctest::Approx(p.eval(x)(0)).epsilon(1e-8));
    }
}

TEST_CASE("sphere tangent basis is orthonormal and orthogonal to u") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + static_cast<int>(rng.next_u64() % 3);
        Eigen::VectorXd g(n + 1);
        for (int i = 0; i <= n; ++i) g(i) = rng.normal();
        g.normalize();
        Eigen::MatrixXd B = sphere_tangent_basis(g);
        CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() <
              1e-12);
        CHECK((B.transpose() * g).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("embed re-expresses the same polynomial in a larger basis") {
    auto lin = PolyTuple::make(1, 1, 1, {{1, MultiIndex({1}), 1.0}});
    auto lifted = lin.embed(2);
    CHECK(lifted.degree() == 2);
    CHECK(lifted.eval(vec1(0.37))(0) == doctest::Approx(0.37));
    // Coefficient of x in the d=2 basis becomes 1/sqrt(2).
    CHECK(lifted.coeff(0, lifted.basis().position(MultiIndex({1}))) ==
          doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("multiply_hypersurfaces matches pointwise product") {
    Rng rng(8);
    auto p = random_tuple(2, 1, 2, rng);
    auto q = random_tuple(2, 1, 2, rng);
    auto pq = multiply_hypersurfaces(p, q);
    CHECK(pq.degree() == 4);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd x = vec2(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        CHECK(pq.eval(x)(0) == doctest::Approx(p.eval(x)(0) * q.eval(x)(0)).epsilon(1e-10));
    }
}

TEST_CASE("sigma_min conventions") {
    Eigen::MatrixXd wide(1, 3);
    wide << 3.0, 0.0, 4.0;
    CHECK(sigma_min(wide) == doctest::Approx(5.0));
    Eigen::MatrixXd tall(3, 1);
    tall << 1.0, 0.0, 0.0;
    CHECK(sigma_min(tall) == 0.0);  // c > n counts as rank-deficient
    Eigen::MatrixXd empty(1, 0);
    CHECK(sigma_min(empty) == 0.0);
}
