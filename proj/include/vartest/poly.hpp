#ifndef VARTEST_POLY_HPP
#define VARTEST_POLY_HPP

#include <Eigen/Dense>
#include <memory>
#include <tuple>
#include <vector>

#include "vartest/errors.hpp"

namespace vartest {

// Exponent vector of a single monomial.
struct MultiIndex {
    std::vector<int> exponents;

    MultiIndex() = default;
    explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

    int total_degree() const {
        int s = 0;
        for (int e : exponents) s += e;
        return s;
    }
    int size() const { return static_cast<int>(exponents.size()); }
    bool operator==(const MultiIndex& o) const { return exponents == o.exponents; }
};

// All multi-indices of total degree <= d in n variables, graded order
// (within a grade: first exponent descending, then recursively), with
// the multinomial weights that make the Bombieri-Weyl product a plain
// dot product on stored coefficients. Immutable and shared per (n, d).
class MonomialBasis {
public:
    MonomialBasis(int n, int d);

    int n() const { return n_; }
    int degree() const { return d_; }
    int size() const { return static_cast<int>(indices_.size()); }

    const MultiIndex& index(int i) const { return indices_[static_cast<size_t>(i)]; }
    double weight(int i) const { return weights_[static_cast<size_t>(i)]; }

    // Position of a multi-index in this basis; throws IndexOutOfRange /
    // DegreeExceeded on malformed input.
    int position(const MultiIndex& mi) const;

    // Index of alpha + e_var, or -1 when that leaves the basis.
    int raise(int i, int var) const { return raise_[static_cast<size_t>(i * n_ + var)]; }

    static std::shared_ptr<const MonomialBasis> get(int n, int d);

private:
    int n_;
    int d_;
    std::vector<MultiIndex> indices_;
    std::vector<double> weights_;
    std::vector<int> raise_;
};

// Point on the unit sphere S^n in R^{n+1}.
struct SpherePoint {
    Eigen::VectorXd coords;

    explicit SpherePoint(Eigen::VectorXd u);
};

// c-tuple of n-variate polynomials of degree <= d, stored in the
// Bombieri-Weyl weighted basis: p_j(x) = sum_a coeff(j,a) w(a) x^a.
// Immutable after construction; all member functions are const and
// thread-safe.
class PolyTuple {
public:
    using Entry = std::tuple<int, MultiIndex, double>;  // (eq 1-based, alpha, value)

    PolyTuple(int n, int c, int d);

    static PolyTuple make(int n, int c, int d, const std::vector<Entry>& entries);

    int n() const { return basis_->n(); }
    int c() const { return static_cast<int>(coeffs_.rows()); }
    int degree() const { return basis_->degree(); }
    const MonomialBasis& basis() const { return *basis_; }

    const Eigen::MatrixXd& coeffs() const { return coeffs_; }
    double coeff(int j, int idx) const { return coeffs_(j, idx); }

    Eigen::VectorXd eval(const Eigen::VectorXd& x) const;
    void eval_and_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& value,
                           Eigen::MatrixXd& jac) const;
    // Hessians of each component, for Newton-type solvers.
    std::vector<Eigen::MatrixXd> hessians(const Eigen::VectorXd& x) const;

    // Raw monomial-basis coefficients (coeff * weight), same ordering.
    Eigen::MatrixXd raw_coeffs() const;

    // The same polynomial re-expressed in the degree-d2 basis (d2 >= d).
    PolyTuple embed(int d2) const;

    PolyTuple scaled(double s) const;
    PolyTuple plus(const PolyTuple& q, double scale = 1.0) const;

    static PolyTuple from_coeffs(std::shared_ptr<const MonomialBasis> basis,
                                 Eigen::MatrixXd coeffs);

private:
    std::shared_ptr<const MonomialBasis> basis_;
    Eigen::MatrixXd coeffs_;  // c x basis.size()
};

double bw_inner(const PolyTuple& p, const PolyTuple& q);
double bw_norm(const PolyTuple& p);

// Coefficients of p(R x) in the same basis; R must be orthogonal
// within 1e-10. Preserves the BW norm.
PolyTuple compose_orthogonal(const PolyTuple& p, const Eigen::MatrixXd& R);

// Product of two single-equation tuples (degrees add).
PolyTuple multiply_hypersurfaces(const PolyTuple& p, const PolyTuple& q);

// pi(x) = (1, x) / sqrt(1 + |x|^2).
SpherePoint stereographic_lift(const Eigen::VectorXd& x);

// Value and tangent-basis Jacobian of the degree-d homogenization
// p_hat at u in S^n. The tangent basis is the deterministic Householder
// completion of u. Satisfies p_hat(pi(x)) (1+|x|^2)^{d/2} = p(x).
void sphere_lift(const PolyTuple& p, const SpherePoint& u, Eigen::VectorXd& value,
                 Eigen::MatrixXd& tangent_jac);

// Orthonormal basis of u^perp as columns ((n+1) x n), deterministic.
Eigen::MatrixXd sphere_tangent_basis(const Eigen::VectorXd& u);

// Smallest singular value; matrices with more rows than columns have
// sigma_min defined as 0 (they can never reach full row rank).
double sigma_min(const Eigen::MatrixXd& m);

}  // namespace vartest

#endif
