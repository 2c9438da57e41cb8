#include "vartest/poly.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

namespace vartest {

namespace {

void enumerate_indices(int n, int d, std::vector<MultiIndex>& out) {
    // Graded order; within a grade the first variable's exponent runs
    // from the grade down to zero, recursively.
    std::vector<int> cur(static_cast<size_t>(n), 0);
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == n - 1) {
            cur[static_cast<size_t>(var)] = remaining;
            out.emplace_back(cur);
            return;
        }
        for (int e = remaining; e >= 0; --e) {
            cur[static_cast<size_t>(var)] = e;
            rec(var + 1, remaining - e);
        }
    };
    for (int grade = 0; grade <= d; ++grade) rec(0, grade);
}

// Multinomial d! / ((d-|a|)! a_1! ... a_n!) as a product of binomials.
// Exact in 64-bit integers through d = 20, log-gamma beyond.
double multinomial_weight(int d, const MultiIndex& mi) {
    const int rest = d - mi.total_degree();
    if (d <= 20) {
        auto binom = [](int m, int k) -> unsigned long long {
            unsigned long long r = 1;
            for (int i = 1; i <= k; ++i)
                r = r * static_cast<unsigned long long>(m - k + i) / static_cast<unsigned long long>(i);
            return r;
        };
        unsigned long long value = 1;
        int left = d;
        value *= binom(left, rest);
        left -= rest;
        for (int e : mi.exponents) {
            value *= binom(left, e);
            left -= e;
        }
        return static_cast<double>(value);
    }
    double lg = std::lgamma(d + 1.0) - std::lgamma(rest + 1.0);
    for (int e : mi.exponents) lg -= std::lgamma(e + 1.0);
    return std::exp(lg);
}

struct BasisKey {
    int n, d;
    bool operator<(const BasisKey& o) const { return std::tie(n, d) < std::tie(o.n, o.d); }
};

std::map<BasisKey, std::shared_ptr<const MonomialBasis>>& basis_cache() {
    static std::map<BasisKey, std::shared_ptr<const MonomialBasis>> cache;
    return cache;
}
std::mutex basis_mutex;

// Powers x_i^e for e = 0..d, one row per variable.
void power_table(const Eigen::VectorXd& x, int d, Eigen::MatrixXd& pows) {
    const int n = static_cast<int>(x.size());
    pows.resize(n, d + 1);
    for (int i = 0; i < n; ++i) {
        pows(i, 0) = 1.0;
        for (int e = 1; e <= d; ++e) pows(i, e) = pows(i, e - 1) * x(i);
    }
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int d) : n_(n), d_(d) {
    if (n < 1) throw IndexOutOfRange("MonomialBasis: n must be >= 1");
    if (d < 0) throw DegreeExceeded("MonomialBasis: d must be >= 0");
    enumerate_indices(n, d, indices_);
    weights_.reserve(indices_.size());
    for (const MultiIndex& mi : indices_)
        weights_.push_back(std::sqrt(multinomial_weight(d, mi)));

    std::map<std::vector<int>, int> pos;
    for (int i = 0; i < size(); ++i) pos[indices_[static_cast<size_t>(i)].exponents] = i;
    raise_.assign(static_cast<size_t>(size() * n_), -1);
    for (int i = 0; i < size(); ++i) {
        for (int v = 0; v < n_; ++v) {
            std::vector<int> e = indices_[static_cast<size_t>(i)].exponents;
            e[static_cast<size_t>(v)] += 1;
            auto it = pos.find(e);
            raise_[static_cast<size_t>(i * n_ + v)] = (it == pos.end()) ? -1 : it->second;
        }
    }
}

int MonomialBasis::position(const MultiIndex& mi) const {
    if (mi.size() != n_) {
        std::ostringstream os;
        os << "multi-index has " << mi.size() << " entries, expected " << n_;
        throw IndexOutOfRange(os.str());
    }
    for (int e : mi.exponents)
        if (e < 0) throw IndexOutOfRange("multi-index has a negative exponent");
    if (mi.total_degree() > d_) {
        std::ostringstream os;
        os << "multi-index degree " << mi.total_degree() << " exceeds bound " << d_;
        throw DegreeExceeded(os.str());
    }
    for (int i = 0; i < size(); ++i)
        if (indices_[static_cast<size_t>(i)] == mi) return i;
    throw IndexOutOfRange("multi-index not found");
}

std::shared_ptr<const MonomialBasis> MonomialBasis::get(int n, int d) {
    std::lock_guard<std::mutex> lock(basis_mutex);
    auto& cache = basis_cache();
    auto it = cache.find({n, d});
    if (it != cache.end()) return it->second;
    auto basis = std::make_shared<const MonomialBasis>(n, d);
    cache[{n, d}] = basis;
    return basis;
}

SpherePoint::SpherePoint(Eigen::VectorXd u) : coords(std::move(u)) {
    if (std::abs(coords.norm() - 1.0) > 1e-12)
        throw NotOnSphere("SpherePoint: norm deviates from 1 by more than 1e-12");
}

PolyTuple::PolyTuple(int n, int c, int d) : basis_(MonomialBasis::get(n, d)) {
    if (c < 1) throw IndexOutOfRange("PolyTuple: c must be >= 1");
    coeffs_ = Eigen::MatrixXd::Zero(c, basis_->size());
}

PolyTuple PolyTuple::make(int n, int c, int d, const std::vector<Entry>& entries) {
    PolyTuple p(n, c, d);
    for (const auto& [eq, mi, value] : entries) {
        if (eq < 1 || eq > c) {
            std::ostringstream os;
            os << "equation index " << eq << " outside 1.." << c;
            throw IndexOutOfRange(os.str());
        }
        const int idx = p.basis_->position(mi);
        p.coeffs_(eq - 1, idx) = value;
    }
    return p;
}

PolyTuple PolyTuple::from_coeffs(std::shared_ptr<const MonomialBasis> basis,
                                 Eigen::MatrixXd coeffs) {
    if (coeffs.cols() != basis->size() || coeffs.rows() < 1)
        throw ShapeMismatch("from_coeffs: coefficient matrix does not match basis");
    PolyTuple p(basis->n(), static_cast<int>(coeffs.rows()), basis->degree());
    p.coeffs_ = std::move(coeffs);
    return p;
}

Eigen::VectorXd PolyTuple::eval(const Eigen::VectorXd& x) const {
    Eigen::VectorXd value;
    Eigen::MatrixXd pows;
    power_table(x, degree(), pows);
    const int N = basis_->size();
    Eigen::VectorXd mono(N);
    for (int i = 0; i < N; ++i) {
        const MultiIndex& mi = basis_->index(i);
        double m = basis_->weight(i);
        for (int v = 0; v < n(); ++v) m *= pows(v, mi.exponents[static_cast<size_t>(v)]);
        mono(i) = m;
    }
    value = coeffs_ * mono;
    return value;
}

void PolyTuple::eval_and_jacobian(const Eigen::VectorXd& x, Eigen::VectorXd& value,
                                  Eigen::MatrixXd& jac) const {
    Eigen::MatrixXd pows;
    power_table(x, degree(), pows);
    const int N = basis_->size();
    const int nv = n();
    Eigen::VectorXd mono(N);
    Eigen::MatrixXd dmono(N, nv);
    for (int i = 0; i < N; ++i) {
        const MultiIndex& mi = basis_->index(i);
        const double w = basis_->weight(i);
        double m = w;
        for (int v = 0; v < nv; ++v) m *= pows(v, mi.exponents[static_cast<size_t>(v)]);
        mono(i) = m;
        for (int v = 0; v < nv; ++v) {
            const int e = mi.exponents[static_cast<size_t>(v)];
            if (e == 0) {
                dmono(i, v) = 0.0;
                continue;
            }
            double dm = w * e;
            for (int u = 0; u < nv; ++u) {
                const int eu = mi.exponents[static_cast<size_t>(u)] - (u == v ? 1 : 0);
                dm *= pows(u, eu);
            }
            dmono(i, v) = dm;
        }
    }
    value = coeffs_ * mono;
    jac = coeffs_ * dmono;
}

std::vector<Eigen::MatrixXd> PolyTuple::hessians(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd pows;
    power_table(x, degree(), pows);
    const int N = basis_->size();
    const int nv = n();
    std::vector<Eigen::MatrixXd> hess(static_cast<size_t>(c()),
                                      Eigen::MatrixXd::Zero(nv, nv));
    for (int i = 0; i < N; ++i) {
        const MultiIndex& mi = basis_->index(i);
        const double w = basis_->weight(i);
        for (int v1 = 0; v1 < nv; ++v1) {
            const int e1 = mi.exponents[static_cast<size_t>(v1)];
            if (e1 == 0) continue;
            for (int v2 = v1; v2 < nv; ++v2) {
                const int e2 = mi.exponents[static_cast<size_t>(v2)] - (v1 == v2 ? 1 : 0);
                if (e2 == 0) continue;
                double m = w * e1 * e2;
                for (int u = 0; u < nv; ++u) {
                    int eu = mi.exponents[static_cast<size_t>(u)];
                    if (u == v1) --eu;
                    if (u == v2) --eu;
                    m *= pows(u, eu);
                }
                for (int j = 0; j < c(); ++j) {
                    const double t = coeffs_(j, i) * m;
                    hess[static_cast<size_t>(j)](v1, v2) += t;
                    if (v1 != v2) hess[static_cast<size_t>(j)](v2, v1) += t;
                }
            }
        }
    }
    return hess;
}

Eigen::MatrixXd PolyTuple::raw_coeffs() const {
    Eigen::MatrixXd raw = coeffs_;
    for (int i = 0; i < basis_->size(); ++i) raw.col(i) *= basis_->weight(i);
    return raw;
}

PolyTuple PolyTuple::embed(int d2) const {
    if (d2 < degree()) throw DegreeExceeded("embed: target degree below current degree");
    if (d2 == degree()) return *this;
    auto target = MonomialBasis::get(n(), d2);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(c(), target->size());
    const Eigen::MatrixXd raw = raw_coeffs();
    for (int i = 0; i < basis_->size(); ++i) {
        const int pos = target->position(basis_->index(i));
        out.col(pos) = raw.col(i) / target->weight(pos);
    }
    return from_coeffs(target, std::move(out));
}

PolyTuple PolyTuple::scaled(double s) const {
    return from_coeffs(basis_, coeffs_ * s);
}

PolyTuple PolyTuple::plus(const PolyTuple& q, double scale) const {
    if (n() != q.n() || c() != q.c() || degree() != q.degree())
        throw ShapeMismatch("plus: tuples have different (n, c, d)");
    return from_coeffs(basis_, coeffs_ + scale * q.coeffs_);
}

double bw_inner(const PolyTuple& p, const PolyTuple& q) {
    if (p.n() != q.n() || p.c() != q.c() || p.degree() != q.degree())
        throw ShapeMismatch("bw_inner: tuples have different (n, c, d)");
    return (p.coeffs().array() * q.coeffs().array()).sum();
}

double bw_norm(const PolyTuple& p) { return p.coeffs().norm(); }

PolyTuple compose_orthogonal(const PolyTuple& p, const Eigen::MatrixXd& R) {
    const int nv = p.n();
    if (R.rows() != nv || R.cols() != nv)
        throw NotOrthogonal("compose_orthogonal: matrix has wrong shape");
    if ((R.transpose() * R - Eigen::MatrixXd::Identity(nv, nv)).cwiseAbs().maxCoeff() > 1e-10)
        throw NotOrthogonal("compose_orthogonal: matrix is not orthogonal within 1e-10");

    const MonomialBasis& basis = p.basis();
    const int N = basis.size();
    const Eigen::MatrixXd raw = p.raw_coeffs();
    Eigen::MatrixXd out_raw = Eigen::MatrixXd::Zero(p.c(), N);

    // (R x)^alpha expanded by repeated multiplication with the linear
    // forms row_i(R) . x, accumulated per source monomial.
    Eigen::VectorXd work(N), next(N);
    for (int i = 0; i < N; ++i) {
        bool used = false;
        for (int j = 0; j < p.c(); ++j) used = used || raw(j, i) != 0.0;
        if (!used) continue;
        const MultiIndex& mi = basis.index(i);
        work.setZero();
        work(0) = 1.0;  // the constant monomial is always index 0
        for (int v = 0; v < nv; ++v) {
            for (int rep = 0; rep < mi.exponents[static_cast<size_t>(v)]; ++rep) {
                next.setZero();
                for (int s = 0; s < N; ++s) {
                    const double cs = work(s);
                    if (cs == 0.0) continue;
                    for (int u = 0; u < nv; ++u) {
                        const double r = R(v, u);
                        if (r == 0.0) continue;
                        const int t = basis.raise(s, u);
                        if (t >= 0) next(t) += cs * r;
                    }
                }
                work.swap(next);
            }
        }
        for (int j = 0; j < p.c(); ++j)
            if (raw(j, i) != 0.0) out_raw.row(j) += raw(j, i) * work.transpose();
    }

    for (int i = 0; i < N; ++i) out_raw.col(i) /= basis.weight(i);
    return PolyTuple::from_coeffs(MonomialBasis::get(nv, p.degree()), std::move(out_raw));
}

PolyTuple multiply_hypersurfaces(const PolyTuple& p, const PolyTuple& q) {
    if (p.c() != 1 || q.c() != 1)
        throw NotHypersurface("multiply_hypersurfaces: both tuples must have c = 1");
    if (p.n() != q.n()) throw ShapeMismatch("multiply_hypersurfaces: dimension mismatch");
    const int nv = p.n();
    const int dsum = p.degree() + q.degree();
    auto target = MonomialBasis::get(nv, dsum);
    const Eigen::MatrixXd rp = p.raw_coeffs();
    const Eigen::MatrixXd rq = q.raw_coeffs();
    Eigen::VectorXd out_raw = Eigen::VectorXd::Zero(target->size());
    const MonomialBasis& bp = p.basis();
    const MonomialBasis& bq = q.basis();
    for (int i = 0; i < bp.size(); ++i) {
        if (rp(0, i) == 0.0) continue;
        for (int j = 0; j < bq.size(); ++j) {
            if (rq(0, j) == 0.0) continue;
            std::vector<int> e(static_cast<size_t>(nv));
            for (int v = 0; v < nv; ++v)
                e[static_cast<size_t>(v)] = bp.index(i).exponents[static_cast<size_t>(v)] +
                                            bq.index(j).exponents[static_cast<size_t>(v)];
            out_raw(target->position(MultiIndex(e))) += rp(0, i) * rq(0, j);
        }
    }
    Eigen::MatrixXd coeffs(1, target->size());
    for (int i = 0; i < target->size(); ++i) coeffs(0, i) = out_raw(i) / target->weight(i);
    return PolyTuple::from_coeffs(target, std::move(coeffs));
}

SpherePoint stereographic_lift(const Eigen::VectorXd& x) {
    const int n = static_cast<int>(x.size());
    Eigen::VectorXd u(n + 1);
    const double s = std::sqrt(1.0 + x.squaredNorm());
    u(0) = 1.0 / s;
    u.tail(n) = x / s;
    return SpherePoint(u);
}

Eigen::MatrixXd sphere_tangent_basis(const Eigen::VectorXd& u) {
    const int m = static_cast<int>(u.size());
    // Householder reflection mapping e_0 to -sign(u_0) u; its remaining
    // columns form an orthonormal basis of u^perp.
    Eigen::VectorXd v = u;
    const double sign = (u(0) >= 0.0) ? 1.0 : -1.0;
    v(0) += sign;
    const double vn2 = v.squaredNorm();
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(m, m) - (2.0 / vn2) * (v * v.transpose());
    return H.rightCols(m - 1);
}

void sphere_lift(const PolyTuple& p, const SpherePoint& u, Eigen::VectorXd& value,
                 Eigen::MatrixXd& tangent_jac) {
    const int nv = p.n();
    const int d = p.degree();
    if (u.coords.size() != nv + 1)
        throw NotOnSphere("sphere_lift: point dimension must be n+1");

    Eigen::MatrixXd pows;
    power_table(u.coords, d, pows);  // row 0 is x0, rows 1..n are x_i

    const MonomialBasis& basis = p.basis();
    const int N = basis.size();
    Eigen::VectorXd mono(N);
    Eigen::MatrixXd dmono(N, nv + 1);
    for (int i = 0; i < N; ++i) {
        const MultiIndex& mi = basis.index(i);
        const double w = basis.weight(i);
        const int e0 = d - mi.total_degree();
        double m = w * pows(0, e0);
        for (int v = 0; v < nv; ++v) m *= pows(v + 1, mi.exponents[static_cast<size_t>(v)]);
        mono(i) = m;
        for (int v = 0; v <= nv; ++v) {
            const int ev = (v == 0) ? e0 : mi.exponents[static_cast<size_t>(v - 1)];
            if (ev == 0) {
                dmono(i, v) = 0.0;
                continue;
            }
            double dm = w * ev;
            for (int uvar = 0; uvar <= nv; ++uvar) {
                const int eu = ((uvar == 0) ? e0 : mi.exponents[static_cast<size_t>(uvar - 1)]) -
                               (uvar == v ? 1 : 0);
                dm *= pows(uvar, eu);
            }
            dmono(i, v) = dm;
        }
    }
    value = p.coeffs() * mono;
    const Eigen::MatrixXd ambient_jac = p.coeffs() * dmono;  // c x (n+1)
    tangent_jac = ambient_jac * sphere_tangent_basis(u.coords);
}

double sigma_min(const Eigen::MatrixXd& m) {
    if (m.rows() > m.cols()) return 0.0;
    if (m.cols() == 0 || m.rows() == 0) return 0.0;
    if (m.rows() == 1) return m.row(0).norm();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues().tail(1)(0);
}

}  // namespace vartest
