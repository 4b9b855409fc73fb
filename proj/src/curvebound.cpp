#include "qcompress/curvebound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "qcompress/algebra.hpp"
#include "qcompress/errors.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

namespace {

constexpr double kPi = 3.14159265358979323846;

template <class Vec>
Vec poly_from_roots(const Vec& roots) {
    // index = power of x, monic
    Vec c = Vec::Zero(roots.size() + 1);
    c(0) = 1;
    for (Eigen::Index i = 0; i < roots.size(); ++i) {
        for (Eigen::Index a = i + 1; a >= 1; --a) c(a) = c(a - 1) - roots(i) * c(a);
        c(0) = -roots(i) * c(0);
    }
    return c;
}

double chebyshev_node(int j, int m) { return std::cos(kPi * (j + 0.5) / m); }

// Least-squares fit of values(j, a) = sum_b coef(a, b) t_j^b, b <= degree - a.
rmat fit_in_z(const std::vector<double>& t, const rmat& values, int degree) {
    const int m = static_cast<int>(t.size());
    rmat vander(m, degree + 1);
    for (int j = 0; j < m; ++j)
        for (int b = 0; b <= degree; ++b) vander(j, b) = std::pow(t[j], b);
    const rmat sol = vander.colPivHouseholderQr().solve(values);  // (degree+1) x (degree+1)
    rmat c = rmat::Zero(degree + 1, degree + 1);
    for (int a = 0; a <= degree; ++a)
        for (int b = 0; a + b <= degree; ++b) c(a, b) = sol(b, a);
    c(degree, 0) = 1;
    return c;
}

struct Deriv {
    cplx q, qx, qz, qxx, qxz;
};

Deriv eval_deriv(const rmat& c, cplx x, cplx z) {
    const int n = static_cast<int>(c.rows()) - 1, m = static_cast<int>(c.cols()) - 1;
    std::vector<cplx> px(n + 1), pz(m + 1);
    px[0] = pz[0] = 1;
    for (int a = 1; a <= n; ++a) px[a] = px[a - 1] * x;
    for (int b = 1; b <= m; ++b) pz[b] = pz[b - 1] * z;
    Deriv d{0, 0, 0, 0, 0};
    for (int a = 0; a <= n; ++a)
        for (int b = 0; b <= m; ++b) {
            const double v = c(a, b);
            if (v == 0) continue;
            d.q += v * px[a] * pz[b];
            if (a >= 1) d.qx += v * double(a) * px[a - 1] * pz[b];
            if (b >= 1) d.qz += v * double(b) * px[a] * pz[b - 1];
            if (a >= 2) d.qxx += v * double(a * (a - 1)) * px[a - 2] * pz[b];
            if (a >= 1 && b >= 1) d.qxz += v * double(a * b) * px[a - 1] * pz[b - 1];
        }
    return d;
}

cvec x_coeffs(const rmat& c, cplx z) {
    const int n = static_cast<int>(c.rows()) - 1;
    cvec out = cvec::Zero(n + 1);
    for (int a = 0; a <= n; ++a) {
        cplx s = 0;
        for (int b = static_cast<int>(c.cols()) - 1; b >= 0; --b) s = s * z + c(a, b);
        out(a) = s;
    }
    return out;
}

cvec companion_roots(const cvec& coeffs) {
    int n = static_cast<int>(coeffs.size()) - 1;
    const cplx lead = coeffs(n);
    if (n == 0) return cvec(0);
    if (n == 1) return cvec::Constant(1, -coeffs(0) / lead);
    cmat comp = cmat::Zero(n, n);
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1;
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -coeffs(i) / lead;
    Eigen::ComplexEigenSolver<cmat> es(comp, false);
    return es.eigenvalues();
}

// Roots of a real-z slice, sorted ascending (real parts).
rvec real_slice_roots(const DeterminantalCurve& curve, double t) {
    rvec r;
    if (curve.e1.size()) {
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(curve.e1 + t * curve.e2), Eigen::EigenvaluesOnly);
        r = es.eigenvalues();
    } else {
        r = companion_roots(x_coeffs(curve.coefficients, t)).real();
    }
    std::sort(r.data(), r.data() + r.size());
    return r;
}

// Degree of gcd(p, p_x) on a real slice: the number of sorted roots that
// coincide with their predecessor within eps relative to the root scale.
std::vector<bool> repeated_roots(const rvec& sorted, double eps) {
    const int n = static_cast<int>(sorted.size());
    std::vector<bool> rep(n, false);
    if (n == 0) return rep;
    const double s = 1 + sorted.cwiseAbs().maxCoeff();
    for (int i = 1; i < n; ++i) rep[i] = sorted(i) - sorted(i - 1) <= eps * s;
    return rep;
}

int gcd_degree(const rvec& sorted, double eps) {
    const auto rep = repeated_roots(sorted, eps);
    return static_cast<int>(std::count(rep.begin(), rep.end(), true));
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); }
    void join(int a, int b) { parent[find(a)] = find(b); }
};

// Nearest-neighbour bijection; fails when any match is ambiguous.
bool match_roots(const cvec& from, const cvec& to, double ratio, std::vector<int>& perm) {
    const int n = static_cast<int>(from.size());
    perm.assign(n, -1);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
        int j1 = -1;
        for (int j = 0; j < n; ++j) {
            const double d = std::abs(from(i) - to(j));
            if (d < d1) {
                d2 = d1;
                d1 = d;
                j1 = j;
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (n > 1 && !(d1 < ratio * d2)) return false;
        if (used[j1]) return false;
        used[j1] = true;
        perm[i] = j1;
    }
    return true;
}

struct Piece {
    bool arc = false;
    cplx a, b;                 // segment ends
    cplx center;
    double radius = 0, theta0 = 0, sweep = 0;

    cplx at(double s) const {
        if (!arc) return a + s * (b - a);
        return center + radius * std::polar(1.0, theta0 + s * sweep);
    }
    double length() const { return arc ? radius * std::abs(sweep) : std::abs(b - a); }
    Piece reversed() const {
        Piece p = *this;
        if (arc) {
            p.theta0 = theta0 + sweep;
            p.sweep = -sweep;
        } else {
            std::swap(p.a, p.b);
        }
        return p;
    }
};

Piece segment(cplx a, cplx b) {
    Piece p;
    p.a = a;
    p.b = b;
    return p;
}

Piece arc(cplx center, double radius, double theta0, double sweep) {
    Piece p;
    p.arc = true;
    p.center = center;
    p.radius = radius;
    p.theta0 = theta0;
    p.sweep = sweep;
    return p;
}

class Tracker {
public:
    Tracker(const rmat& q, const cmat* e1, const cmat* e2, const MonodromySettings& s, MonodromyDiagnostics& diag)
        : q_(q), e1_(e1), e2_(e2), s_(s), diag_(diag) {}

    cvec roots_at(cplx z) const {
        cvec slopes;
        return sample(z, slopes);
    }

    // Roots at z and their derivatives dx/dz.
    cvec sample(cplx z, cvec& slopes) const {
        cvec r;
        if (e1_) {
            // eigenvalues of the pencil; slopes from left and right eigenvectors
            Eigen::ComplexEigenSolver<cmat> es(*e1_ + z * *e2_, true);
            r = es.eigenvalues();
            const cmat& v = es.eigenvectors();
            Eigen::PartialPivLU<cmat> lu(v);
            slopes = lu.solve(*e2_ * v).diagonal();
            return r;
        }
        r = companion_roots(x_coeffs(q_, z));
        slopes.resize(r.size());
        for (Eigen::Index i = 0; i < r.size(); ++i) {
            Deriv d = eval_deriv(q_, r(i), z);
            if (std::abs(d.qx) > 0) {
                const cplx nx = r(i) - d.q / d.qx;
                const Deriv dn = eval_deriv(q_, nx, z);
                if (std::abs(dn.q) < std::abs(d.q)) {
                    r(i) = nx;
                    d = dn;
                }
            }
            slopes(i) = std::abs(d.qx) > 0 ? -d.qz / d.qx : cplx(0);
        }
        return r;
    }

    void track(cvec& x, const Piece& piece) {
        const double ds0 = 1.0 / std::max(s_.min_steps, 1);
        const double floor = ds0 * std::ldexp(1.0, -s_.max_halvings);
        double s = 0, ds = ds0;
        std::vector<int> perm, align;
        cvec slopes, next_slopes;
        // slopes at the start, ordered like x
        const cvec start = sample(piece.at(0), slopes);
        if (!match_roots(x, start, s_.match_ratio, align))
            throw NumericError("root tracking could not start a path piece");
        cvec dx(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            x(i) = start(align[i]);
            dx(i) = slopes(align[i]);
        }
        while (s < 1.0) {
            const double h = std::min(ds, 1.0 - s);
            const cplx za = piece.at(s), zb = piece.at(s + h);
            const cvec pred = x + dx * (zb - za);
            const cvec next = sample(zb, next_slopes);
            ++diag_.steps;
            if (match_roots(pred, next, s_.match_ratio, perm)) {
                for (Eigen::Index i = 0; i < x.size(); ++i) {
                    x(i) = next(perm[i]);
                    dx(i) = next_slopes(perm[i]);
                }
                s += h;
                ds = std::min(ds * 2, ds0);
            } else {
                ds /= 2;
                ++diag_.halvings;
                if (ds < floor) {
                    std::ostringstream os;
                    os << "root tracking ambiguous near z = " << za << " after " << s_.max_halvings
                       << " step halvings";
                    throw NumericError(os.str());
                }
            }
        }
    }

    std::vector<int> loop_permutation(const cvec& base, const std::vector<Piece>& path) {
        cvec x = base;
        for (const auto& p : path) track(x, p);
        std::vector<int> perm;
        if (!match_roots(x, base, s_.match_ratio, perm))
            throw NumericError("loop did not return to the base fibre");
        return perm;
    }

private:
    const rmat& q_;
    const cmat* e1_;
    const cmat* e2_;
    const MonodromySettings& s_;
    MonodromyDiagnostics& diag_;
};

// Roots of the x-discriminant of q in z.
std::vector<cplx> discriminant_roots(const Tracker& tr, int n, const MonodromySettings& s, double radius) {
    const int npts = n * (n - 1) + s.disc_extra_points;
    std::vector<cplx> vals(npts);
    for (int k = 0; k < npts; ++k) {
        const cplx z = radius * std::polar(1.0, 2 * kPi * k / npts);
        const cvec r = tr.roots_at(z);
        cplx v = 1;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) v *= (r(i) - r(j)) * (r(i) - r(j));
        vals[k] = v;
    }
    cvec c(npts);
    double big = 0;
    for (int m = 0; m < npts; ++m) {
        cplx acc = 0;
        for (int k = 0; k < npts; ++k) acc += vals[k] * std::polar(1.0, -2 * kPi * double(m) * k / npts);
        c(m) = acc / double(npts);  // scaled coefficient c_m radius^m
        big = std::max(big, std::abs(c(m)));
    }
    int deg = npts - 1;
    while (deg > 0 && std::abs(c(deg)) <= 1e-10 * big) --deg;
    if (deg == 0) return {};
    const cvec roots = companion_roots(c.head(deg + 1));
    std::vector<cplx> out;
    for (Eigen::Index i = 0; i < roots.size(); ++i) out.push_back(roots(i) * radius);
    return out;
}

// Branch-point candidates of a pencil with simple spectrum at z = shift:
// restricted to antisymmetric tensors, (M(z) (x) 1 - 1 (x) M(z))^2 has the
// eigenvalues (x_i - x_j)^2, so its determinant is the discriminant. The
// quadratic eigenvalue problem is solved in w = 1/(z - shift), where the
// leading coefficient is invertible.
std::vector<cplx> pencil_discriminant_roots(const cmat& e1, const cmat& e2, double shift) {
    const int d = static_cast<int>(e1.rows());
    const int np = d * (d - 1) / 2;
    const cmat id = cmat::Identity(d, d);
    const cmat k1 = kron(e1, id) - kron(id, e1), k2 = kron(e2, id) - kron(id, e2);
    cmat proj = cmat::Zero(d * d, np);
    int col = 0;
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j, ++col) {
            proj(i * d + j, col) = 1 / std::sqrt(2.0);
            proj(j * d + i, col) = -1 / std::sqrt(2.0);
        }
    const cmat q0 = proj.adjoint() * k1 * k1 * proj;
    const cmat q1 = proj.adjoint() * (k1 * k2 + k2 * k1) * proj;
    const cmat q2 = proj.adjoint() * k2 * k2 * proj;
    const cmat a2 = q0 + shift * q1 + shift * shift * q2;
    const cmat a1 = q1 + 2 * shift * q2;
    Eigen::PartialPivLU<cmat> lu(a2);
    cmat comp = cmat::Zero(2 * np, 2 * np);
    comp.topRightCorner(np, np) = cmat::Identity(np, np);
    comp.bottomLeftCorner(np, np) = -lu.solve(q2);
    comp.bottomRightCorner(np, np) = -lu.solve(a1);
    Eigen::ComplexEigenSolver<cmat> es(comp, false);
    const cvec w = es.eigenvalues();
    const double top = std::max(1e-300, w.cwiseAbs().maxCoeff());
    std::vector<cplx> out;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (std::abs(w(i)) > 1e-10 * top) out.push_back(shift + 1.0 / w(i));
    return out;
}

std::vector<cplx> merge_points(const std::vector<cplx>& pts, double rel) {
    const int n = static_cast<int>(pts.size());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(pts[i] - pts[j]) <= rel * (1 + std::max(std::abs(pts[i]), std::abs(pts[j])))) uf.join(i, j);
    std::vector<cplx> sum(n, 0.0);
    std::vector<int> cnt(n, 0);
    for (int i = 0; i < n; ++i) {
        sum[uf.find(i)] += pts[i];
        ++cnt[uf.find(i)];
    }
    std::vector<cplx> out;
    for (int i = 0; i < n; ++i)
        if (cnt[i]) out.push_back(sum[i] / double(cnt[i]));
    return out;
}

// Newton on (q, q_x) = 0 from the closest root pair at z.
cplx polish_branch_point(const Tracker& tr, const rmat& q, cplx z, double limit) {
    const cvec r = tr.roots_at(z);
    if (r.size() < 2) return z;
    double best = std::numeric_limits<double>::infinity();
    cplx x = r(0);
    for (Eigen::Index i = 0; i < r.size(); ++i)
        for (Eigen::Index j = i + 1; j < r.size(); ++j)
            if (std::abs(r(i) - r(j)) < best) {
                best = std::abs(r(i) - r(j));
                x = (r(i) + r(j)) / 2.0;
            }
    cplx zz = z;
    for (int it = 0; it < 30; ++it) {
        const Deriv d = eval_deriv(q, x, zz);
        const cplx det = d.qx * d.qxz - d.qz * d.qxx;
        if (std::abs(det) == 0) break;
        const cplx dx = (d.qxz * d.q - d.qz * d.qx) / det;
        const cplx dz = (d.qx * d.qx - d.qxx * d.q) / det;
        x -= dx;
        zz -= dz;
        if (!std::isfinite(std::abs(zz)) || std::abs(zz - z) > limit) return z;
        if (std::abs(dz) < 1e-15 * (1 + std::abs(zz))) return zz;
    }
    return std::abs(zz - z) <= limit ? zz : z;
}

bool same_perm(const std::vector<int>& a, const std::vector<int>& b) { return a == b; }

std::vector<int> compose_perm(const std::vector<int>& first, const std::vector<int>& second) {
    std::vector<int> out(first.size());
    for (std::size_t i = 0; i < first.size(); ++i) out[i] = second[first[i]];
    return out;
}

// Straight path from a to b that bends around the disks it would cross.
std::vector<Piece> tail_path(cplx a, cplx b, const std::vector<cplx>& centers, const std::vector<double>& radii,
                             const std::vector<bool>& skip) {
    const double len = std::abs(b - a);
    const cplx dir = (b - a) / len;
    struct Detour {
        double s1, s2;
        int c;
    };
    std::vector<Detour> dets;
    for (std::size_t c = 0; c < centers.size(); ++c) {
        if (skip[c] || std::abs(centers[c] - a) <= radii[c] || std::abs(centers[c] - b) <= radii[c]) continue;
        const cplx rel = (centers[c] - a) * std::conj(dir);
        const double s = rel.real(), h = rel.imag(), rad = radii[c];
        if (std::abs(h) >= rad) continue;
        const double w = std::sqrt(rad * rad - h * h);
        if (s + w <= 0 || s - w >= len) continue;
        dets.push_back({s - w, s + w, static_cast<int>(c)});
    }
    std::sort(dets.begin(), dets.end(), [](const Detour& x, const Detour& y) { return x.s1 < y.s1; });
    std::vector<Piece> out;
    double pos = 0;
    for (const auto& d : dets) {
        const cplx entry = a + d.s1 * dir, exit = a + d.s2 * dir;
        if (d.s1 > pos) out.push_back(segment(a + pos * dir, entry));
        const double a1 = std::arg(entry - centers[d.c]), a2 = std::arg(exit - centers[d.c]);
        // the short arc keeps the point on the same side as the straight line
        double cw = std::fmod(a1 - a2, 2 * kPi);
        if (cw < 0) cw += 2 * kPi;
        out.push_back(arc(centers[d.c], radii[d.c], a1, cw < kPi ? -cw : 2 * kPi - cw));
        pos = d.s2;
    }
    if (pos < len) out.push_back(segment(a + pos * dir, b));
    return out;
}

}  // namespace

DeterminantalCurve extract_curve(const cmat& e1, const cmat& e2) {
    if (e1.rows() != e1.cols() || e2.rows() != e2.cols() || e1.rows() != e2.rows())
        throw DimensionMismatch("pencil matrices must be square of equal size");
    const int dim = static_cast<int>(e1.rows());
    if (dim == 0) throw DimensionMismatch("empty pencil");
    const double scale = 1 + std::max(max_abs(e1), max_abs(e2));
    if (!is_hermitian(e1, 1e-9 * scale) || !is_hermitian(e2, 1e-9 * scale))
        throw NumericError("pencil matrices must be Hermitian");
    DeterminantalCurve curve;
    curve.degree = dim;
    curve.e1 = e1;
    curve.e2 = e2;
    const int m = dim + 1;
    std::vector<double> t(m);
    rmat values(m, dim + 1);
    for (int j = 0; j < m; ++j) {
        t[j] = chebyshev_node(j, m);
        values.row(j) = poly_from_roots<rvec>(real_slice_roots(curve, t[j])).transpose();
    }
    curve.coefficients = fit_in_z(t, values, dim);
    return curve;
}

cplx evaluate_curve(const rmat& c, cplx x, cplx z) { return eval_deriv(c, x, z).q; }

namespace {

FactorizationResult factor_single(const DeterminantalCurve& curve, const MonodromySettings& settings,
                                  const Tolerances& tol) {
    FactorizationResult res;
    auto& diag = res.diagnostics;
    const int dim = curve.degree;
    const bool have_pencil = curve.e1.size() > 0;

    // squarefree part
    const int ncand = 4 * (dim + 1);
    std::vector<double> tc(ncand);
    std::vector<rvec> slices(ncand);
    std::vector<int> gdeg(ncand);
    int k = dim;
    for (int j = 0; j < ncand; ++j) {
        tc[j] = chebyshev_node(j, ncand) * (1 + 0.1 * (j % 3));
        slices[j] = real_slice_roots(curve, tc[j]);
        gdeg[j] = gcd_degree(slices[j], tol.gcd);
        k = std::min(k, gdeg[j]);
    }
    const int n = dim - k;
    diag.gcd_degree = k;
    diag.squarefree_degree = n;
    rmat q;
    if (k == 0) {
        q = curve.coefficients;
    } else {
        std::vector<double> good_t;
        std::vector<rvec> good_rows;
        for (int j = 0; j < ncand; ++j) {
            if (gdeg[j] != k) continue;
            const rvec& r = slices[j];
            const auto rep = repeated_roots(r, tol.gcd);
            rvec means(n);
            int idx = -1;
            std::vector<int> count(n, 0);
            means.setZero();
            for (int i = 0; i < dim; ++i) {
                if (!rep[i]) ++idx;
                means(idx) += r(i);
                ++count[idx];
            }
            for (int i = 0; i < n; ++i) means(i) /= count[i];
            good_t.push_back(tc[j]);
            good_rows.push_back(poly_from_roots<rvec>(means));
        }
        if (static_cast<int>(good_t.size()) < n + 1)
            throw NumericError("squarefree reduction: too few clean slices for interpolation");
        rmat values(good_t.size(), n + 1);
        for (std::size_t j = 0; j < good_t.size(); ++j) values.row(j) = good_rows[j].transpose();
        q = fit_in_z(good_t, values, n);
    }

    const bool use_pencil = have_pencil && k == 0;
    Tracker tr(q, use_pencil ? &curve.e1 : nullptr, use_pencil ? &curve.e2 : nullptr, settings, diag);

    // branch points
    std::vector<cplx> bps;
    if (n >= 2) {
        std::vector<cplx> raw;
        if (use_pencil) {
            // a real shift where the spectrum is simple
            double shift = 0.37, best_gap = -1;
            for (int j = 0; j < ncand; ++j) {
                const rvec& r = slices[j];
                double gap = std::numeric_limits<double>::infinity();
                for (Eigen::Index i = 1; i < r.size(); ++i) gap = std::min(gap, r(i) - r(i - 1));
                gap /= 1 + r.cwiseAbs().maxCoeff();
                if (gap > best_gap) {
                    best_gap = gap;
                    shift = tc[j];
                }
            }
            raw = pencil_discriminant_roots(curve.e1, curve.e2, shift);
        } else {
            // sample the discriminant on a circle that keeps clear of its roots
            raw = discriminant_roots(tr, n, settings, 1.0);
            for (int pass = 0; pass < 2 && !raw.empty(); ++pass) {
                std::vector<double> mags;
                for (auto z : raw) mags.push_back(std::abs(z));
                std::sort(mags.begin(), mags.end());
                const double top = std::clamp(mags.back(), 1e-3, 1e3);
                double best_rad = 1.0, best_gap = -1;
                for (int e = -4; e <= 4; ++e) {
                    const double rad = top * std::pow(2.0, e / 4.0);
                    double gap = std::numeric_limits<double>::infinity();
                    for (double m : mags) gap = std::min(gap, std::abs(m - rad) / rad);
                    if (gap > best_gap) {
                        best_gap = gap;
                        best_rad = rad;
                    }
                }
                raw = discriminant_roots(tr, n, settings, best_rad);
            }
        }
        for (auto& z : raw) z = polish_branch_point(tr, q, z, 1e-3 * (1 + std::abs(z)));
        bps = merge_points(raw, settings.branch_merge);
    }
    res.branch_points = bps;

    double maxb = 0;
    for (auto z : bps) maxb = std::max(maxb, std::abs(z));
    const double big_r = 2 * (1 + maxb);
    const cplx z0 = big_r;
    res.base_point = z0;
    const cvec base = tr.roots_at(z0);

    const int nb = static_cast<int>(bps.size());
    std::vector<double> radii(nb);
    for (int i = 0; i < nb; ++i) {
        double nn = std::abs(bps[i] - z0);
        for (int j = 0; j < nb; ++j)
            if (j != i) nn = std::min(nn, std::abs(bps[i] - bps[j]));
        radii[i] = settings.lasso_fraction * nn;
    }

    UnionFind uf(n);
    std::vector<std::vector<int>> lasso(nb);
    std::vector<int> identity(n);
    std::iota(identity.begin(), identity.end(), 0);
    for (int i = 0; i < nb; ++i) {
        const cplx toward = (z0 - bps[i]) / std::abs(z0 - bps[i]);
        const cplx start = bps[i] + radii[i] * toward;
        std::vector<bool> skip(nb, false);
        skip[i] = true;
        std::vector<Piece> path = tail_path(z0, start, bps, radii, skip);
        const std::size_t tail = path.size();
        path.push_back(arc(bps[i], radii[i], std::arg(toward), 2 * kPi));
        for (std::size_t p = tail; p-- > 0;) path.push_back(path[p].reversed());
        lasso[i] = tr.loop_permutation(base, path);
        ++diag.loops;
        if (lasso[i] == identity) ++diag.trivial_loops;
        for (int a = 0; a < n; ++a) uf.join(a, lasso[i][a]);
    }

    // Points of a high-order branch point scatter into a small cloud, so
    // isolated clouds also get one loop around the whole cloud. Every closed
    // loop acts by an element of the monodromy group, so extra loops are safe.
    if (nb >= 3) {
        std::vector<std::vector<int>> seen;
        const double scale = 1 + maxb;
        for (double t = 1e-9 * scale; t < 4 * scale; t *= 2) {
            UnionFind g(nb);
            for (int i = 0; i < nb; ++i)
                for (int j = i + 1; j < nb; ++j)
                    if (std::abs(bps[i] - bps[j]) <= t) g.join(i, j);
            std::vector<std::vector<int>> comps(nb);
            for (int i = 0; i < nb; ++i) comps[g.find(i)].push_back(i);
            for (const auto& comp : comps) {
                if (comp.size() < 2 || static_cast<int>(comp.size()) == nb) continue;
                if (std::find(seen.begin(), seen.end(), comp) != seen.end()) continue;
                cplx c = 0;
                for (int i : comp) c += bps[i];
                c /= double(comp.size());
                double r_in = 0, r_out = std::abs(z0 - c);
                std::vector<bool> member(nb, false);
                for (int i : comp) {
                    member[i] = true;
                    r_in = std::max(r_in, std::abs(bps[i] - c));
                }
                for (int i = 0; i < nb; ++i)
                    if (!member[i]) r_out = std::min(r_out, std::abs(bps[i] - c));
                if (r_out <= 2 * r_in) continue;
                seen.push_back(comp);
                const double rho = std::sqrt(std::max(r_in, 1e-12 * scale) * r_out);
                const cplx toward = (z0 - c) / std::abs(z0 - c);
                std::vector<Piece> path = tail_path(z0, c + rho * toward, bps, radii, member);
                const std::size_t tail = path.size();
                path.push_back(arc(c, rho, std::arg(toward), 2 * kPi));
                for (std::size_t p = tail; p-- > 0;) path.push_back(path[p].reversed());
                const std::vector<int> perm = tr.loop_permutation(base, path);
                ++diag.loops;
                ++diag.cluster_loops;
                for (int a = 0; a < n; ++a) uf.join(a, perm[a]);
            }
        }
    }

    // the big circle must equal the ordered product of the small loops
    const std::vector<int> outer = tr.loop_permutation(base, {arc(0.0, big_r, 0.0, 2 * kPi)});
    ++diag.loops;
    {
        std::vector<int> order(nb);
        std::iota(order.begin(), order.end(), 0);
        auto angle = [&](int i) {
            double a = std::arg(bps[i] - z0);
            return a < 0 ? a + 2 * kPi : a;
        };
        std::sort(order.begin(), order.end(), [&](int a, int b) { return angle(a) < angle(b); });
        bool ok = false;
        for (int dir = 0; dir < 2 && !ok; ++dir) {
            std::vector<int> seq = order;
            if (dir) std::reverse(seq.begin(), seq.end());
            std::vector<int> prod = identity, prod_rev = identity;
            for (int i : seq) {
                prod = compose_perm(prod, lasso[i]);
                prod_rev = compose_perm(lasso[i], prod_rev);
            }
            ok = same_perm(prod, outer) || same_perm(prod_rev, outer);
        }
        diag.loop_product_consistent = ok;
        if (!ok) diag.notes += "outer loop differs from the product of the small loops; ";
    }

    // multiplicities: distribute the roots of p at the base point
    rvec proots = real_slice_roots(curve, z0.real());
    std::vector<int> mult(n, 0);
    for (Eigen::Index i = 0; i < proots.size(); ++i) {
        int best = 0;
        for (int j = 1; j < n; ++j)
            if (std::abs(base(j) - proots(i)) < std::abs(base(best) - proots(i))) best = j;
        ++mult[best];
    }

    std::vector<std::vector<int>> members;
    std::vector<int> orbit_of(n, -1);
    for (int a = 0; a < n; ++a) {
        const int r = uf.find(a);
        int id = -1;
        for (std::size_t o = 0; o < members.size(); ++o)
            if (uf.find(members[o][0]) == r) id = static_cast<int>(o);
        if (id < 0) {
            id = static_cast<int>(members.size());
            members.push_back({});
        }
        members[id].push_back(a);
        orbit_of[a] = id;
    }

    const double xscale = 1 + base.cwiseAbs().maxCoeff();
    std::vector<int> conj_orbit(members.size(), -1);
    for (std::size_t o = 0; o < members.size(); ++o) {
        std::vector<int> targets;
        for (int a : members[o]) {
            int best = 0;
            for (int j = 1; j < n; ++j)
                if (std::abs(base(j) - std::conj(base(a))) < std::abs(base(best) - std::conj(base(a)))) best = j;
            if (std::abs(base(best) - std::conj(base(a))) > 1e3 * tol.root * xscale)
                diag.notes += "conjugate root not found at the base point; ";
            targets.push_back(orbit_of[best]);
        }
        conj_orbit[o] = targets.empty() ? static_cast<int>(o) : targets[0];
    }

    std::vector<bool> done(members.size(), false);
    for (std::size_t o = 0; o < members.size(); ++o) {
        Orbit orb;
        orb.size = static_cast<int>(members[o].size());
        orb.multiplicity = mult[members[o][0]];
        for (int a : members[o])
            if (mult[a] != orb.multiplicity) diag.notes += "multiplicity varies inside an orbit; ";
        orb.self_conjugate = conj_orbit[o] == static_cast<int>(o);
        res.orbits.push_back(orb);
        for (int m = 0; m < orb.multiplicity; ++m) res.complex_orbit_sizes.push_back(orb.size);
        if (done[o]) continue;
        done[o] = true;
        int degree = orb.size;
        if (!orb.self_conjugate) {
            degree *= 2;
            done[conj_orbit[o]] = true;
        }
        for (int m = 0; m < orb.multiplicity; ++m) res.real_factor_degrees.push_back(degree);
    }
    std::sort(res.complex_orbit_sizes.begin(), res.complex_orbit_sizes.end());
    std::sort(res.real_factor_degrees.begin(), res.real_factor_degrees.end());
    res.min_real_degree = res.real_factor_degrees.empty() ? 0 : res.real_factor_degrees.front();
    if (std::accumulate(res.real_factor_degrees.begin(), res.real_factor_degrees.end(), 0) != dim)
        diag.notes += "factor degrees do not partition the curve degree; ";

    // hyperbolicity of the squarefree part on seeded real slices
    Rng rng(0x6879706572ULL);
    for (int s = 0; s < 20; ++s) {
        const double t = big_r * rng.normal();
        const cvec r = companion_roots(x_coeffs(q, t));
        const double sc = 1 + r.cwiseAbs().maxCoeff();
        diag.max_imag_on_real_slices = std::max(diag.max_imag_on_real_slices, r.imag().cwiseAbs().maxCoeff() / sc);
    }
    diag.hyperbolic = diag.max_imag_on_real_slices <= tol.root;
    return res;
}

}  // namespace

// det[x - E1 - z E2] of a block-diagonal pencil is the product of the block
// curves, so a reducible pencil is factored one distinct block at a time.
// This keeps crossings between eigenvalues of different blocks, which are
// nodes of the curve rather than branch points, out of the tracking.
FactorizationResult factor_by_monodromy(const DeterminantalCurve& curve, const MonodromySettings& settings,
                                        const Tolerances& tol) {
    if (!settings.split_blocks || curve.e1.size() == 0 || curve.degree < 2) return factor_single(curve, settings, tol);
    ObservableSet pencil;
    try {
        pencil = make_observable_set({curve.e1, curve.e2}, tol);
    } catch (const ParseError&) {
        return factor_single(curve, settings, tol);
    }
    const BlockStructure bs = block_diagonalize(pencil, 0, 8, tol);
    if (bs.blocks.size() == 1 && bs.blocks[0].multiplicity == 1) return factor_single(curve, settings, tol);
    const ReducedObservableSet red = reduce_multiplicities(pencil, bs, tol);

    FactorizationResult res;
    auto& diag = res.diagnostics;
    diag.loop_product_consistent = true;
    diag.hyperbolic = true;
    std::ostringstream notes;
    notes << "factored per algebra block:";
    for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
        const int m = bs.blocks[i].multiplicity;
        const FactorizationResult sub = factor_single(extract_curve(red.ops[0][i], red.ops[1][i]), settings, tol);
        const auto& sd = sub.diagnostics;
        notes << " (" << bs.blocks[i].dim << "x" << m << ")";
        if (i == 0) res.base_point = sub.base_point;
        for (Orbit o : sub.orbits) {
            o.multiplicity *= m;
            res.orbits.push_back(o);
        }
        for (int t = 0; t < m; ++t) {
            res.complex_orbit_sizes.insert(res.complex_orbit_sizes.end(), sub.complex_orbit_sizes.begin(),
                                           sub.complex_orbit_sizes.end());
            res.real_factor_degrees.insert(res.real_factor_degrees.end(), sub.real_factor_degrees.begin(),
                                           sub.real_factor_degrees.end());
        }
        res.branch_points.insert(res.branch_points.end(), sub.branch_points.begin(), sub.branch_points.end());
        diag.squarefree_degree += sd.squarefree_degree;
        diag.loops += sd.loops;
        diag.steps += sd.steps;
        diag.halvings += sd.halvings;
        diag.trivial_loops += sd.trivial_loops;
        diag.cluster_loops += sd.cluster_loops;
        diag.loop_product_consistent = diag.loop_product_consistent && sd.loop_product_consistent;
        diag.max_imag_on_real_slices = std::max(diag.max_imag_on_real_slices, sd.max_imag_on_real_slices);
        diag.hyperbolic = diag.hyperbolic && sd.hyperbolic;
        if (!sd.notes.empty()) notes << " [" << sd.notes << "]";
    }
    diag.gcd_degree = curve.degree - diag.squarefree_degree;
    diag.notes = notes.str();
    std::sort(res.complex_orbit_sizes.begin(), res.complex_orbit_sizes.end());
    std::sort(res.real_factor_degrees.begin(), res.real_factor_degrees.end());
    res.min_real_degree = res.real_factor_degrees.empty() ? 0 : res.real_factor_degrees.front();
    return res;
}

GeometricBound geometric_lower_bound(const ObservableSet& obs, PairChoice choice, std::uint64_t seed, int draws,
                                     const Tolerances& tol) {
    const int dim = obs.dim;
    GeometricBound best;
    best.bound = 0;
    auto consider = [&](const cmat& e1, const cmat& e2) {
        const DeterminantalCurve curve = extract_curve(e1, e2);
        FactorizationResult f = factor_by_monodromy(curve, {}, tol);
        ++best.draws;
        if (f.min_real_degree > best.bound) {
            best.bound = f.min_real_degree;
            best.e1 = e1;
            best.e2 = e2;
            best.factorization = std::move(f);
        }
    };
    const cmat zero = cmat::Zero(dim, dim);
    if (choice == PairChoice::Given) {
        std::vector<cmat> picked;
        for (const auto& op : obs.operators) {
            const cmat traceless = op - (op.trace() / double(dim)) * cmat::Identity(dim, dim);
            if (max_abs(traceless) > tol.num) picked.push_back(op);
            if (picked.size() == 2) break;
        }
        while (picked.size() < 2) picked.push_back(zero);
        consider(picked[0], picked[1]);
        return best;
    }
    const ObservableSet can = obs.canonical ? obs : canonicalize(obs, tol);
    const std::vector<cmat> ops(can.operators.begin() + 1, can.operators.end());
    if (ops.size() <= 1) {
        consider(ops.empty() ? zero : ops[0], zero);
        return best;
    }
    const Rng root(seed);
    for (int t = 0; t < std::max(draws, 1) && best.bound < dim; ++t) {
        Rng rng = root.split(static_cast<std::uint64_t>(t));
        cmat e1 = zero, e2 = zero;
        for (const auto& op : ops) {
            e1 += rng.normal() * op;
            e2 += rng.normal() * op;
        }
        consider(hermitian_part(e1), hermitian_part(e2));
    }
    return best;
}

std::pair<cmat, cmat> gen_irreducible_example(int dim) {
    if (dim < 1) throw DimensionMismatch("dimension must be positive");
    cmat a = cmat::Zero(dim, dim), b = cmat::Zero(dim, dim);
    for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k) {
            if (j == k) continue;
            a(j, k) = 0.5;
            b(j, k) = j < k ? cplx(0, 0.5) : cplx(0, -0.5);
        }
    return {a, b};
}

std::pair<cmat, cmat> degree3_example() {
    cmat a = cmat::Zero(3, 3), b = cmat::Zero(3, 3);
    a(0, 0) = -1;
    a(1, 1) = -0.5;
    a(2, 2) = 1;
    b(0, 1) = b(1, 0) = -0.5;
    b(1, 2) = b(2, 1) = -std::sqrt(3.0) / 2;
    return {a, b};
}

ExpansionCheck determinant_expansion_check(int dim, const std::vector<double>& xs, const std::vector<double>& eps) {
    const auto [a, b] = gen_irreducible_example(dim);
    ExpansionCheck out;
    const cplx i(0, 1);
    for (double x : xs) {
        const cmat at = x * cmat::Identity(dim, dim) + a + i * b;
        const double xd = std::pow(x, dim);
        const cplx predicted =
            -(i / 2.0) * (double(dim) * std::pow(x, dim - 1) + std::pow(x - 1, dim) - xd);
        std::vector<double> remainders;
        for (double e : eps) {
            ExpansionSample s;
            s.x = x;
            s.eps = e;
            const cplx plus = (at + e * b).determinant(), minus = (at - e * b).determinant();
            s.finite_difference = (plus - minus) / (2 * e);
            s.predicted = predicted;
            s.residual = std::abs(s.finite_difference - predicted);
            s.zeroth_order = std::abs(at.determinant() - xd);
            out.max_residual = std::max(out.max_residual, s.residual);
            remainders.push_back(std::abs(plus - xd - e * predicted));
            out.samples.push_back(s);
        }
        if (remainders.size() >= 2 && remainders[0] > 0 && remainders[1] > 0)
            out.slopes.push_back(std::log10(remainders[0] / remainders[1]) / std::log10(eps[0] / eps[1]));
    }
    return out;
}

}  // namespace qcompress
