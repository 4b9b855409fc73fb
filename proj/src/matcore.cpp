#include "qcompress/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "qcompress/errors.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

double max_abs(const cmat& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const cmat& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
        const cplx& z = m.data()[i];
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
}

bool is_hermitian(const cmat& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

cmat hermitian_part(const cmat& m) { return (m + m.adjoint()) / 2.0; }

cmat direct_sum(const std::vector<cmat>& blocks) {
    Eigen::Index r = 0, c = 0;
    for (const auto& b : blocks) {
        r += b.rows();
        c += b.cols();
    }
    cmat out = cmat::Zero(r, c);
    r = c = 0;
    for (const auto& b : blocks) {
        out.block(r, c, b.rows(), b.cols()) = b;
        r += b.rows();
        c += b.cols();
    }
    return out;
}

cmat kron(const cmat& a, const cmat& b) {
    cmat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

cplx hs_inner(const cmat& a, const cmat& b) { return (a.adjoint() * b).trace(); }

double min_eigenvalue_hermitian(const cmat& h) {
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

rvec hermitian_coords(const cmat& h) {
    const int n = static_cast<int>(h.rows());
    rvec v(n * n);
    int k = 0;
    const double s = std::sqrt(2.0);
    for (int a = 0; a < n; ++a) v(k++) = h(a, a).real();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            v(k++) = s * h(a, b).real();
            v(k++) = -s * h(a, b).imag();
        }
    return v;
}

cmat hermitian_from_coords(const rvec& v, int n) {
    cmat h = cmat::Zero(n, n);
    int k = 0;
    const double s = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < n; ++a) h(a, a) = v(k++);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) {
            double re = v(k++) * s;
            double im = -v(k++) * s;
            h(a, b) = {re, im};
            h(b, a) = {re, -im};
        }
    return h;
}

cvec vec(const cmat& m) {
    return Eigen::Map<const cvec>(m.data(), m.size());
}

cmat unvec(const cvec& v, int rows, int cols) {
    return Eigen::Map<const cmat>(v.data(), rows, cols);
}

ObservableSet make_observable_set(const std::vector<cmat>& ops, const Tolerances& tol) {
    if (ops.empty()) throw DimensionMismatch("observable set is empty");
    ObservableSet obs;
    obs.dim = static_cast<int>(ops.front().rows());
    for (const auto& op : ops) {
        if (op.rows() != obs.dim || op.cols() != obs.dim)
            throw DimensionMismatch("operators do not share a common square dimension");
        if (!all_finite(op)) throw ParseError("operator has non-finite entries");
        if (!is_hermitian(op, tol.herm * std::max(1.0, max_abs(op))))
            throw ParseError("operator is not Hermitian within tolerance");
        obs.operators.push_back(hermitian_part(op));
        if (max_abs(op - cmat::Identity(obs.dim, obs.dim)) <= tol.herm) obs.includes_identity = true;
    }
    return obs;
}

ObservableSet canonicalize(const ObservableSet& obs, const Tolerances& tol) {
    const int d = obs.dim;
    ObservableSet out;
    out.dim = d;
    out.includes_identity = true;
    out.canonical = true;
    out.operators.push_back(cmat::Identity(d, d));

    std::vector<rvec> basis;
    basis.push_back(hermitian_coords(cmat::Identity(d, d)) / std::sqrt(double(d)));
    for (const auto& op : obs.operators) {
        rvec v = hermitian_coords(op);
        const double scale = std::max(1.0, v.norm());
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        if (v.norm() <= tol.rank * scale * 10) continue;
        v.normalize();
        basis.push_back(v);
        out.operators.push_back(hermitian_from_coords(v, d));
    }
    return out;
}

QuantumChannel identity_channel(int dim) {
    return QuantumChannel{dim, dim, 1, {cmat::Identity(dim, dim)}};
}

QuantumChannel depolarizing_channel(int dim) {
    QuantumChannel ch{dim, dim, 1, {}};
    const double s = 1.0 / std::sqrt(double(dim));
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            cmat k = cmat::Zero(dim, dim);
            k(a, b) = s;
            ch.kraus.push_back(k);
        }
    return ch;
}

QuantumChannel conjugation_channel(const cmat& v) {
    return QuantumChannel{static_cast<int>(v.cols()), static_cast<int>(v.rows()), 1, {v}};
}

QuantumChannel random_channel(int dim, int num_kraus, Rng& rng) {
    cmat u = random_unitary(dim * num_kraus, rng);
    QuantumChannel ch{dim, dim, 1, {}};
    for (int k = 0; k < num_kraus; ++k) ch.kraus.push_back(u.block(k * dim, 0, dim, dim));
    return ch;
}

cmat apply_channel(const QuantumChannel& ch, const cmat& rho) {
    if (rho.rows() != ch.dim_in || rho.cols() != ch.dim_in)
        throw DimensionMismatch("state dimension " + std::to_string(rho.rows()) +
                                " does not match channel input " + std::to_string(ch.dim_in));
    cmat out = cmat::Zero(ch.output_size(), ch.output_size());
    for (const auto& k : ch.kraus) out.noalias() += k * rho * k.adjoint();
    return out;
}

QuantumChannel dual_channel(const QuantumChannel& ch) {
    QuantumChannel d{ch.output_size(), ch.dim_in, 1, {}};
    for (const auto& k : ch.kraus) d.kraus.push_back(k.adjoint());
    return d;
}

cmat choi_matrix(const QuantumChannel& ch) {
    const int din = ch.dim_in, dout = ch.output_size();
    cmat tau = cmat::Zero(dout * din, dout * din);
    for (const auto& k : ch.kraus) {
        // column (o, a) of the vector (K (x) 1)|Omega>: entry K(o, a)
        cvec v(dout * din);
        for (int o = 0; o < dout; ++o)
            for (int a = 0; a < din; ++a) v(o * din + a) = k(o, a);
        tau.noalias() += v * v.adjoint();
    }
    return tau / double(din);
}

QuantumChannel channel_from_choi(const cmat& choi, int dim_in, int dim_out, int classical,
                                 double tol) {
    const int dout = dim_out * classical;
    if (choi.rows() != dout * dim_in) throw DimensionMismatch("Choi matrix has the wrong size");
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(choi) * double(dim_in));
    QuantumChannel ch{dim_in, dim_out, classical, {}};
    const double top = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
    for (int i = static_cast<int>(es.eigenvalues().size()) - 1; i >= 0; --i) {
        const double lam = es.eigenvalues()(i);
        if (lam <= tol * top) continue;
        cmat k(dout, dim_in);
        for (int o = 0; o < dout; ++o)
            for (int a = 0; a < dim_in; ++a) k(o, a) = std::sqrt(lam) * es.eigenvectors()(o * dim_in + a, i);
        ch.kraus.push_back(k);
    }
    return ch;
}

QuantumChannel compose(const QuantumChannel& first, const QuantumChannel& second) {
    if (first.output_size() != second.dim_in)
        throw DimensionMismatch("cannot compose channels with mismatched dimensions");
    QuantumChannel out{first.dim_in, second.dim_out, second.classical, {}};
    for (const auto& b : second.kraus)
        for (const auto& a : first.kraus) out.kraus.push_back(b * a);
    return out;
}

QuantumChannel simplify_kraus(const QuantumChannel& ch) {
    return channel_from_choi(choi_matrix(ch), ch.dim_in, ch.dim_out, ch.classical);
}

CptpReport is_cptp(const QuantumChannel& ch, double tol) {
    CptpReport r;
    cmat s = cmat::Zero(ch.dim_in, ch.dim_in);
    for (const auto& k : ch.kraus) s.noalias() += k.adjoint() * k;
    r.tp_residual = max_abs(s - cmat::Identity(ch.dim_in, ch.dim_in));
    r.choi_min_eig = min_eigenvalue_hermitian(choi_matrix(ch));
    r.ok = r.tp_residual <= tol && r.choi_min_eig >= -tol;
    return r;
}

CptpReport is_cptp_choi(const cmat& choi, int dim_in, int dim_out, double tol) {
    CptpReport r;
    cmat marginal = partial_trace(choi, dim_out, dim_in, TraceOut::First) * double(dim_in);
    r.tp_residual = max_abs(marginal - cmat::Identity(dim_in, dim_in));
    r.choi_min_eig = min_eigenvalue_hermitian(choi);
    r.ok = r.tp_residual <= tol && r.choi_min_eig >= -tol;
    return r;
}

cmat transfer_matrix(const QuantumChannel& ch) {
    const int n = ch.dim_in, m = ch.output_size();
    cmat t = cmat::Zero(m * m, n * n);
    for (const auto& k : ch.kraus) t.noalias() += kron(k.conjugate(), k);
    return t;
}

namespace {

// Orthonormal basis of the numerical null space of m, of prescribed dimension.
cmat null_basis(const cmat& m, int dim) {
    Eigen::JacobiSVD<cmat> svd(m, Eigen::ComputeFullV);
    const int n = static_cast<int>(m.cols());
    return svd.matrixV().rightCols(dim).leftCols(std::min(dim, n));
}

}  // namespace

cmat cesaro_mean(const cmat& tm, const Tolerances& tol) {
    const int n = static_cast<int>(tm.rows());
    if (tm.cols() != n) throw DimensionMismatch("transfer matrix must be square");
    Eigen::ComplexSchur<cmat> schur(tm);
    const cvec ev = schur.matrixT().diagonal();
    const double radius = ev.cwiseAbs().maxCoeff();
    if (radius > 1.0 + 1e-6)
        throw NumericError("spectral radius " + std::to_string(radius) +
                           " exceeds 1; not the transfer matrix of a unital positive map");
    int k = 0;
    for (int i = 0; i < n; ++i)
        if (std::abs(ev(i) - 1.0) <= tol.cluster) ++k;
    if (k == 0) return cmat::Zero(n, n);
    const cmat shifted = tm - cmat::Identity(n, n);
    cmat right = null_basis(shifted, k);
    cmat left = null_basis(shifted.adjoint(), k);
    cmat overlap = left.adjoint() * right;
    return right * overlap.fullPivLu().solve(left.adjoint());
}

cmat partial_trace(const cmat& m, int d1, int d2, TraceOut which) {
    if (m.rows() != d1 * d2 || m.cols() != d1 * d2)
        throw DimensionMismatch("partial trace: matrix side is not d1*d2");
    if (which == TraceOut::Second) {
        cmat r = cmat::Zero(d1, d1);
        for (int i = 0; i < d1; ++i)
            for (int j = 0; j < d1; ++j)
                for (int k = 0; k < d2; ++k) r(i, j) += m(i * d2 + k, j * d2 + k);
        return r;
    }
    cmat r = cmat::Zero(d2, d2);
    for (int i = 0; i < d2; ++i)
        for (int j = 0; j < d2; ++j)
            for (int k = 0; k < d1; ++k) r(i, j) += m(k * d2 + i, k * d2 + j);
    return r;
}

}  // namespace qcompress
