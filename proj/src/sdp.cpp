#include "qcompress/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace qcompress {

namespace {

using Mat = Eigen::MatrixXd;
using Blocks = std::vector<Mat>;

double inner(const Blocks& a, const Blocks& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i].cwiseProduct(b[i]).sum();
    return s;
}

double fro(const Blocks& a) { return std::sqrt(inner(a, a)); }

Blocks scaled_identity(const std::vector<int>& sizes, double v) {
    Blocks out;
    for (int n : sizes) out.push_back(v * Mat::Identity(n, n));
    return out;
}

Blocks zeros(const std::vector<int>& sizes) { return scaled_identity(sizes, 0.0); }

void axpy(Blocks& y, double alpha, const Blocks& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

Blocks a_adjoint(const SdpProblem& p, const Eigen::VectorXd& y) {
    Blocks out = zeros(p.block_sizes);
    for (std::size_t k = 0; k < p.a.size(); ++k)
        if (y(k) != 0) axpy(out, y(k), p.a[k]);
    return out;
}

Eigen::VectorXd a_apply(const SdpProblem& p, const Blocks& x) {
    Eigen::VectorXd v(p.a.size());
    for (std::size_t k = 0; k < p.a.size(); ++k) v(k) = inner(p.a[k], x);
    return v;
}

// Largest step alpha with x + alpha*dx >= 0 (infinity when unbounded).
bool max_step(const Blocks& x, const Blocks& dx, double& alpha) {
    alpha = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i) {
        Eigen::LLT<Mat> llt(x[i]);
        if (llt.info() != Eigen::Success) return false;
        Mat l = llt.matrixL();
        Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(l.rows(), l.cols()));
        Mat m = linv * dx[i] * linv.transpose();
        m = (m + m.transpose()) / 2;
        Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues().minCoeff();
        if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
    }
    return true;
}

}  // namespace

Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& h) {
    const auto n = h.rows();
    Mat m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = h.real();
    m.topRightCorner(n, n) = -h.imag();
    m.bottomLeftCorner(n, n) = h.imag();
    m.bottomRightCorner(n, n) = h.real();
    return m;
}

Eigen::MatrixXcd complex_from_embedding(const Eigen::MatrixXd& m) {
    const auto n = m.rows() / 2;
    Mat re = (m.topLeftCorner(n, n) + m.bottomRightCorner(n, n)) / 2;
    Mat im = (m.bottomLeftCorner(n, n) - m.topRightCorner(n, n)) / 2;
    Eigen::MatrixXcd out(n, n);
    out.real() = re;
    out.imag() = im;
    return out;
}

SdpSolution solve_sdp(const SdpProblem& p, const SdpSettings& settings) {
    SdpSolution sol;
    const int m = static_cast<int>(p.a.size());
    int ntot = 0;
    for (int n : p.block_sizes) ntot += n;

    double scale = std::max(1.0, fro(p.c));
    for (const auto& ak : p.a) scale = std::max(scale, fro(ak));
    double bscale = 1.0;
    for (int k = 0; k < m; ++k) bscale = std::max(bscale, std::abs(p.b(k)));

    Eigen::Index nnz = 0;
    for (int n : p.block_sizes) nnz += Eigen::Index(n) * n;
    Mat aflat(nnz, m);
    for (int k = 0; k < m; ++k) {
        Eigen::Index off = 0;
        for (std::size_t i = 0; i < p.a[k].size(); ++i) {
            const Mat& ai = p.a[k][i];
            aflat.col(k).segment(off, ai.size()) = Eigen::Map<const Eigen::VectorXd>(ai.data(), ai.size());
            off += ai.size();
        }
    }

    Blocks x = scaled_identity(p.block_sizes, 10.0 * bscale);
    Blocks s = scaled_identity(p.block_sizes, 10.0 * scale);
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);
    const double cnorm = fro(p.c), bnorm = p.b.norm();

    for (int it = 0; it <= settings.max_iter; ++it) {
        const Eigen::VectorXd rp = p.b - a_apply(p, x);
        Blocks rd = p.c;
        axpy(rd, -1.0, s);
        axpy(rd, -1.0, a_adjoint(p, y));
        sol.primal_objective = inner(p.c, x);
        sol.dual_objective = p.b.dot(y);
        sol.primal_infeasibility = rp.norm() / (1.0 + bnorm);
        sol.dual_infeasibility = fro(rd) / (1.0 + cnorm);
        sol.relative_gap = std::abs(sol.primal_objective - sol.dual_objective) /
                           (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
        sol.iterations = it;
        const double mu = inner(x, s) / ntot;
        const double mu_rel = mu * ntot / (1.0 + std::abs(sol.primal_objective) + std::abs(sol.dual_objective));
        if (sol.relative_gap <= settings.tol && mu_rel <= settings.tol &&
            sol.primal_infeasibility <= settings.tol && sol.dual_infeasibility <= settings.tol) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (it == settings.max_iter) {
            sol.status = SdpStatus::MaxIterations;
            break;
        }

        Blocks sinv;
        for (const auto& sb : s) {
            Eigen::LLT<Mat> llt(sb);
            if (llt.info() != Eigen::Success) {
                sol.status = SdpStatus::NumericalFailure;
                sol.message = "dual slack lost definiteness";
                goto done;
            }
            sinv.push_back(llt.solve(Mat::Identity(sb.rows(), sb.cols())));
        }
        {
            // Schur complement M_kl = <A_k, X A_l S^-1>, via flattened blocks
            Mat gflat(aflat.rows(), m);
            for (int l = 0; l < m; ++l) {
                Eigen::Index off = 0;
                for (std::size_t i = 0; i < x.size(); ++i) {
                    const Mat gi = x[i] * p.a[l][i] * sinv[i];
                    gflat.col(l).segment(off, gi.size()) = Eigen::Map<const Eigen::VectorXd>(gi.data(), gi.size());
                    off += gi.size();
                }
            }
            Mat schur = aflat.transpose() * gflat;
            schur = (schur + schur.transpose()) / 2;
            // near the optimum M is badly conditioned; retry with a small
            // diagonal shift before giving up
            Eigen::LDLT<Mat> ldlt(schur);
            Eigen::LLT<Mat> llt;
            bool shifted = false;
            if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0).all()) {
                const double dmax = schur.diagonal().cwiseAbs().maxCoeff();
                for (double eps = 1e-14; eps <= 1e-8 && !shifted; eps *= 100) {
                    llt.compute(schur + eps * dmax * Mat::Identity(m, m));
                    shifted = llt.info() == Eigen::Success;
                }
                if (!shifted) {
                    std::ostringstream os;
                    os << "Schur complement factorization failed at iteration " << it << " (mu " << mu << ")";
                    sol.message = os.str();
                    sol.status = SdpStatus::NumericalFailure;
                    goto done;
                }
            }
            auto schur_solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
                return shifted ? Eigen::VectorXd(llt.solve(rhs)) : Eigen::VectorXd(ldlt.solve(rhs));
            };

            auto direction = [&](double sigma, const Blocks* corr, Blocks& dx, Eigen::VectorXd& dy,
                                 Blocks& ds) {
                Blocks r(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    r[i] = sigma * mu * sinv[i] - x[i] - x[i] * rd[i] * sinv[i];
                    if (corr) r[i] -= (*corr)[i] * sinv[i];
                }
                dy = schur_solve(rp - a_apply(p, r));
                const Blocks ady = a_adjoint(p, dy);
                ds = rd;
                axpy(ds, -1.0, ady);
                dx.resize(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    Mat t = r[i] + x[i] * ady[i] * sinv[i];
                    dx[i] = (t + t.transpose()) / 2;
                }
            };

            Blocks dxa, dsa;
            Eigen::VectorXd dya;
            direction(0.0, nullptr, dxa, dya, dsa);
            double ap, ad;
            if (!max_step(x, dxa, ap) || !max_step(s, dsa, ad)) {
                sol.status = SdpStatus::NumericalFailure;
                sol.message = "iterate lost definiteness";
                goto done;
            }
            ap = std::min(1.0, ap);
            ad = std::min(1.0, ad);
            Blocks xa = x, sa = s;
            axpy(xa, ap, dxa);
            axpy(sa, ad, dsa);
            const double mua = inner(xa, sa) / ntot;
            double sigma = std::pow(std::max(0.0, mua / mu), 3);
            sigma = std::clamp(sigma, 0.0, 1.0);

            Blocks corr(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) corr[i] = dxa[i] * dsa[i];
            Blocks dx, ds;
            Eigen::VectorXd dy;
            direction(sigma, &corr, dx, dy, ds);
            if (!max_step(x, dx, ap) || !max_step(s, ds, ad)) {
                sol.status = SdpStatus::NumericalFailure;
                sol.message = "iterate lost definiteness";
                goto done;
            }
            ap = std::min(1.0, settings.step_fraction * ap);
            ad = std::min(1.0, settings.step_fraction * ad);
            axpy(x, ap, dx);
            y += ad * dy;
            axpy(s, ad, ds);
        }
    }
done:
    sol.x = x;
    sol.s = s;
    sol.y = y;
    if (sol.status != SdpStatus::Optimal && sol.message.empty()) {
        std::ostringstream os;
        os << "stopped after " << sol.iterations << " iterations: gap " << sol.relative_gap
           << ", primal infeasibility " << sol.primal_infeasibility << ", dual infeasibility "
           << sol.dual_infeasibility;
        sol.message = os.str();
    }
    return sol;
}

}  // namespace qcompress
