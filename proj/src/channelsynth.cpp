#include "qcompress/channelsynth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qcompress/errors.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

namespace {

// Schroedinger-picture Kraus operator carrying a block-b state into kept
// block position `pos`; g is D_l x D_b.
struct Leg {
    int pos = 0;
    cmat g;
};

// Isometry C^{D_b} -> C^D onto one copy of block b.
cmat block_isometry(const BlockStructure& bs, int b, int copy) {
    return bs.unitary.middleRows(bs.offset(b, copy), bs.blocks[b].dim).adjoint();
}

// Re-expresses a list of legs with at most D_l * D_b terms per target.
std::vector<Leg> simplify_legs(const std::vector<Leg>& legs, int db, const std::vector<int>& kept_dims) {
    std::vector<Leg> out;
    for (std::size_t p = 0; p < kept_dims.size(); ++p) {
        QuantumChannel ch{db, kept_dims[p], 1, {}};
        for (const auto& l : legs)
            if (l.pos == static_cast<int>(p)) ch.kraus.push_back(l.g);
        if (ch.kraus.empty()) continue;
        if (ch.kraus.size() > static_cast<std::size_t>(db * kept_dims[p])) ch = simplify_kraus(ch);
        for (auto& k : ch.kraus) out.push_back({static_cast<int>(p), std::move(k)});
    }
    return out;
}

// Heisenberg Kraus operators M (D_t x D_l) of the interpolation map per kept
// block, cleaned to exact complete positivity and unitality.
std::vector<std::vector<cmat>> interpolation_kraus(const InterpolationProblem& prob, const SdpOutcome& out) {
    const int dt = prob.target_dim;
    std::vector<std::vector<cmat>> ms(prob.kept.size());
    cmat unit = cmat::Zero(dt, dt);
    for (std::size_t l = 0; l < prob.kept.size(); ++l) {
        const int dl = prob.kept_dims[l];
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(out.choi_blocks[l]));
        const double top = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
        for (int i = 0; i < es.eigenvalues().size(); ++i) {
            const double w = es.eigenvalues()(i);
            if (w <= 1e-14 * top) continue;
            cmat m(dt, dl);
            for (int a = 0; a < dl; ++a)
                for (int o = 0; o < dt; ++o) m(o, a) = std::sqrt(w) * es.eigenvectors()(a * dt + o, i);
            unit += m * m.adjoint();
            ms[l].push_back(m);
        }
    }
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(unit));
    if (es.eigenvalues().minCoeff() <= 0) throw NumericError("interpolation map is not unital");
    const cmat fix = es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
                     es.eigenvectors().adjoint();
    for (auto& v : ms)
        for (auto& m : v) m = fix * m;
    return ms;
}

CompressionScheme assemble(const ReducedObservableSet& red, const std::vector<int>& kept,
                           const std::vector<std::vector<Leg>>& chains) {
    const BlockStructure& bs = red.structure;
    const int dim = bs.ambient_dim;
    CompressionScheme sc;
    sc.kept_blocks = kept;
    sc.n = static_cast<int>(kept.size());
    for (int l : kept) sc.d = std::max(sc.d, bs.blocks[l].dim);
    const int out = sc.d * sc.n;

    sc.compress = QuantumChannel{dim, sc.d, sc.n, {}};
    for (std::size_t b = 0; b < bs.blocks.size(); ++b)
        for (int c = 0; c < bs.blocks[b].multiplicity; ++c) {
            const cmat v = block_isometry(bs, static_cast<int>(b), c);
            for (const auto& leg : chains[b]) {
                cmat k = cmat::Zero(out, dim);
                k.middleRows(leg.pos * sc.d, leg.g.rows()) = leg.g * v.adjoint();
                sc.compress.kraus.push_back(std::move(k));
            }
        }
    if (sc.compress.kraus.size() > static_cast<std::size_t>(out * dim)) sc.compress = simplify_kraus(sc.compress);

    sc.decompress = QuantumChannel{out, dim, 1, {}};
    for (int p = 0; p < sc.n; ++p) {
        const int dl = bs.blocks[kept[p]].dim;
        const cmat v = block_isometry(bs, kept[p], 0);
        cmat k = cmat::Zero(dim, out);
        k.middleCols(p * sc.d, dl) = v;
        sc.decompress.kraus.push_back(std::move(k));
        // padding: the unused corner is traced out into the maximally mixed state
        for (int b = dl; b < sc.d; ++b)
            for (int a = 0; a < dl; ++a) {
                cmat pad = cmat::Zero(dim, out);
                pad.col(p * sc.d + b) = v.col(a) / std::sqrt(double(dl));
                sc.decompress.kraus.push_back(std::move(pad));
            }
    }
    return sc;
}

}  // namespace

CompressionScheme build_max_block_scheme(const ReducedObservableSet& red) {
    const int s = static_cast<int>(red.structure.blocks.size());
    if (s == 0) throw DimensionMismatch("reduced set has no blocks");
    std::vector<int> kept(s);
    std::iota(kept.begin(), kept.end(), 0);
    std::vector<std::vector<Leg>> chains(s);
    for (int b = 0; b < s; ++b) {
        const int db = red.structure.blocks[b].dim;
        chains[b].push_back({b, cmat::Identity(db, db)});
    }
    return assemble(red, kept, chains);
}

CompressionScheme build_optimal_scheme(const ReducedObservableSet& red, const DimensionReport& report,
                                       const Tolerances& tol) {
    const auto& blocks = red.structure.blocks;
    const int s = static_cast<int>(blocks.size());
    if (static_cast<int>(report.block_dims.size()) != s)
        throw DimensionMismatch("dimension report does not belong to this reduced set");
    const std::vector<int>& kept = report.kept_blocks;
    std::vector<int> pos_of(s, -1);
    std::vector<int> kept_dims;
    for (std::size_t p = 0; p < kept.size(); ++p) {
        pos_of[kept[p]] = static_cast<int>(p);
        kept_dims.push_back(blocks[kept[p]].dim);
    }

    std::vector<std::vector<Leg>> chains(s);
    for (int l : kept) chains[l].push_back({pos_of[l], cmat::Identity(blocks[l].dim, blocks[l].dim)});

    // later redundant blocks only feed on blocks after them, so go backwards
    for (auto it = report.redundant_blocks.rbegin(); it != report.redundant_blocks.rend(); ++it) {
        const int r = *it;
        const InterpolationStep* step = nullptr;
        for (const auto& st : report.steps)
            if (st.problem.target == r) step = &st;
        if (!step || !step->outcome.feasible || step->outcome.choi_blocks.empty())
            throw NumericError("no interpolation certificate for redundant block " + std::to_string(r));
        const InterpolationCheck chk = verify_interpolation(step->problem, step->outcome);
        if (chk.target_deviation > 1e3 * tol.interp || chk.choi_min_eig < -1e3 * tol.interp) {
            std::ostringstream os;
            os << "interpolation certificate for block " << r << " has residual " << chk.residual;
            throw NumericError(os.str());
        }
        const auto ms = interpolation_kraus(step->problem, step->outcome);
        std::vector<Leg> legs;
        for (std::size_t l = 0; l < step->problem.kept.size(); ++l) {
            const int src = step->problem.kept[l];
            if (chains[src].empty()) throw NumericError("interpolation uses an unresolved block");
            for (const auto& m : ms[l])
                for (const auto& leg : chains[src]) legs.push_back({leg.pos, leg.g * m.adjoint()});
        }
        chains[r] = simplify_legs(legs, blocks[r].dim, kept_dims);
    }
    CompressionScheme sc = assemble(red, kept, chains);
    if (sc.d != report.compression_dimension)
        throw NumericError("kept blocks do not realize the reported compression dimension");
    return sc;
}

CompressionScheme identity_scheme(int dim) {
    CompressionScheme sc;
    sc.compress = identity_channel(dim);
    sc.decompress = identity_channel(dim);
    sc.d = dim;
    sc.n = 1;
    sc.kept_blocks = {0};
    return sc;
}

std::vector<cmat> basis_states(int dim) {
    std::vector<cmat> out;
    const double h = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < dim; ++a) {
        cvec v = cvec::Zero(dim);
        v(a) = 1;
        out.push_back(v * v.adjoint());
    }
    for (int a = 0; a < dim; ++a)
        for (int b = a + 1; b < dim; ++b) {
            cvec v = cvec::Zero(dim);
            v(a) = h;
            v(b) = h;
            out.push_back(v * v.adjoint());
            v(b) = cplx(0, h);
            out.push_back(v * v.adjoint());
        }
    return out;
}

SchemeReport verify_scheme(const CompressionScheme& sc, const ObservableSet& obs, int trials,
                           std::uint64_t seed, const Tolerances& tol) {
    if (sc.compress.dim_in != obs.dim || sc.decompress.output_size() != obs.dim ||
        sc.decompress.dim_in != sc.compress.output_size())
        throw DimensionMismatch("scheme dimensions do not match the observable set");
    SchemeReport rep;
    const int dim = obs.dim;
    auto residual = [&](const cmat& rho) {
        const cmat out = apply_channel(sc.decompress, apply_channel(sc.compress, rho));
        double worst = 0;
        for (const auto& e : obs.operators)
            worst = std::max(worst, std::abs((rho * e).trace() - (out * e).trace()));
        return worst;
    };
    Rng rng(seed);
    for (int t = 0; t < trials; ++t) {
        const cmat g = random_ginibre(dim, dim, rng);
        cmat rho = g * g.adjoint();
        rho /= rho.trace().real();
        rep.random_residual = std::max(rep.random_residual, residual(rho));
    }
    const auto basis = basis_states(dim);
    for (const auto& rho : basis) rep.basis_residual = std::max(rep.basis_residual, residual(rho));
    rep.states_tested = trials + static_cast<int>(basis.size());
    rep.max_residual = std::max(rep.random_residual, rep.basis_residual);
    rep.compress_cptp = is_cptp(sc.compress, tol.tp);
    rep.decompress_cptp = is_cptp(sc.decompress, tol.tp);
    rep.dual_unitality = std::max(rep.compress_cptp.tp_residual, rep.decompress_cptp.tp_residual);
    rep.ok = rep.max_residual <= tol.stat && rep.compress_cptp.ok && rep.decompress_cptp.ok;
    return rep;
}

namespace {

bool is_projection(const cmat& p, double eps) {
    return p.rows() == p.cols() && max_abs(p - p.adjoint()) <= eps && max_abs(p * p - p) <= eps;
}

// Orthonormal eigenbasis of a Hermitian matrix, eigenvalues ascending.
void eigh(const cmat& h, rvec& w, cmat& v) {
    Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(h));
    w = es.eigenvalues();
    v = es.eigenvectors();
}

}  // namespace

TwoProjectionForm two_projection_form(const cmat& p, const cmat& q, const Tolerances& tol) {
    if (p.rows() != q.rows()) throw DimensionMismatch("projections act on different spaces");
    if (!is_projection(p, tol.proj) || !is_projection(q, tol.proj))
        throw NumericError("input is not an orthogonal projection");
    const int dim = static_cast<int>(p.rows());
    TwoProjectionForm f;

    rvec w;
    cmat v;
    eigh(p, w, v);
    std::vector<int> on, off;
    for (int i = 0; i < dim; ++i) (w(i) > 0.5 ? on : off).push_back(i);
    cmat bp(dim, on.size()), bc(dim, off.size());
    for (std::size_t i = 0; i < on.size(); ++i) bp.col(i) = v.col(on[i]);
    for (std::size_t i = 0; i < off.size(); ++i) bc.col(i) = v.col(off[i]);

    // classify eigenvalue c^2 of the compressed Q: corner or generic
    auto classify = [&](double lam, const char* where) {
        if (lam >= 1 - tol.angle) {
            if (lam < 1 - tol.rank) f.flags.push_back(std::string("near-corner angle assigned to ") + where + " & N");
            return 1;
        }
        if (lam <= tol.angle) {
            if (lam > tol.rank) f.flags.push_back(std::string("near-corner angle assigned to ") + where + " & N^perp");
            return 0;
        }
        return -1;
    };

    std::vector<cvec> c11, c10, c01, c00;
    std::vector<std::pair<double, cvec>> generic;  // (mu, e)
    if (!on.empty()) {
        rvec lw;
        cmat lv;
        eigh(bp.adjoint() * q * bp, lw, lv);
        for (int i = 0; i < lw.size(); ++i) {
            const cvec e = bp * lv.col(i);
            const int k = classify(std::clamp(lw(i), 0.0, 1.0), "M");
            if (k == 1) c11.push_back(e);
            else if (k == 0) c10.push_back(e);
            else generic.push_back({1 - lw(i), e});
        }
    }
    int generic_off = 0;
    if (!off.empty()) {
        rvec lw;
        cmat lv;
        eigh(bc.adjoint() * q * bc, lw, lv);
        for (int i = 0; i < lw.size(); ++i) {
            const cvec e = bc * lv.col(i);
            const int k = classify(std::clamp(lw(i), 0.0, 1.0), "M^perp");
            if (k == 1) c01.push_back(e);
            else if (k == 0) c00.push_back(e);
            else ++generic_off;
        }
    }
    if (generic_off != static_cast<int>(generic.size())) {
        std::ostringstream os;
        os << "generic parts disagree: " << generic.size() << " angles in ran P, " << generic_off
           << " in its complement";
        throw NumericError(os.str());
    }
    std::stable_sort(generic.begin(), generic.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    f.corners[0] = static_cast<int>(c11.size());
    f.corners[1] = static_cast<int>(c10.size());
    f.corners[2] = static_cast<int>(c01.size());
    f.corners[3] = static_cast<int>(c00.size());
    f.r = static_cast<int>(generic.size());
    f.unitary = cmat::Zero(dim, dim);
    int col = 0;
    for (const auto* group : {&c11, &c10, &c01, &c00})
        for (const auto& e : *group) f.unitary.col(col++) = e;
    const cmat pc = cmat::Identity(dim, dim) - p;
    for (const auto& [mu, e] : generic) {
        cvec g = pc * q * e;
        g /= g.norm();
        f.unitary.col(col++) = e;
        f.unitary.col(col++) = g;
        f.mu.push_back(std::clamp(mu, 0.0, 1.0));
    }

    f.unitarity_residual = max_abs(f.unitary.adjoint() * f.unitary - cmat::Identity(dim, dim));
    f.template_residual = std::max(max_abs(f.unitary.adjoint() * p * f.unitary - two_projection_template_p(f)),
                                   max_abs(f.unitary.adjoint() * q * f.unitary - two_projection_template_q(f)));
    return f;
}

cmat two_projection_template_p(const TwoProjectionForm& f) {
    const int dim = f.corners[0] + f.corners[1] + f.corners[2] + f.corners[3] + 2 * f.r;
    cmat t = cmat::Zero(dim, dim);
    for (int i = 0; i < f.corners[0] + f.corners[1]; ++i) t(i, i) = 1;
    const int base = dim - 2 * f.r;
    for (int j = 0; j < f.r; ++j) t(base + 2 * j, base + 2 * j) = 1;
    return t;
}

cmat two_projection_template_q(const TwoProjectionForm& f) {
    const int dim = f.corners[0] + f.corners[1] + f.corners[2] + f.corners[3] + 2 * f.r;
    cmat t = cmat::Zero(dim, dim);
    for (int i = 0; i < f.corners[0]; ++i) t(i, i) = 1;
    const int o = f.corners[0] + f.corners[1];
    for (int i = 0; i < f.corners[2]; ++i) t(o + i, o + i) = 1;
    const int base = dim - 2 * f.r;
    for (int j = 0; j < f.r; ++j) {
        const double mu = f.mu[j];
        const int i = base + 2 * j;
        t(i, i) = 1 - mu;
        t(i, i + 1) = t(i + 1, i) = std::sqrt(mu * (1 - mu));
        t(i + 1, i + 1) = mu;
    }
    return t;
}

}  // namespace qcompress
