#include "qcompress/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/SVD>

#include "qcompress/errors.hpp"

namespace qcompress {

InterpolationProblem make_interpolation_problem(const ReducedObservableSet& red, int target,
                                                const std::vector<int>& zeroed) {
    const auto& blocks = red.structure.blocks;
    const int s = static_cast<int>(blocks.size());
    if (target < 0 || target >= s) throw DimensionMismatch("target block out of range");
    if (std::find(zeroed.begin(), zeroed.end(), target) != zeroed.end())
        throw DimensionMismatch("target block is already zeroed");
    InterpolationProblem p;
    p.target = target;
    p.target_dim = blocks[target].dim;
    p.zeroed = zeroed;
    for (int l = 0; l < s; ++l) {
        if (l == target || std::find(zeroed.begin(), zeroed.end(), l) != zeroed.end()) continue;
        p.kept.push_back(l);
        p.kept_dims.push_back(blocks[l].dim);
    }
    for (const auto& op : red.ops) {
        std::vector<cmat> in;
        for (int l : p.kept) in.push_back(op[l]);
        p.inputs.push_back(std::move(in));
        p.targets.push_back(op[target]);
    }
    return p;
}

cmat apply_block_choi(const std::vector<cmat>& choi, const std::vector<cmat>& inputs,
                      const std::vector<int>& kept_dims, int dt) {
    cmat out = cmat::Zero(dt, dt);
    for (std::size_t pos = 0; pos < choi.size(); ++pos) {
        const int dl = kept_dims[pos];
        for (int a = 0; a < dl; ++a)
            for (int b = 0; b < dl; ++b) {
                const cplx x = inputs[pos](a, b);
                if (x != 0.0) out += x * choi[pos].block(a * dt, b * dt, dt, dt);
            }
    }
    return out;
}

namespace {

struct Layout {
    std::vector<int> sizes;    // Choi side per kept block
    std::vector<int> offsets;  // coordinate offsets
    int total = 0;
};

Layout layout_for(const InterpolationProblem& p) {
    Layout lay;
    for (int dl : p.kept_dims) {
        const int n = dl * p.target_dim;
        lay.sizes.push_back(n);
        lay.offsets.push_back(lay.total);
        lay.total += n * n;
    }
    return lay;
}

std::vector<cmat> choi_from_coords(const Layout& lay, const rvec& u) {
    std::vector<cmat> out;
    for (std::size_t l = 0; l < lay.sizes.size(); ++l) {
        const int n = lay.sizes[l];
        out.push_back(hermitian_from_coords(u.segment(lay.offsets[l], n * n), n));
    }
    return out;
}

struct SolveResult {
    SdpSolution sol;
    std::vector<cmat> choi;
    double lambda = 0;
};

SolveResult run_lmi(const Layout& lay, const rvec& u0, const rmat& null, const SdpSettings& settings) {
    const int q = static_cast<int>(null.cols());
    SdpProblem prob;
    for (int n : lay.sizes) prob.block_sizes.push_back(2 * n);
    for (const auto& j : choi_from_coords(lay, u0)) prob.c.push_back(real_embedding(j));
    for (int k = 0; k < q; ++k) {
        std::vector<Eigen::MatrixXd> ak;
        for (const auto& j : choi_from_coords(lay, null.col(k))) ak.push_back(-real_embedding(j));
        prob.a.push_back(std::move(ak));
    }
    std::vector<Eigen::MatrixXd> aid;
    for (int n : lay.sizes) aid.push_back(Eigen::MatrixXd::Identity(2 * n, 2 * n));
    prob.a.push_back(std::move(aid));
    prob.b = Eigen::VectorXd::Zero(q + 1);
    prob.b(q) = 1.0;

    SolveResult r;
    r.sol = solve_sdp(prob, settings);
    if (r.sol.status != SdpStatus::Optimal) return r;
    r.lambda = r.sol.y(q);
    rvec u = u0;
    if (q > 0) u += null * r.sol.y.head(q);
    r.choi = choi_from_coords(lay, u);
    return r;
}

}  // namespace

SdpOutcome solve_psd_feasibility(const InterpolationProblem& p, const SdpSettings& settings,
                                 const Tolerances& tol) {
    SdpOutcome out;
    const int dt = p.target_dim;
    const int k = static_cast<int>(p.targets.size());
    const Layout lay = layout_for(p);
    const int rows = k * dt * dt;

    // linear part: Phi(inputs_i) = targets_i in Hermitian coordinates
    rmat lin = rmat::Zero(rows, lay.total);
    rvec rhs(rows);
    for (int i = 0; i < k; ++i) rhs.segment(i * dt * dt, dt * dt) = hermitian_coords(p.targets[i]);
    for (std::size_t l = 0; l < lay.sizes.size(); ++l) {
        const int n = lay.sizes[l];
        for (int j = 0; j < n * n; ++j) {
            rvec e = rvec::Zero(n * n);
            e(j) = 1.0;
            const cmat jm = hermitian_from_coords(e, n);
            std::vector<cmat> single(lay.sizes.size());
            for (std::size_t t = 0; t < lay.sizes.size(); ++t)
                single[t] = cmat::Zero(lay.sizes[t], lay.sizes[t]);
            single[l] = jm;
            for (int i = 0; i < k; ++i) {
                const cmat img = apply_block_choi(single, p.inputs[i], p.kept_dims, dt);
                lin.col(lay.offsets[l] + j).segment(i * dt * dt, dt * dt) = hermitian_coords(img);
            }
        }
    }

    // Jacobi, not BDC: the divide-and-conquer SVD in Eigen 3.4 loses accuracy on the heavily
    // repeated singular values that symmetric blocks produce.
    Eigen::JacobiSVD<rmat> svd(lin, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const rvec sv = svd.singularValues();
    const double top = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    while (rank < sv.size() && sv(rank) > tol.rank * std::max(top, 1e-300)) ++rank;
    rvec u0 = rvec::Zero(lay.total);
    if (rank > 0) {
        const rvec coef = svd.matrixU().leftCols(rank).transpose() * rhs;
        u0 = svd.matrixV().leftCols(rank) * coef.cwiseQuotient(sv.head(rank));
    }
    const double lin_residual = (lin * u0 - rhs).norm();
    if (lin_residual > 1e-8 * (1.0 + rhs.norm())) {
        out.linear_consistent = false;
        out.feasible = false;
        out.objective_residual = -std::numeric_limits<double>::infinity();
        std::ostringstream os;
        os << "no linear map interpolates the block (least-squares residual " << lin_residual << ")";
        out.diagnostics = os.str();
        return out;
    }
    const rmat null = svd.matrixV().rightCols(lay.total - rank);

    SolveResult res = run_lmi(lay, u0, null, settings);
    if (res.sol.status != SdpStatus::Optimal)
        throw NumericError("interpolation SDP did not converge: " + res.sol.message);
    out.iterations = res.sol.iterations;
    if (std::abs(res.lambda) < tol.margin) {
        SdpSettings tight = settings;
        tight.tol = settings.tol / 10;
        tight.max_iter = settings.max_iter * 2;
        SolveResult again = run_lmi(lay, u0, null, tight);
        out.resolved_tighter = true;
        out.iterations += again.sol.iterations;
        if (again.sol.status == SdpStatus::Optimal) res = std::move(again);
    }
    out.objective_residual = res.lambda;
    out.marginal = std::abs(res.lambda) < tol.margin;
    out.feasible = res.lambda >= -tol.sdp;
    out.choi_blocks = res.choi;
    for (int i = 0; i < k; ++i)
        out.certificate.push_back(apply_block_choi(res.choi, p.inputs[i], p.kept_dims, dt));
    std::ostringstream os;
    os << "lambda* = " << res.lambda << " after " << out.iterations << " iterations, null space "
       << null.cols() << " of " << lay.total;
    out.diagnostics = os.str();
    return out;
}

InterpolationCheck verify_interpolation(const InterpolationProblem& p, const SdpOutcome& cert) {
    InterpolationCheck c;
    const int dt = p.target_dim;
    const std::size_t k = p.targets.size();
    const bool have_choi = !cert.choi_blocks.empty();
    const bool have_h = cert.certificate.size() == k;
    c.choi_min_eig = std::numeric_limits<double>::infinity();
    for (const auto& j : cert.choi_blocks) c.choi_min_eig = std::min(c.choi_min_eig, min_eigenvalue_hermitian(j));
    if (!have_choi) c.choi_min_eig = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < k; ++i) {
        cmat img;
        if (have_choi) {
            img = apply_block_choi(cert.choi_blocks, p.inputs[i], p.kept_dims, dt);
            c.target_deviation = std::max(c.target_deviation, max_abs(img - p.targets[i]));
        }
        if (have_h) {
            c.certificate_deviation = std::max(c.certificate_deviation, max_abs(cert.certificate[i] - p.targets[i]));
            if (have_choi) c.consistency = std::max(c.consistency, max_abs(cert.certificate[i] - img));
        }
    }
    // the first spanning operator is the identity
    const cmat id = cmat::Identity(dt, dt);
    if (have_h) c.unitality = max_abs(cert.certificate[0] - id);
    if (have_choi) {
        std::vector<cmat> ones;
        for (int dl : p.kept_dims) ones.push_back(cmat::Identity(dl, dl));
        c.unitality = std::max(c.unitality, max_abs(apply_block_choi(cert.choi_blocks, ones, p.kept_dims, dt) - id));
    }
    c.residual = std::max({c.target_deviation, c.certificate_deviation, c.consistency, c.unitality,
                           std::max(0.0, -c.choi_min_eig)});
    if (!have_choi && !have_h) c.residual = std::numeric_limits<double>::infinity();
    return c;
}

DimensionReport compression_dimension(const ReducedObservableSet& red, const SdpSettings& settings,
                                      const Tolerances& tol) {
    DimensionReport r;
    const auto& blocks = red.structure.blocks;
    const int s = static_cast<int>(blocks.size());
    for (const auto& b : blocks) {
        r.block_dims.push_back(b.dim);
        r.multiplicities.push_back(b.multiplicity);
    }
    r.lower_bound_min_block = *std::min_element(r.block_dims.begin(), r.block_dims.end());
    r.upper_bound_max_block = *std::max_element(r.block_dims.begin(), r.block_dims.end());

    std::vector<int> zeroed;
    int j = 0;
    while (j < s - 1) {
        InterpolationStep step{make_interpolation_problem(red, j, zeroed), {}};
        step.outcome = solve_psd_feasibility(step.problem, settings, tol);
        const bool redundant = step.outcome.feasible;
        r.steps.push_back(std::move(step));
        if (!redundant) break;
        zeroed.push_back(j);
        ++j;
    }
    r.compression_dimension = blocks[j].dim;
    r.redundant_blocks = zeroed;
    for (int l = 0; l < s; ++l)
        if (std::find(zeroed.begin(), zeroed.end(), l) == zeroed.end()) r.kept_blocks.push_back(l);
    r.classical_register = static_cast<int>(r.kept_blocks.size());
    return r;
}

DimensionAnalysis analyze_dimension(const ObservableSet& obs, std::uint64_t seed, const Tolerances& tol) {
    DimensionAnalysis a;
    a.canonical = obs.canonical ? obs : canonicalize(obs, tol);
    const BlockStructure bs = block_diagonalize(a.canonical, seed, 8, tol);
    a.reduced = reduce_multiplicities(a.canonical, bs, tol);
    a.report = compression_dimension(a.reduced, SdpSettings{}, tol);
    return a;
}

DimensionReport compression_dimension(const ObservableSet& obs, std::uint64_t seed, const Tolerances& tol) {
    return analyze_dimension(obs, seed, tol).report;
}

}  // namespace qcompress
