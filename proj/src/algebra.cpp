#include "qcompress/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "qcompress/errors.hpp"
#include "qcompress/rng.hpp"

namespace qcompress {

int BlockStructure::offset(int block, int copy) const {
    int off = 0;
    for (int i = 0; i < block; ++i) off += blocks[i].dim * blocks[i].multiplicity;
    return off + copy * blocks[block].dim;
}

int BlockStructure::reduced_dim() const {
    int s = 0;
    for (const auto& b : blocks) s += b.dim;
    return s;
}

std::vector<cmat> algebra_closure(const std::vector<cmat>& ops, const Tolerances& tol) {
    if (ops.empty()) return {};
    const int d = static_cast<int>(ops.front().rows());
    std::vector<rvec> basis;
    std::vector<cmat> mats;
    auto try_add = [&](const cmat& m) {
        rvec v = hermitian_coords(hermitian_part(m));
        const double scale = v.norm();
        if (scale == 0) return false;
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& b : basis) v -= b.dot(v) * b;
        if (v.norm() <= tol.rank * 10 * std::max(1.0, scale)) return false;
        v.normalize();
        basis.push_back(v);
        mats.push_back(hermitian_from_coords(v, d));
        return true;
    };
    try_add(cmat::Identity(d, d));
    std::vector<cmat> gens;
    for (const auto& op : ops)
        if (try_add(op)) gens.push_back(mats.back());

    const cplx I(0, 1);
    std::size_t next = 0;
    while (next < mats.size() && static_cast<int>(mats.size()) < d * d) {
        const cmat x = mats[next++];
        for (const auto& g : gens) {
            const cmat xg = x * g, gx = g * x;
            try_add((xg + gx) / 2.0);
            try_add(I * (xg - gx) / 2.0);
            if (static_cast<int>(mats.size()) == d * d) break;
        }
    }
    return mats;
}

namespace {

struct Cluster {
    double value;
    cmat basis;  // D x m orthonormal columns
};

struct Attempt {
    bool ok = false;
    std::string why;
    double min_gap = 0;
    double radius = 0;
    BlockStructure bs;
};

cmat generic_element(const std::vector<cmat>& basis, int d, Rng& rng) {
    const auto k = static_cast<std::int64_t>(basis.size());
    const std::int64_t top = 16 * k * d;
    rvec r(k);
    for (std::int64_t i = 0; i < k; ++i) r(i) = double(rng.uniform_int(1, top));
    r.normalize();
    cmat e = cmat::Zero(d, d);
    for (std::int64_t i = 0; i < k; ++i) e += r(i) * basis[i];
    return e;
}

int find_root(std::vector<int>& parent, int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
}

Attempt attempt_decomposition(const std::vector<cmat>& basis, const ObservableSet& canon,
                              Rng rng, const Tolerances& tol) {
    Attempt out;
    const int d = canon.dim;
    const cmat a = generic_element(basis, d, rng);
    const cmat g = generic_element(basis, d, rng);

    Eigen::SelfAdjointEigenSolver<cmat> es(a);
    const rvec& ev = es.eigenvalues();
    const double radius = tol.cluster * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);

    std::vector<Cluster> clusters;
    std::vector<double> gaps;
    for (int i = 0; i < d;) {
        int j = i + 1;
        while (j < d && ev(j) - ev(j - 1) <= radius) ++j;
        clusters.push_back({ev.segment(i, j - i).mean(), es.eigenvectors().middleCols(i, j - i)});
        if (j < d) gaps.push_back(ev(j) - ev(j - 1));
        i = j;
    }
    const int nc = static_cast<int>(clusters.size());
    out.radius = radius;
    out.min_gap = gaps.empty() ? 0.0 : *std::min_element(gaps.begin(), gaps.end());

    // eigenspaces joined by some algebra element belong to one simple component
    std::vector<int> parent(nc);
    std::iota(parent.begin(), parent.end(), 0);
    const double link_tol = 1e-6;
    for (const auto& b : basis)
        for (int p = 0; p < nc; ++p)
            for (int q = p + 1; q < nc; ++q) {
                if (find_root(parent, p) == find_root(parent, q)) continue;
                const cmat c = clusters[p].basis.adjoint() * b * clusters[q].basis;
                if (max_abs(c) > link_tol) parent[find_root(parent, q)] = find_root(parent, p);
            }
    std::vector<std::vector<int>> comps;
    std::vector<int> comp_of(nc, -1);
    for (int p = 0; p < nc; ++p) {
        const int r = find_root(parent, p);
        if (comp_of[r] < 0) {
            comp_of[r] = static_cast<int>(comps.size());
            comps.emplace_back();
        }
        comps[comp_of[r]].push_back(p);
    }

    struct Comp {
        int dim, mult;
        std::vector<cmat> aligned;  // per cluster, D x m
        int first_index;
        double mean_value;
    };
    std::vector<Comp> built;
    for (const auto& members : comps) {
        const int m = static_cast<int>(clusters[members[0]].basis.cols());
        for (int p : members)
            if (clusters[p].basis.cols() != m) {
                out.why = "eigenspace dimensions differ inside one component";
                return out;
            }
        Comp c{static_cast<int>(members.size()), m, {}, 0, 0.0};
        const cmat& q0 = clusters[members[0]].basis;
        c.aligned.push_back(q0);
        for (std::size_t t = 1; t < members.size(); ++t) {
            const cmat& qc = clusters[members[t]].basis;
            const cmat mm = qc.adjoint() * g * q0;
            Eigen::JacobiSVD<cmat> svd(mm, Eigen::ComputeFullU | Eigen::ComputeFullV);
            const rvec sv = svd.singularValues();
            if (sv(0) <= link_tol || sv(m - 1) < (1.0 - 1e-6) * sv(0)) {
                out.why = "alignment element is not a scaled unitary between copies";
                return out;
            }
            // unitary Procrustes: nearest unitary to mm
            const cmat w = svd.matrixU() * svd.matrixV().adjoint();
            c.aligned.push_back(qc * w);
        }
        cmat proj = cmat::Zero(d, d);
        for (const auto& q : c.aligned) proj += q * q.adjoint();
        c.first_index = d;
        for (int k = 0; k < d; ++k)
            if (proj(k, k).real() > 1e-6) {
                c.first_index = k;
                break;
            }
        c.mean_value = (proj * canon.operators.back()).trace().real() / double(c.dim * c.mult);
        built.push_back(std::move(c));
    }

    std::stable_sort(built.begin(), built.end(), [](const Comp& x, const Comp& y) {
        if (x.dim != y.dim) return x.dim > y.dim;
        if (x.first_index != y.first_index) return x.first_index < y.first_index;
        return x.mean_value < y.mean_value;
    });

    int total_sq = 0;
    BlockStructure bs;
    bs.ambient_dim = d;
    bs.unitary = cmat::Zero(d, d);
    int row = 0;
    for (const auto& c : built) {
        bs.blocks.push_back({c.dim, c.mult});
        total_sq += c.dim * c.dim;
        for (int t = 0; t < c.mult; ++t)
            for (int a = 0; a < c.dim; ++a) bs.unitary.row(row++) = c.aligned[a].col(t).adjoint();
    }
    if (total_sq != static_cast<int>(basis.size())) {
        std::ostringstream os;
        os << "block dimensions account for " << total_sq << " of " << basis.size()
           << " algebra dimensions";
        out.why = os.str();
        return out;
    }
    for (const auto& b : basis) {
        const double r = block_residual(bs, b);
        if (r > tol.block) {
            std::ostringstream os;
            os << "closure element not block diagonal (residual " << r << ")";
            out.why = os.str();
            return out;
        }
    }
    // duplicate copies must carry the same restricted characteristic polynomial
    const cmat ua = bs.unitary * a * bs.unitary.adjoint();
    for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
        const int di = bs.blocks[i].dim;
        const cmat ref = ua.block(bs.offset(int(i)), bs.offset(int(i)), di, di);
        Eigen::SelfAdjointEigenSolver<cmat> e0(ref, Eigen::EigenvaluesOnly);
        for (int t = 1; t < bs.blocks[i].multiplicity; ++t) {
            const int o = bs.offset(int(i), t);
            Eigen::SelfAdjointEigenSolver<cmat> et(ua.block(o, o, di, di), Eigen::EigenvaluesOnly);
            if ((et.eigenvalues() - e0.eigenvalues()).cwiseAbs().maxCoeff() > tol.block) {
                out.why = "copies of a block have different spectra";
                return out;
            }
        }
    }
    out.ok = true;
    out.bs = std::move(bs);
    return out;
}

}  // namespace

double block_residual(const BlockStructure& bs, const cmat& op) {
    const cmat c = bs.unitary * op * bs.unitary.adjoint();
    cmat mask = c;
    double worst = 0;
    for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
        const int di = bs.blocks[i].dim;
        const int o0 = bs.offset(int(i));
        const cmat ref = c.block(o0, o0, di, di);
        for (int t = 0; t < bs.blocks[i].multiplicity; ++t) {
            const int o = bs.offset(int(i), t);
            worst = std::max(worst, max_abs(c.block(o, o, di, di) - ref));
            mask.block(o, o, di, di).setZero();
        }
    }
    return std::max(worst, max_abs(mask));
}

BlockStructure block_diagonalize(const ObservableSet& obs, std::uint64_t seed, int max_retries,
                                 const Tolerances& tol) {
    const ObservableSet canon = obs.canonical ? obs : canonicalize(obs, tol);
    const std::vector<cmat> basis = algebra_closure(canon.operators, tol);
    const Rng root(seed);
    std::string last;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Attempt a = attempt_decomposition(basis, canon, root.split(attempt), tol);
        if (a.ok) return a.bs;
        std::ostringstream os;
        os << a.why << " (smallest eigenvalue gap " << a.min_gap << ", cluster radius " << a.radius
           << ")";
        last = os.str();
    }
    throw NumericError("block diagonalization failed after " + std::to_string(max_retries) +
                       " generic draws: " + last);
}

ReducedObservableSet reduce_multiplicities(const ObservableSet& obs, const BlockStructure& bs,
                                           const Tolerances& tol) {
    if (obs.dim != bs.ambient_dim) throw DimensionMismatch("block structure dimension differs");
    ReducedObservableSet red;
    red.structure = bs;
    red.reduced_dim = bs.reduced_dim();
    for (const auto& op : obs.operators) {
        const cmat c = bs.unitary * op * bs.unitary.adjoint();
        const double scale = std::max(1.0, max_abs(op));
        std::vector<cmat> per_block;
        for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
            const int di = bs.blocks[i].dim, mi = bs.blocks[i].multiplicity;
            cmat avg = cmat::Zero(di, di);
            for (int t = 0; t < mi; ++t) {
                const int o = bs.offset(int(i), t);
                avg += c.block(o, o, di, di);
            }
            avg /= double(mi);
            for (int t = 0; t < mi; ++t) {
                const int o = bs.offset(int(i), t);
                if (max_abs(c.block(o, o, di, di) - avg) > tol.block * scale)
                    throw NumericError("repeated blocks disagree; block structure does not fit");
            }
            per_block.push_back(hermitian_part(avg));
        }
        if (block_residual(bs, op) > tol.block * scale)
            throw NumericError("operator is not block diagonal under the given structure");
        red.ops.push_back(std::move(per_block));
    }
    return red;
}

cmat reassemble(const BlockStructure& bs, const std::vector<cmat>& blocks) {
    std::vector<cmat> parts;
    for (std::size_t i = 0; i < bs.blocks.size(); ++i)
        for (int t = 0; t < bs.blocks[i].multiplicity; ++t) parts.push_back(blocks[i]);
    return bs.unitary.adjoint() * direct_sum(parts) * bs.unitary;
}

cmat reassemble(const ReducedObservableSet& red, int op_index) {
    return reassemble(red.structure, red.ops.at(op_index));
}

namespace {

std::vector<std::vector<int>> subsets(int n, int k) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur(k);
    std::iota(cur.begin(), cur.end(), 0);
    if (k == 0 || k > n) return out;
    while (true) {
        out.push_back(cur);
        int i = k - 1;
        while (i >= 0 && cur[i] == n - k + i) --i;
        if (i < 0) break;
        ++cur[i];
        for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
    }
    return out;
}

}  // namespace

cmat compound_matrix(const cmat& a, int k) {
    const int n = static_cast<int>(a.rows());
    const auto sets = subsets(n, k);
    const int m = static_cast<int>(sets.size());
    cmat c(m, m);
    cmat sub(k, k);
    for (int r = 0; r < m; ++r)
        for (int s = 0; s < m; ++s) {
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = a(sets[r][i], sets[s][j]);
            c(r, s) = sub.determinant();
        }
    return c;
}

GenerationVerdict algebra_generation_test(const std::vector<cmat>& ops, std::uint64_t seed,
                                          const Tolerances& tol) {
    GenerationVerdict v;
    const ObservableSet obs = make_observable_set(ops, tol);
    const int d = obs.dim;
    v.structure = block_diagonalize(obs, seed, 8, tol);
    v.full = v.structure.blocks.size() == 1 && v.structure.blocks[0].dim == d &&
             v.structure.blocks[0].multiplicity == 1;
    if (ops.size() != 2 || d < 2) return v;

    v.pair_checked = true;
    auto unit = [](const cmat& x) {
        const double n = x.norm();
        return n > 0 ? cmat(x / n) : x;
    };
    const cmat a = unit(ops[0]), b = unit(ops[1]);
    for (int k = 1; k <= d - 1; ++k) {
        const cmat ca = compound_matrix(a, k), cb = compound_matrix(b, k);
        const int m = static_cast<int>(ca.rows());
        std::vector<cmat> pa{ca}, pb{cb};
        for (int i = 1; i < d - 1; ++i) {
            pa.push_back(pa.back() * ca);
            pb.push_back(pb.back() * cb);
        }
        cmat sum = cmat::Zero(m, m);
        for (const auto& x : pa)
            for (const auto& y : pb) {
                const cmat c = x * y - y * x;
                sum += c.adjoint() * c;
            }
        Eigen::SelfAdjointEigenSolver<cmat> es(hermitian_part(sum), Eigen::EigenvaluesOnly);
        const rvec ev = es.eigenvalues();
        double det = 1;
        for (int i = 0; i < m; ++i) det *= ev(i);
        const double top = ev.maxCoeff();
        const double rel = top > 1e-300 ? ev.minCoeff() / top : 0.0;
        v.pk_det.push_back(det);
        v.pk_relative.push_back(rel);
        if (rel <= tol.inv) v.vanishing_k.push_back(k);
    }
    v.agree = v.full == v.vanishing_k.empty();
    return v;
}

}  // namespace qcompress
