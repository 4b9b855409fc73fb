#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcompress/algebra.hpp"
#include "qcompress/dimension.hpp"
#include "qcompress/matcore.hpp"

namespace qcompress {

// compress: M_D -> M_d (x) C^n, decompress: M_d (x) C^n -> M_D. The classical
// label of kept block kept_blocks[p] is p.
struct CompressionScheme {
    QuantumChannel compress;
    QuantumChannel decompress;
    int d = 0;
    int n = 0;
    std::vector<int> kept_blocks;
};

// Keeps every block, d = max D_j, n = number of blocks.
CompressionScheme build_max_block_scheme(const ReducedObservableSet& red);

// Drops the redundant blocks of the report, rebuilding their statistics from
// the interpolation maps found by the dimension analysis.
CompressionScheme build_optimal_scheme(const ReducedObservableSet& red, const DimensionReport& report,
                                       const Tolerances& tol = default_tolerances());

// Identity on M_D.
CompressionScheme identity_scheme(int dim);

struct SchemeReport {
    double max_residual = 0;
    double random_residual = 0;
    double basis_residual = 0;
    int states_tested = 0;
    CptpReport compress_cptp;
    CptpReport decompress_cptp;
    double dual_unitality = 0;  // max-abs of C*(1) - 1 and D*(1) - 1
    bool ok = false;
};

// Samples `trials` Gaussian-induced states plus D^2 basis states and compares
// tr(rho E) against tr(D(C(rho)) E) for every operator of `obs`.
SchemeReport verify_scheme(const CompressionScheme& scheme, const ObservableSet& obs, int trials,
                           std::uint64_t seed, const Tolerances& tol = default_tolerances());

// The D^2 pure states |a>, (|a>+|b>)/sqrt2, (|a>+i|b>)/sqrt2, a<b; they span
// the Hermitian matrices.
std::vector<cmat> basis_states(int dim);

struct TwoProjectionForm {
    cmat unitary;                // columns: the canonical basis
    int corners[4] = {0, 0, 0, 0};  // M&N, M&N^perp, M^perp&N, M^perp&N^perp
    int r = 0;
    std::vector<double> mu;      // ascending
    std::vector<std::string> flags;
    double template_residual = 0;
    double unitarity_residual = 0;
};

// P, Q orthogonal projections; unitary^dagger P unitary and
// unitary^dagger Q unitary equal the templates below.
TwoProjectionForm two_projection_form(const cmat& p, const cmat& q,
                                      const Tolerances& tol = default_tolerances());
cmat two_projection_template_p(const TwoProjectionForm& form);
cmat two_projection_template_q(const TwoProjectionForm& form);

}  // namespace qcompress
