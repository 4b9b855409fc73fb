#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qcompress/matcore.hpp"

namespace qcompress {

// p(x,z) = det[x 1 - E1 - z E2], coefficients(a, b) of x^a z^b.
struct DeterminantalCurve {
    int degree = 0;
    rmat coefficients;
    cmat e1, e2;  // source pencil; may be empty for curves built from coefficients
};

DeterminantalCurve extract_curve(const cmat& e1, const cmat& e2);
std::complex<double> evaluate_curve(const rmat& coefficients, cplx x, cplx z);

struct MonodromySettings {
    double lasso_fraction = 0.25;  // small-loop radius / nearest-neighbour distance
    int min_steps = 32;            // per path piece, before adaptive refinement
    double match_ratio = 0.5;      // closest / second-closest distance bound
    int max_halvings = 20;
    int disc_extra_points = 4;
    double branch_merge = 1e-7;    // relative radius for merging polished branch points
    bool split_blocks = true;      // factor a reducible pencil block by block
};

struct Orbit {
    int size = 0;
    int multiplicity = 1;
    bool self_conjugate = true;
};

struct MonodromyDiagnostics {
    int squarefree_degree = 0;
    int gcd_degree = 0;
    int loops = 0;
    long steps = 0;
    int halvings = 0;
    int trivial_loops = 0;         // loops inducing the identity permutation
    int cluster_loops = 0;         // loops around isolated groups of branch points
    bool loop_product_consistent = false;
    double max_imag_on_real_slices = 0;
    bool hyperbolic = false;
    std::string notes;
};

struct FactorizationResult {
    std::vector<Orbit> orbits;
    std::vector<int> complex_orbit_sizes;  // repeated by multiplicity, sums to D
    std::vector<int> real_factor_degrees;  // repeated by multiplicity, sums to D
    int min_real_degree = 0;
    std::vector<cplx> branch_points;
    cplx base_point = 0;
    MonodromyDiagnostics diagnostics;
};

FactorizationResult factor_by_monodromy(const DeterminantalCurve& curve, const MonodromySettings& settings = {},
                                        const Tolerances& tol = default_tolerances());

enum class PairChoice { Given, RandomDraws };

struct GeometricBound {
    int bound = 1;
    cmat e1, e2;
    FactorizationResult factorization;
    int draws = 0;
};

// Lower bound on the compression dimension from real factor degrees of the
// determinantal curve of a pair in the operator system.
GeometricBound geometric_lower_bound(const ObservableSet& obs, PairChoice choice, std::uint64_t seed,
                                     int draws = 3, const Tolerances& tol = default_tolerances());

// The irreducible family: A has 1/2 off the diagonal, B has i/2 above and
// -i/2 below it.
std::pair<cmat, cmat> gen_irreducible_example(int dim);
// Diagonal A and tridiagonal B of the reducible curve (x + 1/2)(x^2 - 1 - z^2).
std::pair<cmat, cmat> degree3_example();

struct ExpansionSample {
    double x = 0;
    double eps = 0;
    cplx finite_difference;  // central difference of det[A~(x) + t B] at t = 0
    cplx predicted;          // -(i/2)[D x^{D-1} + (x-1)^D - x^D]
    double residual = 0;
    double zeroth_order = 0;  // |det[A~(x)] - x^D|
};

struct ExpansionCheck {
    std::vector<ExpansionSample> samples;
    double max_residual = 0;
    // log10 of the first-order remainder ratio between eps = 1e-4 and 1e-5,
    // per x; about 2 for a quadratic remainder
    std::vector<double> slopes;
};

ExpansionCheck determinant_expansion_check(int dim, const std::vector<double>& xs,
                                           const std::vector<double>& eps = {1e-4, 1e-5});

}  // namespace qcompress
