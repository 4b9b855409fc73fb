#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qcompress/algebra.hpp"
#include "qcompress/sdp.hpp"

namespace qcompress {

// Is there a unital CP map from the kept blocks onto the target block that
// sends every spanning operator's kept part to its target part?
struct InterpolationProblem {
    int target = 0;
    int target_dim = 0;
    std::vector<int> kept;       // block indices, ascending
    std::vector<int> kept_dims;
    std::vector<int> zeroed;
    std::vector<std::vector<cmat>> inputs;  // inputs[op][kept position]
    std::vector<cmat> targets;              // targets[op]
};

InterpolationProblem make_interpolation_problem(const ReducedObservableSet& red, int target,
                                                const std::vector<int>& zeroed);

// Applies the map whose per-block Choi matrices are `choi` (input factor
// first, unnormalized: J = sum_ab |a><b| (x) Phi(|a><b|)) to a kept-block tuple.
cmat apply_block_choi(const std::vector<cmat>& choi, const std::vector<cmat>& inputs,
                      const std::vector<int>& kept_dims, int target_dim);

struct SdpOutcome {
    bool feasible = false;
    bool linear_consistent = true;  // false: no linear interpolation exists at all
    bool marginal = false;          // |objective| fell inside the margin band
    bool resolved_tighter = false;
    // max over feasible Choi tuples of their smallest eigenvalue; -inf when
    // the linear constraints are inconsistent
    double objective_residual = 0;
    std::vector<cmat> certificate;  // H_i: image of spanning operator i
    std::vector<cmat> choi_blocks;  // per kept block
    int iterations = 0;
    std::string diagnostics;
};

SdpOutcome solve_psd_feasibility(const InterpolationProblem& problem,
                                 const SdpSettings& settings = {},
                                 const Tolerances& tol = default_tolerances());

struct InterpolationCheck {
    double target_deviation = 0;       // Choi map on inputs vs targets
    double certificate_deviation = 0;  // H_i vs targets
    double consistency = 0;            // H_i vs Choi map on inputs
    double choi_min_eig = 0;
    double unitality = 0;              // identity row
    double residual = 0;               // maximum of the above violations
};

InterpolationCheck verify_interpolation(const InterpolationProblem& problem,
                                        const SdpOutcome& cert);

struct InterpolationStep {
    InterpolationProblem problem;
    SdpOutcome outcome;
};

struct DimensionReport {
    std::vector<int> block_dims;
    std::vector<int> multiplicities;
    int lower_bound_min_block = 0;
    int upper_bound_max_block = 0;
    int compression_dimension = 0;
    std::vector<int> redundant_blocks;
    std::vector<int> kept_blocks;
    int classical_register = 0;
    std::vector<InterpolationStep> steps;
};

struct DimensionAnalysis {
    ObservableSet canonical;
    ReducedObservableSet reduced;
    DimensionReport report;
};

DimensionReport compression_dimension(const ReducedObservableSet& red,
                                      const SdpSettings& settings = {},
                                      const Tolerances& tol = default_tolerances());
DimensionReport compression_dimension(const ObservableSet& obs, std::uint64_t seed,
                                      const Tolerances& tol = default_tolerances());
DimensionAnalysis analyze_dimension(const ObservableSet& obs, std::uint64_t seed,
                                    const Tolerances& tol = default_tolerances());

}  // namespace qcompress
