#pragma once

namespace qcompress {

// Named numerical thresholds. Norms on matrices are max-abs-entry unless a
// function says otherwise.
struct Tolerances {
    double herm = 1e-9;      // Hermiticity of inputs
    double tp = 1e-9;        // trace preservation of channels
    double psd = 1e-9;       // Choi positivity
    double num = 1e-8;       // generic numerical agreement
    double cluster = 1e-7;   // eigenvalue clustering radius (relative)
    double rank = 1e-9;      // rank decisions (relative to largest singular value)
    double block = 1e-8;     // block-diagonality residuals
    double sdp = 1e-6;       // feasible iff objective >= -sdp
    double margin = 1e-4;    // |objective| below this triggers a tighter re-solve
    double interp = 1e-7;    // interpolation certificate residual
    double stat = 1e-8;      // statistics preservation of schemes
    double proj = 1e-9;      // projection check for two-projection inputs
    double angle = 1e-6;     // principal angles this close to 0 or 1 are flagged
    double inv = 1e-9;       // vanishing of compound-matrix invariants (relative)
    double gcd = 1e-8;       // numeric gcd rank threshold
    double root = 1e-6;      // root realness / conjugation tests
};

inline const Tolerances& default_tolerances() {
    static const Tolerances t{};
    return t;
}

}  // namespace qcompress
