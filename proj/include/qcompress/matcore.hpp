#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qcompress/tolerances.hpp"

namespace qcompress {

class Rng;

using cplx = std::complex<double>;
using cmat = Eigen::MatrixXcd;
using cvec = Eigen::VectorXcd;
using rmat = Eigen::MatrixXd;
using rvec = Eigen::VectorXd;

double max_abs(const cmat& m);
bool all_finite(const cmat& m);
bool is_hermitian(const cmat& m, double tol);
cmat hermitian_part(const cmat& m);
cmat direct_sum(const std::vector<cmat>& blocks);
cmat kron(const cmat& a, const cmat& b);
// Hilbert-Schmidt inner product tr(a^dagger b).
cplx hs_inner(const cmat& a, const cmat& b);
double min_eigenvalue_hermitian(const cmat& h);

// Real coordinates of a Hermitian matrix with respect to the orthonormal basis
// {E_aa, (E_ab+E_ba)/sqrt2, i(E_ab-E_ba)/sqrt2 : a<b}.
rvec hermitian_coords(const cmat& h);
cmat hermitian_from_coords(const rvec& v, int dim);

// Column-stacking vectorization: vec(X)[i + j*rows] = X(i,j).
cvec vec(const cmat& m);
cmat unvec(const cvec& v, int rows, int cols);

// Operators as ingested: the real span of `operators` together with the
// identity. After canonicalize() the list starts with the identity and the
// remaining entries are traceless, orthonormal and independent over R.
struct ObservableSet {
    int dim = 0;
    std::vector<cmat> operators;
    bool includes_identity = false;
    bool canonical = false;
};

ObservableSet make_observable_set(const std::vector<cmat>& ops,
                                  const Tolerances& tol = default_tolerances());
ObservableSet canonicalize(const ObservableSet& obs,
                           const Tolerances& tol = default_tolerances());

// A linear map M_{dim_in} -> M_{dim_out * classical} in Kraus form,
// rho -> sum_k K_k rho K_k^dagger. The classical register is stored as the
// slow index of the output: row index = j*dim_out + a.
struct QuantumChannel {
    int dim_in = 0;
    int dim_out = 0;
    int classical = 1;
    std::vector<cmat> kraus;

    int output_size() const { return dim_out * classical; }
};

QuantumChannel identity_channel(int dim);
QuantumChannel depolarizing_channel(int dim);
QuantumChannel conjugation_channel(const cmat& v);  // rho -> V rho V^dagger
QuantumChannel random_channel(int dim, int num_kraus, Rng& rng);

cmat apply_channel(const QuantumChannel& ch, const cmat& rho);
QuantumChannel dual_channel(const QuantumChannel& ch);
// Choi matrix (T (x) id)(|Omega><Omega|) with |Omega> normalized; output
// factor first.
cmat choi_matrix(const QuantumChannel& ch);
// Inverse of choi_matrix; negative eigenvalues above -tol are dropped.
QuantumChannel channel_from_choi(const cmat& choi, int dim_in, int dim_out, int classical = 1,
                                 double tol = 1e-12);
// second(first(rho))
QuantumChannel compose(const QuantumChannel& first, const QuantumChannel& second);
// Re-expresses the channel with a minimal Kraus set via its Choi matrix.
QuantumChannel simplify_kraus(const QuantumChannel& ch);

struct CptpReport {
    bool ok = false;
    double tp_residual = 0;     // max-abs of sum K^dagger K - 1
    double choi_min_eig = 0;
};
CptpReport is_cptp(const QuantumChannel& ch, double tol = 1e-9);
// Same criteria for a map given only by its Choi matrix (output factor first).
CptpReport is_cptp_choi(const cmat& choi, int dim_in, int dim_out, double tol = 1e-9);

// vec(T(X)) = M vec(X), for square channels.
cmat transfer_matrix(const QuantumChannel& ch);
// Spectral projection of a transfer matrix onto its eigenvalue-1 eigenspace.
cmat cesaro_mean(const cmat& tm, const Tolerances& tol = default_tolerances());

enum class TraceOut { First, Second };
cmat partial_trace(const cmat& m, int d1, int d2, TraceOut which);

}  // namespace qcompress
