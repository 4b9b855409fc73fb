#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qcompress {

// Block-diagonal real symmetric semidefinite program in the pair
//   primal: minimize <C, X>  s.t. <A_k, X> = b_k, X >= 0
//   dual:   maximize b^T y   s.t. S = C - sum_k y_k A_k >= 0
// Every matrix is a list of symmetric blocks sharing the sizes in block_sizes.
struct SdpProblem {
    std::vector<int> block_sizes;
    std::vector<Eigen::MatrixXd> c;
    std::vector<std::vector<Eigen::MatrixXd>> a;  // a[k][block]
    Eigen::VectorXd b;
};

struct SdpSettings {
    double tol = 1e-8;
    int max_iter = 120;
    double step_fraction = 0.95;
};

enum class SdpStatus { Optimal, MaxIterations, NumericalFailure };

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    Eigen::VectorXd y;
    std::vector<Eigen::MatrixXd> x, s;
    double primal_objective = 0;
    double dual_objective = 0;
    double primal_infeasibility = 0;
    double dual_infeasibility = 0;
    double relative_gap = 0;
    int iterations = 0;
    std::string message;
};

// Mehrotra predictor-corrector with the HKM search direction.
SdpSolution solve_sdp(const SdpProblem& problem, const SdpSettings& settings = {});

// Real embedding of a Hermitian matrix: [[Re H, -Im H], [Im H, Re H]].
Eigen::MatrixXd real_embedding(const Eigen::MatrixXcd& h);
// Inverse on the image of real_embedding; for a general symmetric PSD input it
// returns a Hermitian PSD matrix with the same inner products against
// embedded Hermitian data.
Eigen::MatrixXcd complex_from_embedding(const Eigen::MatrixXd& m);

}  // namespace qcompress
