#pragma once

// Generated by tests/oracles/derive_oracles.py; do not edit by hand.

namespace oracle {

// det[x 1 - A - z B] for the degree-3 pair, coefficient of x^a z^b
inline constexpr double kDegree3Coefficients[4][4] = {
    {-0.5, 0.0, -0.5, 0.0},
    {-1.0, 0.0, -1.0, 0.0},
    {0.5, 0.0, 0.0, 0.0},
    {1.0, 0.0, 0.0, 0.0},
};
// real factor degrees in x: 1, 2
inline constexpr int kDegree3FactorDegrees[2] = {1, 2};

// derivative of det[x 1 + A + iB + tB] at t = 0, for D = 2..6 and x in kExpansionX
inline constexpr double kExpansionX[3] = {0.3, 1.7, -0.8};
inline constexpr double kExpansionDerivative[5][3][2] = {
    {{0.0, -0.5}, {0.0, -0.5}, {0.0, -0.5}},
    {{0.0, 0.05}, {0.0, -2.05}, {0.0, 1.7}},
    {{0.0, -0.17}, {0.0, -5.77}, {0.0, -4.02}},
    {{0.0, 0.065}, {0.0, -13.865}, {0.0, 8.26}},
    {{0.0, -0.06575}, {0.0, -30.58575}, {0.0, -15.892}},
};
// largest factor degree of the family curve over Q(i), D = 2..6
inline constexpr int kIrreducibleLargestFactor[5] = {2, 3, 4, 5, 6};

// first planted instance: the interpolation is unique with Choi blocks B_i,
// so the optimum of the min-eigenvalue program is min_i lambda_min(B_i)
inline constexpr double kPlanted1Lambda = 0.08550100402011268;
// second planted instance: unique linear interpolation onto M_2, not positive
inline constexpr double kPlanted2Lambda = -3.849224209941837;
// Phi(A_1) on C^3 for the second planted instance
inline constexpr double kPlanted2PhiA1[3] = {0.22166666666666665, 0.3516666666666667, 0.2816666666666667};

}  // namespace oracle
