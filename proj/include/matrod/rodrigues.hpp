#ifndef MATROD_RODRIGUES_HPP
#define MATROD_RODRIGUES_HPP

#include <algorithm>
#include <vector>

#include "matrod/core.hpp"
#include "matrod/weights.hpp"

namespace matrod {

/// P_0..P_N generated by the operator product, with their leading coefficients.
struct FamilyCache {
    ModelSpec spec;
    std::vector<MatrixPolynomial> polys;  // polys[n] = P_n
    std::vector<Matrix> leading;          // leading[n] = C_n, leading[0] = I

    int n_max() const noexcept { return static_cast<int>(polys.size()) - 1; }
    const MatrixPolynomial& operator[](int n) const { return polys.at(static_cast<size_t>(n)); }
};

/// A_k r = k Q' r + x L1 r + L2 r + Q r', constant matrices acting from the left.
MatrixPolynomial apply_operator(const ModelSpec& spec, int k, const MatrixPolynomial& r);

/// Residuals of the three operator identities for A_k acting on r:
///   A_k(x r) = x A_k r + Q r,  Q A_k r = A_{k-1}(Q r),  (A_k r)' = A_{k+1} r' + (2 sigma k + L1) r.
struct CommutationResiduals {
    double shift = 0.0;
    double q_multiply = 0.0;
    double derivative = 0.0;

    double max() const noexcept { return std::max({shift, q_multiply, derivative}); }
};

CommutationResiduals commutation_residuals(const ModelSpec& spec, int k, const MatrixPolynomial& r);

/// P_n = A_1 A_2 ... A_n I, applied innermost first.
MatrixPolynomial generate_polynomial(const ModelSpec& spec, int n);

/// Validates the spec, then builds P_0..P_{n_max} (OpenMP over n).
FamilyCache generate_family(const ModelSpec& spec, int n_max);
/// Serial reference for generate_family.
FamilyCache generate_family_serial(const ModelSpec& spec, int n_max);

/// C_n = (L1 + 2n sigma)(L1 + (2n-1) sigma) ... (L1 + (n+1) sigma); C_0 = I.
Matrix leading_coefficient(const ModelSpec& spec, int n);

/// q_0..q_deg with p = sum_k P_k q_k (q_k on the right), by top-down elimination.
std::vector<Matrix> expand_in_basis(const FamilyCache& cache, const MatrixPolynomial& p);

/// sum_k P_k q_k
MatrixPolynomial resum(const FamilyCache& cache, const std::vector<Matrix>& q);

/// Finite-difference evaluation of W^-1 d^n/dx^n [Q^n W] at x, n in 1..3.
Matrix rodrigues_numeric_oracle(const ModelSpec& spec, const Weight& weight, int n, double x);

} // namespace matrod

#endif
