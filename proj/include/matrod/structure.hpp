#ifndef MATROD_STRUCTURE_HPP
#define MATROD_STRUCTURE_HPP

#include <vector>

#include "matrod/core.hpp"
#include "matrod/rodrigues.hpp"

namespace matrod {

/// x P_n = P_{n+1} alpha_n + P_n beta_n + P_{n-1} gamma_n (coefficients on the right).
struct RecurrenceCoeffs {
    int n = 0;
    Matrix alpha;
    Matrix beta;
    Matrix gamma;
};

/// alpha_n, beta_n, gamma_n from the triangular coefficient system.
RecurrenceCoeffs recurrence_coeffs(const ModelSpec& spec, int n);

/// [L1 + (2n+1) sigma]^-1 [L1 + (2n+2) sigma]^-1 [L1 + (n+1) sigma], via explicit inverses.
Matrix recurrence_alpha_closed_form(const ModelSpec& spec, int n);

/// Largest residual of the three coefficient equations for given alpha, beta, gamma.
double recurrence_system_residual(const ModelSpec& spec, const RecurrenceCoeffs& c);

/// Max coefficient norm of x P_n - (P_{n+1} alpha_n + P_n beta_n + P_{n-1} gamma_n).
double recurrence_residual(const FamilyCache& cache, int n);
double recurrence_residual(const FamilyCache& cache, const RecurrenceCoeffs& c);

struct EigenCheck {
    Matrix eigen_matrix;  // n [(n+1) sigma + L1]
    double residual = 0.0;
};

/// A_1 d/dx P_n = n[(n+1) sigma + L1] P_n; requires [L1, L2] = 0.
EigenCheck eigen_check(const ModelSpec& spec, const FamilyCache& cache, int n);

/// Ladder operator L_n = A x + B + C Q d/dx with L_n P_n = P_{n-1}.
/// A, B, C, G live in the commutative algebra generated by L1, L2; they are
/// scalar multiples of I for scalar data and blockwise scalars for diagonal data.
struct LadderCoeffs {
    int n = 0;
    Matrix a;
    Matrix b;
    Matrix c;
    Matrix g;
    std::vector<Matrix> thetas;  // theta_k = 2 sigma k C + C L1 - A, k = 1..n

    /// True when A, B, C, G are multiples of the identity.
    bool scalar(double tol = 1e-12) const;
};

/// Closed-form ladder coefficients; throws PreconditionError when [L1, L2] != 0
/// and SingularMatrixError ("ladder degenerate") when G is singular.
LadderCoeffs ladder_coeffs(const ModelSpec& spec, int n);

/// Largest residual of the three equations fixing A, B, C.
double ladder_system_residual(const ModelSpec& spec, const LadderCoeffs& c);

/// (A x + B) p + C Q p'
MatrixPolynomial ladder_apply(const ModelSpec& spec, const LadderCoeffs& coeffs, const MatrixPolynomial& p);

} // namespace matrod

#endif
