#ifndef MATROD_ORTHOGONALITY_HPP
#define MATROD_ORTHOGONALITY_HPP

#include <string>
#include <vector>

#include "matrod/quadrature.hpp"
#include "matrod/rodrigues.hpp"
#include "matrod/weights.hpp"

namespace matrod {

/// The weight is not integrable against polynomials on J.
class IntegrabilityError : public Error {
public:
    using Error::Error;
};

/// Throws IntegrabilityError naming the violated spectrum condition.
void check_integrability(const Weight& weight);

/// Domain (with endpoint exponents) for integrals against this weight.
Domain integration_domain(const Weight& weight);

struct MomentMatrix {
    int k = 0;
    Matrix value;
    double error = 0.0;
    double condition = 0.0;
};

/// M_k = int_J x^k W(x) dx
MomentMatrix moment(const Weight& weight, int k, double tol = kDefaultQuadratureTol);
/// int_J Q(x)^k W(x) dx; equals M_k when Q = x.
MomentMatrix q_moment(const Weight& weight, int k, double tol = kDefaultQuadratureTol);

enum class GramVariant {
    StarLeft,     // P_j^* W P_k, vanishes for j < k
    StarRight,    // P_j^* W^* P_k, vanishes for j > k
    Commutative,  // P_j W P_k, vanishes for j != k
};

std::string to_string(GramVariant variant);
GramVariant gram_variant_from_string(const std::string& name);
bool expected_vanishing(GramVariant variant, int j, int k);

struct GramEntry {
    int j = 0;
    int k = 0;
    Matrix entry;
    double error = 0.0;
    bool vanishing = false;
    bool converged = false;
};

struct GramReport {
    GramVariant variant = GramVariant::StarLeft;
    int n_max = 0;
    std::vector<GramEntry> entries;  // row-major in (j, k)

    const GramEntry& at(int j, int k) const { return entries.at(static_cast<size_t>(j * (n_max + 1) + k)); }
    /// Every entry the variant predicts to vanish is classified as vanishing.
    bool pattern_holds() const;
};

/// Entries with |entry| <= this multiple of the error estimate are vanishing.
inline constexpr double kVanishingFactor = 10.0;

/// Gram integrals for (j, k) in 0..n_max, OpenMP over entries.
GramReport gram_matrix(const FamilyCache& cache, const Weight& weight, GramVariant variant,
                       double tol = kDefaultQuadratureTol);
/// Serial reference; bitwise identical to gram_matrix.
GramReport gram_matrix_serial(const FamilyCache& cache, const Weight& weight, GramVariant variant,
                              double tol = kDefaultQuadratureTol);

/// Integration by parts gives int P_k W P_k = (-1)^k P_k^{(k)} int Q^k W and
/// P_k^{(k)} = k! C_k, so the factorial belongs in the norm identity.
inline constexpr bool kNormIdentityHasFactorial = true;

/// (-1)^k k! (or (-1)^k without the factorial)
double norm_identity_factor(int k, bool with_factorial = kNormIdentityHasFactorial);

struct NormIdentity {
    int k = 0;
    Matrix lhs;              // int P_k W P_k
    Matrix rhs_factorial;    // (-1)^k k! C_k int Q^k W
    Matrix rhs_plain;        // (-1)^k C_k int Q^k W
    double gap_factorial = 0.0;  // relative to ||lhs||
    double gap_plain = 0.0;
    double quadrature_error = 0.0;
};

NormIdentity norm_identity_check(const FamilyCache& cache, const Weight& weight, int k,
                                 double tol = kDefaultQuadratureTol);

/// q_k = [(-1)^k k! C_k int Q^k W]^-1 int P_k W p; requires commuting L1, L2.
std::vector<Matrix> expand_by_integrals(const FamilyCache& cache, const Weight& weight, const MatrixPolynomial& p,
                                        double tol = kDefaultQuadratureTol);

} // namespace matrod

#endif
