#ifndef BSAKIT_TWOQUBIT_HPP
#define BSAKIT_TWOQUBIT_HPP

#include <array>

#include "bsakit/bsa.hpp"

namespace bsakit {

/// Two-term product expansion of an entangled 2x2 pure state,
/// psi = n1 |e1,f1> + n2 |e2,f2> with real nonnegative coefficients
/// (relative phases live in the stored local vectors).
struct RemainderExpansion {
    double n1 = 0.0;
    double n2 = 0.0;
    Vec e1, f1, e2, f2; // unit 2-vectors
};

/// One member of the delta-parameterized family of product vectors lying
/// in R(rho_s) with the Alice-conjugated partner in R(rho_s^{T_A}).
struct RangeFamilyPoint {
    double delta = 0.0;
    cplx z{0.0, 0.0}; // Alice slope e ~ (1, z) in the construction frame
    ProductVector pv;
};

/// One term of the projector split below.
struct SplitTerm {
    double weight = 0.0;
    Mat projector;
};

struct Theorem3Report {
    bool max_entangled = false;
    bool rank_violation = false; // rank-4 separable part with non-maximal psi
    double min_ratio = 1.0;      // min over the family of n1/n2
    int points_used = 0;
};

/// Expand psi_e over {|e1,f1>, |e2,f2>} given the second product pair.
/// e1 and f1 are recovered by contracting psi_e with the vectors
/// orthogonal to e2 resp. f2; the coefficients come from an exact linear
/// solve, so n1 e1 (x) f1 + n2 e2 (x) f2 reconstructs psi_e to 1e-9.
RemainderExpansion remainder_expansion(const PureState& psi_e, const Vec& e2,
                                       const Vec& f2);

/// P_psi = N(alpha)^2 P_{psi(alpha)} + n1^2 (1-alpha^2) P_{e1 f1}
///       + n2^2 (1-alpha^-2) P_{e2 f2}; returns the three weighted terms
/// in that order. alpha must lie in (0, 1].
std::array<SplitTerm, 3> projector_split(const RemainderExpansion& exp, double alpha);

/// A member of the one-parameter family of product vectors in the range
/// of a rank-3 2x2 PPT state (with the conjugated partner in the range
/// of the partial transpose), built by the block construction: Alice
/// rotation zeroing det of the off-diagonal block, Bob rescale by the
/// inverse square root of the lower diagonal block, linear solve for the
/// Alice slope z at the given delta, then undoing both transforms.
RangeFamilyPoint rank3_product_family(const DensityMatrix& rho_s, double delta,
                                      double rank_tol = kDefaultRankTol);

/// Necessary-condition scan: either psi_e is maximally entangled, or the
/// separable part has rank 3 and the expansion coefficient ratio n1/n2
/// over the range family is reported (direction left to the caller).
Theorem3Report theorem3_check(const DensityMatrix& rho_s, const PureState& psi_e,
                              int delta_grid);

/// Wootters spin-flip concurrence; 0 iff separable on 2x2.
double concurrence(const DensityMatrix& rho);

} // namespace bsakit

#endif
