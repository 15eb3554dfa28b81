#ifndef BSAKIT_MEASURES_HPP
#define BSAKIT_MEASURES_HPP

#include "bsakit/bsa.hpp"

namespace bsakit {

/// Complete family of local operation pairs (a_i, b_i):
/// sum_i (a_i a_i^dag) (x) (b_i b_i^dag) = I.
struct LocalPovm {
    struct Element {
        Mat a; // m x m
        Mat b; // n x n
    };
    std::vector<Element> elements;

    /// Frobenius distance of the completeness sum from the identity.
    double completeness_residual(BipartiteDims dims) const;
};

struct MonotonicityReport {
    double lhs = 0.0; // E of the input state
    double rhs = 0.0; // probability-weighted mean of the outcome E values
    std::vector<std::pair<double, double>> outcome_measures; // (prob, E_i)
    double slack = 0.0;              // lhs - rhs
    double identity_residual = 0.0;  // pushed-through weight identity defect
    bool structural_violation = false; // slack below -0.05
};

/// E = 1 - Lambda; an upper bound on the true value since the solver
/// certifies Lambda from below.
double bsa_entanglement(const DensityMatrix& rho, const SolverOptions& opts = {});

/// Deterministic random complete local POVM: k weighted Haar unitaries
/// per side, all cross pairs (k^2 elements), each side rescaled by the
/// inverse square root of its completeness sum so the invariant holds
/// exactly.
LocalPovm random_local_povm(BipartiteDims dims, int k, std::uint64_t seed);

/// Mean-entanglement monotonicity check under a complete local POVM,
/// including the exact pushed-through weight identity (algebra, not
/// optimization, so its residual must be ~1e-8).
MonotonicityReport povm_monotonicity_check(const DensityMatrix& rho,
                                           const LocalPovm& povm,
                                           const SolverOptions& opts = {});

/// |E(rho) - E((Ua (x) Ub) rho (Ua (x) Ub)^dag)|; also asserts that the
/// rotated decomposition stays feasible for the rotated state.
double local_unitary_invariance_check(const DensityMatrix& rho, const Mat& u_a,
                                      const Mat& u_b, const SolverOptions& opts = {});

} // namespace bsakit

#endif
