#ifndef BSAKIT_BSA_HPP
#define BSAKIT_BSA_HPP

#include <optional>
#include <vector>

#include "bsakit/states.hpp"

namespace bsakit {

/// Weighted product projectors sum_a w_a |e_a,f_a><e_a,f_a|.
struct WeightedProductSet {
    struct Item {
        double weight;
        ProductVector pv;
    };
    std::vector<Item> items;

    double total() const;
    Mat matrix(BipartiteDims dims) const;
};

/// Hermitian matrix of <psi_i| rho^+ |psi_j> entries. Its minors define
/// the boundary manifold of jointly maximal weight vectors.
struct GramMatrix {
    Mat entries;
};

/// rho = lambda * separable_part + (1 - lambda) * remainder, with the
/// separable part an explicit product-projector mixture.
struct BsaDecomposition {
    double lambda = 0.0;
    WeightedProductSet weights;
    std::optional<DensityMatrix> separable_part; // defined when lambda > 0
    std::optional<DensityMatrix> remainder;      // defined when lambda < 1
    bool converged = true;
};

struct SolverOptions {
    double rank_tol = kDefaultRankTol;
    double positivity_tol = kDefaultPsdTol;
    double sweep_tol = 1e-10;  // Lambda improvement threshold per sweep
    int max_sweeps = 200;
    int candidate_count = 40;
    int multistart = 1;
    std::uint64_t seed = 0;
    bool vector_refine = true; // local search on the product of unit spheres

    void validate() const;
};

struct OptimalityReport {
    bool singles_maximal = false;
    bool pairs_maximal = false;
    double worst_single_slack = 0.0;
    double worst_pair_slack = 0.0;
    double perturbation_gain = 0.0;
};

/// Largest weight of P_psi subtractable from rho keeping the difference
/// PSD: 0 if psi leaves the range, else 1 / <psi| rho^+ |psi>.
double max_lambda(const DensityMatrix& rho, const PureState& psi,
                  double rank_tol = kDefaultRankTol);
double max_lambda_raw(const Mat& rho, const Vec& psi,
                      double rank_tol = kDefaultRankTol);

/// Jointly maximal pair of weights for two projectors (sum maximal among
/// all pairs keeping rho - L1 P1 - L2 P2 PSD).
std::pair<double, double> pair_max(const DensityMatrix& rho, const PureState& psi1,
                                   const PureState& psi2,
                                   double rank_tol = kDefaultRankTol);
std::pair<double, double> pair_max_raw(const Mat& rho, const Vec& psi1,
                                       const Vec& psi2,
                                       double rank_tol = kDefaultRankTol);

GramMatrix gram_matrix(const DensityMatrix& rho, const std::vector<PureState>& vectors,
                       double rank_tol = kDefaultRankTol);

/// det(I - diag-weighted Gram product): the alternating minor sum whose
/// zero set is the boundary manifold of maximal weight vectors.
double manifold_residual(const GramMatrix& d, const RVec& lambdas);

/// Pairwise-sweep solver over a fixed candidate set.
BsaDecomposition osa_fixed_set(const DensityMatrix& rho,
                               const std::vector<ProductVector>& candidates,
                               const SolverOptions& opts);

/// Full BSA search: seeded candidates, pairwise sweeps, product-sphere
/// refinement, remainder-range insertion, multistart. The returned
/// lambda is a certified lower bound (reconstruction and PSD always hold).
BsaDecomposition bsa_solve(const DensityMatrix& rho, const SolverOptions& opts = {});

OptimalityReport verify_optimality(const DensityMatrix& rho, const BsaDecomposition& dec,
                                   int trials, std::uint64_t seed);

/// min over product vectors of ||Pi_{K(delta)} |e,f>||^2, by multistart
/// alternating minimization. Near zero: a product vector lies in the range.
double remainder_product_gap(const DensityMatrix& delta, int restarts,
                             std::uint64_t seed);
double remainder_product_gap_raw(const Mat& delta, BipartiteDims dims, int restarts,
                                 std::uint64_t seed,
                                 double rank_tol = kDefaultRankTol,
                                 ProductVector* argmin = nullptr);

/// Max pairwise trace-norm spread of lambda * rho_s over independent
/// multistart solves; small values support uniqueness.
double uniqueness_check(const DensityMatrix& rho, const SolverOptions& opts, int starts);

// -- internals shared with the PPT solver and the measure harnesses --

/// Squared norm of the component of psi outside the numerical range.
double range_defect(const Mat& kernel_projector, const Vec& psi);

/// Alternating minimization of <e,f|Q|e,f> over unit product vectors for
/// PSD Q; returns the achieved minimum and the minimizer.
std::pair<double, ProductVector> minimize_product_overlap(const Mat& q, BipartiteDims dims,
                                                          int restarts,
                                                          std::mt19937_64& rng);

} // namespace bsakit

#endif
