#ifndef BSAKIT_PPT_BSA_HPP
#define BSAKIT_PPT_BSA_HPP

#include "bsakit/bsa.hpp"

namespace bsakit {

/// PPT-preserving decomposition: the remainder and its partial transpose
/// are both PSD.
struct PptBsaDecomposition {
    double lambda = 0.0;
    WeightedProductSet weights;
    std::optional<DensityMatrix> remainder; // defined when lambda < 1
    bool converged = true;
    double edge_gap = 0.0; // filled by ppt_bsa_solve via edge_state_gap
};

/// How a PPT pair maximization resolved: on one boundary curve alone, or
/// at the crossing of the two curves.
struct PptPairCase {
    enum class Id { below, crossing };
    Id case_id = Id::below;
    std::optional<double> lambda_s; // crossing abscissa (first weight)
    std::pair<double, double> chosen{0.0, 0.0};
};

/// Largest weight of P_{e,f} subtractable from a PPT rho keeping the
/// difference PPT: min of the subtraction bounds for rho and rho^{T_A}.
double ppt_max_lambda(const DensityMatrix& rho, const ProductVector& pv,
                      double rank_tol = kDefaultRankTol);
double ppt_max_lambda_raw(const Mat& rho, const Mat& rho_ta, BipartiteDims dims,
                          const ProductVector& pv,
                          double rank_tol = kDefaultRankTol);

/// Jointly PPT-maximal pair of weights, with the crossing-point case logic
/// on the two quadric boundary curves.
std::tuple<double, double, PptPairCase> ppt_pair_max(const DensityMatrix& rho,
                                                     const ProductVector& pv1,
                                                     const ProductVector& pv2,
                                                     double rank_tol = kDefaultRankTol);
std::tuple<double, double, PptPairCase> ppt_pair_max_raw(const Mat& rho, const Mat& rho_ta,
                                                         BipartiteDims dims,
                                                         const ProductVector& pv1,
                                                         const ProductVector& pv2,
                                                         double rank_tol = kDefaultRankTol);

/// PPT-preserving BSA search; same outer architecture as bsa_solve with
/// the dual range condition gating candidate admission.
PptBsaDecomposition ppt_bsa_solve(const DensityMatrix& rho,
                                  const SolverOptions& opts = {});

/// min over product vectors of
/// ||Pi_{K(delta)}|e,f>||^2 + ||Pi_{K(delta^{T_A})}|e*,f>||^2.
/// Bounded away from zero certifies the edge property numerically.
double edge_state_gap(const DensityMatrix& delta, int restarts, std::uint64_t seed);

} // namespace bsakit

#endif
