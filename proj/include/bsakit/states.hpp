#ifndef BSAKIT_STATES_HPP
#define BSAKIT_STATES_HPP

#include <cstdint>
#include <random>

#include "bsakit/linalg.hpp"

namespace bsakit {

/// Dimensions of the bipartite space C^m (x) C^n. Kronecker index
/// ordering throughout: composite index = i_A * n + i_B.
struct BipartiteDims {
    int m = 2;
    int n = 2;

    int total() const { return m * n; }
    bool operator==(const BipartiteDims&) const = default;
};

enum class Side { A, B };

/// Normalized bipartite pure state.
struct PureState {
    Vec psi;

    explicit PureState(Vec v);
};

/// Normalized product pair |e,f>. Canonical phase: the first nonzero
/// component of e and of f is real nonnegative.
struct ProductVector {
    Vec e;
    Vec f;

    ProductVector(Vec e_in, Vec f_in);

    /// |e*, f>: Alice part conjugated in the stored computational basis.
    ProductVector conjugate_alice() const;
};

/// Trace-1 PSD Hermitian matrix on an m x n bipartite space.
class DensityMatrix {
public:
    DensityMatrix(BipartiteDims dims, const Mat& mat, double tol = kDefaultPsdTol);

    const BipartiteDims& dims() const { return dims_; }
    const Mat& mat() const { return mat_; }
    double tol() const { return tol_; }
    int dim() const { return dims_.total(); }

private:
    BipartiteDims dims_;
    Mat mat_;
    double tol_;
};

/// Partial transpose per the index rule
/// <m,mu| rho^{T_A} |n,nu> = <n,mu| rho |m,nu> (and its Bob analogue).
Mat partial_transpose(const Mat& rho, BipartiteDims dims, Side side = Side::A);
Mat partial_transpose(const DensityMatrix& rho, Side side = Side::A);

/// Peres test: positivity of the partial transpose at the state's tolerance.
bool is_ppt(const DensityMatrix& rho);

/// Kronecker product state e (x) f.
PureState product_state(const ProductVector& pv);

/// Werner family p * P_{psi-} + (1-p) * I/4 on 2x2, psi- = (|01>-|10>)/sqrt2.
DensityMatrix werner(double p);

/// Bell singlet (|01>-|10>)/sqrt2.
PureState bell_singlet();

/// Wishart-style random state G G^dag / Tr(G G^dag), G an (mn) x rank
/// matrix of standard complex Gaussians. Deterministic for fixed seed.
DensityMatrix random_density(BipartiteDims dims, int rank, std::uint64_t seed);

/// Haar-uniform local unit vectors, canonicalized.
ProductVector random_product_vector(BipartiteDims dims, std::uint64_t seed);
ProductVector random_product_vector(BipartiteDims dims, std::mt19937_64& rng);

/// Complex standard Gaussian vector.
Vec random_gaussian_vector(int dim, std::mt19937_64& rng);

/// Singular values of the m x n reshaping of psi, descending.
RVec schmidt_coefficients(const PureState& psi, BipartiteDims dims);

/// Closest product state: the leading Schmidt term of psi.
ProductVector closest_product_vector(const Vec& psi, BipartiteDims dims);

/// 3x3 PPT entangled state built from the "tiles" unextendible product
/// basis: (I - sum of the five tile projectors) / 4.
DensityMatrix tiles_upb_state();

/// The five tile product vectors themselves.
std::vector<ProductVector> tiles_upb_vectors();

} // namespace bsakit

#endif
