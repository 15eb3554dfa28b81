#ifndef BSAKIT_LINALG_HPP
#define BSAKIT_LINALG_HPP

#include <Eigen/Dense>
#include <complex>

#include "bsakit/errors.hpp"

namespace bsakit {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-12;
inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kDefaultPsdTol = 1e-9;

/// Dense complex Hermitian matrix. Construction symmetrizes the input;
/// entries further than 1e-12 from Hermitian are rejected.
class HermitianMatrix {
public:
    explicit HermitianMatrix(const Mat& m);

    int dim() const { return static_cast<int>(mat_.rows()); }
    const Mat& mat() const { return mat_; }

private:
    Mat mat_;
};

/// Spectral decomposition H = U diag(w) U^dag, eigenvalues ascending.
/// Eigenvector phases are canonical: the largest-magnitude component of
/// each column is real nonnegative.
struct EigDecomposition {
    RVec eigenvalues;
    Mat eigenvectors; // columns
};

/// Orthonormal basis of a subspace of C^d.
struct SubspaceBasis {
    int dim_ambient = 0;
    int rank = 0;
    Mat basis; // dim_ambient x rank, orthonormal columns
    double tol_used = 0.0;

    /// Orthogonal projector onto the spanned subspace.
    Mat projector() const;
};

EigDecomposition hermitian_eig(const HermitianMatrix& h);
EigDecomposition hermitian_eig(const Mat& h);

/// Splits C^d into numerical range and kernel of h. An eigenvalue w is
/// counted in the range iff |w| > rank_tol * max_i |w_i|.
std::pair<SubspaceBasis, SubspaceBasis> range_kernel(const HermitianMatrix& h,
                                                     double rank_tol = kDefaultRankTol);
std::pair<SubspaceBasis, SubspaceBasis> range_kernel(const Mat& h,
                                                     double rank_tol = kDefaultRankTol);

/// Moore-Penrose pseudo-inverse of a PSD matrix, restricted to its
/// numerical range. Throws NotPositive if h has an eigenvalue below
/// -rank_tol * max|w|.
HermitianMatrix pinv_on_range(const HermitianMatrix& h,
                              double rank_tol = kDefaultRankTol);
Mat pinv_on_range(const Mat& h, double rank_tol = kDefaultRankTol);

/// True iff min eigenvalue >= -tol * max(1, ||h||_F).
bool is_psd(const HermitianMatrix& h, double tol = kDefaultPsdTol);
bool is_psd(const Mat& h, double tol = kDefaultPsdTol);

double min_eigenvalue(const Mat& h);

} // namespace bsakit

#endif
