#include "bsakit/linalg.hpp"

#include <cmath>

namespace bsakit {

HermitianMatrix::HermitianMatrix(const Mat& m) {
    if (m.rows() != m.cols() || m.rows() == 0)
        throw InvalidInput("HermitianMatrix: matrix must be square and nonempty");
    if (!m.allFinite())
        throw InvalidInput("HermitianMatrix: non-finite entries");
    const double scale = std::max(1.0, m.norm());
    const double asym = (m - m.adjoint()).norm();
    if (asym > kHermTol * scale * m.rows())
        throw InvalidInput("HermitianMatrix: hermiticity violated (||H - H^dag|| = " +
                           std::to_string(asym) + ")");
    mat_ = 0.5 * (m + m.adjoint().eval());
}

Mat SubspaceBasis::projector() const {
    if (rank == 0) return Mat::Zero(dim_ambient, dim_ambient);
    return basis * basis.adjoint();
}

EigDecomposition hermitian_eig(const Mat& h) {
    if (!h.allFinite())
        throw InvalidInput("hermitian_eig: non-finite entries");
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (h + h.adjoint().eval()));
    if (solver.info() != Eigen::Success)
        throw InternalError("hermitian_eig: eigensolver failed to converge");
    EigDecomposition dec;
    dec.eigenvalues = solver.eigenvalues();
    dec.eigenvectors = solver.eigenvectors();
    // phase canonicalization: largest-magnitude component real nonnegative
    for (int j = 0; j < dec.eigenvectors.cols(); ++j) {
        int imax = 0;
        double amax = 0.0;
        for (int i = 0; i < dec.eigenvectors.rows(); ++i) {
            const double a = std::abs(dec.eigenvectors(i, j));
            if (a > amax) { amax = a; imax = i; }
        }
        const cplx z = dec.eigenvectors(imax, j);
        if (std::abs(z) > 0.0)
            dec.eigenvectors.col(j) *= std::conj(z) / std::abs(z);
    }
    return dec;
}

EigDecomposition hermitian_eig(const HermitianMatrix& h) {
    return hermitian_eig(h.mat());
}

std::pair<SubspaceBasis, SubspaceBasis> range_kernel(const Mat& h, double rank_tol) {
    if (rank_tol <= 0.0)
        throw InvalidInput("range_kernel: rank_tol must be positive");
    const EigDecomposition dec = hermitian_eig(h);
    const int d = static_cast<int>(dec.eigenvalues.size());
    const double wmax = dec.eigenvalues.cwiseAbs().maxCoeff();
    const double cut = rank_tol * wmax;

    SubspaceBasis range{d, 0, Mat(d, 0), rank_tol};
    SubspaceBasis kernel{d, 0, Mat(d, 0), rank_tol};
    std::vector<int> rcols, kcols;
    for (int i = 0; i < d; ++i) {
        if (std::abs(dec.eigenvalues[i]) > cut) rcols.push_back(i);
        else kcols.push_back(i);
    }
    range.rank = static_cast<int>(rcols.size());
    range.basis.resize(d, range.rank);
    for (size_t j = 0; j < rcols.size(); ++j)
        range.basis.col(static_cast<int>(j)) = dec.eigenvectors.col(rcols[j]);
    kernel.rank = static_cast<int>(kcols.size());
    kernel.basis.resize(d, kernel.rank);
    for (size_t j = 0; j < kcols.size(); ++j)
        kernel.basis.col(static_cast<int>(j)) = dec.eigenvectors.col(kcols[j]);
    return {range, kernel};
}

std::pair<SubspaceBasis, SubspaceBasis> range_kernel(const HermitianMatrix& h,
                                                     double rank_tol) {
    return range_kernel(h.mat(), rank_tol);
}

Mat pinv_on_range(const Mat& h, double rank_tol) {
    const EigDecomposition dec = hermitian_eig(h);
    const double wmax = dec.eigenvalues.cwiseAbs().maxCoeff();
    const double cut = rank_tol * wmax;
    if (dec.eigenvalues.minCoeff() < -cut)
        throw NotPositive("pinv_on_range: eigenvalue " +
                          std::to_string(dec.eigenvalues.minCoeff()) +
                          " below PSD threshold");
    const int d = static_cast<int>(dec.eigenvalues.size());
    Mat result = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        if (std::abs(dec.eigenvalues[i]) > cut)
            result += dec.eigenvectors.col(i) * dec.eigenvectors.col(i).adjoint() /
                      dec.eigenvalues[i];
    }
    return result;
}

HermitianMatrix pinv_on_range(const HermitianMatrix& h, double rank_tol) {
    return HermitianMatrix(pinv_on_range(h.mat(), rank_tol));
}

double min_eigenvalue(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (h + h.adjoint().eval()),
                                              Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

bool is_psd(const Mat& h, double tol) {
    return min_eigenvalue(h) >= -tol * std::max(1.0, h.norm());
}

bool is_psd(const HermitianMatrix& h, double tol) {
    return is_psd(h.mat(), tol);
}

} // namespace bsakit
