#include "bsakit/states.hpp"

#include <cmath>

namespace bsakit {

namespace {

void canonicalize_phase(Vec& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-14) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
    }
}

} // namespace

PureState::PureState(Vec v) : psi(std::move(v)) {
    const double nrm = psi.norm();
    if (std::abs(nrm - 1.0) > 1e-12)
        throw InvalidInput("PureState: vector not normalized (||psi|| = " +
                           std::to_string(nrm) + ")");
}

ProductVector::ProductVector(Vec e_in, Vec f_in) : e(std::move(e_in)), f(std::move(f_in)) {
    if (std::abs(e.norm() - 1.0) > 1e-12 || std::abs(f.norm() - 1.0) > 1e-12)
        throw InvalidInput("ProductVector: local vectors must be normalized");
    canonicalize_phase(e);
    canonicalize_phase(f);
}

ProductVector ProductVector::conjugate_alice() const {
    return ProductVector(e.conjugate(), f);
}

DensityMatrix::DensityMatrix(BipartiteDims dims, const Mat& mat, double tol)
    : dims_(dims), tol_(tol) {
    if (dims.m < 2 || dims.n < 2)
        throw InvalidInput("DensityMatrix: local dimensions must be >= 2");
    if (mat.rows() != dims.total() || mat.cols() != dims.total())
        throw InvalidInput("DensityMatrix: matrix dimension " +
                           std::to_string(mat.rows()) + " does not match m*n = " +
                           std::to_string(dims.total()));
    HermitianMatrix h(mat); // validates hermiticity, symmetrizes
    mat_ = h.mat();
    const double tr = mat_.trace().real();
    if (std::abs(tr - 1.0) > 1e-10)
        throw InvalidInput("DensityMatrix: trace = " + std::to_string(tr) +
                           ", must be 1 within 1e-10");
    if (!is_psd(mat_, tol_))
        throw InvalidInput("DensityMatrix: not positive semidefinite (min eigenvalue " +
                           std::to_string(min_eigenvalue(mat_)) + ")");
}

Mat partial_transpose(const Mat& rho, BipartiteDims dims, Side side) {
    const int m = dims.m, n = dims.n;
    Mat out(rho.rows(), rho.cols());
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            for (int mu = 0; mu < n; ++mu)
                for (int nu = 0; nu < n; ++nu) {
                    if (side == Side::A)
                        out(i * n + mu, j * n + nu) = rho(j * n + mu, i * n + nu);
                    else
                        out(i * n + mu, j * n + nu) = rho(i * n + nu, j * n + mu);
                }
    return out;
}

Mat partial_transpose(const DensityMatrix& rho, Side side) {
    return partial_transpose(rho.mat(), rho.dims(), side);
}

bool is_ppt(const DensityMatrix& rho) {
    return is_psd(partial_transpose(rho, Side::A), rho.tol());
}

PureState product_state(const ProductVector& pv) {
    const int m = static_cast<int>(pv.e.size());
    const int n = static_cast<int>(pv.f.size());
    Vec psi(m * n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j)
            psi[i * n + j] = pv.e[i] * pv.f[j];
    return PureState(psi);
}

PureState bell_singlet() {
    Vec psi = Vec::Zero(4);
    psi[1] = 1.0 / std::sqrt(2.0);
    psi[2] = -1.0 / std::sqrt(2.0);
    return PureState(psi);
}

DensityMatrix werner(double p) {
    if (p < 0.0 || p > 1.0)
        throw InvalidInput("werner: p must lie in [0,1]");
    const Vec psi = bell_singlet().psi;
    Mat rho = p * (psi * psi.adjoint()) + (1.0 - p) * 0.25 * Mat::Identity(4, 4);
    return DensityMatrix({2, 2}, rho);
}

Vec random_gaussian_vector(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) {
        const double re = gauss(rng);
        const double im = gauss(rng);
        v[i] = cplx(re, im);
    }
    return v;
}

DensityMatrix random_density(BipartiteDims dims, int rank, std::uint64_t seed) {
    const int d = dims.total();
    if (rank < 1 || rank > d)
        throw InvalidInput("random_density: rank must lie in [1, m*n]");
    std::mt19937_64 rng(seed);
    Mat g(d, rank);
    for (int j = 0; j < rank; ++j)
        g.col(j) = random_gaussian_vector(d, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityMatrix(dims, rho);
}

ProductVector random_product_vector(BipartiteDims dims, std::mt19937_64& rng) {
    Vec e = random_gaussian_vector(dims.m, rng);
    Vec f = random_gaussian_vector(dims.n, rng);
    e /= e.norm();
    f /= f.norm();
    return ProductVector(e, f);
}

ProductVector random_product_vector(BipartiteDims dims, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_product_vector(dims, rng);
}

RVec schmidt_coefficients(const PureState& psi, BipartiteDims dims) {
    if (psi.psi.size() != dims.total())
        throw InvalidInput("schmidt_coefficients: dimension mismatch");
    Mat reshaped(dims.m, dims.n);
    for (int i = 0; i < dims.m; ++i)
        for (int j = 0; j < dims.n; ++j)
            reshaped(i, j) = psi.psi[i * dims.n + j];
    Eigen::JacobiSVD<Mat> svd(reshaped);
    return svd.singularValues();
}

ProductVector closest_product_vector(const Vec& psi, BipartiteDims dims) {
    if (psi.size() != dims.total())
        throw InvalidInput("closest_product_vector: dimension mismatch");
    Mat reshaped(dims.m, dims.n);
    for (int i = 0; i < dims.m; ++i)
        for (int j = 0; j < dims.n; ++j)
            reshaped(i, j) = psi[i * dims.n + j];
    Eigen::JacobiSVD<Mat> svd(reshaped, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec e = svd.matrixU().col(0);
    Vec f = svd.matrixV().col(0).conjugate();
    return ProductVector(e, f);
}

std::vector<ProductVector> tiles_upb_vectors() {
    const double s = 1.0 / std::sqrt(2.0);
    auto ket = [](std::initializer_list<double> xs) {
        Vec v(static_cast<int>(xs.size()));
        int i = 0;
        for (double x : xs) v[i++] = x;
        return v;
    };
    const Vec k0 = ket({1, 0, 0}), k1 = ket({0, 1, 0}), k2 = ket({0, 0, 1});
    const Vec m01 = s * (k0 - k1), m12 = s * (k1 - k2);
    const Vec sum = (k0 + k1 + k2) / std::sqrt(3.0);
    std::vector<ProductVector> v;
    v.emplace_back(k0, m01);
    v.emplace_back(k2, m12);
    v.emplace_back(m01, k2);
    v.emplace_back(m12, k0);
    v.emplace_back(sum, sum);
    return v;
}

DensityMatrix tiles_upb_state() {
    Mat rho = Mat::Identity(9, 9);
    for (const auto& pv : tiles_upb_vectors()) {
        const Vec psi = product_state(pv).psi;
        rho -= psi * psi.adjoint();
    }
    rho /= 4.0;
    return DensityMatrix({3, 3}, rho);
}

} // namespace bsakit
