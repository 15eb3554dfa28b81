#include "bsakit/measures.hpp"

#include <algorithm>
#include <cmath>

namespace bsakit {

namespace {

Mat kron(const Mat& x, const Mat& y) {
    Mat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (int i = 0; i < x.rows(); ++i)
        for (int j = 0; j < x.cols(); ++j)
            out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    return out;
}

Mat haar_unitary(int d, std::mt19937_64& rng) {
    Mat g(d, d);
    for (int j = 0; j < d; ++j) g.col(j) = random_gaussian_vector(d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    const Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < d; ++j) {
        const cplx rd = r(j, j);
        if (std::abs(rd) > 0.0) q.col(j) *= rd / std::abs(rd);
    }
    return q;
}

Mat isqrt_psd(const Mat& h) {
    const EigDecomposition eig = hermitian_eig(h);
    Mat out = Mat::Zero(h.rows(), h.cols());
    for (int i = 0; i < eig.eigenvalues.size(); ++i) {
        if (eig.eigenvalues[i] <= 0.0)
            throw InvalidInput("povm rescale: completeness sum not positive definite");
        const auto u = eig.eigenvectors.col(i);
        out += (1.0 / std::sqrt(eig.eigenvalues[i])) * u * u.adjoint();
    }
    return out;
}

std::vector<Mat> side_family(int d, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.2, 1.0);
    std::vector<Mat> fam;
    Mat sum = Mat::Zero(d, d);
    for (int i = 0; i < k; ++i) {
        const double w = (k == 1) ? 1.0 : uni(rng);
        fam.push_back(std::sqrt(w) * haar_unitary(d, rng));
        sum += fam.back() * fam.back().adjoint();
    }
    const Mat s = isqrt_psd(sum);
    for (Mat& a : fam) a = s * a;
    return fam;
}

double lambda_of(const DensityMatrix& rho, const SolverOptions& opts,
                 const std::vector<ProductVector>& warm) {
    double lam = bsa_solve(rho, opts).lambda;
    if (!warm.empty())
        lam = std::max(lam, osa_fixed_set(rho, warm, opts).lambda);
    return std::min(1.0, lam);
}

} // namespace

double LocalPovm::completeness_residual(BipartiteDims dims) const {
    Mat sum = Mat::Zero(dims.total(), dims.total());
    for (const Element& el : elements)
        sum += kron(el.a * el.a.adjoint(), el.b * el.b.adjoint());
    return (sum - Mat::Identity(dims.total(), dims.total())).norm();
}

double bsa_entanglement(const DensityMatrix& rho, const SolverOptions& opts) {
    return std::clamp(1.0 - bsa_solve(rho, opts).lambda, 0.0, 1.0);
}

LocalPovm random_local_povm(BipartiteDims dims, int k, std::uint64_t seed) {
    if (k < 1)
        throw InvalidInput("random_local_povm: k must be >= 1");
    std::mt19937_64 rng(seed);
    const std::vector<Mat> fa = side_family(dims.m, k, rng);
    const std::vector<Mat> fb = side_family(dims.n, k, rng);
    LocalPovm povm;
    for (const Mat& a : fa)
        for (const Mat& b : fb)
            povm.elements.push_back({a, b});
    return povm;
}

MonotonicityReport povm_monotonicity_check(const DensityMatrix& rho,
                                           const LocalPovm& povm,
                                           const SolverOptions& opts) {
    const BipartiteDims dims = rho.dims();
    if (povm.completeness_residual(dims) > 1e-9)
        throw InvalidInput("povm_monotonicity_check: POVM is not complete");

    const BsaDecomposition parent = bsa_solve(rho, opts);

    MonotonicityReport rep;
    rep.lhs = std::clamp(1.0 - parent.lambda, 0.0, 1.0);

    double prob_sum = 0.0;
    double pushed_sum = 0.0; // sum_i p_i * Lambda_i with pushed weights
    for (const LocalPovm::Element& el : povm.elements) {
        const Mat v = kron(el.a, el.b);
        const Mat mapped = v * rho.mat() * v.adjoint();
        const double p = mapped.trace().real();
        prob_sum += p;

        // exact pushed-through separable weight (no re-solving)
        for (const auto& item : parent.weights.items) {
            const Vec psi = product_state(item.pv).psi;
            pushed_sum += item.weight * (v * psi).squaredNorm();
        }
        if (p < 1e-10) continue;

        std::vector<ProductVector> warm;
        for (const auto& item : parent.weights.items) {
            const Vec e = el.a * item.pv.e;
            const Vec f = el.b * item.pv.f;
            if (e.norm() > 1e-8 && f.norm() > 1e-8)
                warm.emplace_back(e / e.norm(), f / f.norm());
        }
        const DensityMatrix rho_i(dims, mapped / p, std::max(rho.tol(), 1e-8));
        const double ei = std::clamp(1.0 - lambda_of(rho_i, opts, warm), 0.0, 1.0);
        rep.outcome_measures.emplace_back(p, ei);
        rep.rhs += p * ei;
    }
    if (std::abs(prob_sum - 1.0) > 1e-9)
        throw InvalidInput("povm_monotonicity_check: outcome probabilities sum to " +
                           std::to_string(prob_sum));

    rep.slack = rep.lhs - rep.rhs;
    rep.structural_violation = rep.slack < -0.05;
    // identity: 1 - Lambda = sum_i p_i (1 - Lambda_i^pushed)
    rep.identity_residual = std::abs((1.0 - parent.lambda) - (prob_sum - pushed_sum));
    return rep;
}

double local_unitary_invariance_check(const DensityMatrix& rho, const Mat& u_a,
                                      const Mat& u_b, const SolverOptions& opts) {
    const BipartiteDims dims = rho.dims();
    auto check_unitary = [](const Mat& u, int d) {
        if (u.rows() != d || u.cols() != d ||
            (u.adjoint() * u - Mat::Identity(d, d)).norm() > 1e-10)
            throw InvalidInput("local_unitary_invariance_check: input not unitary");
    };
    check_unitary(u_a, dims.m);
    check_unitary(u_b, dims.n);

    const Mat u = kron(u_a, u_b);
    const DensityMatrix rotated(dims, u * rho.mat() * u.adjoint(), rho.tol());

    const BsaDecomposition dec = bsa_solve(rho, opts);
    std::vector<ProductVector> pushed;
    for (const auto& item : dec.weights.items) {
        Vec e = u_a * item.pv.e;
        Vec f = u_b * item.pv.f;
        pushed.emplace_back(e / e.norm(), f / f.norm());
    }
    if (!pushed.empty()) {
        const BsaDecomposition re = osa_fixed_set(rotated, pushed, opts);
        if (re.lambda < dec.lambda - 1e-6)
            throw InternalError("local_unitary_invariance_check: rotated "
                                "decomposition lost feasibility");
    }
    const double e1 = std::clamp(1.0 - dec.lambda, 0.0, 1.0);
    const double e2 = bsa_entanglement(rotated, opts);
    return std::abs(e1 - e2);
}

} // namespace bsakit
