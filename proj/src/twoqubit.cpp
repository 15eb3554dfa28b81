#include "bsakit/twoqubit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "bsakit/ppt_bsa.hpp"

namespace bsakit {

namespace {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

Vec2 perp(const Vec2& v) {
    return Vec2(-std::conj(v[1]), std::conj(v[0]));
}

void phase_fix(Vec& v) {
    for (int i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > 1e-14) {
            v *= std::conj(v[i]) / std::abs(v[i]);
            return;
        }
    }
}

Mat2 block(const Mat& rho, int ia, int ja) {
    Mat2 b;
    for (int mu = 0; mu < 2; ++mu)
        for (int nu = 0; nu < 2; ++nu)
            b(mu, nu) = rho(ia * 2 + mu, ja * 2 + nu);
    return b;
}

int numerical_rank(const Mat& h, double rank_tol) {
    const EigDecomposition eig = hermitian_eig(h);
    const double cut = rank_tol * eig.eigenvalues.cwiseAbs().maxCoeff();
    int r = 0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
        if (std::abs(eig.eigenvalues[i]) > cut) ++r;
    return r;
}

// PSD principal square root and inverse square root
std::pair<Mat2, Mat2> sqrt_and_isqrt(const Mat2& h) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(h);
    Mat2 s = Mat2::Zero(), is = Mat2::Zero();
    for (int i = 0; i < 2; ++i) {
        const double w = std::max(0.0, es.eigenvalues()[i]);
        const Vec2 u = es.eigenvectors().col(i);
        s += std::sqrt(w) * u * u.adjoint();
        if (w > 0.0) is += (1.0 / std::sqrt(w)) * u * u.adjoint();
    }
    return {s, is};
}

// roots of a complex polynomial (ascending coefficients) via the
// companion matrix of the trimmed monic form
std::vector<cplx> poly_roots(std::vector<cplx> c) {
    double scale = 0.0;
    for (const cplx& x : c) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return {};
    while (c.size() > 1 && std::abs(c.back()) < 1e-12 * scale) c.pop_back();
    const int n = static_cast<int>(c.size()) - 1;
    if (n < 1) return {};
    Mat comp = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];
    for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
    Eigen::ComplexEigenSolver<Mat> es(comp);
    std::vector<cplx> roots;
    for (int i = 0; i < n; ++i) roots.push_back(es.eigenvalues()[i]);
    return roots;
}

} // namespace

RemainderExpansion remainder_expansion(const PureState& psi_e, const Vec& e2_in,
                                       const Vec& f2_in) {
    if (psi_e.psi.size() != 4 || e2_in.size() != 2 || f2_in.size() != 2)
        throw InvalidInput("remainder_expansion: expects a 2x2 state and 2-vectors");
    const RVec sc = schmidt_coefficients(psi_e, {2, 2});
    if (sc.minCoeff() <= 1e-9)
        throw Degenerate("remainder_expansion: product-state input");

    const Vec2 e2 = e2_in.head<2>() / e2_in.norm();
    const Vec2 f2 = f2_in.head<2>() / f2_in.norm();
    const Vec2 e2p = perp(e2);
    const Vec2 f2p = perp(f2);

    // contract the orthogonal complements through psi: psi[2i + mu]
    Vec f1(2), e1(2);
    for (int mu = 0; mu < 2; ++mu)
        f1[mu] = std::conj(e2p[0]) * psi_e.psi[mu] + std::conj(e2p[1]) * psi_e.psi[2 + mu];
    for (int i = 0; i < 2; ++i)
        e1[i] = std::conj(f2p[0]) * psi_e.psi[2 * i] + std::conj(f2p[1]) * psi_e.psi[2 * i + 1];
    if (f1.norm() < 1e-12 || e1.norm() < 1e-12)
        throw Degenerate("remainder_expansion: degenerate overlap with the given pair");
    e1 /= e1.norm();
    phase_fix(e1);

    // psi[2i + mu] = e1[i] g1[mu] + e2[i] g2[mu]; exact 4x4 linear solve
    Mat sys = Mat::Zero(4, 4);
    Vec rhs(4);
    for (int i = 0; i < 2; ++i)
        for (int mu = 0; mu < 2; ++mu) {
            sys(2 * i + mu, mu) = e1[i];
            sys(2 * i + mu, 2 + mu) = e2[i];
            rhs[2 * i + mu] = psi_e.psi[2 * i + mu];
        }
    const Vec g = sys.colPivHouseholderQr().solve(rhs);
    const Vec g1 = g.head(2), g2 = g.tail(2);
    if (g1.norm() < 1e-12 || g2.norm() < 1e-12)
        throw Degenerate("remainder_expansion: expansion has a zero coefficient");

    RemainderExpansion exp;
    exp.n1 = g1.norm();
    exp.n2 = g2.norm();
    exp.e1 = e1;
    exp.f1 = g1 / exp.n1;
    exp.e2 = Vec(e2);
    exp.f2 = g2 / exp.n2;
    return exp;
}

std::array<SplitTerm, 3> projector_split(const RemainderExpansion& exp, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw InvalidInput("projector_split: alpha must lie in (0, 1]");
    auto prod = [](const Vec& e, const Vec& f) {
        Vec psi(4);
        for (int i = 0; i < 2; ++i)
            for (int mu = 0; mu < 2; ++mu)
                psi[2 * i + mu] = e[i] * f[mu];
        return psi;
    };
    const Vec u = prod(exp.e1, exp.f1);
    const Vec v = prod(exp.e2, exp.f2);
    const Vec scaled = alpha * exp.n1 * u + exp.n2 / alpha * v;
    const double nsq = scaled.squaredNorm();

    std::array<SplitTerm, 3> out;
    out[0].weight = nsq;
    out[0].projector = (scaled / scaled.norm()) * (scaled / scaled.norm()).adjoint();
    out[1].weight = exp.n1 * exp.n1 * (1.0 - alpha * alpha);
    out[1].projector = u * u.adjoint();
    out[2].weight = exp.n2 * exp.n2 * (1.0 - 1.0 / (alpha * alpha));
    out[2].projector = v * v.adjoint();
    return out;
}

RangeFamilyPoint rank3_product_family(const DensityMatrix& rho_s, double delta,
                                      double rank_tol) {
    if (rho_s.dims() != BipartiteDims{2, 2})
        throw InvalidInput("rank3_product_family: expects a 2x2 state");
    const Mat& rho = rho_s.mat();
    const Mat rho_ta = partial_transpose(rho_s);
    if (numerical_rank(rho, rank_tol) != 3 || numerical_rank(rho_ta, rank_tol) != 3)
        throw WrongRank("rank3_product_family: both ranks must equal 3");

    const Mat2 ba = block(rho, 0, 0); // Alice-block decomposition
    const Mat2 bb = block(rho, 0, 1);
    const Mat2 bc = block(rho, 1, 1);

    auto cond2 = [](const Mat2& h) {
        Eigen::SelfAdjointEigenSolver<Mat2> es(h);
        const double lo = es.eigenvalues()[0], hi = es.eigenvalues()[1];
        return lo <= 0.0 ? std::numeric_limits<double>::infinity() : hi / lo;
    };
    if (cond2(ba) > 1e10 || cond2(bc) > 1e10) {
        // singular diagonal block: the kernel itself holds a product vector
        const EigDecomposition eig = hermitian_eig(rho);
        const Vec ker = eig.eigenvectors.col(0);
        const ProductVector pv = closest_product_vector(ker, {2, 2});
        RangeFamilyPoint fp{delta, cplx(0, 0), pv};
        if (std::abs(pv.e[0]) > 1e-14) fp.z = pv.e[1] / pv.e[0];
        return fp;
    }

    // Alice rotation u0 = (1, a)/N, u1 = (-a*, 1)/N makes the rotated
    // off-diagonal block B + a*(C - A) - (a*)^2 B^dag singular in
    // determinant; det is a polynomial of degree <= 4 in a*.
    auto detb = [&](cplx s) {
        const Mat2 m = bb + s * (bc - ba) - s * s * bb.adjoint();
        return m.determinant();
    };
    std::vector<cplx> coeffs(5);
    {
        // interpolate the quartic from five evaluations
        const std::array<cplx, 5> pts = {cplx(0, 0), cplx(1, 0), cplx(-1, 0),
                                         cplx(0, 1), cplx(0, -1)};
        Mat vand(5, 5);
        Vec vals(5);
        for (int r = 0; r < 5; ++r) {
            cplx p = 1.0;
            for (int c = 0; c < 5; ++c) {
                vand(r, c) = p;
                p *= pts[r];
            }
            vals[r] = detb(pts[r]);
        }
        const Vec sol = vand.colPivHouseholderQr().solve(vals);
        for (int c = 0; c < 5; ++c) coeffs[c] = sol[c];
    }
    const std::vector<cplx> roots = poly_roots(coeffs);
    if (roots.empty())
        throw Degenerate("rank3_product_family: det of the off-diagonal block "
                         "has no zero");
    cplx astar = roots[0];
    for (const cplx& r : roots)
        if (std::abs(r) < std::abs(astar)) astar = r;
    const cplx a = std::conj(astar);

    const double nr = std::sqrt(1.0 + std::norm(a));
    Mat ua(2, 2); // columns: rotated Alice basis
    ua(0, 0) = 1.0 / nr;
    ua(1, 0) = a / nr;
    ua(0, 1) = -std::conj(a) / nr;
    ua(1, 1) = 1.0 / nr;

    Mat ufull = Mat::Zero(4, 4);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int mu = 0; mu < 2; ++mu)
                ufull(i * 2 + mu, j * 2 + mu) = ua(i, j);
    const Mat rho1 = ufull.adjoint() * rho * ufull;

    const Mat2 b1 = block(rho1, 0, 1);
    const Mat2 c1 = block(rho1, 1, 1);
    const auto [c1_sqrt, c1_isqrt] = sqrt_and_isqrt(c1);

    const Mat2 a2 = c1_isqrt * block(rho1, 0, 0) * c1_isqrt;
    const Mat2 b2 = c1_isqrt * b1 * c1_isqrt;

    // A2 - B2 B2^dag = lambda |psi><psi| by the rank-3 assumption
    const Mat2 h = a2 - b2 * b2.adjoint();
    Eigen::SelfAdjointEigenSolver<Mat2> hes(h);
    const double lam = hes.eigenvalues()[1];
    if (lam < 1e-13)
        throw Degenerate("rank3_product_family: defect block is not rank one");
    const Vec2 psi = hes.eigenvectors().col(1);

    // (e^{i delta}, -1) adj(w0 - w1 B2) psi = 0, linear in (w0, w1) with
    // z = w1/w0; adj(M) = tr(M) I - M on 2x2
    const cplx eid = std::exp(cplx(0.0, delta));
    Eigen::RowVector2cd row(eid, cplx(-1.0, 0.0));
    const cplx c0 = row * psi;
    const cplx c1c = row * ((b2 - b2.trace() * Mat2::Identity()) * psi).eval();
    const double cs = std::max(std::abs(c0), std::abs(c1c));
    if (cs < 1e-13)
        throw Degenerate("rank3_product_family: phase condition is identically zero");
    // c0 w0 + c1 w1 = 0 in homogeneous coordinates (z = w1/w0)
    const cplx w0 = c1c / cs;
    const cplx w1 = -c0 / cs;

    Vec2 f2frame = (w0 * Mat2::Identity() - w1 * b2).trace() * psi -
                   (w0 * Mat2::Identity() - w1 * b2) * psi; // adj(M) psi
    if (f2frame.norm() < 1e-13)
        throw Degenerate("rank3_product_family: vanishing Bob vector");

    // undo the Bob rescale (range maps through sqrt(C)) and the Alice rotation
    Vec f = c1_sqrt * f2frame;
    Vec2 eframe(w0, w1);
    Vec e = ua * eframe;
    e /= e.norm();
    f /= f.norm();

    RangeFamilyPoint fp{delta, (std::abs(w0) > 1e-300 ? w1 / w0 : cplx(0.0)),
                        ProductVector(e, f)};
    return fp;
}

Theorem3Report theorem3_check(const DensityMatrix& rho_s, const PureState& psi_e,
                              int delta_grid) {
    if (rho_s.dims() != BipartiteDims{2, 2} || psi_e.psi.size() != 4)
        throw InvalidInput("theorem3_check: expects 2x2 inputs");
    if (delta_grid < 1)
        throw InvalidInput("theorem3_check: delta_grid must be positive");

    Theorem3Report rep;
    const RVec sc = schmidt_coefficients(psi_e, {2, 2});
    if (std::abs(sc[0] - sc[1]) <= 1e-8) {
        rep.max_entangled = true;
        return rep;
    }
    const int r = numerical_rank(rho_s.mat(), kDefaultRankTol);
    if (r == 4) {
        rep.rank_violation = true;
        return rep;
    }
    if (r < 3)
        throw WrongRank("theorem3_check: separable part rank below 3");

    rep.min_ratio = std::numeric_limits<double>::max();
    for (int t = 0; t < delta_grid; ++t) {
        const double delta = 2.0 * M_PI * t / delta_grid;
        try {
            const RangeFamilyPoint fp = rank3_product_family(rho_s, delta);
            const RemainderExpansion exp =
                remainder_expansion(psi_e, fp.pv.e, fp.pv.f);
            rep.min_ratio = std::min(rep.min_ratio, exp.n1 / exp.n2);
            ++rep.points_used;
        } catch (const Degenerate&) {
            continue;
        }
    }
    if (rep.points_used == 0) rep.min_ratio = 1.0;
    return rep;
}

double concurrence(const DensityMatrix& rho) {
    if (rho.dims() != BipartiteDims{2, 2})
        throw InvalidInput("concurrence: expects a 2x2 state");
    Mat yy = Mat::Zero(4, 4); // sigma_y (x) sigma_y
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Mat r = rho.mat() * yy * rho.mat().conjugate() * yy;
    Eigen::ComplexEigenSolver<Mat> es(r);
    std::array<double, 4> mu{};
    for (int i = 0; i < 4; ++i)
        mu[i] = std::sqrt(std::max(0.0, es.eigenvalues()[i].real()));
    std::sort(mu.begin(), mu.end(), std::greater<>());
    return std::max(0.0, mu[0] - mu[1] - mu[2] - mu[3]);
}

} // namespace bsakit
