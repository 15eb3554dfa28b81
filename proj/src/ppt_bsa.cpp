#include "bsakit/ppt_bsa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bsakit {

namespace {

struct Spectral {
    Mat pinv;
    Mat kproj;
    double wmax = 0.0;
    int rank = 0;
};

Spectral spectral(const Mat& h, double rank_tol) {
    const EigDecomposition eig = hermitian_eig(h);
    const int d = static_cast<int>(eig.eigenvalues.size());
    Spectral s;
    s.wmax = eig.eigenvalues.cwiseAbs().maxCoeff();
    const double cut = rank_tol * s.wmax;
    s.pinv = Mat::Zero(d, d);
    s.kproj = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const auto col = eig.eigenvectors.col(i);
        if (std::abs(eig.eigenvalues[i]) > cut) {
            s.pinv += col * col.adjoint() / eig.eigenvalues[i];
            ++s.rank;
        } else {
            s.kproj += col * col.adjoint();
        }
    }
    return s;
}

bool in_range(const Spectral& s, const Vec& psi, double rank_tol) {
    return std::sqrt(range_defect(s.kproj, psi)) <= rank_tol;
}

double psd_floor(const Mat& m) { return 1e-9 * std::max(1.0, m.norm()); }

// One quadric boundary curve 1 - l1*a - l2*b + l1*l2*(ab - |c|^2) = 0,
// solved for l2 as a function of l1 on [0, 1/a].
struct Curve {
    double a = 0.0, b = 0.0, cabs = 0.0;

    double det() const { return a * b - cabs * cabs; }
    double l2_of(double l1) const {
        const double den = b - det() * l1;
        if (den <= 0.0) return std::numeric_limits<double>::infinity();
        return std::max(0.0, (1.0 - a * l1) / den);
    }
    // unconstrained argmax of l1 + l2 along the curve (Lemma-2 stationary point)
    std::optional<double> stationary() const {
        if (cabs <= 1e-14 * std::max(a, b)) return std::nullopt;
        const double d = det();
        if (d <= 1e-14 * a * b) return std::nullopt;
        const double l1 = (b - cabs) / d;
        if (l1 < 0.0 || l1 > 1.0 / a) return std::nullopt;
        return l1;
    }
};

Curve make_curve(const Spectral& s, const Vec& psi1, const Vec& psi2) {
    Curve c;
    c.a = (psi1.adjoint() * s.pinv * psi1)(0, 0).real();
    c.b = (psi2.adjoint() * s.pinv * psi2)(0, 0).real();
    c.cabs = std::abs((psi1.adjoint() * s.pinv * psi2)(0, 0));
    return c;
}

} // namespace

double ppt_max_lambda_raw(const Mat& rho, const Mat& rho_ta, BipartiteDims dims,
                          const ProductVector& pv, double rank_tol) {
    const Vec psi = product_state(pv).psi;
    const Vec psi_c = product_state(pv.conjugate_alice()).psi;
    const Spectral s0 = spectral(rho, rank_tol);
    const Spectral s1 = spectral(rho_ta, rank_tol);
    if (!in_range(s0, psi, rank_tol) || !in_range(s1, psi_c, rank_tol)) return 0.0;
    const double d0 = (psi.adjoint() * s0.pinv * psi)(0, 0).real();
    const double d1 = (psi_c.adjoint() * s1.pinv * psi_c)(0, 0).real();
    if (d0 <= 0.0 || d1 <= 0.0) return 0.0;
    return std::min(1.0 / d0, 1.0 / d1);
}

double ppt_max_lambda(const DensityMatrix& rho, const ProductVector& pv,
                      double rank_tol) {
    if (!is_ppt(rho))
        throw NotPpt("ppt_max_lambda: state is not PPT");
    return ppt_max_lambda_raw(rho.mat(), partial_transpose(rho), rho.dims(), pv,
                              rank_tol);
}

std::tuple<double, double, PptPairCase> ppt_pair_max_raw(const Mat& rho, const Mat& rho_ta,
                                                         BipartiteDims dims,
                                                         const ProductVector& pv1,
                                                         const ProductVector& pv2,
                                                         double rank_tol) {
    const Vec psi1 = product_state(pv1).psi;
    const Vec psi2 = product_state(pv2).psi;
    const Vec psi1c = product_state(pv1.conjugate_alice()).psi;
    const Vec psi2c = product_state(pv2.conjugate_alice()).psi;
    const Spectral s0 = spectral(rho, rank_tol);
    const Spectral s1 = spectral(rho_ta, rank_tol);

    const bool ok1 = in_range(s0, psi1, rank_tol) && in_range(s1, psi1c, rank_tol);
    const bool ok2 = in_range(s0, psi2, rank_tol) && in_range(s1, psi2c, rank_tol);
    PptPairCase pc;
    if (!ok1 && !ok2) return {0.0, 0.0, pc};
    if (!ok2) {
        const double l = ppt_max_lambda_raw(rho, rho_ta, dims, pv1, rank_tol);
        pc.chosen = {l, 0.0};
        return {l, 0.0, pc};
    }
    if (!ok1) {
        const double l = ppt_max_lambda_raw(rho, rho_ta, dims, pv2, rank_tol);
        pc.chosen = {0.0, l};
        return {0.0, l, pc};
    }

    const Curve c0 = make_curve(s0, psi1, psi2);
    const Curve c1 = make_curve(s1, psi1c, psi2c);
    const double l1_cap = std::min(1.0 / c0.a, 1.0 / c1.a);

    auto feasible = [&](double l1, double l2) {
        const Mat d = rho - l1 * (psi1 * psi1.adjoint()) - l2 * (psi2 * psi2.adjoint());
        const Mat dt = rho_ta - l1 * (psi1c * psi1c.adjoint()) -
                       l2 * (psi2c * psi2c.adjoint());
        return min_eigenvalue(d) >= -psd_floor(rho) &&
               min_eigenvalue(dt) >= -psd_floor(rho_ta);
    };

    // crossing abscissae of the two quadrics: (1-a0 l)(b1-d1 l) = (1-a1 l)(b0-d0 l)
    std::vector<double> crossings;
    {
        const double d0 = c0.det(), d1 = c1.det();
        const double qa = c0.a * d1 - c1.a * d0;
        const double qb = -c0.a * c1.b + c1.a * c0.b - d1 + d0;
        const double qc = c1.b - c0.b;
        const double scale = std::max({std::abs(qa), std::abs(qb), std::abs(qc), 1e-300});
        if (std::abs(qa) < 1e-12 * scale) {
            if (std::abs(qb) > 1e-12 * scale) crossings.push_back(-qc / qb);
        } else {
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= -1e-12 * scale * scale) {
                const double sq = std::sqrt(std::max(0.0, disc));
                crossings.push_back((-qb + sq) / (2.0 * qa));
                crossings.push_back((-qb - sq) / (2.0 * qa));
            }
        }
        std::erase_if(crossings, [&](double l) { return l < 0.0 || l > l1_cap; });
    }

    auto height = [&](double l1) { return std::min(c0.l2_of(l1), c1.l2_of(l1)); };

    struct Cand {
        double l1;
        bool is_crossing;
    };
    std::vector<Cand> cands;
    cands.push_back({0.0, false});
    cands.push_back({l1_cap, false});
    if (auto st = c0.stationary(); st && *st <= l1_cap) cands.push_back({*st, false});
    if (auto st = c1.stationary(); st && *st <= l1_cap) cands.push_back({*st, false});
    for (double l : crossings) cands.push_back({l, true});

    double best_sum = -1.0;
    double best_l1 = 0.0, best_l2 = 0.0;
    bool best_is_crossing = false;
    for (const auto& cand : cands) {
        const double l2 = height(cand.l1);
        if (!std::isfinite(l2)) continue;
        if (cand.l1 + l2 > best_sum && feasible(cand.l1, l2)) {
            best_sum = cand.l1 + l2;
            best_l1 = cand.l1;
            best_l2 = l2;
            best_is_crossing = cand.is_crossing;
        }
    }
    if (best_sum < 0.0) {
        // closed forms rejected by the joint feasibility check; scan the
        // pointwise-min boundary directly via the single-subtraction bounds
        const Mat p1 = psi1 * psi1.adjoint();
        const Mat p1c = psi1c * psi1c.adjoint();
        auto l2_exact = [&](double l1) {
            return std::min(max_lambda_raw(rho - l1 * p1, psi2, rank_tol),
                            max_lambda_raw(rho_ta - l1 * p1c, psi2c, rank_tol));
        };
        const int grid = 120;
        for (int t = 0; t <= grid; ++t) {
            const double l1 = l1_cap * t / grid;
            const double l2 = l2_exact(l1);
            if (l1 + l2 > best_sum) {
                best_sum = l1 + l2;
                best_l1 = l1;
                best_l2 = l2;
                best_is_crossing = false;
            }
        }
    }

    // A concave boundary cannot gain slope at the crossing; an upward kink
    // would mean the feasible set is not convex, i.e. a bug.
    if (!crossings.empty()) {
        const double ls = crossings.front();
        const double h = std::max(1e-7, 1e-6 * l1_cap);
        if (ls > h && ls + h < l1_cap) {
            const double sl_before = (height(ls) - height(ls - h)) / h;
            const double sl_after = (height(ls + h) - height(ls)) / h;
            if (sl_after > sl_before + 1e-3 * (1.0 + std::abs(sl_before)))
                throw InternalError("ppt_pair_max: non-concave joint boundary");
        }
    }

    pc.case_id = best_is_crossing ? PptPairCase::Id::crossing : PptPairCase::Id::below;
    if (best_is_crossing) pc.lambda_s = best_l1;
    pc.chosen = {best_l1, best_l2};
    return {best_l1, best_l2, pc};
}

std::tuple<double, double, PptPairCase> ppt_pair_max(const DensityMatrix& rho,
                                                     const ProductVector& pv1,
                                                     const ProductVector& pv2,
                                                     double rank_tol) {
    if (!is_ppt(rho))
        throw NotPpt("ppt_pair_max: state is not PPT");
    return ppt_pair_max_raw(rho.mat(), partial_transpose(rho), rho.dims(), pv1, pv2,
                            rank_tol);
}

// ---------------------------------------------------------------------------
// solver

namespace {

struct PptState {
    std::vector<ProductVector> pvs;
    std::vector<double> w;
    Mat delta;
    Mat delta_ta;
    bool converged = true;

    double total() const { return std::accumulate(w.begin(), w.end(), 0.0); }
};

void ppt_sweeps(PptState& st, BipartiteDims dims, const SolverOptions& opts) {
    const int k = static_cast<int>(st.pvs.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            pairs.emplace_back(i, j);

    auto proj = [&](int i) {
        const Vec psi = product_state(st.pvs[i]).psi;
        return Mat(psi * psi.adjoint());
    };
    auto proj_ta = [&](int i) {
        const Vec psi = product_state(st.pvs[i].conjugate_alice()).psi;
        return Mat(psi * psi.adjoint());
    };

    st.converged = false;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double before = st.total();
        if (pairs.empty() && k == 1) {
            const Mat rho_a = st.delta + st.w[0] * proj(0);
            const Mat rho_a_ta = st.delta_ta + st.w[0] * proj_ta(0);
            const double nw = ppt_max_lambda_raw(rho_a, rho_a_ta, dims, st.pvs[0],
                                                 opts.rank_tol);
            st.delta = rho_a - nw * proj(0);
            st.delta_ta = rho_a_ta - nw * proj_ta(0);
            st.w[0] = nw;
        } else {
            const size_t offset = pairs.empty() ? 0 : sweep % pairs.size();
            for (size_t t = 0; t < pairs.size(); ++t) {
                const auto [i, j] = pairs[(t + offset) % pairs.size()];
                const Mat pi = proj(i), pj = proj(j);
                const Mat pit = proj_ta(i), pjt = proj_ta(j);
                const Mat rho_ab = st.delta + st.w[i] * pi + st.w[j] * pj;
                const Mat rho_ab_ta = st.delta_ta + st.w[i] * pit + st.w[j] * pjt;
                const Vec psi_i = product_state(st.pvs[i]).psi;
                const Vec psi_j = product_state(st.pvs[j]).psi;
                if (std::abs((psi_i.adjoint() * psi_j)(0, 0)) > 1.0 - 1e-12) {
                    // duplicate directions: fold the pair into one update
                    const double a = ppt_max_lambda_raw(rho_ab, rho_ab_ta, dims,
                                                        st.pvs[i], opts.rank_tol);
                    st.delta = rho_ab - a * pi;
                    st.delta_ta = rho_ab_ta - a * pit;
                    st.w[i] = a;
                    st.w[j] = 0.0;
                    continue;
                }
                const auto [a, b, pc] = ppt_pair_max_raw(rho_ab, rho_ab_ta, dims,
                                                         st.pvs[i], st.pvs[j],
                                                         opts.rank_tol);
                st.delta = rho_ab - a * pi - b * pj;
                st.delta_ta = rho_ab_ta - a * pit - b * pjt;
                st.w[i] = a;
                st.w[j] = b;
            }
        }
        for (int i = 0; i < k; ++i) {
            if (st.w[i] > 0.0 && st.w[i] < 1e-12) {
                st.delta += st.w[i] * proj(i);
                st.delta_ta += st.w[i] * proj_ta(i);
                st.w[i] = 0.0;
            }
        }
        if (st.total() - before < opts.sweep_tol) {
            st.converged = true;
            break;
        }
    }
}

// combined alternating minimization for the edge objective
std::pair<double, ProductVector> edge_alternate_min(const Mat& q0, const Mat& q1,
                                                    BipartiteDims dims,
                                                    ProductVector pv) {
    auto contract_a = [&](const Mat& q, const Vec& e) {
        Mat n = Mat::Zero(dims.n, dims.n);
        for (int mu = 0; mu < dims.n; ++mu)
            for (int nu = 0; nu < dims.n; ++nu)
                for (int i = 0; i < dims.m; ++i)
                    for (int j = 0; j < dims.m; ++j)
                        n(mu, nu) +=
                            std::conj(e[i]) * q(i * dims.n + mu, j * dims.n + nu) * e[j];
        return n;
    };
    auto contract_b = [&](const Mat& q, const Vec& f) {
        Mat m = Mat::Zero(dims.m, dims.m);
        for (int i = 0; i < dims.m; ++i)
            for (int j = 0; j < dims.m; ++j)
                for (int mu = 0; mu < dims.n; ++mu)
                    for (int nu = 0; nu < dims.n; ++nu)
                        m(i, j) +=
                            std::conj(f[mu]) * q(i * dims.n + mu, j * dims.n + nu) * f[nu];
        return m;
    };
    auto min_eigvec = [](const Mat& h) {
        Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (h + h.adjoint().eval()));
        return Vec(solver.eigenvectors().col(0));
    };

    Vec e = pv.e, f = pv.f;
    double val = std::numeric_limits<double>::max();
    for (int it = 0; it < 200; ++it) {
        f = min_eigvec(contract_a(q0, e) + contract_a(q1, e.conjugate()));
        const Mat me = contract_b(q0, f) + contract_b(q1, f).conjugate();
        e = min_eigvec(me);
        const double nv = (me * e).dot(e).real();
        if (val - nv < 1e-15 * std::max(1.0, std::abs(val))) { val = nv; break; }
        val = nv;
    }
    return {std::max(0.0, val), ProductVector(e / e.norm(), f / f.norm())};
}

} // namespace

double edge_state_gap(const DensityMatrix& delta, int restarts, std::uint64_t seed) {
    const Spectral s0 = spectral(delta.mat(), kDefaultRankTol);
    const Spectral s1 = spectral(partial_transpose(delta), kDefaultRankTol);
    if (s0.rank == delta.dim() && s1.rank == delta.dim()) return 0.0;
    std::mt19937_64 rng(seed);
    double best = std::numeric_limits<double>::max();
    for (int r = 0; r < std::max(1, restarts); ++r) {
        auto [val, pv] = edge_alternate_min(s0.kproj, s1.kproj, delta.dims(),
                                            random_product_vector(delta.dims(), rng));
        best = std::min(best, val);
    }
    return best;
}

PptBsaDecomposition ppt_bsa_solve(const DensityMatrix& rho, const SolverOptions& opts) {
    opts.validate();
    if (!is_ppt(rho))
        throw NotPpt("ppt_bsa_solve: state is not PPT");

    const Mat rho_ta = partial_transpose(rho);
    const Spectral s0 = spectral(rho.mat(), opts.rank_tol);
    const Spectral s1 = spectral(rho_ta, opts.rank_tol);
    const BipartiteDims dims = rho.dims();

    auto admissible = [&](const ProductVector& pv) {
        return in_range(s0, product_state(pv).psi, opts.rank_tol) &&
               in_range(s1, product_state(pv.conjugate_alice()).psi, opts.rank_tol);
    };

    PptState best_state;
    best_state.delta = rho.mat();
    best_state.delta_ta = rho_ta;
    double best_total = -1.0;

    for (int start = 0; start < opts.multistart; ++start) {
        std::mt19937_64 rng(opts.seed + start);
        PptState st;
        st.delta = rho.mat();
        st.delta_ta = rho_ta;
        int tries = 0;
        while (static_cast<int>(st.pvs.size()) < opts.candidate_count &&
               tries < 50 * opts.candidate_count) {
            ++tries;
            ProductVector pv = random_product_vector(dims, rng);
            if (s0.rank < rho.dim()) {
                // steer the sample toward the dual-range condition first
                auto [defect, refined] =
                    edge_alternate_min(s0.kproj, s1.kproj, dims, pv);
                pv = refined;
            }
            if (admissible(pv)) {
                const Vec psi = product_state(pv).psi;
                bool dup = false;
                for (const auto& prev : st.pvs)
                    if (std::abs((product_state(prev).psi.adjoint() * psi)(0, 0)) >
                        1.0 - 1e-12) {
                        dup = true;
                        break;
                    }
                if (!dup) {
                    st.pvs.push_back(pv);
                    st.w.push_back(0.0);
                }
            }
        }
        if (st.pvs.empty()) {
            st.converged = true;
            if (st.total() > best_total) {
                best_total = st.total();
                best_state = st;
            }
            continue;
        }

        ppt_sweeps(st, dims, opts);
        for (int outer = 0; outer < 20; ++outer) {
            const double before = st.total();
            // insertion guided by the running remainder's kernels
            const Spectral sd0 = spectral(st.delta, std::max(opts.rank_tol, 1e-8));
            const Spectral sd1 = spectral(st.delta_ta, std::max(opts.rank_tol, 1e-8));
            auto [gap, pv] = edge_alternate_min(sd0.kproj, sd1.kproj, dims,
                                                random_product_vector(dims, rng));
            if (gap < 1e-9 && admissible(pv)) {
                st.pvs.push_back(pv);
                st.w.push_back(0.0);
            }
            ppt_sweeps(st, dims, opts);
            if (st.total() - before < opts.sweep_tol) break;
        }
        if (st.total() > best_total + 1e-15) {
            best_total = st.total();
            best_state = st;
        }
    }

    PptBsaDecomposition dec;
    dec.converged = best_state.converged;
    for (size_t i = 0; i < best_state.w.size(); ++i)
        if (best_state.w[i] > 0.0)
            dec.weights.items.push_back({best_state.w[i], best_state.pvs[i]});
    dec.lambda = std::min(1.0, dec.weights.total());
    const double lam = dec.weights.total();
    if (lam < 1.0 - 1e-12) {
        Mat rem = best_state.delta / (1.0 - lam);
        rem /= rem.trace().real();
        dec.remainder = DensityMatrix(dims, rem, std::max(rho.tol(), 1e-8));
        dec.edge_gap = edge_state_gap(*dec.remainder, 32, opts.seed + 17);
    }
    return dec;
}

} // namespace bsakit
