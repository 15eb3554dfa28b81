#include "bsakit/bsa.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace bsakit {

namespace {

struct Spectral {
    EigDecomposition eig;
    Mat pinv;
    Mat kproj; // projector onto the numerical kernel
    double wmax = 0.0;
    int rank = 0;
};

Spectral spectral(const Mat& h, double rank_tol) {
    Spectral s;
    s.eig = hermitian_eig(h);
    const int d = static_cast<int>(s.eig.eigenvalues.size());
    s.wmax = s.eig.eigenvalues.cwiseAbs().maxCoeff();
    const double cut = rank_tol * s.wmax;
    s.pinv = Mat::Zero(d, d);
    s.kproj = Mat::Zero(d, d);
    for (int i = 0; i < d; ++i) {
        const auto col = s.eig.eigenvectors.col(i);
        if (std::abs(s.eig.eigenvalues[i]) > cut) {
            s.pinv += col * col.adjoint() / s.eig.eigenvalues[i];
            ++s.rank;
        } else {
            s.kproj += col * col.adjoint();
        }
    }
    return s;
}

double psd_floor(const Mat& rho) { return 1e-9 * std::max(1.0, rho.norm()); }

bool collinear(const Vec& psi1, const Vec& psi2) {
    return std::abs((psi1.adjoint() * psi2)(0, 0)) > 1.0 - 1e-12;
}

bool subtraction_psd(const Mat& rho, const Vec& psi1, double l1, const Vec& psi2,
                     double l2) {
    Mat diff = rho - l1 * (psi1 * psi1.adjoint()) - l2 * (psi2 * psi2.adjoint());
    return min_eigenvalue(diff) >= -psd_floor(rho);
}

} // namespace

double range_defect(const Mat& kernel_projector, const Vec& psi) {
    return (kernel_projector * psi).squaredNorm();
}

double WeightedProductSet::total() const {
    double s = 0.0;
    for (const auto& it : items) s += it.weight;
    return s;
}

Mat WeightedProductSet::matrix(BipartiteDims dims) const {
    Mat m = Mat::Zero(dims.total(), dims.total());
    for (const auto& it : items) {
        const Vec psi = product_state(it.pv).psi;
        m += it.weight * (psi * psi.adjoint());
    }
    return m;
}

void SolverOptions::validate() const {
    if (rank_tol <= 0 || positivity_tol <= 0 || sweep_tol <= 0)
        throw InvalidInput("SolverOptions: tolerances must be positive");
    if (max_sweeps < 1 || candidate_count < 1 || multistart < 1)
        throw InvalidInput("SolverOptions: counts must be >= 1");
}

double max_lambda_raw(const Mat& rho, const Vec& psi, double rank_tol) {
    const Spectral s = spectral(rho, rank_tol);
    if (std::sqrt(range_defect(s.kproj, psi)) > rank_tol) return 0.0;
    const double d = (psi.adjoint() * s.pinv * psi)(0, 0).real();
    if (d <= 0.0) return 0.0;
    return 1.0 / d;
}

double max_lambda(const DensityMatrix& rho, const PureState& psi, double rank_tol) {
    if (psi.psi.size() != rho.dim())
        throw InvalidInput("max_lambda: dimension mismatch");
    return max_lambda_raw(rho.mat(), psi.psi, rank_tol);
}

namespace {

// Maximum of L1 + L2 on the feasibility boundary, scanned along L1 with
// the single-subtraction formula supplying the matching maximal L2.
std::pair<double, double> pair_scan(const Mat& rho, const Vec& psi1, const Vec& psi2,
                                    double l1_max, double rank_tol) {
    const Mat p1 = psi1 * psi1.adjoint();
    auto l2_of = [&](double l1) {
        return max_lambda_raw(rho - l1 * p1, psi2, rank_tol);
    };
    const int grid = 160;
    double best_l1 = 0.0, best_sum = l2_of(0.0);
    for (int t = 1; t <= grid; ++t) {
        const double l1 = l1_max * t / grid;
        const double sum = l1 + l2_of(l1);
        if (sum > best_sum) { best_sum = sum; best_l1 = l1; }
    }
    // golden-section polish around the best grid point
    double lo = std::max(0.0, best_l1 - l1_max / grid);
    double hi = std::min(l1_max, best_l1 + l1_max / grid);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = hi - gr * (hi - lo), b = lo + gr * (hi - lo);
    double fa = a + l2_of(a), fb = b + l2_of(b);
    for (int it = 0; it < 40; ++it) {
        if (fa > fb) {
            hi = b; b = a; fb = fa;
            a = hi - gr * (hi - lo); fa = a + l2_of(a);
        } else {
            lo = a; a = b; fa = fb;
            b = lo + gr * (hi - lo); fb = b + l2_of(b);
        }
    }
    const double l1 = (fa > fb) ? a : b;
    return {l1, l2_of(l1)};
}

} // namespace

std::pair<double, double> pair_max_raw(const Mat& rho, const Vec& psi1, const Vec& psi2,
                                       double rank_tol) {
    if (std::abs((psi1.adjoint() * psi2)(0, 0)) > 1.0 - 1e-12)
        throw InvalidInput("pair_max: vectors are collinear, use max_lambda");
    const Spectral s = spectral(rho, rank_tol);
    const bool in1 = std::sqrt(range_defect(s.kproj, psi1)) <= rank_tol;
    const bool in2 = std::sqrt(range_defect(s.kproj, psi2)) <= rank_tol;
    if (!in1 && !in2) return {0.0, 0.0};
    const auto d_of = [&](const Vec& a, const Vec& b) {
        return (a.adjoint() * s.pinv * b)(0, 0);
    };
    if (!in2) return {1.0 / d_of(psi1, psi1).real(), 0.0};
    if (!in1) return {0.0, 1.0 / d_of(psi2, psi2).real()};

    const double d1 = d_of(psi1, psi1).real();
    const double d2 = d_of(psi2, psi2).real();
    const double c = std::abs(d_of(psi1, psi2));

    std::vector<std::pair<double, double>> cands;
    if (c <= 1e-12 * std::max(d1, d2)) {
        cands.emplace_back(1.0 / d1, 1.0 / d2);
    } else {
        const double det = d1 * d2 - c * c;
        if (det > 1e-14 * d1 * d2 && d1 >= c && d2 >= c)
            cands.emplace_back((d2 - c) / det, (d1 - c) / det);
    }
    cands.emplace_back(1.0 / d1, 0.0);
    cands.emplace_back(0.0, 1.0 / d2);

    std::pair<double, double> best{0.0, 0.0};
    double best_sum = -1.0;
    for (const auto& [a, b] : cands) {
        if (a + b > best_sum && subtraction_psd(rho, psi1, a, psi2, b)) {
            best_sum = a + b;
            best = {a, b};
        }
    }
    if (best_sum < 0.0) {
        // closed forms violated positivity; fall back to the boundary scan
        best = pair_scan(rho, psi1, psi2, 1.0 / d1, rank_tol);
    }
    return best;
}

std::pair<double, double> pair_max(const DensityMatrix& rho, const PureState& psi1,
                                   const PureState& psi2, double rank_tol) {
    return pair_max_raw(rho.mat(), psi1.psi, psi2.psi, rank_tol);
}

GramMatrix gram_matrix(const DensityMatrix& rho, const std::vector<PureState>& vectors,
                       double rank_tol) {
    const Spectral s = spectral(rho.mat(), rank_tol);
    const int n = static_cast<int>(vectors.size());
    for (int i = 0; i < n; ++i)
        if (std::sqrt(range_defect(s.kproj, vectors[i].psi)) > rank_tol)
            throw RangeViolation("gram_matrix: vector " + std::to_string(i) +
                                 " lies outside the range of rho");
    GramMatrix g;
    g.entries.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.entries(i, j) = (vectors[i].psi.adjoint() * s.pinv * vectors[j].psi)(0, 0);
    g.entries = 0.5 * (g.entries + g.entries.adjoint().eval());
    return g;
}

double manifold_residual(const GramMatrix& d, const RVec& lambdas) {
    const int n = static_cast<int>(d.entries.rows());
    if (lambdas.size() != n)
        throw InvalidInput("manifold_residual: weight vector length mismatch");
    Mat m = Mat::Identity(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) -= lambdas[j] * d.entries(i, j);
    return m.determinant().real();
}

// ---------------------------------------------------------------------------
// fixed-set sweeps

namespace {

struct OsaState {
    std::vector<ProductVector> pvs;
    std::vector<Vec> psis;
    std::vector<double> w;
    Mat delta;
    bool converged = true;

    double total() const { return std::accumulate(w.begin(), w.end(), 0.0); }
};

// Pairwise sweeps until the per-sweep Lambda gain drops below sweep_tol.
void run_sweeps(OsaState& st, const SolverOptions& opts, int rho_rank) {
    const int k = static_cast<int>(st.psis.size());
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            pairs.emplace_back(i, j);

    st.converged = false;
    for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
        const double before = st.total();
        if (pairs.empty()) {
            Mat rho_a = st.delta + st.w[0] * (st.psis[0] * st.psis[0].adjoint());
            const double nw = max_lambda_raw(rho_a, st.psis[0], opts.rank_tol);
            st.delta = rho_a - nw * (st.psis[0] * st.psis[0].adjoint());
            st.w[0] = nw;
        } else {
            const size_t offset = sweep % pairs.size(); // rotate to avoid cycling
            for (size_t t = 0; t < pairs.size(); ++t) {
                const auto [i, j] = pairs[(t + offset) % pairs.size()];
                const Mat pi = st.psis[i] * st.psis[i].adjoint();
                const Mat pj = st.psis[j] * st.psis[j].adjoint();
                const Mat rho_ab = st.delta + st.w[i] * pi + st.w[j] * pj;
                if (collinear(st.psis[i], st.psis[j])) {
                    // duplicate directions: fold the pair into one update
                    const double a = max_lambda_raw(rho_ab, st.psis[i], opts.rank_tol);
                    st.delta = rho_ab - a * pi;
                    st.w[i] = a;
                    st.w[j] = 0.0;
                    continue;
                }
                const auto [a, b] = pair_max_raw(rho_ab, st.psis[i], st.psis[j],
                                                 opts.rank_tol);
                st.delta = rho_ab - a * pi - b * pj;
                st.w[i] = a;
                st.w[j] = b;
            }
        }
        // prune negligible weights
        for (int i = 0; i < k; ++i) {
            if (st.w[i] > 0.0 && st.w[i] < 1e-12) {
                st.delta += st.w[i] * (st.psis[i] * st.psis[i].adjoint());
                st.w[i] = 0.0;
            }
        }
        // Caratheodory cap on active vectors
        const int cap = rho_rank * rho_rank;
        std::vector<int> active;
        for (int i = 0; i < k; ++i)
            if (st.w[i] > 0.0) active.push_back(i);
        if (static_cast<int>(active.size()) > cap) {
            std::sort(active.begin(), active.end(),
                      [&](int a, int b) { return st.w[a] < st.w[b]; });
            for (size_t t = 0; t + cap < active.size(); ++t) {
                const int i = active[t];
                st.delta += st.w[i] * (st.psis[i] * st.psis[i].adjoint());
                st.w[i] = 0.0;
            }
        }
        if (st.total() - before < opts.sweep_tol) {
            st.converged = true;
            break;
        }
    }
}

BsaDecomposition state_to_decomposition(const DensityMatrix& rho, const OsaState& st) {
    BsaDecomposition dec;
    dec.converged = st.converged;
    for (size_t i = 0; i < st.w.size(); ++i)
        if (st.w[i] > 0.0)
            dec.weights.items.push_back({st.w[i], st.pvs[i]});
    dec.lambda = std::min(1.0, dec.weights.total());
    const double lam = dec.weights.total();
    if (lam > 1e-12) {
        Mat sep = dec.weights.matrix(rho.dims()) / lam;
        dec.separable_part = DensityMatrix(rho.dims(), sep, rho.tol() * 10);
    }
    if (lam < 1.0 - 1e-12) {
        Mat rem = st.delta / (1.0 - lam);
        rem /= rem.trace().real(); // absorb the fp drift of the weight sum
        dec.remainder = DensityMatrix(rho.dims(), rem, std::max(rho.tol(), 1e-8));
    }
    return dec;
}

OsaState init_state(const DensityMatrix& rho, const std::vector<ProductVector>& candidates,
                    const SolverOptions& opts) {
    const Spectral s = spectral(rho.mat(), opts.rank_tol);
    OsaState st;
    int dropped = 0;
    for (const auto& pv : candidates) {
        const Vec psi = product_state(pv).psi;
        if (std::sqrt(range_defect(s.kproj, psi)) > opts.rank_tol) {
            ++dropped;
            continue;
        }
        bool dup = false;
        for (const Vec& prev : st.psis)
            if (collinear(prev, psi)) { dup = true; break; }
        if (dup) continue;
        st.pvs.push_back(pv);
        st.psis.push_back(psi);
        st.w.push_back(0.0);
    }
    if (dropped > 0)
        std::fprintf(stderr, "osa_fixed_set: dropped %d candidate(s) outside R(rho)\n",
                     dropped);
    st.delta = rho.mat();
    return st;
}

} // namespace

BsaDecomposition osa_fixed_set(const DensityMatrix& rho,
                               const std::vector<ProductVector>& candidates,
                               const SolverOptions& opts) {
    opts.validate();
    if (candidates.empty())
        throw InvalidInput("osa_fixed_set: candidate set is empty");
    OsaState st = init_state(rho, candidates, opts);
    const int rho_rank = spectral(rho.mat(), opts.rank_tol).rank;
    if (!st.psis.empty()) run_sweeps(st, opts, rho_rank);
    else st.delta = rho.mat();
    return state_to_decomposition(rho, st);
}

// ---------------------------------------------------------------------------
// product-sphere optimization helpers

namespace {

Mat contract_alice(const Mat& q, const Vec& e, BipartiteDims dims) {
    // N(e)_{mu,nu} = <e,mu| Q |e,nu>
    Mat n = Mat::Zero(dims.n, dims.n);
    for (int mu = 0; mu < dims.n; ++mu)
        for (int nu = 0; nu < dims.n; ++nu)
            for (int i = 0; i < dims.m; ++i)
                for (int j = 0; j < dims.m; ++j)
                    n(mu, nu) += std::conj(e[i]) * q(i * dims.n + mu, j * dims.n + nu) * e[j];
    return n;
}

Mat contract_bob(const Mat& q, const Vec& f, BipartiteDims dims) {
    // M(f)_{i,j} = <i,f| Q |j,f>
    Mat m = Mat::Zero(dims.m, dims.m);
    for (int i = 0; i < dims.m; ++i)
        for (int j = 0; j < dims.m; ++j)
            for (int mu = 0; mu < dims.n; ++mu)
                for (int nu = 0; nu < dims.n; ++nu)
                    m(i, j) += std::conj(f[mu]) * q(i * dims.n + mu, j * dims.n + nu) * f[nu];
    return m;
}

Vec min_eigvec(const Mat& h) {
    Eigen::SelfAdjointEigenSolver<Mat> solver(0.5 * (h + h.adjoint().eval()));
    return solver.eigenvectors().col(0);
}

// Alternating minimization of <e,f|Q|e,f> from a given start.
std::pair<double, ProductVector> alternate_min(const Mat& q, BipartiteDims dims,
                                               ProductVector pv) {
    Vec e = pv.e, f = pv.f;
    double val = std::numeric_limits<double>::max();
    for (int it = 0; it < 200; ++it) {
        f = min_eigvec(contract_alice(q, e, dims));
        e = min_eigvec(contract_bob(q, f, dims));
        const double nv = (contract_bob(q, f, dims) * e).dot(e).real();
        if (val - nv < 1e-15 * std::max(1.0, std::abs(val))) { val = nv; break; }
        val = nv;
    }
    return {std::max(0.0, val), ProductVector(e / e.norm(), f / f.norm())};
}

} // namespace

std::pair<double, ProductVector> minimize_product_overlap(const Mat& q, BipartiteDims dims,
                                                          int restarts,
                                                          std::mt19937_64& rng) {
    double best = std::numeric_limits<double>::max();
    std::optional<ProductVector> best_pv;
    for (int r = 0; r < std::max(1, restarts); ++r) {
        auto [val, pv] = alternate_min(q, dims, random_product_vector(dims, rng));
        if (val < best) {
            best = val;
            best_pv = pv;
        }
    }
    return {best, *best_pv};
}

// ---------------------------------------------------------------------------
// full solver

namespace {

std::vector<ProductVector> seed_candidates(const DensityMatrix& rho,
                                           const SolverOptions& opts,
                                           std::mt19937_64& rng) {
    const Spectral s = spectral(rho.mat(), opts.rank_tol);
    const Mat rproj = Mat::Identity(rho.dim(), rho.dim()) - s.kproj;
    std::vector<ProductVector> cands;
    // analytic seeds: leading Schmidt terms of the range eigenvectors
    for (int i = 0; i < rho.dim(); ++i) {
        if (std::abs(s.eig.eigenvalues[i]) > opts.rank_tol * s.wmax)
            cands.push_back(closest_product_vector(s.eig.eigenvectors.col(i), rho.dims()));
    }
    // random seeds projected into the range and re-split
    int attempts = 0;
    while (static_cast<int>(cands.size()) < opts.candidate_count + rho.dim() &&
           attempts < 20 * opts.candidate_count) {
        ++attempts;
        const ProductVector pv = random_product_vector(rho.dims(), rng);
        Vec proj = rproj * product_state(pv).psi;
        if (proj.norm() < 0.05) continue;
        cands.push_back(closest_product_vector(proj / proj.norm(), rho.dims()));
    }
    return cands;
}

// One independent solver start.
OsaState solve_single_start(const DensityMatrix& rho, const SolverOptions& opts,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Spectral srho = spectral(rho.mat(), opts.rank_tol);
    OsaState st = init_state(rho, seed_candidates(rho, opts, rng), opts);
    if (st.psis.empty()) {
        st.delta = rho.mat();
        st.converged = true;
        return st;
    }
    run_sweeps(st, opts, srho.rank);

    const int max_outer = 40;
    for (int outer = 0; outer < max_outer; ++outer) {
        const double before = st.total();

        if (opts.vector_refine) {
            // steer each active vector toward the direction with the largest
            // single-subtraction weight on its add-back matrix
            for (size_t a = 0; a < st.psis.size(); ++a) {
                if (st.w[a] <= 0.0) continue;
                const Mat pa = st.psis[a] * st.psis[a].adjoint();
                const Mat rho_a = st.delta + st.w[a] * pa;
                const Spectral sa = spectral(rho_a, opts.rank_tol);
                const double mu = 100.0 * sa.pinv.norm() + 1.0;
                const Mat objective = sa.pinv + mu * sa.kproj;
                auto [val, pv] = alternate_min(objective, rho.dims(), st.pvs[a]);
                const Vec psi_new = product_state(pv).psi;
                const double lam_new = max_lambda_raw(rho_a, psi_new, opts.rank_tol);
                if (lam_new > st.w[a] + 1e-14) {
                    st.pvs[a] = pv;
                    st.psis[a] = psi_new;
                    st.delta = rho_a - lam_new * (psi_new * psi_new.adjoint());
                    st.w[a] = lam_new;
                }
            }
        }

        // insertion: hunt for product vectors in the range of the remainder
        if (st.total() < 1.0 - 1e-9) {
            const Spectral sd = spectral(st.delta, std::max(opts.rank_tol, 1e-8));
            std::optional<ProductVector> found;
            if (sd.rank < rho.dim()) {
                auto [gap, pv] = minimize_product_overlap(sd.kproj, rho.dims(), 4, rng);
                if (gap < 1e-9) found = pv;
            } else {
                found = random_product_vector(rho.dims(), rng);
            }
            if (found) {
                const Vec psi = product_state(*found).psi;
                if (std::sqrt(range_defect(srho.kproj, psi)) <= opts.rank_tol) {
                    st.pvs.push_back(*found);
                    st.psis.push_back(psi);
                    st.w.push_back(0.0);
                }
            }
        }

        run_sweeps(st, opts, srho.rank);
        if (st.total() - before < opts.sweep_tol) break;
    }
    return st;
}

int worker_count() {
    if (const char* env = std::getenv("BSAKIT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

} // namespace

BsaDecomposition bsa_solve(const DensityMatrix& rho, const SolverOptions& opts) {
    opts.validate();
    std::vector<OsaState> results(opts.multistart);
    const int workers = std::min(worker_count(), opts.multistart);
    if (workers <= 1) {
        for (int i = 0; i < opts.multistart; ++i)
            results[i] = solve_single_start(rho, opts, opts.seed + i);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        for (int t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                for (int i = next.fetch_add(1); i < opts.multistart;
                     i = next.fetch_add(1))
                    results[i] = solve_single_start(rho, opts, opts.seed + i);
            });
        for (auto& th : pool) th.join();
    }
    int best = 0;
    for (int i = 1; i < opts.multistart; ++i)
        if (results[i].total() > results[best].total() + 1e-15) best = i;
    return state_to_decomposition(rho, results[best]);
}

OptimalityReport verify_optimality(const DensityMatrix& rho, const BsaDecomposition& dec,
                                   int trials, std::uint64_t seed) {
    const Mat sep = dec.weights.matrix(rho.dims());
    const Mat delta = rho.mat() - sep;
    if (min_eigenvalue(delta) < -1e-7 ||
        std::abs(delta.trace().real() - (1.0 - dec.weights.total())) > 1e-7)
        throw InvalidInput("verify_optimality: decomposition does not reconstruct rho");

    OptimalityReport rep;
    std::vector<Vec> psis;
    for (const auto& it : dec.weights.items) psis.push_back(product_state(it.pv).psi);
    const int k = static_cast<int>(psis.size());

    rep.worst_single_slack = 0.0;
    bool singles_ok = true;
    for (int a = 0; a < k; ++a) {
        const Mat rho_a = delta + dec.weights.items[a].weight * (psis[a] * psis[a].adjoint());
        const double lam = max_lambda_raw(rho_a, psis[a]);
        const double slack = lam - dec.weights.items[a].weight;
        rep.worst_single_slack = std::max(rep.worst_single_slack, slack);
        if (std::abs(slack) > 1e-7) singles_ok = false;
    }
    rep.singles_maximal = singles_ok;

    rep.worst_pair_slack = 0.0;
    bool pairs_ok = true;
    for (int a = 0; a < k; ++a)
        for (int b = a + 1; b < k; ++b) {
            if (collinear(psis[a], psis[b])) continue;
            const double wa = dec.weights.items[a].weight;
            const double wb = dec.weights.items[b].weight;
            const Mat rho_ab = delta + wa * (psis[a] * psis[a].adjoint()) +
                               wb * (psis[b] * psis[b].adjoint());
            const auto [na, nb] = pair_max_raw(rho_ab, psis[a], psis[b]);
            const double slack = (na + nb) - (wa + wb);
            rep.worst_pair_slack = std::max(rep.worst_pair_slack, slack);
            if (slack > 1e-7) pairs_ok = false;
        }
    rep.pairs_maximal = pairs_ok;

    // random insertions and perturbations must not buy more Lambda
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 0.05);
    rep.perturbation_gain = 0.0;
    for (int t = 0; t < trials; ++t) {
        ProductVector pv = random_product_vector(rho.dims(), rng);
        if (k > 0 && t % 2 == 0) {
            // perturb an existing vector instead of drawing fresh
            const auto& base = dec.weights.items[t / 2 % k].pv;
            Vec e = base.e, f = base.f;
            for (int i = 0; i < e.size(); ++i) e[i] += cplx(gauss(rng), gauss(rng));
            for (int i = 0; i < f.size(); ++i) f[i] += cplx(gauss(rng), gauss(rng));
            pv = ProductVector(e / e.norm(), f / f.norm());
        }
        const double gain = max_lambda_raw(delta, product_state(pv).psi);
        rep.perturbation_gain = std::max(rep.perturbation_gain, gain);
    }
    return rep;
}

double remainder_product_gap_raw(const Mat& delta, BipartiteDims dims, int restarts,
                                 std::uint64_t seed, double rank_tol,
                                 ProductVector* argmin) {
    const Spectral s = spectral(delta, rank_tol);
    std::mt19937_64 rng(seed);
    if (s.rank == static_cast<int>(delta.rows())) {
        if (argmin) *argmin = random_product_vector(dims, rng);
        return 0.0; // empty kernel: every vector lies in the range
    }
    auto [gap, pv] = minimize_product_overlap(s.kproj, dims, restarts, rng);
    if (argmin) *argmin = pv;
    return gap;
}

double remainder_product_gap(const DensityMatrix& delta, int restarts,
                             std::uint64_t seed) {
    return remainder_product_gap_raw(delta.mat(), delta.dims(), restarts, seed);
}

double uniqueness_check(const DensityMatrix& rho, const SolverOptions& opts, int starts) {
    std::vector<Mat> parts;
    for (int i = 0; i < starts; ++i) {
        SolverOptions o = opts;
        o.seed = opts.seed + 7919ull * static_cast<std::uint64_t>(i + 1);
        const BsaDecomposition dec = bsa_solve(rho, o);
        parts.push_back(dec.weights.matrix(rho.dims()));
    }
    double worst = 0.0;
    for (size_t i = 0; i < parts.size(); ++i)
        for (size_t j = i + 1; j < parts.size(); ++j) {
            const EigDecomposition d = hermitian_eig(Mat(parts[i] - parts[j]));
            worst = std::max(worst, d.eigenvalues.cwiseAbs().sum());
        }
    return worst;
}

} // namespace bsakit
