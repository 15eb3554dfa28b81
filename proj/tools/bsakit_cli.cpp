#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bsakit/io.hpp"
#include "bsakit/twoqubit.hpp"

namespace {

using namespace bsakit;
using nlohmann::json;

struct CommonOpts {
    std::string in_path;
    std::string out_path;
    double tol = kDefaultRankTol;
    int multistart = 4;
    std::uint64_t seed = 0;
    int max_sweeps = 200;
    int candidates = 40;
    int delta_grid = 32;
    std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_in) {
    auto* in = cmd->add_option("--in", o.in_path, "input state JSON file");
    if (needs_in) in->required();
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--tol", o.tol, "rank / positivity tolerance");
    cmd->add_option("--multistart", o.multistart, "independent solver starts");
    cmd->add_option("--seed", o.seed, "RNG seed");
    cmd->add_option("--max-sweeps", o.max_sweeps, "pairwise sweep cap");
    cmd->add_option("--candidates", o.candidates, "candidate product vectors");
    cmd->add_option("--delta-grid", o.delta_grid, "family grid resolution");
    cmd->add_option("--format", o.format, "json or csv-summary");
}

SolverOptions solver_options(const CommonOpts& o) {
    SolverOptions s;
    s.rank_tol = o.tol;
    s.positivity_tol = o.tol;
    s.multistart = o.multistart;
    s.seed = o.seed;
    s.max_sweeps = o.max_sweeps;
    s.candidate_count = o.candidates;
    return s;
}

void emit(const CommonOpts& o, const std::string& text) {
    if (o.out_path.empty())
        std::cout << text;
    else
        write_text(o.out_path, text);
}

int state_rank(const DensityMatrix& rho, double tol) {
    const EigDecomposition eig = hermitian_eig(rho.mat());
    const double cut = tol * eig.eigenvalues.cwiseAbs().maxCoeff();
    int r = 0;
    for (int i = 0; i < eig.eigenvalues.size(); ++i)
        if (std::abs(eig.eigenvalues[i]) > cut) ++r;
    return r;
}

std::string csv_summary(const std::string& state_id, const DensityMatrix& rho,
                        double tol, double lambda, double e, bool converged,
                        long wall_ms) {
    std::ostringstream ss;
    ss << "state_id,m,n,rank,ppt,lambda,E,converged,wall_ms\n";
    ss << state_id << ',' << rho.dims().m << ',' << rho.dims().n << ','
       << state_rank(rho, tol) << ',' << (is_ppt(rho) ? 1 : 0) << ',' << lambda
       << ',' << e << ',' << (converged ? 1 : 0) << ',' << wall_ms << '\n';
    return ss.str();
}

int run_decompose(const CommonOpts& o, bool ppt) {
    const DensityMatrix rho = load_density(o.in_path);
    const SolverOptions sopts = solver_options(o);
    const auto t0 = std::chrono::steady_clock::now();
    bool converged = true;
    std::string out;
    double lambda = 0.0;
    if (ppt) {
        const PptBsaDecomposition dec = ppt_bsa_solve(rho, sopts);
        converged = dec.converged;
        lambda = dec.lambda;
        out = ppt_decomposition_to_json(dec, rho.dims());
    } else {
        const BsaDecomposition dec = bsa_solve(rho, sopts);
        converged = dec.converged;
        lambda = dec.lambda;
        out = decomposition_to_json(dec, rho.dims());
    }
    const auto wall = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
    if (o.format == "csv-summary")
        out = csv_summary(o.in_path, rho, o.tol, lambda, 1.0 - lambda, converged,
                          static_cast<long>(wall));
    emit(o, out);
    return converged ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"best separable approximation toolkit"};
    app.require_subcommand(1);

    CommonOpts o;
    std::string family = "werner";
    double werner_p = 0.5;
    int gen_m = 2, gen_n = 2, gen_rank = 0;

    auto* gen = app.add_subcommand("gen", "generate a state file");
    gen->add_option("family", family, "werner | random | bell | upb-fixture")
        ->required();
    gen->add_option("--p", werner_p, "Werner mixing parameter");
    gen->add_option("--m", gen_m, "Alice dimension (random)");
    gen->add_option("--n", gen_n, "Bob dimension (random)");
    gen->add_option("--rank", gen_rank, "rank (random; default full)");
    add_common(gen, o, false);

    auto* dec = app.add_subcommand("decompose", "best separable approximation");
    add_common(dec, o, true);
    auto* pdec = app.add_subcommand("ppt-decompose", "PPT-preserving BSA");
    add_common(pdec, o, true);
    auto* meas = app.add_subcommand("measure", "entanglement E = 1 - lambda");
    add_common(meas, o, true);
    auto* chk = app.add_subcommand("check", "PPT / rank report");
    add_common(chk, o, true);
    auto* ver = app.add_subcommand("verify", "decomposition optimality report");
    add_common(ver, o, true);
    auto* ana = app.add_subcommand("analyze-remainder", "2x2 remainder analysis");
    add_common(ana, o, true);
    int povm_k = 4;
    auto* mono = app.add_subcommand("check-monotonicity",
                                    "local-POVM mean-entanglement check");
    mono->add_option("--povm-k", povm_k, "per-side POVM family size");
    add_common(mono, o, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            DensityMatrix rho = [&] {
                if (family == "werner") return werner(werner_p);
                if (family == "bell") {
                    const Vec psi = bell_singlet().psi;
                    return DensityMatrix({2, 2}, psi * psi.adjoint());
                }
                if (family == "upb-fixture") return tiles_upb_state();
                if (family == "random") {
                    const int r = gen_rank > 0 ? gen_rank : gen_m * gen_n;
                    return random_density({gen_m, gen_n}, r, o.seed);
                }
                throw InvalidInput("gen: unknown family " + family);
            }();
            emit(o, density_to_json(rho));
            return 0;
        }
        if (dec->parsed()) return run_decompose(o, false);
        if (pdec->parsed()) return run_decompose(o, true);
        if (meas->parsed()) {
            const DensityMatrix rho = load_density(o.in_path);
            const BsaDecomposition d = bsa_solve(rho, solver_options(o));
            json j{{"lambda", d.lambda},
                   {"E", std::max(0.0, 1.0 - d.lambda)},
                   {"converged", d.converged}};
            emit(o, j.dump(2) + "\n");
            return d.converged ? 0 : 2;
        }
        if (chk->parsed()) {
            const DensityMatrix rho = load_density(o.in_path);
            json j{{"m", rho.dims().m},
                   {"n", rho.dims().n},
                   {"rank", state_rank(rho, o.tol)},
                   {"ppt", is_ppt(rho)},
                   {"min_eigenvalue", min_eigenvalue(rho.mat())},
                   {"min_eigenvalue_ta", min_eigenvalue(partial_transpose(rho))}};
            emit(o, j.dump(2) + "\n");
            return 0;
        }
        if (ver->parsed()) {
            const DensityMatrix rho = load_density(o.in_path);
            const BsaDecomposition d = bsa_solve(rho, solver_options(o));
            const OptimalityReport rep = verify_optimality(rho, d, 200, o.seed);
            emit(o, decomposition_to_json(d, rho.dims(), &rep));
            return d.converged ? 0 : 2;
        }
        if (ana->parsed()) {
            const DensityMatrix rho = load_density(o.in_path);
            if (rho.dims() != BipartiteDims{2, 2})
                throw InvalidInput("analyze-remainder: expects a 2x2 state");
            const BsaDecomposition d = bsa_solve(rho, solver_options(o));
            json j{{"lambda", d.lambda}, {"concurrence", concurrence(rho)}};
            if (d.remainder) {
                const Mat& rem = d.remainder->mat();
                j["remainder_purity"] = (rem * rem).trace().real();
                const EigDecomposition eig = hermitian_eig(rem);
                const PureState psi_e(eig.eigenvectors.col(rho.dim() - 1));
                if (d.separable_part) {
                    const Theorem3Report rep =
                        theorem3_check(*d.separable_part, psi_e, o.delta_grid);
                    j["max_entangled"] = rep.max_entangled;
                    j["rank_violation"] = rep.rank_violation;
                    j["min_ratio"] = rep.min_ratio;
                    j["points_used"] = rep.points_used;
                }
            }
            emit(o, j.dump(2) + "\n");
            return d.converged ? 0 : 2;
        }
        if (mono->parsed()) {
            const DensityMatrix rho = load_density(o.in_path);
            const LocalPovm povm = random_local_povm(rho.dims(), povm_k, o.seed + 1);
            const MonotonicityReport rep =
                povm_monotonicity_check(rho, povm, solver_options(o));
            emit(o, monotonicity_to_json(rep));
            return rep.structural_violation ? 1 : 0;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
