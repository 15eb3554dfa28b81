#include "bsakit/io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace bsakit {

namespace {

using nlohmann::json;

json complex_pairs(const Vec& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i)
        arr.push_back({v[i].real(), v[i].imag()});
    return arr;
}

Vec vec_from_pairs(const json& arr, const char* what) {
    if (!arr.is_array() || arr.empty())
        throw InvalidInput(std::string(what) + ": expected a nonempty array");
    Vec v(static_cast<int>(arr.size()));
    for (size_t i = 0; i < arr.size(); ++i) {
        const json& p = arr[i];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw InvalidInput(std::string(what) + ": entries must be [re, im] pairs");
        v[static_cast<int>(i)] = cplx(p[0].get<double>(), p[1].get<double>());
    }
    return v;
}

json matrix_object(const Mat& m, BipartiteDims dims) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int j = 0; j < m.cols(); ++j)
            row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return json{{"m", dims.m}, {"n", dims.n}, {"matrix", rows}};
}

DensityMatrix density_from_object(const json& j) {
    if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("matrix"))
        throw InvalidInput("density matrix JSON: requires fields m, n, matrix");
    const int m = j["m"].get<int>();
    const int n = j["n"].get<int>();
    const json& rows = j["matrix"];
    const int d = m * n;
    if (!rows.is_array() || static_cast<int>(rows.size()) != d)
        throw InvalidInput("density matrix JSON: matrix must have m*n rows");
    Mat mat(d, d);
    for (int i = 0; i < d; ++i) {
        const Vec row = vec_from_pairs(rows[i], "density matrix JSON row");
        if (row.size() != d)
            throw InvalidInput("density matrix JSON: row length must equal m*n");
        mat.row(i) = row.transpose();
    }
    // DensityMatrix construction enforces hermiticity, trace and positivity
    // and names the violated invariant in its diagnostic
    return DensityMatrix({m, n}, mat);
}

json weights_array(const WeightedProductSet& w) {
    json arr = json::array();
    for (const auto& item : w.items)
        arr.push_back({{"w", item.weight},
                       {"e", complex_pairs(item.pv.e)},
                       {"f", complex_pairs(item.pv.f)}});
    return arr;
}

} // namespace

std::string density_to_json(const DensityMatrix& rho) {
    return matrix_object(rho.mat(), rho.dims()).dump(2) + "\n";
}

DensityMatrix density_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("density matrix JSON: parse error: ") + e.what());
    }
    return density_from_object(j);
}

DensityMatrix load_density(const std::string& path) {
    return density_from_json(read_text(path));
}

void save_density(const std::string& path, const DensityMatrix& rho) {
    write_text(path, density_to_json(rho));
}

std::string decomposition_to_json(const BsaDecomposition& dec, BipartiteDims dims,
                                  const OptimalityReport* report) {
    json j{{"lambda", dec.lambda},
           {"weights", weights_array(dec.weights)},
           {"converged", dec.converged}};
    if (dec.remainder)
        j["remainder"] = matrix_object(dec.remainder->mat(), dims);
    else
        j["remainder"] = nullptr;
    if (report)
        j["report"] = {{"singles_maximal", report->singles_maximal},
                       {"pairs_maximal", report->pairs_maximal},
                       {"worst_single_slack", report->worst_single_slack},
                       {"worst_pair_slack", report->worst_pair_slack},
                       {"perturbation_gain", report->perturbation_gain}};
    return j.dump(2) + "\n";
}

std::string ppt_decomposition_to_json(const PptBsaDecomposition& dec,
                                      BipartiteDims dims) {
    json j{{"lambda", dec.lambda},
           {"weights", weights_array(dec.weights)},
           {"converged", dec.converged},
           {"remainder_ppt", true},
           {"edge_gap", dec.edge_gap}};
    if (dec.remainder)
        j["remainder"] = matrix_object(dec.remainder->mat(), dims);
    else
        j["remainder"] = nullptr;
    return j.dump(2) + "\n";
}

std::string monotonicity_to_json(const MonotonicityReport& rep) {
    json outcomes = json::array();
    for (const auto& [p, e] : rep.outcome_measures)
        outcomes.push_back({{"probability", p}, {"E", e}});
    json j{{"lhs", rep.lhs},
           {"rhs", rep.rhs},
           {"slack", rep.slack},
           {"identity_residual", rep.identity_residual},
           {"structural_violation", rep.structural_violation},
           {"outcome_measures", outcomes}};
    return j.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw InvalidInput("cannot open file for writing: " + path);
    out << text;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw InvalidInput("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace bsakit
