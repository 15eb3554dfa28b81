#ifndef BSAKIT_IO_HPP
#define BSAKIT_IO_HPP

#include <string>

#include "bsakit/measures.hpp"
#include "bsakit/ppt_bsa.hpp"

namespace bsakit {

// Density matrix file contract:
// {"m": int, "n": int, "matrix": [[[re, im], ...], ...]} with m*n rows of
// m*n [re, im] pairs, row-major, composite index i_A * n + i_B.

std::string density_to_json(const DensityMatrix& rho);
DensityMatrix density_from_json(const std::string& text);

DensityMatrix load_density(const std::string& path);
void save_density(const std::string& path, const DensityMatrix& rho);

std::string decomposition_to_json(const BsaDecomposition& dec, BipartiteDims dims,
                                  const OptimalityReport* report = nullptr);
std::string ppt_decomposition_to_json(const PptBsaDecomposition& dec,
                                      BipartiteDims dims);
std::string monotonicity_to_json(const MonotonicityReport& rep);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

} // namespace bsakit

#endif
