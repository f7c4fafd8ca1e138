#pragma once

#include <string>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/kernel_expansion.hpp"
#include "mixred/matrix.hpp"

namespace mixred {

// Decimal representation with 17 significant digits; round-trips exactly.
std::string fmt_g17(double v);

// Mixture JSON: {"dim": d, "coeffs": [...], "atoms": [{"mu": [...],
// "cov": {"kind": "iso"|"diag"|"full", "data": [...]}}, ...]}.
Mixture load_mixture_json(const std::string& path);
void save_mixture_json(const Mixture& m, const std::string& path);

// Expansion JSON: {"d", "kind", "k", "h", "weights", "exponents",
// "delta", "R", "eps"}.
KernelExpansion load_expansion_json(const std::string& path);
void save_expansion_json(const KernelExpansion& e, const std::string& path);

// Headerless CSV of points, one row per point.
std::vector<Vec> load_points_csv(const std::string& path);
void save_points_csv(const std::vector<Vec>& points, const std::string& path);

// CSV with a header row; cells are written verbatim.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace mixred
