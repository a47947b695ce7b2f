#pragma once

// JSON documents for laws, costs and process specs. All parse errors raise
// ConfigError. Documents:
//   law:   {"family": "laplace", "mu": 0, "scale": 1}, uniform {lo, hi},
//          triangular {lo, mode, hi}, exponential {rate, loc},
//          gaussian {mu, sigma}, tabulated {grid, values},
//          {"atoms": [[x, p], ...]}, or atoms plus {"density": law,
//          "density_mass": w}; any law may carry "shift": a.
//   cost:  {"form": "power", "p": 0.5} | {"form": "capped", "c": 1}
//          | {"form": "bounded_exp"} | {"form": "bands", "bands": [{"lambda", "c"}]}
//   levy:  {"rate", "jump_law", "x0", "y0", "horizon"}
//   chain: {"jump_law", "x0", "y0", "steps"}

#include <filesystem>
#include <string>

#include "coupled_levy/chains.hpp"
#include "coupled_levy/costs.hpp"
#include "coupled_levy/coupling.hpp"
#include "coupled_levy/levy.hpp"
#include "coupled_levy/measures.hpp"

namespace coupled_levy {

std::string read_text_file(const std::filesystem::path& path);

Distribution1D parse_distribution(const std::string& text);
ConcaveCost parse_cost(const std::string& text);
CompoundPoissonSpec parse_levy_spec(const std::string& text);
ChainSpec parse_chain_spec(const std::string& text);

Distribution1D load_distribution(const std::filesystem::path& path);
ConcaveCost load_cost(const std::filesystem::path& path);
CompoundPoissonSpec load_levy_spec(const std::filesystem::path& path);
ChainSpec load_chain_spec(const std::filesystem::path& path);

/// Atoms and density pieces, with total mass.
std::string distribution_to_json(const Distribution1D& d);
/// p, zeta and summaries of nu1, nu2 and nu*.
std::string decomposition_to_json(const HahnJordanDecomposition& dec);

}  // namespace coupled_levy
