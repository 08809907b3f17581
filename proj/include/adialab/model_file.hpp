#pragma once

#include "adialab/adiabatic.hpp"
#include "adialab/interactions.hpp"

#include <filesystem>
#include <string>

namespace YAML {
class Node;
}

namespace adialab {

/// Model files are YAML documents with a `kind` key:
///
///   kind: interaction   weight_r, dimension, terms
///   kind: path          weight_r, dimension, form (constant | linear | samples)
///   kind: matrix-model  base, perturbation (polynomial coefficients in tau),
///                       beta, band
///
/// Each term has `support` (integers for chains, coordinate lists otherwise)
/// and either `pauli` with an optional `coefficient`, or `matrix` given as rows
/// whose entries are reals or [re, im] pairs. Unknown keys are errors and
/// non-self-adjoint matrices are rejected. docs/model-format.md has examples.

Interaction parse_interaction(const YAML::Node& node, double weight_r, int dimension);
Interaction load_interaction(const std::filesystem::path& file);
InteractionPath load_path(const std::filesystem::path& file);
MatrixModel load_matrix_model(const std::filesystem::path& file);

/// Parses a complex matrix from rows of reals or [re, im] pairs.
Matrix parse_matrix(const YAML::Node& node);

/// 64-bit FNV-1a of a file's bytes, as 16 hex digits.
std::string file_hash(const std::filesystem::path& file);

}  // namespace adialab
