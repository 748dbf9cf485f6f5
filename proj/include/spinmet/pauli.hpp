#pragma once
// Weighted Pauli-string cost Hamiltonians: JSON ingestion with positional
// diagnostics, fast word application via bit masks, dense assembly, and exact
// ground-state solves used as reference energies for optimization targets.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinmet/types.hpp"

namespace spinmet {

struct PauliTerm {
  std::string word;  // length-n string over {I,X,Y,Z}; leftmost = qubit 1
  Real coeff = 0.0;
};

struct PauliMetadata {
  std::optional<std::string> molecule;
  std::optional<Real> bond_distance_angstrom;
  std::optional<Real> fci_energy;
  std::optional<std::string> hf_state;  // bitstring, leftmost = qubit 1
};

struct PauliSum {
  int n_qubits = 0;
  std::string unit;  // energy unit tag, e.g. "hartree" or "GHz"
  std::vector<PauliTerm> terms;
  PauliMetadata metadata;

  Eigen::Index dim() const { return Eigen::Index{1} << n_qubits; }
};

// Compiled form of one word: P|b> = prefactor * (-1)^popcount(b & sign_mask)
// * |b xor flip_mask>, with flip_mask covering X,Y sites and sign_mask
// covering Z,Y sites (convention Z|0> = +|0>).
struct CompiledWord {
  std::uint64_t flip_mask = 0;
  std::uint64_t sign_mask = 0;
  Complex prefactor{1.0, 0.0};
  bool identity = false;
};

CompiledWord compile_word(const std::string& word, int n_qubits);

// --- ingestion ------------------------------------------------------------

// Parses the on-disk schema {"n_qubits","unit","terms":[{"pauli","coeff"}],
// "metadata":{...}}. Structural problems raise SchemaError naming the
// offending element; the JSON text itself failing to parse also maps to
// SchemaError (with the byte position from the parser).
PauliSum parse_pauli_sum(const std::string& json_text,
                         const std::string& origin = "");
PauliSum load_pauli_sum(const std::string& path);

// Semantic checks that need numerics: duplicate words, and (for n <= 4) the
// fci_energy metadata matching the assembled minimum eigenvalue to 1e-9.
// Returns human-readable issue strings; empty means clean.
std::vector<std::string> pauli_sum_issues(const PauliSum& sum);

// --- application ----------------------------------------------------------

StateVector apply_word(const CompiledWord& w, const StateVector& psi);
StateVector apply_pauli_sum(const PauliSum& sum, const StateVector& psi);

// Exact statevector expectation <psi| sum |psi>; real for real coefficients.
Real pauli_expectation(const PauliSum& sum, const StateVector& psi);

MatrixXcd pauli_sum_matrix(const PauliSum& sum);

// --- ground truth ---------------------------------------------------------

struct GroundTruth {
  Real energy = 0.0;
  StateVector state;
  Real gap = 0.0;         // E_1 - E_0 of the assembled matrix
  bool degenerate = false;  // gap < 1e-10
};

// Dense minimum eigenpair; intended for n <= 12.
GroundTruth ground_truth(const PauliSum& sum);

// --- basis helpers ---------------------------------------------------------

// "0110" -> basis index with qubit 1 (leftmost char) as most significant bit.
Eigen::Index basis_index_from_bits(const std::string& bits);
StateVector basis_state(int n_qubits, Eigen::Index index);

}  // namespace spinmet
