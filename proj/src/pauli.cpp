// Pauli-sum ingestion, application, and dense ground-truth solves.

#include "spinmet/pauli.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "spinmet/errors.hpp"

namespace spinmet {

using nlohmann::json;

CompiledWord compile_word(const std::string& word, int n_qubits) {
  CompiledWord out;
  int n_y = 0;
  for (int c = 0; c < n_qubits; ++c) {
    const std::uint64_t bit = std::uint64_t{1} << (n_qubits - 1 - c);
    switch (word[static_cast<std::size_t>(c)]) {
      case 'I':
        break;
      case 'X':
        out.flip_mask |= bit;
        break;
      case 'Y':
        out.flip_mask |= bit;
        out.sign_mask |= bit;
        ++n_y;
        break;
      case 'Z':
        out.sign_mask |= bit;
        break;
      default:
        throw SchemaError("", std::string("invalid Pauli letter '") +
                                  word[static_cast<std::size_t>(c)] + "'");
    }
  }
  static const Complex i_powers[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  out.prefactor = i_powers[n_y % 4];
  out.identity = (out.flip_mask == 0 && out.sign_mask == 0);
  return out;
}

// --- ingestion ------------------------------------------------------------

namespace {

const json& require_field(const json& obj, const char* key,
                          const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw SchemaError(where, std::string("missing field \"") + key + "\"");
  return *it;
}

void check_word(const std::string& word, int n_qubits,
                const std::string& where) {
  if (static_cast<int>(word.size()) != n_qubits) {
    std::ostringstream msg;
    msg << "word \"" << word << "\" has length " << word.size()
        << ", expected " << n_qubits;
    throw SchemaError(where, msg.str());
  }
  for (char c : word)
    if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
      throw SchemaError(where, std::string("invalid Pauli letter '") + c +
                                   "' (allowed: I, X, Y, Z)");
}

}  // namespace

PauliSum parse_pauli_sum(const std::string& json_text,
                         const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(origin, e.what());
  }
  const std::string root = origin.empty() ? "$" : origin;
  if (!doc.is_object()) throw SchemaError(root, "top level must be an object");

  PauliSum sum;
  const json& nq = require_field(doc, "n_qubits", root);
  if (!nq.is_number_integer() || nq.get<int>() < 1)
    throw SchemaError(root + ".n_qubits", "must be an integer >= 1");
  sum.n_qubits = nq.get<int>();
  if (sum.n_qubits > 24)
    throw SchemaError(root + ".n_qubits", "larger than supported (24)");

  const json& unit = require_field(doc, "unit", root);
  if (!unit.is_string()) throw SchemaError(root + ".unit", "must be a string");
  sum.unit = unit.get<std::string>();

  const json& terms = require_field(doc, "terms", root);
  if (!terms.is_array() || terms.empty())
    throw SchemaError(root + ".terms", "must be a non-empty array");
  sum.terms.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string where = root + ".terms[" + std::to_string(i) + "]";
    const json& t = terms[i];
    if (!t.is_object()) throw SchemaError(where, "must be an object");
    const json& pauli = require_field(t, "pauli", where);
    if (!pauli.is_string())
      throw SchemaError(where + ".pauli", "must be a string");
    const json& coeff = require_field(t, "coeff", where);
    if (!coeff.is_number())
      throw SchemaError(where + ".coeff", "must be a real number");
    PauliTerm term;
    term.word = pauli.get<std::string>();
    check_word(term.word, sum.n_qubits, where + ".pauli");
    term.coeff = coeff.get<Real>();
    sum.terms.push_back(std::move(term));
  }

  if (auto it = doc.find("metadata"); it != doc.end()) {
    const std::string where = root + ".metadata";
    if (!it->is_object()) throw SchemaError(where, "must be an object");
    const json& md = *it;
    if (auto f = md.find("molecule"); f != md.end()) {
      if (!f->is_string())
        throw SchemaError(where + ".molecule", "must be a string");
      sum.metadata.molecule = f->get<std::string>();
    }
    if (auto f = md.find("bond_distance_angstrom"); f != md.end()) {
      if (!f->is_number())
        throw SchemaError(where + ".bond_distance_angstrom", "must be a number");
      sum.metadata.bond_distance_angstrom = f->get<Real>();
    }
    if (auto f = md.find("fci_energy"); f != md.end()) {
      if (!f->is_number())
        throw SchemaError(where + ".fci_energy", "must be a number");
      sum.metadata.fci_energy = f->get<Real>();
    }
    if (auto f = md.find("hf_state"); f != md.end()) {
      if (!f->is_string())
        throw SchemaError(where + ".hf_state", "must be a string");
      const std::string bits = f->get<std::string>();
      if (static_cast<int>(bits.size()) != sum.n_qubits)
        throw SchemaError(where + ".hf_state",
                          "bitstring length must equal n_qubits");
      for (char c : bits)
        if (c != '0' && c != '1')
          throw SchemaError(where + ".hf_state", "must contain only 0/1");
      sum.metadata.hf_state = bits;
    }
  }
  return sum;
}

PauliSum load_pauli_sum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError(path, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pauli_sum(buf.str(), path);
}

std::vector<std::string> pauli_sum_issues(const PauliSum& sum) {
  std::vector<std::string> issues;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < sum.terms.size(); ++i) {
    if (!seen.insert(sum.terms[i].word).second)
      issues.push_back("terms[" + std::to_string(i) + "]: duplicate word \"" +
                       sum.terms[i].word + "\"");
  }
  if (sum.metadata.fci_energy && sum.n_qubits <= 4) {
    const GroundTruth gt = ground_truth(sum);
    const Real err = std::abs(gt.energy - *sum.metadata.fci_energy);
    if (err > 1e-9) {
      std::ostringstream msg;
      msg.precision(12);
      msg << "metadata.fci_energy " << *sum.metadata.fci_energy
          << " differs from assembled minimum eigenvalue " << gt.energy
          << " by " << err;
      issues.push_back(msg.str());
    }
  }
  return issues;
}

// --- application ----------------------------------------------------------

StateVector apply_word(const CompiledWord& w, const StateVector& psi) {
  const Eigen::Index d = psi.size();
  StateVector out(d);
  for (Eigen::Index b = 0; b < d; ++b) {
    const auto ub = static_cast<std::uint64_t>(b);
    const Complex amp =
        (std::popcount(ub & w.sign_mask) & 1) ? -psi(b) : psi(b);
    out(static_cast<Eigen::Index>(ub ^ w.flip_mask)) = w.prefactor * amp;
  }
  return out;
}

StateVector apply_pauli_sum(const PauliSum& sum, const StateVector& psi) {
  StateVector out = StateVector::Zero(psi.size());
  for (const PauliTerm& t : sum.terms)
    out += t.coeff * apply_word(compile_word(t.word, sum.n_qubits), psi);
  return out;
}

Real pauli_expectation(const PauliSum& sum, const StateVector& psi) {
  Real total = 0.0;
  for (const PauliTerm& t : sum.terms) {
    const CompiledWord w = compile_word(t.word, sum.n_qubits);
    Complex acc{0.0, 0.0};
    const Eigen::Index d = psi.size();
    for (Eigen::Index b = 0; b < d; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const Complex amp =
          (std::popcount(ub & w.sign_mask) & 1) ? -psi(b) : psi(b);
      acc += std::conj(psi(static_cast<Eigen::Index>(ub ^ w.flip_mask))) * amp;
    }
    total += t.coeff * (w.prefactor * acc).real();
  }
  return total;
}

MatrixXcd pauli_sum_matrix(const PauliSum& sum) {
  const Eigen::Index d = sum.dim();
  MatrixXcd m = MatrixXcd::Zero(d, d);
  for (const PauliTerm& t : sum.terms) {
    const CompiledWord w = compile_word(t.word, sum.n_qubits);
    for (Eigen::Index b = 0; b < d; ++b) {
      const auto ub = static_cast<std::uint64_t>(b);
      const Complex phase =
          (std::popcount(ub & w.sign_mask) & 1) ? -w.prefactor : w.prefactor;
      m(static_cast<Eigen::Index>(ub ^ w.flip_mask), b) += t.coeff * phase;
    }
  }
  return m;
}

// --- ground truth ---------------------------------------------------------

GroundTruth ground_truth(const PauliSum& sum) {
  if (sum.n_qubits > 12)
    throw ValidationError("", "dense ground-truth solve limited to n <= 12");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(pauli_sum_matrix(sum));
  GroundTruth gt;
  gt.energy = es.eigenvalues()(0);
  gt.state = es.eigenvectors().col(0);
  gt.gap = sum.dim() > 1 ? es.eigenvalues()(1) - es.eigenvalues()(0) : 0.0;
  gt.degenerate = sum.dim() > 1 && gt.gap < 1e-10;
  return gt;
}

// --- basis helpers ---------------------------------------------------------

Eigen::Index basis_index_from_bits(const std::string& bits) {
  Eigen::Index idx = 0;
  for (char c : bits) {
    if (c != '0' && c != '1')
      throw SchemaError("", "bitstring must contain only 0/1");
    idx = (idx << 1) | (c == '1' ? 1 : 0);
  }
  return idx;
}

StateVector basis_state(int n_qubits, Eigen::Index index) {
  StateVector psi = StateVector::Zero(Eigen::Index{1} << n_qubits);
  psi(index) = Complex{1.0, 0.0};
  return psi;
}

}  // namespace spinmet
