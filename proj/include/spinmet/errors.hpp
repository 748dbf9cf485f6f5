#pragma once
// Error taxonomy shared by every loader and validator. SchemaError means the
// input could not even be read as the expected shape (bad JSON, missing or
// mistyped fields, malformed Pauli words) and maps to CLI exit code 2.
// ValidationError means the input parsed fine but violates a physical or
// semantic constraint (bounds, normalization, metadata inconsistencies) and
// maps to CLI exit code 3. Both carry a location string ("terms[3].pauli")
// so diagnostics point at the offending element.

#include <stdexcept>
#include <string>

namespace spinmet {

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what) {}
};

class ValidationError : public std::runtime_error {
 public:
  ValidationError(const std::string& where, const std::string& what)
      : std::runtime_error(where.empty() ? what : where + ": " + what) {}
};

}  // namespace spinmet
