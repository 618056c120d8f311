#pragma once

#include <stdexcept>
#include <string>

namespace mbp {

// Named error conditions from the module contracts. All derive from
// mbp_error so the CLI can map them to exit codes uniformly.
struct mbp_error : std::runtime_error {
  explicit mbp_error(const std::string& m) : std::runtime_error(m) {}
};

struct ZeroPolynomial : mbp_error {
  ZeroPolynomial() : mbp_error("ZeroPolynomial") {}
};

struct NonSplitSpectrum : mbp_error {
  std::string residual;
  explicit NonSplitSpectrum(std::string res)
      : mbp_error("NonSplitSpectrum: residual factor " + res), residual(std::move(res)) {}
};

struct ShapeMismatch : mbp_error {
  explicit ShapeMismatch(const std::string& m) : mbp_error("ShapeMismatch: " + m) {}
};

struct IrregularWeyr : mbp_error {
  explicit IrregularWeyr(const std::string& m) : mbp_error("IrregularWeyr: " + m) {}
};

struct NotInvertible : mbp_error {
  explicit NotInvertible(const std::string& m) : mbp_error("NotInvertible: " + m) {}
};

struct IllegalStep : mbp_error {
  explicit IllegalStep(const std::string& m) : mbp_error("IllegalStep: " + m) {}
};

struct MixedGroup : mbp_error {
  explicit MixedGroup(const std::string& m) : mbp_error("MixedGroup: " + m) {}
};

struct NotBipartite : mbp_error {
  explicit NotBipartite(const std::string& m) : mbp_error("NotBipartite: " + m) {}
};

struct NotOneSidedRow : mbp_error {
  explicit NotOneSidedRow(const std::string& m) : mbp_error("NotOneSidedRow: " + m) {}
};

struct InvalidTable : mbp_error {
  explicit InvalidTable(const std::string& m) : mbp_error("InvalidTable: " + m) {}
};

struct InfiniteDimensional : mbp_error {
  explicit InfiniteDimensional(const std::string& m) : mbp_error("InfiniteDimensional: " + m) {}
};

struct NotMainColumnClass : mbp_error {
  explicit NotMainColumnClass(const std::string& m) : mbp_error("NotMainColumnClass: " + m) {}
};

struct NotLocal : mbp_error {
  explicit NotLocal(const std::string& m) : mbp_error("NotLocal: " + m) {}
};

struct InvalidProblem : mbp_error {
  explicit InvalidProblem(const std::string& m) : mbp_error("InvalidProblem: " + m) {}
};

struct InvalidInput : mbp_error {
  explicit InvalidInput(const std::string& m) : mbp_error("InvalidInput: " + m) {}
};

} // namespace mbp
