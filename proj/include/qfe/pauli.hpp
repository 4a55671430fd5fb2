#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qfe {

// Dense representations are capped at this qubit count (4096-dimensional).
inline constexpr int kMaxDenseQubits = 12;

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char pauli_char(Pauli p);
Pauli pauli_from_char(char c);

// A phase-free word of single-site Paulis.  Site 1 is ops[0] and maps to the
// most-significant bit of a basis index (convention shared by every module).
struct PauliString {
  std::vector<Pauli> ops;

  PauliString() = default;
  explicit PauliString(int n) : ops(static_cast<std::size_t>(n), Pauli::I) {}
  static PauliString parse(const std::string& text);  // e.g. "ZZI"

  int n() const { return static_cast<int>(ops.size()); }
  bool is_identity() const;
  std::string str() const;

  bool operator==(const PauliString& other) const = default;
  // Lexicographic site order; total order used by canonicalization.
  bool operator<(const PauliString& other) const { return ops < other.ops; }
};

struct PauliTerm {
  double coeff = 0.0;
  PauliString string;
};

// Hermitian operator: real combination of Pauli strings on n qubits.
// Construction canonicalizes: terms sorted by string, duplicates merged,
// exact zeros dropped.  Canonicalization is idempotent and order-independent
// (terms are sorted by (string, coeff) before merging so the floating-point
// sums are performed in a unique order).
class PauliOperator {
 public:
  PauliOperator() = default;
  explicit PauliOperator(int n);
  PauliOperator(int n, std::vector<PauliTerm> terms);

  int n() const { return n_; }
  const std::vector<PauliTerm>& terms() const { return terms_; }

  PauliOperator& add(double coeff, const PauliString& s);
  PauliOperator& add(double coeff, const std::string& s) { return add(coeff, PauliString::parse(s)); }

  PauliOperator operator+(const PauliOperator& other) const;
  PauliOperator operator*(double scale) const;

  bool operator==(const PauliOperator& other) const;
  std::string str() const;

 private:
  void canonicalize();

  int n_ = 0;
  std::vector<PauliTerm> terms_;
};

// Dense matrix by Kronecker products, site 1 = most-significant bit.
// Rejects n > kMaxDenseQubits.
Eigen::MatrixXcd to_dense(const PauliOperator& op);
Eigen::MatrixXcd to_dense(const PauliString& s);

}  // namespace qfe
