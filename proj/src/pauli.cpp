#include "qfe/pauli.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace qfe {

char pauli_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  throw std::logic_error("bad Pauli");
}

Pauli pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: throw std::invalid_argument(std::string("bad Pauli letter: ") + c);
  }
}

PauliString PauliString::parse(const std::string& text) {
  PauliString s;
  s.ops.reserve(text.size());
  for (char c : text) s.ops.push_back(pauli_from_char(c));
  if (s.ops.empty()) throw std::invalid_argument("empty Pauli string");
  return s;
}

bool PauliString::is_identity() const {
  return std::all_of(ops.begin(), ops.end(), [](Pauli p) { return p == Pauli::I; });
}

std::string PauliString::str() const {
  std::string out;
  out.reserve(ops.size());
  for (Pauli p : ops) out.push_back(pauli_char(p));
  return out;
}

PauliOperator::PauliOperator(int n) : n_(n) {
  if (n < 1) throw std::invalid_argument("PauliOperator: n must be >= 1");
}

PauliOperator::PauliOperator(int n, std::vector<PauliTerm> terms) : PauliOperator(n) {
  terms_ = std::move(terms);
  canonicalize();
}

PauliOperator& PauliOperator::add(double coeff, const PauliString& s) {
  if (n_ == 0) n_ = s.n();
  if (s.n() != n_) throw std::invalid_argument("PauliOperator::add: length mismatch");
  terms_.push_back({coeff, s});
  canonicalize();
  return *this;
}

void PauliOperator::canonicalize() {
  for (const auto& t : terms_)
    if (t.string.n() != n_) throw std::invalid_argument("PauliOperator: term length mismatch");
  std::sort(terms_.begin(), terms_.end(), [](const PauliTerm& a, const PauliTerm& b) {
    if (a.string.ops != b.string.ops) return a.string.ops < b.string.ops;
    return a.coeff < b.coeff;
  });
  std::vector<PauliTerm> merged;
  merged.reserve(terms_.size());
  for (const auto& t : terms_) {
    if (!merged.empty() && merged.back().string == t.string)
      merged.back().coeff += t.coeff;
    else
      merged.push_back(t);
  }
  std::erase_if(merged, [](const PauliTerm& t) { return t.coeff == 0.0; });
  terms_ = std::move(merged);
}

PauliOperator PauliOperator::operator+(const PauliOperator& other) const {
  if (n_ != other.n_) throw std::invalid_argument("PauliOperator::+: size mismatch");
  std::vector<PauliTerm> all = terms_;
  all.insert(all.end(), other.terms_.begin(), other.terms_.end());
  return PauliOperator(n_, std::move(all));
}

PauliOperator PauliOperator::operator*(double scale) const {
  std::vector<PauliTerm> scaled = terms_;
  for (auto& t : scaled) t.coeff *= scale;
  return PauliOperator(n_, std::move(scaled));
}

bool PauliOperator::operator==(const PauliOperator& other) const {
  if (n_ != other.n_ || terms_.size() != other.terms_.size()) return false;
  for (std::size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].coeff != other.terms_[i].coeff || !(terms_[i].string == other.terms_[i].string))
      return false;
  return true;
}

std::string PauliOperator::str() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& t : terms_) {
    if (!first) os << " + ";
    os << t.coeff << "*" << t.string.str();
    first = false;
  }
  if (first) os << "0";
  return os.str();
}

namespace {

Eigen::Matrix2cd single_site(Pauli p) {
  using namespace std::complex_literals;
  Eigen::Matrix2cd m;
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -1i, 1i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

}  // namespace

Eigen::MatrixXcd to_dense(const PauliString& s) {
  if (s.n() < 1) throw std::invalid_argument("to_dense: empty string");
  if (s.n() > kMaxDenseQubits)
    throw std::invalid_argument("to_dense: dense limit is " + std::to_string(kMaxDenseQubits) + " qubits");
  // Site 1 is the leftmost Kronecker factor, i.e. the most-significant bit.
  Eigen::MatrixXcd m = single_site(s.ops[0]);
  for (int i = 1; i < s.n(); ++i)
    m = Eigen::kroneckerProduct(m, single_site(s.ops[static_cast<std::size_t>(i)])).eval();
  return m;
}

Eigen::MatrixXcd to_dense(const PauliOperator& op) {
  if (op.n() < 1) throw std::invalid_argument("to_dense: empty operator");
  if (op.n() > kMaxDenseQubits)
    throw std::invalid_argument("to_dense: dense limit is " + std::to_string(kMaxDenseQubits) + " qubits");
  const Eigen::Index dim = Eigen::Index{1} << op.n();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : op.terms()) m += t.coeff * to_dense(t.string);
  return m;
}

}  // namespace qfe
