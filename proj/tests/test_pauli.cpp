#include <Eigen/Dense>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "qfe/model.hpp"
#include "qfe/pauli.hpp"

using namespace qfe;

TEST_CASE("pauli string parse and identity") {
  const PauliString s = PauliString::parse("ZZI");
  CHECK(s.n() == 3);
  CHECK(s.ops[0] == Pauli::Z);
  CHECK(s.ops[2] == Pauli::I);
  CHECK(s.str() == "ZZI");
  CHECK_FALSE(s.is_identity());
  CHECK(PauliString(4).is_identity());
  CHECK_THROWS(PauliString::parse("ZQ"));
  CHECK_THROWS(PauliString::parse(""));
}

TEST_CASE("canonicalization merges duplicates and drops zeros") {
  PauliOperator a(2);
  a.add(0.5, "XI").add(1.0, "ZZ").add(0.5, "XI").add(2.0, "IY").add(-2.0, "IY");
  REQUIRE(a.terms().size() == 2);  // XI merged, IY cancelled
  CHECK(a.terms()[0].string.str() == "XI");
  CHECK(a.terms()[0].coeff == doctest::Approx(1.0));
  CHECK(a.terms()[1].string.str() == "ZZ");
}

TEST_CASE("canonicalization is order-independent and idempotent") {
  std::vector<PauliTerm> terms = {{1.0, PauliString::parse("ZZ")},
                                  {0.25, PauliString::parse("XI")},
                                  {0.75, PauliString::parse("XI")},
                                  {-0.5, PauliString::parse("IX")}};
  const PauliOperator reference(2, terms);
  std::mt19937 shuffler(12345);
  for (int rep = 0; rep < 20; ++rep) {
    std::shuffle(terms.begin(), terms.end(), shuffler);
    const PauliOperator shuffled(2, terms);
    CHECK(shuffled == reference);
    CHECK(shuffled.str() == reference.str());
  }
}

TEST_CASE("tfim builder matches the stated term lists") {
  const DrivenHamiltonian m2 = build_tfim(2, 1.0, 1.0);
  PauliOperator base2(2);
  base2.add(1.0, "ZZ").add(1.0, "XI").add(1.0, "IX");
  PauliOperator drive2(2);
  drive2.add(0.5, "XI").add(0.5, "IX");
  CHECK(m2.base == base2);
  CHECK(m2.drive == drive2);

  const DrivenHamiltonian m1 = build_tfim(1, 1.0, 1.0);
  PauliOperator base1(1);
  base1.add(1.0, "X");
  CHECK(m1.base == base1);  // no ZZ term exists at n=1
  CHECK(m1.drive == PauliOperator(1).add(0.5, "X"));

  CHECK_THROWS(build_tfim(0, 1.0, 1.0));
}

TEST_CASE("tfim H(1) equals H(0) plus half the transverse field, densely") {
  const DrivenHamiltonian m = build_tfim(3, 1.0, 1.0);
  PauliOperator half_field(3);
  half_field.add(0.5, "XII").add(0.5, "IXI").add(0.5, "IIX");
  const Eigen::MatrixXcd lhs = to_dense(m.at(1.0));
  const Eigen::MatrixXcd rhs = to_dense(m.at(0.0)) + to_dense(half_field);
  CHECK((lhs - rhs).norm() < 1e-12);
}

TEST_CASE("heisenberg builder") {
  PauliOperator drive(2);
  drive.add(0.5, "XI").add(0.5, "IX");
  const DrivenHamiltonian h = build_heisenberg(2, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, drive);
  CHECK(h.base.terms().size() == 3);  // XX, YY, ZZ
  for (const auto& t : h.base.terms()) CHECK(t.coeff == doctest::Approx(1.0));

  const DrivenHamiltonian reduced =
      build_heisenberg(2, {0.0, 0.0, 1.0}, {1.0, 0.0, 0.0}, drive);
  CHECK(reduced.base == build_tfim(2, 1.0, 1.0).base);

  PauliOperator drive5(5);
  for (int i = 0; i < 5; ++i) {
    PauliString s(5);
    s.ops[static_cast<std::size_t>(i)] = Pauli::X;
    drive5.add(0.5, s);
  }
  const DrivenHamiltonian h5 = build_heisenberg(5, {1.0, 1.0, 1.0}, {1.0, 0.0, 0.0}, drive5);
  const Eigen::MatrixXcd dense = to_dense(h5.at(1.0));
  CHECK((dense - dense.adjoint()).norm() < 1e-12);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
  CHECK(es.info() == Eigen::Success);

  CHECK_THROWS(build_heisenberg(1, {1.0, 1.0, 1.0}, {0.0, 0.0, 0.0}, PauliOperator(1)));
}

TEST_CASE("lambda schedule is linear with checked domain") {
  const LambdaProtocol p{10.0, 1000, LambdaProtocol::Shape::Linear};
  CHECK(lambda_at(p, 0.0) == doctest::Approx(0.0));
  CHECK(lambda_at(p, 10.0) == doctest::Approx(1.0));
  CHECK(lambda_at(p, 5.0) == doctest::Approx(0.5));
  CHECK_THROWS(lambda_at(p, -0.1));
  CHECK_THROWS(lambda_at(p, 10.1));
}

TEST_CASE("dense conversion") {
  const Eigen::MatrixXcd x = to_dense(PauliString::parse("X"));
  CHECK(std::abs(x(0, 1) - 1.0) < 1e-15);
  CHECK(std::abs(x(1, 0) - 1.0) < 1e-15);
  CHECK(std::abs(x(0, 0)) < 1e-15);

  const Eigen::MatrixXcd zz = to_dense(PauliString::parse("ZZ"));
  const Eigen::Vector4d diag = zz.diagonal().real();
  CHECK(diag.isApprox(Eigen::Vector4d(1, -1, -1, 1)));

  CHECK(std::abs(to_dense(build_tfim(2, 1.0, 1.0).base).trace()) < 1e-12);

  PauliOperator too_big(13);
  too_big.add(1.0, PauliString(13));
  CHECK_THROWS(to_dense(too_big));
}

TEST_CASE("qubit ordering: site 1 is the most-significant bit") {
  // Z on site 1 of two qubits: diag(+1, +1, -1, -1)
  const Eigen::MatrixXcd z1 = to_dense(PauliString::parse("ZI"));
  CHECK(z1.diagonal().real().isApprox(Eigen::Vector4d(1, 1, -1, -1)));
  const Eigen::MatrixXcd z2 = to_dense(PauliString::parse("IZ"));
  CHECK(z2.diagonal().real().isApprox(Eigen::Vector4d(1, -1, 1, -1)));
}

TEST_CASE("driven hamiltonian is linear in lambda") {
  for (const auto& model :
       {build_tfim(3, 1.0, 1.0),
        build_heisenberg(3, {0.3, 0.7, 1.1}, {0.2, 0.0, 0.4},
                         PauliOperator(3).add(0.5, "XII").add(0.5, "IXI").add(0.5, "IIX"))}) {
    CHECK(model.at(0.0) == model.base);
    CHECK(model.at(1.0) == model.base + model.drive);
    // Midpoint identity up to summation order; exact coefficient equality
    // would demand FP distributivity.
    const Eigen::MatrixXcd mid = to_dense(model.at(0.5));
    const Eigen::MatrixXcd avg = to_dense((model.at(0.0) + model.at(1.0)) * 0.5);
    CHECK((mid - avg).norm() < 1e-12);
  }
}

TEST_CASE("dense matrices are Hermitian for both builders") {
  const Eigen::MatrixXcd a = to_dense(build_tfim(4, 0.8, 1.3).at(0.7));
  CHECK((a - a.adjoint()).norm() < 1e-12);
  PauliOperator drive(2);
  drive.add(0.5, "XI");
  const Eigen::MatrixXcd b =
      to_dense(build_heisenberg(2, {1.0, 0.5, 0.25}, {0.1, 0.2, 0.3}, drive).at(0.3));
  CHECK((b - b.adjoint()).norm() < 1e-12);
}
