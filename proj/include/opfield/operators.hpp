#pragma once

#include <Eigen/Dense>
#include <complex>
#include <variant>

#include "opfield/compact_set.hpp"
#include "opfield/poly2.hpp"

namespace opfield {

using Complex = std::complex<Scalar>;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Dense complex Hermitian matrix. Construction via `checked` verifies
/// Hermitianity (tol 1e-12 relative to the largest entry) and symmetrizes.
struct DenseHermitian {
  ComplexMatrix mat;
  static DenseHermitian checked(const ComplexMatrix& m);
  Eigen::Index size() const { return mat.rows(); }
};

/// Real symmetric tridiagonal matrix: diag has n entries, off has n-1.
struct SymTridiag {
  Vector diag;
  Vector off;
  SymTridiag() = default;
  SymTridiag(Vector d, Vector e);
  Eigen::Index size() const { return diag.size(); }
};

/// Two-sided infinite Jacobi operator with unit hopping and a q-periodic
/// potential; its spectrum is the exact discriminant band union.
struct PeriodicJacobi {
  Vector potential;
  explicit PeriodicJacobi(Vector v);
  Eigen::Index period() const { return potential.size(); }
};

using Operator = std::variant<DenseHermitian, SymTridiag, PeriodicJacobi>;

/// Number of eigenvalues strictly below e, by Sturm sequence sign changes
/// with the usual pivot guard.
int sturm_count(const SymTridiag& a, Scalar e);

/// All eigenvalues in ascending order, by Sturm bisection to 1e-12.
Vector eigenvalues(const SymTridiag& a);

/// Householder tridiagonalization followed by Sturm bisection.
Vector eigenvalues(const DenseHermitian& a);

/// Discriminant of the period-q transfer matrix product at energy e.
Scalar discriminant(const PeriodicJacobi& a, Scalar e);

/// Exact band union {e : |discriminant(e)| <= 2}. The 2q edges are the
/// periodic and antiperiodic Bloch eigenvalues (the roots of
/// discriminant = +/-2); touching bands merge.
CompactSet band_edges(const PeriodicJacobi& a);

/// Spectrum as a CompactSet. Finite variants merge eigenvalues closer than
/// merge_tol into intervals; the periodic variant returns exact bands and
/// ignores merge_tol.
CompactSet spectrum(const Operator& a, Scalar merge_tol);

/// Spectrum without any merging: degenerate intervals at each distinct
/// eigenvalue for finite variants, exact bands for the periodic variant.
CompactSet exact_spectrum(const Operator& a);

Scalar op_norm(const Operator& a);

/// max over the spectrum of |p(.)|; never formed by matrix products.
Scalar poly_norm(const Operator& a, const Poly2& p);

/// Norm-probe test: with p(z) = m^2 - (z-x)^2, returns poly_norm(a,p) <= m^2 - r^2,
/// which holds iff the open ball B_r(x) misses the spectrum.
/// Requires m > ||a - x|| and m > r > 0.
bool probe_ball(const Operator& a, Scalar x, Scalar r, Scalar m);

/// ||(z - a)^{-1}|| = 1 / dist(z, spectrum). Throws for real z on the spectrum.
Scalar resolvent_norm(const Operator& a, Complex z);

/// Diagonal unitary diag(e^{i phi_k}) with phases canonicalized to [0, 2pi).
struct UnitaryDiag {
  Vector phases;
  explicit UnitaryDiag(Vector ph);
  Eigen::Index size() const { return phases.size(); }
};

/// Arc probe: returns max_k |1 + e^{i(phi_k - theta)}| <= sqrt(4 - r^2),
/// which holds iff the chordal ball B_r(e^{i theta}) misses the spectrum.
/// Requires 0 < r < 2.
bool probe_unitary_arc(const UnitaryDiag& u, Scalar theta, Scalar r);

}  // namespace opfield
