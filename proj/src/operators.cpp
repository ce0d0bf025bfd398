#include "opfield/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace opfield {

namespace {

// Absolute bisection width for eigenvalues and band edges. Fixed so that
// repeated runs and regressions are deterministic.
constexpr Scalar kBisectTol = 1e-12;

constexpr Scalar kPivotMin =
    std::numeric_limits<Scalar>::min() / std::numeric_limits<Scalar>::epsilon();

}  // namespace

DenseHermitian DenseHermitian::checked(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DenseHermitian: matrix not square");
  if (m.rows() == 0) throw std::invalid_argument("DenseHermitian: empty matrix");
  Scalar scale = std::max<Scalar>(1.0, m.cwiseAbs().maxCoeff());
  Scalar dev = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (dev > 1e-12 * scale)
    throw std::invalid_argument("DenseHermitian: matrix is not Hermitian");
  DenseHermitian out;
  out.mat = 0.5 * (m + m.adjoint().eval());
  return out;
}

SymTridiag::SymTridiag(Vector d, Vector e) : diag(std::move(d)), off(std::move(e)) {
  if (diag.size() == 0) throw std::invalid_argument("SymTridiag: empty diagonal");
  if (off.size() != diag.size() - 1)
    throw std::invalid_argument("SymTridiag: off-diagonal must have n-1 entries");
}

PeriodicJacobi::PeriodicJacobi(Vector v) : potential(std::move(v)) {
  if (potential.size() < 1) throw std::invalid_argument("PeriodicJacobi: period must be >= 1");
}

int sturm_count(const SymTridiag& a, Scalar e) {
  const Eigen::Index n = a.size();
  int count = 0;
  Scalar d = a.diag(0) - e;
  if (std::abs(d) < kPivotMin) d = -kPivotMin;
  if (d < 0) ++count;
  for (Eigen::Index i = 1; i < n; ++i) {
    d = (a.diag(i) - e) - a.off(i - 1) * a.off(i - 1) / d;
    if (std::abs(d) < kPivotMin) d = -kPivotMin;
    if (d < 0) ++count;
  }
  return count;
}

Vector eigenvalues(const SymTridiag& a) {
  const Eigen::Index n = a.size();
  // Gershgorin bounds.
  Scalar lo = std::numeric_limits<Scalar>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar r = 0;
    if (i > 0) r += std::abs(a.off(i - 1));
    if (i + 1 < n) r += std::abs(a.off(i));
    lo = std::min(lo, a.diag(i) - r);
    hi = std::max(hi, a.diag(i) + r);
  }
  lo -= 1e-6;
  hi += 1e-6;

  Vector out(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Scalar a0 = lo, b0 = hi;
    while (b0 - a0 > kBisectTol) {
      Scalar mid = 0.5 * (a0 + b0);
      if (sturm_count(a, mid) <= static_cast<int>(k))
        a0 = mid;
      else
        b0 = mid;
    }
    out(k) = 0.5 * (a0 + b0);
  }
  return out;
}

Vector eigenvalues(const DenseHermitian& a) {
  if (a.size() == 1) {
    Vector out(1);
    out(0) = a.mat(0, 0).real();
    return out;
  }
  Eigen::Tridiagonalization<ComplexMatrix> tri(a.mat);
  Vector d = tri.diagonal();
  Vector e = tri.subDiagonal();
  return eigenvalues(SymTridiag(std::move(d), std::move(e)));
}

Scalar discriminant(const PeriodicJacobi& a, Scalar e) {
  Eigen::Matrix2d m = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d step;
  for (Eigen::Index j = 0; j < a.period(); ++j) {
    step << e - a.potential(j), -1.0, 1.0, 0.0;
    m = step * m;
  }
  return m.trace();
}

namespace {

// Bloch matrix over one period at Floquet phase phi; its eigenvalues solve
// discriminant(e) = 2 cos(phi).
ComplexMatrix bloch_matrix(const PeriodicJacobi& a, Scalar phi) {
  const Eigen::Index q = a.period();
  ComplexMatrix m = ComplexMatrix::Zero(q, q);
  for (Eigen::Index j = 0; j < q; ++j) m(j, j) = a.potential(j);
  for (Eigen::Index j = 0; j + 1 < q; ++j) {
    m(j, j + 1) += 1;
    m(j + 1, j) += 1;
  }
  m(0, q - 1) += std::exp(Complex(0, -phi));
  m(q - 1, 0) += std::exp(Complex(0, phi));
  return m;
}

// Bands separated by less than this count as touching. Well above the
// eigenvalue error, well below every experiment tolerance.
constexpr Scalar kBandMergeTol = 1e-11;

}  // namespace

CompactSet band_edges(const PeriodicJacobi& a) {
  const int q = static_cast<int>(a.period());
  // The 2q roots of discriminant(e) = +/-2 are exactly the periodic and
  // antiperiodic Bloch eigenvalues; sorted, consecutive pairs bound the q
  // bands. Chebyshev-node bracketing of the discriminant misses whole bands
  // once their width drops below the node spacing (critical-coupling Almost
  // Mathieu at moderate periods already does), so the edges are located
  // through the Bloch eigenvalue problem instead.
  Vector periodic = eigenvalues(DenseHermitian::checked(bloch_matrix(a, 0)));
  Vector antiperiodic = eigenvalues(DenseHermitian::checked(bloch_matrix(a, M_PI)));
  std::vector<Scalar> all_edges(periodic.begin(), periodic.end());
  all_edges.insert(all_edges.end(), antiperiodic.begin(), antiperiodic.end());
  std::sort(all_edges.begin(), all_edges.end());
  if (all_edges.size() != static_cast<std::size_t>(2 * q))
    throw std::runtime_error("band_edges: expected " + std::to_string(2 * q) +
                             " band edges, found " + std::to_string(all_edges.size()));

  std::vector<Interval> bands;
  for (int b = 0; b < q; ++b) {
    Scalar lo = all_edges[2 * b], hi = all_edges[2 * b + 1];
    if (!bands.empty() && lo - bands.back().hi <= kBandMergeTol)
      bands.back().hi = std::max(bands.back().hi, hi);
    else
      bands.push_back(Interval{lo, hi});
  }
  if (static_cast<int>(bands.size()) > q)
    throw std::runtime_error("band_edges: found " + std::to_string(bands.size()) +
                             " bands, more than the period " + std::to_string(q));
  return CompactSet::from_intervals(std::move(bands));
}

namespace {

Vector variant_eigenvalues(const Operator& a) {
  if (std::holds_alternative<SymTridiag>(a)) return eigenvalues(std::get<SymTridiag>(a));
  if (std::holds_alternative<DenseHermitian>(a)) return eigenvalues(std::get<DenseHermitian>(a));
  throw std::logic_error("variant_eigenvalues: periodic operator has no finite eigenvalue list");
}

}  // namespace

CompactSet spectrum(const Operator& a, Scalar merge_tol) {
  if (std::holds_alternative<PeriodicJacobi>(a)) return band_edges(std::get<PeriodicJacobi>(a));
  if (merge_tol <= 0) throw std::invalid_argument("spectrum: merge_tol must be > 0");
  Vector ev = variant_eigenvalues(a);
  return CompactSet::from_points(std::vector<Scalar>(ev.begin(), ev.end()), merge_tol);
}

CompactSet exact_spectrum(const Operator& a) {
  if (std::holds_alternative<PeriodicJacobi>(a)) return band_edges(std::get<PeriodicJacobi>(a));
  Vector ev = variant_eigenvalues(a);
  std::vector<Interval> pts;
  pts.reserve(ev.size());
  for (Eigen::Index i = 0; i < ev.size(); ++i) pts.push_back(Interval{ev(i), ev(i)});
  return CompactSet::from_intervals(std::move(pts));
}

Scalar op_norm(const Operator& a) { return max_abs(exact_spectrum(a)); }

Scalar poly_norm(const Operator& a, const Poly2& p) {
  return poly_sup_abs(exact_spectrum(a), p);
}

bool probe_ball(const Operator& a, Scalar x, Scalar r, Scalar m) {
  if (!(r > 0) || !(m > r))
    throw std::invalid_argument("probe_ball: need m > r > 0");
  CompactSet sp = exact_spectrum(a);
  Scalar shifted_norm = std::max(std::abs(sp.min() - x), std::abs(sp.max() - x));
  if (!(m > shifted_norm))
    throw std::invalid_argument("probe_ball: need m > ||A - x||");
  return poly_sup_abs(sp, probe_poly(x, m)) <= m * m - r * r;
}

Scalar resolvent_norm(const Operator& a, Complex z) {
  CompactSet sp = exact_spectrum(a);
  Scalar dx = dist_point(z.real(), sp);
  Scalar dist = std::hypot(dx, z.imag());
  // Real z within eigenvalue resolution of the spectrum counts as on it.
  if (z.imag() == 0 && dx <= 1e-9)
    throw std::domain_error("resolvent_norm: resolvent unbounded (z on spectrum)");
  return 1.0 / dist;
}

UnitaryDiag::UnitaryDiag(Vector ph) : phases(std::move(ph)) {
  if (phases.size() == 0) throw std::invalid_argument("UnitaryDiag: empty phase list");
  constexpr Scalar two_pi = 2 * M_PI;
  for (Eigen::Index i = 0; i < phases.size(); ++i) {
    Scalar p = std::fmod(phases(i), two_pi);
    if (p < 0) p += two_pi;
    phases(i) = p;
  }
}

bool probe_unitary_arc(const UnitaryDiag& u, Scalar theta, Scalar r) {
  if (!(r > 0) || !(r < 2)) throw std::invalid_argument("probe_unitary_arc: need 0 < r < 2");
  Scalar worst = 0;
  for (Eigen::Index k = 0; k < u.size(); ++k)
    worst = std::max(worst, std::abs(2 * std::cos(0.5 * (u.phases(k) - theta))));
  return worst <= std::sqrt(4 - r * r);
}

}  // namespace opfield
