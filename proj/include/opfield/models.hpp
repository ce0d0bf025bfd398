#pragma once

#include <functional>
#include <string>
#include <vector>

#include "opfield/compact_set.hpp"
#include "opfield/operators.hpp"

namespace opfield {

/// Reduced fraction num/den with den >= 1.
struct Rational {
  long long num = 0;
  long long den = 1;
  static Rational reduced(long long num, long long den);
  Scalar value() const { return static_cast<Scalar>(num) / static_cast<Scalar>(den); }
};

enum class MetricKind { Euclidean, Ultrametric };

/// A sampled parameter. `value` is the numeric coordinate (t for model
/// families, the stage index n for ultrametric families). Rational tags are
/// carried when the generators need exact p/q.
struct ParamPoint {
  Scalar value = 0;
  long long num = 0;
  long long den = 0;  // den > 0 when a rational tag is present
  bool at_infinity = false;
  bool has_rational() const { return den > 0; }
};

ParamPoint rational_point(long long num, long long den);
ParamPoint real_point(Scalar value);
ParamPoint infinity_point();

/// Finite sampled metric parameter space. The Euclidean metric is |s - t| on
/// values; the ultrametric is e^{-kappa^min(n,m)} on stage indices with
/// infinity handled as the one-point completion.
struct ParameterSpace {
  std::vector<ParamPoint> points;
  MetricKind metric = MetricKind::Euclidean;
  Scalar kappa = 2.0;

  std::size_t size() const { return points.size(); }
  Scalar distance(std::size_t i, std::size_t j) const;
};

ParameterSpace euclidean_space(std::vector<ParamPoint> points);
ParameterSpace ultrametric_space(std::vector<ParamPoint> points, Scalar kappa);

/// A family t -> A_t with a uniform norm bound m >= sup_t ||A_t||.
struct OperatorField {
  std::function<Operator(const ParamPoint&)> generator;
  Scalar bound = 0;
};

/// Almost Mathieu potential V(n) = 2 mu cos(2 pi (n p/q + theta)) as a
/// period-q Jacobi operator. Non-reduced fractions are reduced.
Operator almost_mathieu(Scalar mu, Scalar theta, Rational t);

/// Kohmoto potential V(n) = lam * chi_[0,t)(frac(n p/q + theta)).
Operator kohmoto(Scalar lam, Scalar theta, Rational t);

enum class SubstitutionWord { Fibonacci, ThueMorse, PeriodDoubling };

SubstitutionWord substitution_word_by_name(const std::string& name);
std::string to_string(SubstitutionWord w);

/// Level-th iterate of the substitution, as 0/1 letters.
std::vector<int> substitution_letters(SubstitutionWord w, int level);

/// Periodized substitution potential lam * letters.
Operator substitution_field(Scalar lam, SubstitutionWord w, int level);

OperatorField almost_mathieu_family(Scalar mu, Scalar theta);
OperatorField kohmoto_family(Scalar lam, Scalar theta);
/// Family over the coupling: the parameter value is lambda itself.
OperatorField substitution_family(SubstitutionWord w, int level, Scalar lambda_max);

/// Nested family F_0 = [0, m] with gap (a_n, b_n) removed at stage n. Widths
/// follow |b_n - a_n| = C e^{-(alpha/2) kappa^{n-1}}, so that
/// d_H(F_n, F_inf) = |b_{n+1} - a_{n+1}| / 2 on the ultrametric
/// d(n, m) = e^{-kappa^min(n,m)}.
struct CounterexampleConfig {
  Scalar c = 2;
  Scalar m = 3;
  Scalar kappa = 2;
  Scalar alpha = 1;
  Scalar width_scale = 1;  // the constant C
  int gap_count = 12;      // N
};

struct CounterexampleFamily {
  std::vector<CompactSet> stages;  // index n = 0..N
  CompactSet limit;                // stand-in for F_infinity
  std::vector<Gap> removed;        // gap removed at stage n+1 (empty entry = sub-resolution)
  std::vector<bool> generated;     // whether stage n+1 actually removed a gap
};

CounterexampleFamily counterexample_family(const CounterexampleConfig& cfg);

/// max over the grid of op_norm(A_t), plus a safety margin of 1. This is the
/// m handed to the probe operations.
Scalar field_bound(const OperatorField& field, const ParameterSpace& grid);

/// Convergents p_k/q_k of a continued fraction [a0; a1, a2, ...].
std::vector<Rational> convergents(const std::vector<long long>& cf, int depth);

std::vector<Rational> golden_mean_convergents(int depth);
std::vector<Rational> sqrt2_minus_one_convergents(int depth);

/// Grid t = 1/2 +/- k/(2q) for q = 2..q_max (k = 1), plus 1/2 itself,
/// ascending. The standard grid for watching the central gap close.
ParameterSpace am_closing_grid(int q_max);

}  // namespace opfield
