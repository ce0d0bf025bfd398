#include "opfield/models.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace opfield {

Rational Rational::reduced(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("Rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  long long g = std::gcd(num < 0 ? -num : num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return Rational{num, den};
}

ParamPoint rational_point(long long num, long long den) {
  Rational r = Rational::reduced(num, den);
  ParamPoint p;
  p.value = r.value();
  p.num = r.num;
  p.den = r.den;
  return p;
}

ParamPoint real_point(Scalar value) {
  ParamPoint p;
  p.value = value;
  return p;
}

ParamPoint infinity_point() {
  ParamPoint p;
  p.at_infinity = true;
  return p;
}

Scalar ParameterSpace::distance(std::size_t i, std::size_t j) const {
  const ParamPoint& a = points.at(i);
  const ParamPoint& b = points.at(j);
  if (metric == MetricKind::Euclidean) {
    if (a.at_infinity || b.at_infinity)
      throw std::invalid_argument("ParameterSpace: infinity point under the Euclidean metric");
    return std::abs(a.value - b.value);
  }
  // Ultrametric on stage indices.
  if (a.at_infinity && b.at_infinity) return 0;
  if (!a.at_infinity && !b.at_infinity && a.value == b.value) return 0;
  Scalar rank;
  if (a.at_infinity)
    rank = b.value;
  else if (b.at_infinity)
    rank = a.value;
  else
    rank = std::min(a.value, b.value);
  return std::exp(-std::pow(kappa, rank));
}

ParameterSpace euclidean_space(std::vector<ParamPoint> points) {
  ParameterSpace g;
  g.points = std::move(points);
  g.metric = MetricKind::Euclidean;
  return g;
}

ParameterSpace ultrametric_space(std::vector<ParamPoint> points, Scalar kappa) {
  if (!(kappa > 1)) throw std::invalid_argument("ultrametric_space: kappa must be > 1");
  ParameterSpace g;
  g.points = std::move(points);
  g.metric = MetricKind::Ultrametric;
  g.kappa = kappa;
  return g;
}

Operator almost_mathieu(Scalar mu, Scalar theta, Rational t) {
  Rational r = Rational::reduced(t.num, t.den);
  const long long q = r.den;
  Vector v(q);
  for (long long n = 0; n < q; ++n) {
    long long m = ((n * r.num) % q + q) % q;  // n p mod q keeps the phase small
    v(n) = 2 * mu * std::cos(2 * M_PI * (static_cast<Scalar>(m) / q + theta));
  }
  return PeriodicJacobi(std::move(v));
}

Operator kohmoto(Scalar lam, Scalar theta, Rational t) {
  Rational r = Rational::reduced(t.num, t.den);
  const long long q = r.den;
  const Scalar tval = r.value();
  Vector v(q);
  for (long long n = 0; n < q; ++n) {
    long long m = ((n * r.num) % q + q) % q;
    Scalar x = static_cast<Scalar>(m) / q + theta;
    x -= std::floor(x);  // frac into [0, 1)
    v(n) = (x < tval) ? lam : 0.0;  // chi_[0,t), half-open
  }
  return PeriodicJacobi(std::move(v));
}

SubstitutionWord substitution_word_by_name(const std::string& name) {
  if (name == "fibonacci") return SubstitutionWord::Fibonacci;
  if (name == "thue_morse") return SubstitutionWord::ThueMorse;
  if (name == "period_doubling") return SubstitutionWord::PeriodDoubling;
  throw std::invalid_argument("unknown substitution word: " + name);
}

std::string to_string(SubstitutionWord w) {
  switch (w) {
    case SubstitutionWord::Fibonacci: return "fibonacci";
    case SubstitutionWord::ThueMorse: return "thue_morse";
    case SubstitutionWord::PeriodDoubling: return "period_doubling";
  }
  return "?";
}

std::vector<int> substitution_letters(SubstitutionWord w, int level) {
  if (level < 1) throw std::invalid_argument("substitution_letters: level must be >= 1");
  // Letters: a = 0, b = 1.
  auto rule = [w](int letter) -> std::vector<int> {
    switch (w) {
      case SubstitutionWord::Fibonacci:
        return letter == 0 ? std::vector<int>{0, 1} : std::vector<int>{0};
      case SubstitutionWord::ThueMorse:
        return letter == 0 ? std::vector<int>{0, 1} : std::vector<int>{1, 0};
      case SubstitutionWord::PeriodDoubling:
        return letter == 0 ? std::vector<int>{0, 1} : std::vector<int>{0, 0};
    }
    return {};
  };
  std::vector<int> word{0};
  for (int l = 1; l < level; ++l) {
    std::vector<int> next;
    next.reserve(2 * word.size());
    for (int letter : word) {
      auto sub = rule(letter);
      next.insert(next.end(), sub.begin(), sub.end());
    }
    word = std::move(next);
  }
  return word;
}

Operator substitution_field(Scalar lam, SubstitutionWord w, int level) {
  std::vector<int> word = substitution_letters(w, level);
  Vector v(static_cast<Eigen::Index>(word.size()));
  for (std::size_t i = 0; i < word.size(); ++i) v(static_cast<Eigen::Index>(i)) = lam * word[i];
  return PeriodicJacobi(std::move(v));
}

OperatorField almost_mathieu_family(Scalar mu, Scalar theta) {
  OperatorField f;
  f.generator = [mu, theta](const ParamPoint& t) {
    if (!t.has_rational())
      throw std::invalid_argument("almost_mathieu_family: grid point lacks a rational tag");
    return almost_mathieu(mu, theta, Rational{t.num, t.den});
  };
  f.bound = 2 + 2 * std::abs(mu);
  return f;
}

OperatorField kohmoto_family(Scalar lam, Scalar theta) {
  OperatorField f;
  f.generator = [lam, theta](const ParamPoint& t) {
    if (!t.has_rational())
      throw std::invalid_argument("kohmoto_family: grid point lacks a rational tag");
    return kohmoto(lam, theta, Rational{t.num, t.den});
  };
  f.bound = 2 + std::abs(lam);
  return f;
}

OperatorField substitution_family(SubstitutionWord w, int level, Scalar lambda_max) {
  OperatorField f;
  f.generator = [w, level](const ParamPoint& t) {
    return substitution_field(t.value, w, level);
  };
  f.bound = 2 + std::abs(lambda_max);
  return f;
}

CounterexampleFamily counterexample_family(const CounterexampleConfig& cfg) {
  if (!(cfg.c > 0)) throw std::invalid_argument("counterexample_family: need c > 0");
  if (!(cfg.m > cfg.c)) throw std::invalid_argument("counterexample_family: need m > c");
  if (!(cfg.kappa > 1)) throw std::invalid_argument("counterexample_family: need kappa > 1");
  if (!(cfg.alpha > 0)) throw std::invalid_argument("counterexample_family: need alpha > 0");
  if (!(cfg.width_scale > 0)) throw std::invalid_argument("counterexample_family: need C > 0");
  if (cfg.gap_count < 1) throw std::invalid_argument("counterexample_family: need N >= 1");

  const int n_gaps = cfg.gap_count;
  std::vector<Scalar> w(n_gaps + 1);
  for (int n = 1; n <= n_gaps; ++n)
    w[n] = cfg.width_scale * std::exp(-(cfg.alpha / 2) * std::pow(cfg.kappa, n - 1));

  // Centers at c - 2 w_n, clamped downward so that b_n < a_{n+1} strictly.
  std::vector<Scalar> a(n_gaps + 1), b(n_gaps + 1);
  std::vector<bool> live(n_gaps + 1, false);
  Scalar floor_above = cfg.c;  // lower edge of the gap above (or c itself)
  for (int n = n_gaps; n >= 1; --n) {
    Scalar an = cfg.c - 2 * w[n] - 0.5 * w[n];
    Scalar bn = an + w[n];
    if (bn >= floor_above) {
      bn = floor_above - w[n + 1 <= n_gaps ? n + 1 : n];  // separated by the next width
      an = bn - w[n];
    }
    if (!(an < bn)) continue;  // width below double resolution near c: exactly closed
    if (!(bn < floor_above)) continue;
    a[n] = an;
    b[n] = bn;
    live[n] = true;
    floor_above = an;
  }
  for (int n = 1; n <= n_gaps; ++n) {
    if (live[n] && !(a[n] > 0))
      throw std::invalid_argument("counterexample_family: infeasible config, gap " +
                                  std::to_string(n) + " reaches below 0");
  }

  CounterexampleFamily fam;
  fam.stages.reserve(n_gaps + 1);
  fam.stages.push_back(CompactSet::interval(0, cfg.m));
  for (int n = 1; n <= n_gaps; ++n) {
    std::vector<Interval> parts = fam.stages.back().intervals();
    if (live[n]) {
      std::vector<Interval> next;
      for (const auto& iv : parts) {
        if (iv.lo <= a[n] && b[n] <= iv.hi) {
          next.push_back(Interval{iv.lo, a[n]});
          next.push_back(Interval{b[n], iv.hi});
        } else {
          next.push_back(iv);
        }
      }
      parts = std::move(next);
    }
    fam.stages.push_back(CompactSet::from_intervals(std::move(parts)));
    fam.removed.push_back(live[n] ? Gap{a[n], b[n]} : Gap{cfg.c, cfg.c});
    fam.generated.push_back(live[n]);
  }
  fam.limit = fam.stages.back();
  return fam;
}

Scalar field_bound(const OperatorField& field, const ParameterSpace& grid) {
  if (grid.points.empty()) throw std::invalid_argument("field_bound: empty grid");
  Scalar worst = 0;
  for (const auto& t : grid.points) worst = std::max(worst, op_norm(field.generator(t)));
  return worst + 1;
}

std::vector<Rational> convergents(const std::vector<long long>& cf, int depth) {
  if (depth < 1 || depth > static_cast<int>(cf.size()))
    throw std::invalid_argument("convergents: depth out of range");
  std::vector<Rational> out;
  long long p_prev = 1, q_prev = 0;  // p_{-1}/q_{-1}
  long long p_cur = cf[0], q_cur = 1;
  out.push_back(Rational::reduced(p_cur, q_cur));
  for (int k = 1; k < depth; ++k) {
    long long p_next = cf[k] * p_cur + p_prev;
    long long q_next = cf[k] * q_cur + q_prev;
    p_prev = p_cur;
    q_prev = q_cur;
    p_cur = p_next;
    q_cur = q_next;
    out.push_back(Rational::reduced(p_cur, q_cur));
  }
  return out;
}

std::vector<Rational> golden_mean_convergents(int depth) {
  std::vector<long long> cf(depth, 1);
  cf[0] = 0;
  return convergents(cf, depth);
}

std::vector<Rational> sqrt2_minus_one_convergents(int depth) {
  std::vector<long long> cf(depth, 2);
  cf[0] = 0;
  return convergents(cf, depth);
}

ParameterSpace am_closing_grid(int q_max) {
  if (q_max < 2) throw std::invalid_argument("am_closing_grid: q_max must be >= 2");
  std::vector<ParamPoint> pts;
  for (int q = 2; q <= q_max; ++q) {
    pts.push_back(rational_point(q - 1, 2 * q));
    pts.push_back(rational_point(q + 1, 2 * q));
  }
  pts.push_back(rational_point(1, 2));
  std::sort(pts.begin(), pts.end(),
            [](const ParamPoint& x, const ParamPoint& y) { return x.value < y.value; });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const ParamPoint& x, const ParamPoint& y) {
                          return x.value == y.value;
                        }),
            pts.end());
  return euclidean_space(std::move(pts));
}

}  // namespace opfield
