#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "opfield/analysis.hpp"
#include "opfield/models.hpp"
#include "opfield/operators.hpp"
#include "test_util.hpp"

using namespace opfield;
using testutil::Rng;

namespace {

OperatorField constant_field(const SymTridiag& t, Scalar bound) {
  OperatorField f;
  f.generator = [t](const ParamPoint&) { return Operator{t}; };
  f.bound = bound;
  return f;
}

ParameterSpace real_grid(std::initializer_list<Scalar> values) {
  std::vector<ParamPoint> pts;
  for (Scalar v : values) pts.push_back(real_point(v));
  return euclidean_space(std::move(pts));
}

// Moving-gap family [0,1] \ (0.4 + 0.1 t, 0.6 + 0.1 t).
CompactSet moving_gap_set(Scalar t) {
  return CompactSet::from_intervals({{0, 0.4 + 0.1 * t}, {0.6 + 0.1 * t, 1}});
}

SpectrumTrace counterexample_trace(const CounterexampleConfig& cfg) {
  auto fam = counterexample_family(cfg);
  std::vector<ParamPoint> pts;
  std::vector<CompactSet> sets;
  for (std::size_t n = 0; n < fam.stages.size(); ++n) {
    pts.push_back(real_point(static_cast<Scalar>(n)));
    sets.push_back(fam.stages[n]);
  }
  pts.push_back(infinity_point());
  sets.push_back(fam.limit);
  return trace_from_sets(ultrametric_space(std::move(pts), cfg.kappa), std::move(sets), cfg.m);
}

}  // namespace

TEST_CASE("sweep of a constant field yields identical spectra") {
  Rng rng(101);
  auto t = testutil::random_tridiag(rng, 6);
  auto field = constant_field(t, 10);
  auto trace = sweep(field, real_grid({0, 0.1, 0.2, 0.3}), 1e-8);
  REQUIRE(trace.size() == 4);
  for (std::size_t i = 1; i < trace.size(); ++i)
    CHECK(trace.spectra[i].equals(trace.spectra[0], 0));
}

TEST_CASE("sweep is deterministic and bounded for the AM family") {
  auto field = almost_mathieu_family(1.0, 0.0);
  std::vector<ParamPoint> pts;
  for (int q = 2; q <= 20; ++q) pts.push_back(rational_point(1, q));
  auto grid = euclidean_space(std::move(pts));
  auto a = sweep(field, grid, 1e-9);
  auto b = sweep(field, grid, 1e-9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a.spectra[i].equals(b.spectra[i], 0));
    CHECK(a.spectra[i].min() >= -4 - 1e-9);
    CHECK(a.spectra[i].max() <= 4 + 1e-9);
  }
}

TEST_CASE("sweep failure names the offending parameter") {
  OperatorField f;
  f.generator = [](const ParamPoint& t) -> Operator {
    if (t.value > 0.5) throw std::runtime_error("boom");
    return Operator{SymTridiag(Vector::Zero(2), Vector::Ones(1))};
  };
  f.bound = 3;
  CHECK_THROWS_WITH_AS(sweep(f, real_grid({0.1, 0.7}), 1e-8),
                       "sweep: failure at t = 0.7: boom", std::runtime_error);
  CHECK_THROWS_AS(sweep(f, euclidean_space({}), 1e-8), std::invalid_argument);
}

TEST_CASE("fit_power_law recovers exact power laws to 1e-9") {
  std::vector<Scalar> x, y;
  const Scalar c = 0.37, a = 0.52;
  for (int i = 1; i <= 12; ++i) {
    Scalar xv = std::pow(2.0, -i);
    x.push_back(xv);
    y.push_back(c * std::pow(xv, a));
  }
  auto e = fit_power_law(x, y);
  CHECK_FALSE(e.degenerate);
  CHECK(std::abs(e.alpha - a) < 1e-9);
  CHECK(std::abs(e.constant - c) < 1e-9);
  CHECK(e.r_squared == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.n_points == 12);
  CHECK(e.scale_min == doctest::Approx(std::pow(2.0, -12)));
}

TEST_CASE("fit_power_law degenerate and underdetermined inputs") {
  auto e = fit_power_law({0.1, 0.2, 0.3, 0.4}, {0, 1e-13, 0, 1e-14});
  CHECK(e.degenerate);
  CHECK(std::isinf(e.alpha));
  CHECK(e.constant == 0);
  CHECK_THROWS_AS(fit_power_law({0.1, 0.2, 0.3}, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("p2_modulus of a constant field is the degenerate marker") {
  Rng rng(103);
  auto t = testutil::random_tridiag(rng, 5);
  auto field = constant_field(t, 10);
  auto grid = real_grid({0, 0.1, 0.2, 0.3, 0.4});
  auto sample = sample_poly2(6, 1);
  auto e = p2_modulus(field, grid, sample);
  CHECK(e.degenerate);
  CHECK(e.constant == 0);
}

TEST_CASE("p2_modulus of the scalar field A_t = (t) is Lipschitz") {
  OperatorField f;
  f.generator = [](const ParamPoint& t) {
    return Operator{SymTridiag((Vector(1) << t.value).finished(), Vector(0))};
  };
  f.bound = 2.5;
  std::vector<ParamPoint> pts;
  for (int j = 0; j <= 7; ++j) pts.push_back(real_point(1.0 + j / 32.0));
  auto grid = euclidean_space(pts);
  auto sample = sample_poly2(4 * f.bound * f.bound + 2, f.bound);
  auto e = p2_modulus(f, grid, sample);
  CHECK_FALSE(e.degenerate);
  CHECK(std::abs(e.alpha - 1.0) < 0.05);

  // Exact sampled Lipschitz constant of the Phi family over this grid.
  Scalar exact = 0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      Scalar worst = 0;
      for (const auto& p : sample.polys)
        worst = std::max(worst, std::abs(std::abs(p(pts[i].value)) - std::abs(p(pts[j].value))));
      exact = std::max(exact, worst / std::abs(pts[i].value - pts[j].value));
    }
  CHECK(e.constant == doctest::Approx(exact).epsilon(0.10));
}

TEST_CASE("p2_modulus via sets equals p2_modulus via diagonal realizations") {
  Rng rng(107);
  std::uniform_real_distribution<Scalar> unif(-1.5, 1.5);
  std::vector<CompactSet> sets;
  std::vector<ParamPoint> pts;
  std::vector<Vector> diags;
  for (int i = 0; i < 5; ++i) {
    Vector d(4);
    for (int k = 0; k < 4; ++k) d(k) = unif(rng);
    std::sort(d.begin(), d.end());
    std::vector<Interval> parts;
    for (int k = 0; k < 4; ++k) parts.push_back(Interval{d(k), d(k)});
    sets.push_back(CompactSet::from_intervals(std::move(parts)));
    diags.push_back(d);
    pts.push_back(real_point(0.1 * i));
  }
  auto grid = euclidean_space(pts);
  auto sample = sample_poly2(11, 1.5);

  auto trace = trace_from_sets(grid, sets, 1.5);
  auto via_sets = p2_modulus(trace, sample);

  OperatorField f;
  f.generator = [&](const ParamPoint& t) {
    int idx = static_cast<int>(std::lround(t.value / 0.1));
    return Operator{SymTridiag(diags[idx], Vector::Zero(3))};
  };
  f.bound = 1.5;
  auto via_ops = p2_modulus(f, grid, sample);

  CHECK(via_sets.alpha == doctest::Approx(via_ops.alpha).epsilon(1e-9));
  CHECK(via_sets.constant == doctest::Approx(via_ops.constant).epsilon(1e-9));
}

TEST_CASE("spectrum_modulus markers and exact recovery") {
  auto same = CompactSet::interval(0, 1);
  auto trace = trace_from_sets(real_grid({0, 0.1, 0.2, 0.3}),
                               {same, same, same, same}, 1);
  CHECK(spectrum_modulus(trace).degenerate);

  // F_t = [0, 1 + 2t] moves every pairwise Hausdorff distance exactly
  // linearly: alpha = 1, C = 2 recovered to regression precision.
  std::vector<ParamPoint> pts;
  std::vector<CompactSet> sets;
  for (int i = 0; i <= 8; ++i) {
    Scalar t = std::pow(2.0, -i);
    pts.push_back(real_point(t));
    sets.push_back(CompactSet::interval(0, 1 + 2 * t));
  }
  auto tr = trace_from_sets(euclidean_space(pts), sets, 4);
  auto e = spectrum_modulus(tr);
  CHECK(std::abs(e.alpha - 1.0) < 1e-9);
  CHECK(std::abs(e.constant - 2.0) < 1e-9);
  CHECK(e.r_squared > 1 - 1e-12);
}

TEST_CASE("spectrum_modulus on the counterexample trace measures alpha/2") {
  CounterexampleConfig cfg;  // kappa=2, alpha=1, C=1, N=12
  auto tr = counterexample_trace(cfg);
  auto e = spectrum_modulus(tr);
  CHECK_FALSE(e.degenerate);
  CHECK(std::abs(e.alpha - cfg.alpha / 2) < 0.05 * (cfg.alpha / 2));
  CHECK(e.r_squared > 0.999);
}

TEST_CASE("track_gaps on a static two-band trace") {
  auto f = CompactSet::from_intervals({{0, 1}, {2, 3}});
  auto tr = trace_from_sets(real_grid({0, 0.1, 0.2}), {f, f, f}, 3);
  auto tracks = track_gaps(tr, TrackOptions{});
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].status == TrackStatus::Open);
  CHECK(tracks[0].samples.size() == 3);
}

TEST_CASE("track_gaps on the counterexample trace: one constant-width track per gap") {
  CounterexampleConfig cfg;
  cfg.gap_count = 6;
  auto tr = counterexample_trace(cfg);
  TrackOptions opt;
  opt.match_radius = 0.05;
  opt.width_tol = 1e-15;
  auto tracks = track_gaps(tr, opt);
  REQUIRE(tracks.size() == 6);
  // Widths strictly decreasing across birth order.
  std::sort(tracks.begin(), tracks.end(), [](const GapTrack& a, const GapTrack& b) {
    return a.birth_entry() < b.birth_entry();
  });
  for (std::size_t i = 0; i + 1 < tracks.size(); ++i)
    CHECK(tracks[i + 1].first().width() < tracks[i].first().width());
  // Each track keeps its gap unchanged to the end.
  for (const auto& t : tracks) {
    CHECK(t.samples.back().entry == tr.size() - 1);
    CHECK(t.first().a == t.last().a);
    CHECK(t.first().b == t.last().b);
  }
}

TEST_CASE("track_gaps refinement stability") {
  std::vector<ParamPoint> coarse_pts, fine_pts;
  std::vector<CompactSet> coarse_sets, fine_sets;
  for (int i = 0; i <= 8; ++i) {
    Scalar t = i / 8.0;
    fine_pts.push_back(real_point(t));
    fine_sets.push_back(moving_gap_set(t));
    if (i % 2 == 0) {
      coarse_pts.push_back(real_point(t));
      coarse_sets.push_back(moving_gap_set(t));
    }
  }
  TrackOptions opt;
  opt.match_radius = 0.2;
  auto coarse = track_gaps(trace_from_sets(euclidean_space(coarse_pts), coarse_sets, 2), opt);
  auto fine = track_gaps(trace_from_sets(euclidean_space(fine_pts), fine_sets, 2), opt);
  REQUIRE(coarse.size() == 1);
  REQUIRE(fine.size() == 1);
  // Every coarse sample appears verbatim among the fine samples.
  for (const auto& cs : coarse[0].samples) {
    bool found = false;
    for (const auto& fs : fine[0].samples)
      if (fs.gap.a == cs.gap.a && fs.gap.b == cs.gap.b) found = true;
    CHECK(found);
  }
}

TEST_CASE("AM sweep at theta=1/4: central track closes at (1/2, 0) with isolated tip") {
  auto field = almost_mathieu_family(1.0, 0.25);
  auto grid = am_closing_grid(16);
  auto trace = sweep(field, grid, 1e-9);
  TrackOptions opt;
  opt.match_radius = 0.3;
  opt.width_tol = 1e-4;
  auto tracks = track_gaps(trace, opt);

  const GapTrack* central = nullptr;
  for (const auto& t : tracks) {
    if (t.status != TrackStatus::Closed) continue;
    if (std::abs(grid.points[t.closed_entry].value - 0.5) > 1e-12) continue;
    if (std::abs(t.closed_center) > 0.1) continue;
    if (!central || t.samples.size() > central->samples.size()) central = &t;
  }
  REQUIRE(central != nullptr);
  CHECK(std::abs(central->closed_center) < 0.05);

  auto tips = detect_gap_tips(tracks, trace, 0.05, opt);
  bool found = false;
  for (const auto& tip : tips)
    if (std::abs(tip.c) < 0.05 && std::abs(grid.points[tip.entry].value - 0.5) < 1e-12 &&
        tip.isolated)
      found = true;
  CHECK(found);
}

TEST_CASE("detect_gap_tips: no closing tracks means no tips") {
  auto f = CompactSet::from_intervals({{0, 1}, {2, 3}});
  auto tr = trace_from_sets(real_grid({0, 0.1, 0.2}), {f, f, f}, 3);
  TrackOptions opt;
  auto tracks = track_gaps(tr, opt);
  CHECK(detect_gap_tips(tracks, tr, 0.01, opt).empty());
}

TEST_CASE("detect_gap_tips: counterexample accumulation tip at c, not isolated") {
  CounterexampleConfig cfg;  // c=2, N=12
  auto tr = counterexample_trace(cfg);
  TrackOptions opt;
  opt.match_radius = 0.05;
  opt.width_tol = 1e-6;
  auto tracks = track_gaps(tr, opt);
  auto tips = detect_gap_tips(tracks, tr, 0.01, opt);
  REQUIRE_FALSE(tips.empty());
  bool found = false;
  for (const auto& tip : tips)
    if (std::abs(tip.c - cfg.c) < 0.01 && !tip.isolated && tip.from_accumulation &&
        tip.entry == tr.size() - 1)
      found = true;
  CHECK(found);
}

TEST_CASE("check_edge_continuity passes on a constant trace") {
  auto f = CompactSet::from_intervals({{0, 1}, {2, 3}});
  auto tr = trace_from_sets(real_grid({0, 0.1, 0.2, 0.3}), {f, f, f, f}, 3);
  auto rep = check_edge_continuity(tr, 0.01, TrackOptions{});
  CHECK(rep.passed());
}

TEST_CASE("check_edge_continuity flags an injected fault") {
  const Scalar eps = 0.01;
  std::vector<CompactSet> sets;
  std::vector<ParamPoint> pts;
  for (int i = 0; i < 5; ++i) {
    Scalar shift = (i == 2) ? 10 * eps : 0.0;  // one spectrum shifted by 10 eps
    sets.push_back(CompactSet::from_intervals({{0 + shift, 1 + shift}, {2 + shift, 3 + shift}}));
    pts.push_back(real_point(0.1 * i));
  }
  auto tr = trace_from_sets(euclidean_space(pts), sets, 4);
  auto rep = check_edge_continuity(tr, eps, TrackOptions{});
  CHECK_FALSE(rep.g2.empty());
  bool at_fault = false;
  for (const auto& v : rep.g2)
    if (v.entry == 2) at_fault = true;
  CHECK(at_fault);
}

TEST_CASE("check_edge_continuity violations shrink under grid refinement") {
  auto field = almost_mathieu_family(1.0, 0.0);
  auto make_grid = [](int denom) {
    std::vector<ParamPoint> pts;
    for (int j = -3; j <= 3; ++j) pts.push_back(rational_point(denom / 5 + j, denom));
    return euclidean_space(std::move(pts));
  };
  const Scalar eps = 0.05;
  auto coarse = check_edge_continuity(sweep(field, make_grid(40), 1e-9), eps, TrackOptions{});
  auto fine = check_edge_continuity(sweep(field, make_grid(160), 1e-9), eps, TrackOptions{});
  auto count = [](const EdgeContinuityReport& r) {
    return r.g1.size() + r.g2.size() + r.g3.size();
  };
  CHECK(count(fine) <= count(coarse));
}

TEST_CASE("check_edge_continuity flags a track lost into the limit") {
  std::vector<CompactSet> sets = {
      CompactSet::from_intervals({{0, 1}, {2, 3}}),
      CompactSet::from_intervals({{0, 1}, {2, 3}}),
      CompactSet::from_intervals({{0, 1}, {2, 3}}),
      CompactSet::interval(0, 1),  // the gap region simply vanishes
  };
  auto tr = trace_from_sets(real_grid({0, 0.1, 0.2, 0.3}), sets, 3);
  auto rep = check_edge_continuity(tr, 0.01, TrackOptions{});
  CHECK_FALSE(rep.g3.empty());
}

TEST_CASE("verify_bounds on a constant trace holds with no violations") {
  auto f = CompactSet::from_intervals({{-1, 0.5}, {1, 2}});
  auto tr = trace_from_sets(real_grid({0, 0.1, 0.2, 0.3}), {f, f, f, f}, 2);
  TrackOptions opt;
  auto tracks = track_gaps(tr, opt);
  BoundConstants k{1.0, 1.0, 1.0};
  auto rep = verify_bounds(tr, tracks, k);
  CHECK(rep.passed());
  for (const auto& c : rep.checks) CHECK(c.violations == 0);
}

TEST_CASE("verify_bounds with sup-based constants never fails check (i)") {
  // The pairwise probe inequality d_H^2 <= sup |Phi diff| makes the sup-based
  // constant dominate every pair by construction.
  auto field = almost_mathieu_family(1.0, 0.25);
  auto grid = am_closing_grid(12);
  auto trace = sweep(field, grid, 1e-9);
  auto sample = sample_poly2(4 * trace.bound * trace.bound + 2, trace.bound);
  auto est = p2_modulus(trace, sample);
  REQUIRE_FALSE(est.degenerate);
  Scalar c_main = p2_sup_constant(trace, sample, est.alpha);
  auto edge_sample = sample_poly2(1 + trace.bound, trace.bound);
  Scalar c_edge = p2_sup_constant(trace, edge_sample, est.alpha);
  TrackOptions opt;
  opt.match_radius = 0.3;
  opt.width_tol = 1e-4;
  auto tracks = track_gaps(trace, opt);
  auto rep = verify_bounds(trace, tracks, BoundConstants{c_main, c_edge, est.alpha});
  REQUIRE(rep.checks.size() == 4);
  CHECK(rep.checks[0].violations == 0);
  CHECK(rep.checks[1].violations == 0);
}

TEST_CASE("verify_bounds reports violations when the constant is forced tiny") {
  std::vector<ParamPoint> pts;
  std::vector<CompactSet> sets;
  for (int i = 0; i <= 4; ++i) {
    pts.push_back(real_point(0.1 * i));
    sets.push_back(moving_gap_set(0.1 * i));
  }
  auto tr = trace_from_sets(euclidean_space(pts), sets, 2);
  auto tracks = track_gaps(tr, TrackOptions{});
  auto rep = verify_bounds(tr, tracks, BoundConstants{1e-12, 1e-12, 1.0});
  CHECK_FALSE(rep.passed());
}

TEST_CASE("spectral exponent is at least half the p2 exponent") {
  auto check_trace = [](const SpectrumTrace& trace) {
    auto sample = sample_poly2(4 * trace.bound * trace.bound + 2, trace.bound);
    auto p2 = p2_modulus(trace, sample);
    auto spectral = spectrum_modulus(trace);
    REQUIRE_FALSE(p2.degenerate);
    REQUIRE_FALSE(spectral.degenerate);
    CHECK(spectral.alpha >= p2.alpha / 2 - 0.15);
  };
  {
    auto field = almost_mathieu_family(1.0, 0.25);
    auto grid = am_closing_grid(16);
    auto trace = sweep(field, grid, 1e-9);
    trace.bound = field_bound(field, grid);
    check_trace(trace);
  }
  {
    auto field = kohmoto_family(1.0, 0.0);
    std::vector<ParamPoint> pts;
    for (int k = 3; k <= 16; ++k) pts.push_back(rational_point(k, 2 * k + 1));
    auto grid = euclidean_space(std::move(pts));
    auto trace = sweep(field, grid, 1e-9);
    trace.bound = field_bound(field, grid);
    check_trace(trace);
  }
}

TEST_CASE("counterexample trace eventually enters any hit-and-miss neighborhood of the limit") {
  CounterexampleConfig cfg;
  cfg.gap_count = 8;
  auto tr = counterexample_trace(cfg);
  const CompactSet& limit = tr.spectra.back();
  // Miss set: closed chunks strictly inside the first few limit gaps; hit
  // sets: small open intervals around limit points.
  auto gs = gaps(limit);
  std::vector<Interval> miss_parts;
  for (std::size_t i = 0; i < std::min<std::size_t>(3, gs.size()); ++i) {
    Scalar w = gs[i].width();
    if (w < 1e-6) continue;
    miss_parts.push_back(Interval{gs[i].a + w / 4, gs[i].b - w / 4});
  }
  HitAndMissNbhd nbhd{CompactSet::from_intervals(miss_parts),
                      {Interval{cfg.c - 1e-3, cfg.c + 1e-3},
                       Interval{-1e-3, 1e-3},
                       Interval{cfg.m - 1e-3, cfg.m + 1e-3}}};
  REQUIRE(in_nbhd(limit, nbhd));
  bool entered = false;
  bool stays = true;
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    if (in_nbhd(tr.spectra[i], nbhd))
      entered = true;
    else if (entered)
      stays = false;
  }
  CHECK(entered);
  CHECK(stays);
}
