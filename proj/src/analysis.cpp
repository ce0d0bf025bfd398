#include "opfield/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opfield {

namespace {

constexpr Scalar kNoiseFloor = 1e-12;
constexpr Scalar kSlack = 1.0 + 1e-6;
constexpr Scalar kInf = std::numeric_limits<Scalar>::infinity();

std::string param_label(const ParamPoint& p) {
  if (p.at_infinity) return "inf";
  std::ostringstream os;
  if (p.has_rational())
    os << p.num << "/" << p.den;
  else
    os << p.value;
  return os.str();
}

}  // namespace

SpectrumTrace sweep(const OperatorField& field, const ParameterSpace& grid, Scalar merge_tol) {
  if (grid.points.empty()) throw std::invalid_argument("sweep: empty grid");
  SpectrumTrace trace;
  trace.grid = grid;
  trace.bound = field.bound;
  trace.spectra.reserve(grid.size());
  for (const auto& t : grid.points) {
    try {
      trace.spectra.push_back(spectrum(field.generator(t), merge_tol));
    } catch (const std::exception& e) {
      throw std::runtime_error("sweep: failure at t = " + param_label(t) + ": " + e.what());
    }
  }
  return trace;
}

SpectrumTrace trace_from_sets(ParameterSpace grid, std::vector<CompactSet> sets, Scalar bound) {
  if (grid.points.size() != sets.size())
    throw std::invalid_argument("trace_from_sets: grid and set count differ");
  SpectrumTrace trace;
  trace.grid = std::move(grid);
  trace.spectra = std::move(sets);
  trace.bound = bound;
  return trace;
}

HolderEstimate fit_power_law(const std::vector<Scalar>& x, const std::vector<Scalar>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_power_law: size mismatch");
  std::vector<Scalar> lx, ly;
  Scalar dmin = kInf, dmax = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > kNoiseFloor)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
    dmin = std::min(dmin, x[i]);
    dmax = std::max(dmax, x[i]);
  }
  if (lx.empty()) {
    HolderEstimate e;
    e.alpha = kInf;
    e.constant = 0;
    e.r_squared = 1;
    e.degenerate = true;
    return e;
  }
  const int n = static_cast<int>(lx.size());
  if (n < 4) throw std::invalid_argument("fit_power_law: need at least 4 usable pairs, got " +
                                         std::to_string(n));
  Scalar sx = 0, sy = 0;
  for (int i = 0; i < n; ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  const Scalar mx = sx / n, my = sy / n;
  Scalar sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("fit_power_law: degenerate scale range");
  HolderEstimate e;
  e.alpha = sxy / sxx;
  e.constant = std::exp(my - e.alpha * mx);
  Scalar ss_res = 0;
  for (int i = 0; i < n; ++i) {
    Scalar r = ly[i] - (my + e.alpha * (lx[i] - mx));
    ss_res += r * r;
  }
  e.r_squared = (syy == 0) ? 1.0 : 1.0 - ss_res / syy;
  e.n_points = n;
  e.scale_min = dmin;
  e.scale_max = dmax;
  return e;
}

PolySample sample_poly2(Scalar M, Scalar m) {
  if (!(M > 0)) throw std::invalid_argument("sample_poly2: M must be > 0");
  PolySample s;
  s.poly_bound = M;
  s.probe_m = m;
  // 5^3 coefficient grid, projected into the 1-norm ball.
  const Scalar grid[5] = {-M / 2, -M / 4, 0, M / 4, M / 2};
  for (Scalar a0 : grid)
    for (Scalar a1 : grid)
      for (Scalar a2 : grid) {
        Poly2 p{a0, a1, a2};
        Scalar norm = p.one_norm();
        if (norm > M) {
          Scalar scale = M / norm;
          p = Poly2{a0 * scale, a1 * scale, a2 * scale};
        }
        s.polys.push_back(p);
      }
  // Edge witnesses m - z and m + z (exact for inf/sup tracking).
  if (1 + std::abs(m) <= M) {
    s.polys.push_back(Poly2{m, -1, 0});
    s.polys.push_back(Poly2{m, 1, 0});
    s.polys.push_back(Poly2{0, 1, 0});
  }
  // Probe family 4m^2 - (z - lambda)^2 over a lambda grid, where it fits.
  const int n_probe = 33;
  for (int k = 0; k < n_probe; ++k) {
    Scalar lam = -m + 2 * m * static_cast<Scalar>(k) / (n_probe - 1);
    Poly2 p = probe_poly(lam, 2 * m);
    if (p.one_norm() <= M) s.polys.push_back(p);
  }
  return s;
}

namespace {

// phi[k][i] = sup over spectra[i] of |p_k|.
std::vector<std::vector<Scalar>> phi_matrix(const SpectrumTrace& trace, const PolySample& sample) {
  std::vector<std::vector<Scalar>> phi(sample.polys.size(),
                                       std::vector<Scalar>(trace.size(), 0));
  for (std::size_t k = 0; k < sample.polys.size(); ++k)
    for (std::size_t i = 0; i < trace.size(); ++i)
      phi[k][i] = poly_sup_abs(trace.spectra[i], sample.polys[k]);
  return phi;
}

}  // namespace

HolderEstimate p2_modulus(const SpectrumTrace& trace, const PolySample& sample) {
  if (trace.size() < 4) throw std::invalid_argument("p2_modulus: need at least 4 grid points");
  if (sample.polys.empty()) throw std::invalid_argument("p2_modulus: empty polynomial sample");
  auto phi = phi_matrix(trace, sample);
  std::vector<Scalar> d, v;
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j) {
      Scalar worst = 0;
      for (std::size_t k = 0; k < phi.size(); ++k)
        worst = std::max(worst, std::abs(phi[k][i] - phi[k][j]));
      d.push_back(trace.grid.distance(i, j));
      v.push_back(worst);
    }
  return fit_power_law(d, v);
}

HolderEstimate p2_modulus(const OperatorField& field, const ParameterSpace& grid,
                          const PolySample& sample) {
  SpectrumTrace trace;
  trace.grid = grid;
  trace.bound = field.bound;
  trace.spectra.reserve(grid.size());
  for (const auto& t : grid.points) trace.spectra.push_back(exact_spectrum(field.generator(t)));
  return p2_modulus(trace, sample);
}

Scalar p2_sup_constant(const SpectrumTrace& trace, const PolySample& sample, Scalar alpha,
                       const std::vector<Scalar>& extra_centers) {
  if (trace.size() < 2) throw std::invalid_argument("p2_sup_constant: need at least 2 points");
  auto phi = phi_matrix(trace, sample);
  Scalar best = 0;
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j) {
      Scalar dist = trace.grid.distance(i, j);
      if (!(dist > 0)) continue;
      Scalar worst = 0;
      for (std::size_t k = 0; k < phi.size(); ++k)
        worst = std::max(worst, std::abs(phi[k][i] - phi[k][j]));
      // Probe polynomial R^2 - (z - lam)^2 with R >= |z - lam| on both sets:
      // its sup difference is |dist_i^2 - dist_j^2| exactly; evaluating that
      // form directly keeps tiny differences from cancelling against R^2.
      auto probe_at = [&](Scalar lam) {
        Scalar da = dist_point(lam, trace.spectra[i]);
        Scalar db = dist_point(lam, trace.spectra[j]);
        worst = std::max(worst, std::abs(da * da - db * db));
      };
      // The pair's own Hausdorff witnesses make the sup dominate d_H^2.
      probe_at(hausdorff_witness(trace.spectra[i], trace.spectra[j]));
      probe_at(hausdorff_witness(trace.spectra[j], trace.spectra[i]));
      for (Scalar lam : extra_centers) probe_at(lam);
      best = std::max(best, worst / std::pow(dist, alpha));
    }
  return best;
}

HolderEstimate spectrum_modulus(const SpectrumTrace& trace) {
  if (trace.size() < 4) throw std::invalid_argument("spectrum_modulus: need at least 4 entries");
  std::vector<Scalar> d, v;
  for (std::size_t i = 0; i < trace.size(); ++i)
    for (std::size_t j = i + 1; j < trace.size(); ++j) {
      d.push_back(trace.grid.distance(i, j));
      v.push_back(hausdorff(trace.spectra[i], trace.spectra[j]));
    }
  return fit_power_law(d, v);
}

Scalar default_match_radius(const SpectrumTrace& trace) {
  for (const auto& sp : trace.spectra) {
    if (sp.empty()) continue;
    auto gs = gaps(sp);
    if (gs.size() >= 2) {
      Scalar sep = kInf;
      for (std::size_t k = 0; k + 1 < gs.size(); ++k)
        sep = std::min(sep, gs[k + 1].center() - gs[k].center());
      return sep / 2;
    }
    if (!gs.empty()) return (sp.max() - sp.min()) / 8;
  }
  return 0.25;
}

namespace {

bool widths_compatible(Scalar w1, Scalar w2, Scalar radius) {
  return std::max(w1, w2) <= 4 * std::min(w1, w2) + 2 * radius;
}

}  // namespace

std::vector<GapTrack> track_gaps(const SpectrumTrace& trace, const TrackOptions& opt) {
  if (trace.size() == 0) throw std::invalid_argument("track_gaps: empty trace");
  const Scalar radius = opt.match_radius > 0 ? opt.match_radius : default_match_radius(trace);

  std::vector<GapTrack> tracks;
  std::vector<std::size_t> active;  // indices into tracks, alive at the previous entry

  auto spawn = [&](std::size_t entry, const Gap& g, std::vector<std::size_t>& next_active) {
    GapTrack t;
    t.samples.push_back(GapSample{entry, g});
    tracks.push_back(std::move(t));
    next_active.push_back(tracks.size() - 1);
  };

  for (std::size_t entry = 0; entry < trace.size(); ++entry) {
    std::vector<Gap> gs = trace.spectra[entry].empty() ? std::vector<Gap>{}
                                                       : gaps(trace.spectra[entry]);
    std::vector<std::size_t> next_active;

    if (entry == 0) {
      for (const auto& g : gs) spawn(entry, g, next_active);
      active = std::move(next_active);
      continue;
    }

    struct Candidate {
      Scalar dist;
      Scalar gap_center;
      std::size_t track;
      std::size_t gap;
    };
    std::vector<Candidate> cands;
    std::vector<int> per_track_count(tracks.size(), 0);
    for (std::size_t a : active) {
      const Gap& lastg = tracks[a].last();
      for (std::size_t gi = 0; gi < gs.size(); ++gi) {
        Scalar dist = std::abs(gs[gi].center() - lastg.center());
        if (dist < radius && widths_compatible(lastg.width(), gs[gi].width(), radius)) {
          cands.push_back(Candidate{dist, gs[gi].center(), a, gi});
          ++per_track_count[a];
        }
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Candidate& x, const Candidate& y) {
      if (x.dist != y.dist) return x.dist < y.dist;
      if (x.gap_center != y.gap_center) return x.gap_center < y.gap_center;
      return x.track < y.track;
    });

    std::vector<bool> track_used(tracks.size(), false), gap_used(gs.size(), false);
    for (const auto& c : cands) {
      if (track_used[c.track] || gap_used[c.gap]) continue;
      track_used[c.track] = true;
      gap_used[c.gap] = true;
      if (per_track_count[c.track] > 1)
        tracks[c.track].notes.push_back("entry " + std::to_string(entry) +
                                        ": ambiguous match resolved by nearest center");
      Scalar prev_width = tracks[c.track].last().width();
      tracks[c.track].samples.push_back(GapSample{entry, gs[c.gap]});
      // Closing means the width falls through the tolerance; gaps that are
      // born below it are tracked as ordinary (unresolvably thin) gaps.
      if (gs[c.gap].width() < opt.width_tol && prev_width >= opt.width_tol) {
        tracks[c.track].status = TrackStatus::Closed;
        tracks[c.track].closed_entry = entry;
        tracks[c.track].closed_center = gs[c.gap].center();
      } else {
        next_active.push_back(c.track);
      }
    }

    // Unmatched active tracks: a center swallowed by the new spectrum means
    // the gap closed somewhere before this entry. The tip is estimated by
    // extrapolating each edge with the generic closing law edge ~ c + K d^(1/2)
    // toward the closing parameter.
    for (std::size_t a : active) {
      if (track_used[a]) continue;
      GapTrack& tr = tracks[a];
      Scalar center = tr.last().center();
      if (!trace.spectra[entry].contains(center)) continue;  // gap lost, track ends
      Scalar tip = center;
      if (tr.samples.size() >= 2) {
        const auto& s1 = tr.samples[tr.samples.size() - 2];
        const auto& s2 = tr.samples.back();
        Scalar d1 = trace.grid.distance(s1.entry, entry);
        Scalar d2 = trace.grid.distance(s2.entry, entry);
        if (d1 > d2 && d2 > 0) {
          Scalar r1 = std::sqrt(d1), r2 = std::sqrt(d2);
          Scalar lo = std::min(s1.gap.a, s2.gap.a), hi = std::max(s1.gap.b, s2.gap.b);
          // Each edge extrapolated to the closing parameter; the slower edge
          // is the better tip witness, so edges are weighted by inverse speed.
          Scalar ca = 0, cb = 0, ka = 0, kb = 0;
          {
            ka = (s1.gap.a - s2.gap.a) / (r1 - r2);
            kb = (s1.gap.b - s2.gap.b) / (r1 - r2);
            ca = std::clamp(s2.gap.a - ka * r2, lo, hi);
            cb = std::clamp(s2.gap.b - kb * r2, lo, hi);
          }
          Scalar span = hi - lo;
          Scalar wa = 1.0 / (std::abs(ka) + 1e-9 * (1 + span));
          Scalar wb = 1.0 / (std::abs(kb) + 1e-9 * (1 + span));
          tip = (wa * ca + wb * cb) / (wa + wb);
        }
      }
      tr.status = TrackStatus::Closed;
      tr.closed_entry = entry;
      tr.closed_center = tip;
    }

    for (std::size_t gi = 0; gi < gs.size(); ++gi)
      if (!gap_used[gi]) spawn(entry, gs[gi], next_active);

    active = std::move(next_active);
  }

  for (auto& t : tracks) {
    if (t.status == TrackStatus::Closed) continue;
    const auto& s = t.samples;
    if (s.size() >= 3) {
      bool shrink = s.back().gap.width() <= 0.5 * s.front().gap.width();
      bool tail_mono = true;
      for (std::size_t k = s.size() - 3; k + 1 < s.size(); ++k)
        if (s[k + 1].gap.width() > s[k].gap.width()) tail_mono = false;
      if (shrink && tail_mono) t.status = TrackStatus::Closing;
    }
  }
  return tracks;
}

namespace {

bool contains_interval(const CompactSet& f, Scalar lo, Scalar hi) {
  for (const auto& iv : f.intervals())
    if (iv.lo <= lo && hi <= iv.hi) return true;
  return false;
}

}  // namespace

std::vector<GapTip> detect_gap_tips(const std::vector<GapTrack>& tracks,
                                    const SpectrumTrace& trace, Scalar isolation_delta,
                                    const TrackOptions& opt) {
  std::vector<GapTip> tips;
  auto isolated_at = [&](Scalar c, std::size_t entry) {
    return contains_interval(trace.spectra[entry], c - isolation_delta, c + isolation_delta);
  };

  for (const auto& t : tracks) {
    if (t.status != TrackStatus::Closed) continue;
    GapTip tip;
    tip.c = t.closed_center;
    tip.entry = t.closed_entry;
    tip.isolated = isolated_at(tip.c, tip.entry);
    tips.push_back(tip);
  }

  // Accumulation tip: newborn gaps with strictly decreasing widths ending
  // below tolerance converge onto a spectral value of the final entry.
  struct Birth {
    std::size_t entry;
    Scalar center;
    Scalar width;
  };
  std::vector<Birth> births;
  for (const auto& t : tracks)
    if (t.birth_entry() > 0)
      births.push_back(Birth{t.birth_entry(), t.first().center(), t.first().width()});
  std::sort(births.begin(), births.end(), [](const Birth& a, const Birth& b) {
    if (a.entry != b.entry) return a.entry < b.entry;
    return a.center < b.center;
  });
  std::size_t tail = births.size();
  while (tail >= 1 && (tail == births.size() || births[tail - 1].width > births[tail].width))
    --tail;
  // births[tail..] is the maximal strictly-decreasing-width suffix
  std::size_t run = births.size() - tail;
  if (run >= 3 && births.back().width < opt.width_tol) {
    GapTip tip;
    tip.c = births.back().center;
    tip.entry = trace.size() - 1;
    tip.isolated = isolated_at(tip.c, tip.entry);
    tip.from_accumulation = true;
    bool dup = false;
    for (const auto& t : tips)
      if (t.entry == tip.entry && std::abs(t.c - tip.c) < 1e-9) dup = true;
    if (!dup) tips.push_back(tip);
  }
  return tips;
}

EdgeContinuityReport check_edge_continuity(const SpectrumTrace& trace, Scalar eps,
                                           const TrackOptions& opt) {
  if (!(eps > 0)) throw std::invalid_argument("check_edge_continuity: eps must be > 0");
  EdgeContinuityReport rep;
  const std::size_t n = trace.size();
  if (n < 2) return rep;

  // G1: jumps of inf/sup between adjacent grid points.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    Scalar dmin = std::abs(trace.spectra[i].min() - trace.spectra[i + 1].min());
    Scalar dmax = std::abs(trace.spectra[i].max() - trace.spectra[i + 1].max());
    if (dmin > eps) rep.g1.push_back(EdgeViolation{i, "inf jump to next entry", dmin});
    if (dmax > eps) rep.g1.push_back(EdgeViolation{i, "sup jump to next entry", dmax});
  }

  // G2: every sufficiently wide gap must persist into both neighbors.
  std::vector<std::vector<Gap>> all_gaps(n);
  for (std::size_t i = 0; i < n; ++i)
    all_gaps[i] = trace.spectra[i].empty() ? std::vector<Gap>{} : gaps(trace.spectra[i]);
  auto has_match = [&](const Gap& g, std::size_t j) {
    for (const auto& h : all_gaps[j])
      if (std::abs(g.a - h.a) < eps && std::abs(g.b - h.b) < eps) return true;
    return false;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& g : all_gaps[i]) {
      if (g.width() <= 2 * eps) continue;
      if (i > 0 && !has_match(g, i - 1))
        rep.g2.push_back(EdgeViolation{i, "gap has no counterpart in previous entry", g.center()});
      if (i + 1 < n && !has_match(g, i + 1))
        rep.g2.push_back(EdgeViolation{i, "gap has no counterpart in next entry", g.center()});
    }
  }

  // G3: tracks converging into the final entry must land on a gap or a tip.
  auto tracks = track_gaps(trace, opt);
  const std::size_t last = n - 1;
  for (const auto& t : tracks) {
    if (t.status == TrackStatus::Closed) {
      if (t.closed_entry == last && dist_point(t.closed_center, trace.spectra[last]) > eps)
        rep.g3.push_back(
            EdgeViolation{last, "closing track tip not on the limit spectrum", t.closed_center});
      continue;
    }
    if (t.samples.back().entry != last - 1) continue;
    // Extrapolate the edges one step (in parameter value where available).
    Scalar a_star = t.last().a, b_star = t.last().b;
    if (t.samples.size() >= 2 && trace.grid.metric == MetricKind::Euclidean) {
      const auto& s1 = t.samples[t.samples.size() - 2];
      const auto& s2 = t.samples.back();
      Scalar v1 = trace.grid.points[s1.entry].value;
      Scalar v2 = trace.grid.points[s2.entry].value;
      Scalar v3 = trace.grid.points[last].value;
      if (v2 != v1) {
        Scalar f = (v3 - v2) / (v2 - v1);
        a_star = s2.gap.a + f * (s2.gap.a - s1.gap.a);
        b_star = s2.gap.b + f * (s2.gap.b - s1.gap.b);
      }
    }
    if (b_star - a_star < opt.width_tol) {
      Scalar c = 0.5 * (a_star + b_star);
      if (dist_point(c, trace.spectra[last]) > eps)
        rep.g3.push_back(EdgeViolation{last, "extrapolated tip not on the limit spectrum", c});
    } else {
      bool found = false;
      for (const auto& h : all_gaps[last])
        if (std::abs(h.a - a_star) < 2 * eps && std::abs(h.b - b_star) < 2 * eps) found = true;
      if (!found)
        rep.g3.push_back(EdgeViolation{last, "track does not extrapolate onto a limit gap",
                                       0.5 * (a_star + b_star)});
    }
  }
  return rep;
}

bool BoundsReport::passed() const {
  for (const auto& c : checks)
    if (c.violations > 0) return false;
  return true;
}

BoundsReport verify_bounds(const SpectrumTrace& trace, const std::vector<GapTrack>& tracks,
                           const BoundConstants& k) {
  if (!(k.c_main > 0)) throw std::invalid_argument("verify_bounds: c_main must be > 0");
  BoundsReport rep;
  const std::size_t n = trace.size();

  auto run_check = [&](const std::string& name, auto&& emit) {
    BoundCheck chk;
    chk.name = name;
    chk.min_margin = kInf;
    emit(chk);
    rep.checks.push_back(std::move(chk));
  };
  auto record = [](BoundCheck& chk, Scalar value, Scalar bound, const std::string& where) {
    ++chk.checked;
    if (value > kNoiseFloor) chk.min_margin = std::min(chk.min_margin, bound / value);
    if (value > bound) {
      ++chk.violations;
      if (chk.details.size() < 10)
        chk.details.push_back(where + ": value " + std::to_string(value) + " > bound " +
                              std::to_string(bound));
    }
  };

  // (i) Hausdorff distance against sqrt(c_main) d^(alpha/2).
  run_check("hausdorff_vs_sqrt_cM", [&](BoundCheck& chk) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Scalar d = trace.grid.distance(i, j);
        if (!(d > 0)) continue;
        Scalar lhs = hausdorff(trace.spectra[i], trace.spectra[j]);
        Scalar rhs = std::sqrt(k.c_main) * std::pow(d, k.alpha / 2) * kSlack;
        record(chk, lhs, rhs, "pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
  });

  // (ii) Extreme edge jumps against c_edge d^alpha.
  run_check("edges_vs_c_edge", [&](BoundCheck& chk) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        Scalar d = trace.grid.distance(i, j);
        if (!(d > 0)) continue;
        Scalar rhs = k.c_edge * std::pow(d, k.alpha) * kSlack;
        Scalar dmin = std::abs(trace.spectra[i].min() - trace.spectra[j].min());
        Scalar dmax = std::abs(trace.spectra[i].max() - trace.spectra[j].max());
        record(chk, dmin, rhs, "min edge, pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
        record(chk, dmax, rhs, "max edge, pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
  });

  // (iii) Open-track gap-edge increments against (3 c_main / width) d^alpha.
  run_check("open_gap_edges_vs_3cM_over_width", [&](BoundCheck& chk) {
    for (const auto& t : tracks) {
      if (t.status == TrackStatus::Closed) continue;
      for (std::size_t s = 0; s + 1 < t.samples.size(); ++s) {
        const auto& u = t.samples[s];
        const auto& v = t.samples[s + 1];
        Scalar d = trace.grid.distance(u.entry, v.entry);
        if (!(d > 0)) continue;
        Scalar w = u.gap.width();
        if (!(w > 0)) continue;
        Scalar rhs = (3 * k.c_main / w) * std::pow(d, k.alpha) * kSlack;
        record(chk, std::abs(u.gap.a - v.gap.a), rhs,
               "track edge a, entries " + std::to_string(u.entry) + "->" + std::to_string(v.entry));
        record(chk, std::abs(u.gap.b - v.gap.b), rhs,
               "track edge b, entries " + std::to_string(u.entry) + "->" + std::to_string(v.entry));
      }
    }
  });

  // (iv) Closing-track widths against 2 sqrt(c_main) d(t, t*)^(alpha/2).
  run_check("closing_width_vs_2sqrt_cM", [&](BoundCheck& chk) {
    for (const auto& t : tracks) {
      if (t.status != TrackStatus::Closed) continue;
      for (const auto& s : t.samples) {
        if (s.entry == t.closed_entry) continue;
        Scalar d = trace.grid.distance(s.entry, t.closed_entry);
        if (!(d > 0)) continue;
        Scalar rhs = 2 * std::sqrt(k.c_main) * std::pow(d, k.alpha / 2) * kSlack;
        record(chk, s.gap.width(), rhs, "closing track at entry " + std::to_string(s.entry));
      }
    }
  });

  return rep;
}

}  // namespace opfield
