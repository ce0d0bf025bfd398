#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "opfield/compact_set.hpp"
#include "opfield/models.hpp"

namespace opfield {

/// Per-parameter spectra from a sweep, in grid order.
struct SpectrumTrace {
  ParameterSpace grid;
  std::vector<CompactSet> spectra;
  Scalar bound = 0;  // uniform norm bound m for the family

  std::size_t size() const { return spectra.size(); }
};

/// Materializes t -> spectrum(A_t). Any per-point failure aborts with the
/// offending parameter named.
SpectrumTrace sweep(const OperatorField& field, const ParameterSpace& grid, Scalar merge_tol);

/// Trace over an explicit family of sets (no operators involved).
SpectrumTrace trace_from_sets(ParameterSpace grid, std::vector<CompactSet> sets, Scalar bound);

/// Power-law fit y = C x^alpha by least squares on (log x, log y).
/// Differences below the 1e-12 noise floor are discarded. A fit with no
/// surviving data is returned as the degenerate marker (alpha = inf, C = 0).
struct HolderEstimate {
  Scalar alpha = 0;
  Scalar constant = 0;
  Scalar r_squared = 0;
  int n_points = 0;
  Scalar scale_min = 0;
  Scalar scale_max = 0;
  bool degenerate = false;
};

HolderEstimate fit_power_law(const std::vector<Scalar>& x, const std::vector<Scalar>& y);

/// Deterministic sample of the degree-2 polynomials with 1-norm at most M:
/// a 5x5x5 coefficient grid projected into the ball, the probe family
/// 4 m^2 - (z - lambda)^2 over a lambda grid (when it fits in the ball), and
/// the edge witnesses m +/- z.
struct PolySample {
  std::vector<Poly2> polys;
  Scalar poly_bound = 0;  // M
  Scalar probe_m = 0;     // m used for probe polynomials
};

PolySample sample_poly2(Scalar M, Scalar m);

/// Empirical p2 modulus: for every pair (s,t) the sup over the sample of
/// | ||p(A_s)|| - ||p(A_t)|| |, regressed against d(s,t).
HolderEstimate p2_modulus(const SpectrumTrace& trace, const PolySample& sample);
HolderEstimate p2_modulus(const OperatorField& field, const ParameterSpace& grid,
                          const PolySample& sample);

/// Sup-based (non-regression) constant at a fixed exponent:
/// max over pairs of sup_p |Phi_p(s) - Phi_p(t)| / d(s,t)^alpha. Every pair is
/// additionally probed at its own Hausdorff witness points and at
/// `extra_centers`, so the estimate dominates d_H^2 pair by pair.
Scalar p2_sup_constant(const SpectrumTrace& trace, const PolySample& sample, Scalar alpha,
                       const std::vector<Scalar>& extra_centers = {});

/// Empirical spectral modulus: d_H(sigma_s, sigma_t) against d(s,t).
HolderEstimate spectrum_modulus(const SpectrumTrace& trace);

struct GapSample {
  std::size_t entry = 0;
  Gap gap;
};

enum class TrackStatus { Open, Closing, Closed };

/// One gap followed through the sweep. Closed tracks record where the width
/// fell below tolerance (or the gap was covered by the next spectrum) and the
/// spectral value it closed on.
struct GapTrack {
  std::vector<GapSample> samples;
  TrackStatus status = TrackStatus::Open;
  std::size_t closed_entry = 0;
  Scalar closed_center = 0;
  std::vector<std::string> notes;

  std::size_t birth_entry() const { return samples.front().entry; }
  const Gap& first() const { return samples.front().gap; }
  const Gap& last() const { return samples.back().gap; }
};

struct TrackOptions {
  Scalar match_radius = 0;  // <= 0: half the minimum adjacent-gap separation at the start
  Scalar width_tol = 1e-6;  // gaps thinner than this are closed
};

std::vector<GapTrack> track_gaps(const SpectrumTrace& trace, const TrackOptions& opt);

Scalar default_match_radius(const SpectrumTrace& trace);

struct GapTip {
  Scalar c = 0;
  std::size_t entry = 0;  // parameter index the gap closes at
  bool isolated = false;
  bool from_accumulation = false;  // tip seen as an accumulation of newborn gaps
};

/// Tips from closed tracks, plus accumulation tips: a run of newborn tracks
/// with strictly decreasing widths ending below tolerance marks a tip at the
/// final parameter. isolated means (c - delta, c + delta) lies inside the
/// spectrum at the closing parameter.
std::vector<GapTip> detect_gap_tips(const std::vector<GapTrack>& tracks,
                                    const SpectrumTrace& trace, Scalar isolation_delta,
                                    const TrackOptions& opt);

struct EdgeViolation {
  std::size_t entry = 0;
  std::string what;
  Scalar magnitude = 0;
};

/// Sampled surrogate of the three edge-continuity conditions. Report only.
struct EdgeContinuityReport {
  std::vector<EdgeViolation> g1, g2, g3;
  bool passed() const { return g1.empty() && g2.empty() && g3.empty(); }
};

EdgeContinuityReport check_edge_continuity(const SpectrumTrace& trace, Scalar eps,
                                           const TrackOptions& opt);

struct BoundConstants {
  Scalar c_main = 0;  // sup-based constant over the M = 4m^2+2 sample
  Scalar c_edge = 0;  // sup-based constant over the M = 1+m sample
  Scalar alpha = 1;   // estimated p2 exponent
};

struct BoundCheck {
  std::string name;
  int checked = 0;
  int violations = 0;
  Scalar min_margin = 0;  // min over data of bound/value (inf if nothing to check)
  std::vector<std::string> details;
};

struct BoundsReport {
  std::vector<BoundCheck> checks;
  bool passed() const;
};

/// Pairwise quantitative bounds at the estimated constants:
///   (i)   d_H <= sqrt(c_main) d^(alpha/2)
///   (ii)  edge jumps <= c_edge d^alpha
///   (iii) open-track edge increments <= (3 c_main / width) d^alpha
///   (iv)  closing-track widths <= 2 sqrt(c_main) d(t, t*)^(alpha/2)
/// all with multiplicative slack 1 + 1e-6.
BoundsReport verify_bounds(const SpectrumTrace& trace, const std::vector<GapTrack>& tracks,
                           const BoundConstants& constants);

}  // namespace opfield
