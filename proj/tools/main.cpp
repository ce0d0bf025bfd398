// Command-line surface: spectra, sweeps, gap tracking, Holder estimates and
// quantitative bound verification over the built-in operator families.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "opfield/analysis.hpp"
#include "opfield/models.hpp"
#include "opfield/operators.hpp"
#include "opfield/serialize.hpp"
#include "opfield/version.hpp"

using namespace opfield;

namespace {

struct ModelOptions {
  std::string model = "almost_mathieu";
  double mu = 1.0;
  double lambda = 1.0;
  double theta = 0.0;
  std::string word = "period_doubling";
  int level = 5;
  std::string t = "1/2";
};

struct GridOptions {
  std::string kind = "closing";
  int qmax = 32;             // closing grid
  std::string center = "1/5";  // window grid
  long long denom = 320;
  int halfwidth = 4;
  std::string points;        // list grid: "p1/q1,p2/q2,..."
  std::string irrational = "golden";  // convergent grid
  int depth = 10;
  double lambda_max = 1.0;   // lambda grid
  int count = 7;
};

struct TolOptions {
  double merge_tol = 1e-9;
  double width_tol = 1e-4;
  double match_radius = 0;  // 0: automatic
  double eps = 1e-2;
  double isolation_delta = 0.05;
};

// Fault injection for exercising the verifier: one spectrum gets shifted
// after the constants are estimated, so the checks must flag it.
struct InjectOptions {
  double shift = 0;
  int at = -1;  // entry index; -1 picks the middle
};

Rational parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return Rational::reduced(std::stoll(s), 1);
    return Rational::reduced(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse rational: " + s);
  }
}

OperatorField make_field(const ModelOptions& m) {
  if (m.model == "almost_mathieu") return almost_mathieu_family(m.mu, m.theta);
  if (m.model == "kohmoto") return kohmoto_family(m.lambda, m.theta);
  if (m.model == "substitution")
    return substitution_family(substitution_word_by_name(m.word), m.level, 0.0);
  throw std::invalid_argument("unknown model: " + m.model);
}

Operator make_operator(const ModelOptions& m) {
  if (m.model == "almost_mathieu") return almost_mathieu(m.mu, m.theta, parse_rational(m.t));
  if (m.model == "kohmoto") return kohmoto(m.lambda, m.theta, parse_rational(m.t));
  if (m.model == "substitution")
    return substitution_field(m.lambda, substitution_word_by_name(m.word), m.level);
  throw std::invalid_argument("unknown model: " + m.model);
}

ParameterSpace make_grid(const GridOptions& g, const ModelOptions& m) {
  if (g.kind == "closing") return am_closing_grid(g.qmax);
  if (g.kind == "window") {
    Rational c = parse_rational(g.center);
    std::vector<ParamPoint> pts;
    for (int j = -g.halfwidth; j <= g.halfwidth; ++j)
      pts.push_back(rational_point(c.num * g.denom + j * c.den, c.den * g.denom));
    return euclidean_space(std::move(pts));
  }
  if (g.kind == "list") {
    std::vector<ParamPoint> pts;
    std::string rest = g.points;
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string tok = rest.substr(0, comma);
      if (!tok.empty()) {
        Rational r = parse_rational(tok);
        pts.push_back(rational_point(r.num, r.den));
      }
      if (comma == std::string::npos) break;
      rest = rest.substr(comma + 1);
    }
    if (pts.empty()) throw std::invalid_argument("empty grid: no points parsed");
    return euclidean_space(std::move(pts));
  }
  if (g.kind == "convergents") {
    std::vector<Rational> conv;
    if (g.irrational == "golden")
      conv = golden_mean_convergents(g.depth);
    else if (g.irrational == "sqrt2m1")
      conv = sqrt2_minus_one_convergents(g.depth);
    else
      throw std::invalid_argument("unknown irrational: " + g.irrational);
    std::vector<ParamPoint> pts;
    for (const auto& r : conv) pts.push_back(rational_point(r.num, r.den));
    return euclidean_space(std::move(pts));
  }
  if (g.kind == "lambda") {
    if (m.model != "substitution")
      throw std::invalid_argument("lambda grid requires the substitution model");
    std::vector<ParamPoint> pts;
    for (int j = g.count - 1; j >= 0; --j)
      pts.push_back(real_point(g.lambda_max * std::pow(2.0, -j)));
    return euclidean_space(std::move(pts));
  }
  throw std::invalid_argument("unknown grid kind: " + g.kind);
}

KeyValues config_echo(const std::string& command, const ModelOptions& m, const GridOptions& g,
                      const TolOptions& tol) {
  KeyValues kv;
  kv.emplace_back("version", kVersion);
  kv.emplace_back("command", command);
  kv.emplace_back("model", m.model);
  kv.emplace_back("mu", format_scalar(m.mu));
  kv.emplace_back("lambda", format_scalar(m.lambda));
  kv.emplace_back("theta", format_scalar(m.theta));
  kv.emplace_back("word", m.word);
  kv.emplace_back("level", std::to_string(m.level));
  kv.emplace_back("t", m.t);
  kv.emplace_back("grid_kind", g.kind);
  kv.emplace_back("qmax", std::to_string(g.qmax));
  kv.emplace_back("center", g.center);
  kv.emplace_back("denom", std::to_string(g.denom));
  kv.emplace_back("halfwidth", std::to_string(g.halfwidth));
  kv.emplace_back("points", g.points);
  kv.emplace_back("irrational", g.irrational);
  kv.emplace_back("depth", std::to_string(g.depth));
  kv.emplace_back("lambda_max", format_scalar(g.lambda_max));
  kv.emplace_back("count", std::to_string(g.count));
  kv.emplace_back("merge_tol", format_scalar(tol.merge_tol));
  kv.emplace_back("width_tol", format_scalar(tol.width_tol));
  kv.emplace_back("match_radius", format_scalar(tol.match_radius));
  kv.emplace_back("eps", format_scalar(tol.eps));
  kv.emplace_back("isolation_delta", format_scalar(tol.isolation_delta));
  return kv;
}

Json config_json(const KeyValues& kv) {
  Json j;
  for (const auto& [k, v] : kv) j[k] = v;
  return j;
}

std::string out_path(const std::string& dir, const std::string& name) {
  if (dir.empty()) return name;
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

TrackOptions track_options(const TolOptions& tol) {
  TrackOptions opt;
  opt.match_radius = tol.match_radius;
  opt.width_tol = tol.width_tol;
  return opt;
}

void print_spectrum_summary(const CompactSet& sp) {
  auto [lo, hi] = edges(sp);
  std::printf("bands: %zu\n", sp.size());
  std::printf("edges: [%s, %s]\n", format_scalar(lo).c_str(), format_scalar(hi).c_str());
  auto gs = gaps(sp);
  std::printf("gaps: %zu\n", gs.size());
  for (const auto& g : gs)
    std::printf("  (%s, %s)  width %s\n", format_scalar(g.a).c_str(), format_scalar(g.b).c_str(),
                format_scalar(g.width()).c_str());
}

int cmd_spectrum(const ModelOptions& m, const GridOptions& g, const TolOptions& tol,
                 const std::string& dir, const std::string& prefix, bool gaps_only) {
  auto kv = config_echo(gaps_only ? "gaps" : "spectrum", m, g, tol);
  auto sp = spectrum(make_operator(m), tol.merge_tol);
  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(kv);
  j["spectrum"] = to_json(sp);
  Json gj = Json::array();
  for (const auto& gap : gaps(sp)) gj.push_back(Json::array({gap.a, gap.b}));
  j["gaps"] = gj;
  write_text_file(out_path(dir, prefix + ".json"), j.dump(2) + "\n");
  write_text_file(out_path(dir, prefix + ".csv"), compact_set_csv(sp, kv));
  print_spectrum_summary(sp);
  return 0;
}

SpectrumTrace run_sweep(const ModelOptions& m, const GridOptions& g, const TolOptions& tol) {
  auto field = make_field(m);
  auto grid = make_grid(g, m);
  if (m.model == "substitution") field.bound = 2 + std::abs(g.lambda_max);
  auto trace = sweep(field, grid, tol.merge_tol);
  trace.bound = field_bound(field, grid);
  return trace;
}

int cmd_sweep(const ModelOptions& m, const GridOptions& g, const TolOptions& tol,
              const std::string& dir, const std::string& prefix) {
  auto kv = config_echo("sweep", m, g, tol);
  auto trace = run_sweep(m, g, tol);
  auto tracks = track_gaps(trace, track_options(tol));
  write_text_file(out_path(dir, prefix + "_trace.csv"), trace_csv(trace, kv));
  Json tj = tracks_to_json(tracks, trace.grid);
  tj["version"] = kVersion;
  tj["config"] = config_json(kv);
  write_text_file(out_path(dir, prefix + "_tracks.json"), tj.dump(2) + "\n");
  std::printf("sweep: %zu parameters, %zu tracks, bound m = %s\n", trace.size(), tracks.size(),
              format_scalar(trace.bound).c_str());
  return 0;
}

int cmd_holder(const ModelOptions& m, const GridOptions& g, const TolOptions& tol,
               const std::string& dir, const std::string& prefix) {
  auto kv = config_echo("holder", m, g, tol);
  auto trace = run_sweep(m, g, tol);
  const Scalar mm = trace.bound;
  auto sample = sample_poly2(4 * mm * mm + 2, mm);
  auto p2 = p2_modulus(trace, sample);
  auto spectral = spectrum_modulus(trace);
  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(kv);
  j["p2_modulus"] = to_json(p2);
  j["spectrum_modulus"] = to_json(spectral);
  if (!p2.degenerate && !spectral.degenerate && p2.alpha != 0)
    j["alpha_ratio_spec_over_p2"] = spectral.alpha / p2.alpha;
  write_text_file(out_path(dir, prefix + "_holder.json"), j.dump(2) + "\n");
  if (p2.degenerate)
    std::printf("p2 modulus: degenerate (constant family), C = 0\n");
  else
    std::printf("p2 modulus: alpha = %.6g, C = %.6g, r2 = %.6g\n", p2.alpha, p2.constant,
                p2.r_squared);
  if (spectral.degenerate)
    std::printf("spectrum modulus: degenerate (constant spectra)\n");
  else
    std::printf("spectrum modulus: alpha = %.6g, C = %.6g, r2 = %.6g\n", spectral.alpha,
                spectral.constant, spectral.r_squared);
  return 0;
}

CompactSet shifted_set(const CompactSet& f, Scalar delta) {
  std::vector<Interval> parts;
  for (const auto& iv : f.intervals()) parts.push_back(Interval{iv.lo + delta, iv.hi + delta});
  return CompactSet::from_intervals(std::move(parts));
}

int cmd_verify(const ModelOptions& m, const GridOptions& g, const TolOptions& tol,
               const InjectOptions& inject, const std::string& dir, const std::string& prefix) {
  auto kv = config_echo("verify", m, g, tol);
  kv.emplace_back("inject_shift", format_scalar(inject.shift));
  kv.emplace_back("inject_at", std::to_string(inject.at));
  auto trace = run_sweep(m, g, tol);
  const Scalar mm = trace.bound;

  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(kv);
  int exit_code = 0;

  auto sample = sample_poly2(4 * mm * mm + 2, mm);
  auto p2 = p2_modulus(trace, sample);
  j["p2_modulus"] = to_json(p2);

  Scalar c_main = 0, c_edge = 0;
  if (!p2.degenerate) {
    auto clean_tracks = track_gaps(trace, track_options(tol));
    std::vector<Scalar> centers;
    for (const auto& t : clean_tracks)
      if (t.status == TrackStatus::Closed)
        for (const auto& s : t.samples) centers.push_back(s.gap.center());
    c_main = p2_sup_constant(trace, sample, p2.alpha, centers);
    c_edge = p2_sup_constant(trace, sample_poly2(1 + mm, mm), p2.alpha);
    j["constants"] = Json{{"c_main", c_main}, {"c_edge", c_edge}, {"alpha", p2.alpha}};
  }

  if (inject.shift != 0 && trace.size() > 0) {
    std::size_t at = inject.at >= 0 ? static_cast<std::size_t>(inject.at) : trace.size() / 2;
    if (at >= trace.size()) throw std::invalid_argument("inject_at out of range");
    trace.spectra[at] = shifted_set(trace.spectra[at], inject.shift);
  }

  auto tracks = track_gaps(trace, track_options(tol));
  auto tips = detect_gap_tips(tracks, trace, tol.isolation_delta, track_options(tol));
  auto edge_rep = check_edge_continuity(trace, tol.eps, track_options(tol));
  j["edge_continuity"] = to_json(edge_rep);
  j["tips"] = tips_to_json(tips, trace.grid)["tips"];

  // Width scaling of each closing track toward its closure parameter.
  Json closings = Json::array();
  for (const auto& t : tracks) {
    if (t.status != TrackStatus::Closed || t.samples.size() < 5) continue;
    std::vector<Scalar> d, w;
    for (const auto& s : t.samples) {
      if (s.entry == t.closed_entry) continue;
      d.push_back(trace.grid.distance(s.entry, t.closed_entry));
      w.push_back(s.gap.width());
    }
    try {
      auto fit = fit_power_law(d, w);
      closings.push_back(Json{{"c", t.closed_center},
                              {"t", to_json(trace.grid.points.at(t.closed_entry))},
                              {"width_exponent", to_json(fit)}});
    } catch (const std::exception&) {
      // too few usable samples to regress; skip
    }
  }
  j["closing_tracks"] = closings;

  if (p2.degenerate) {
    j["bounds"] = Json{{"passed", true}, {"note", "constant family, nothing to bound"}};
  } else {
    auto rep = verify_bounds(trace, tracks, BoundConstants{c_main, c_edge, p2.alpha});
    j["bounds"] = to_json(rep);
    std::printf("%s", bounds_report_text(rep).c_str());
    if (!rep.passed()) exit_code = 2;
  }
  std::printf("%s", edge_report_text(edge_rep).c_str());
  write_text_file(out_path(dir, prefix + "_report.json"), j.dump(2) + "\n");
  return exit_code;
}

int cmd_counterexample(const CounterexampleConfig& cfg, const TolOptions& tol,
                       const std::string& dir, const std::string& prefix) {
  KeyValues kv;
  kv.emplace_back("version", kVersion);
  kv.emplace_back("command", "counterexample");
  kv.emplace_back("c", format_scalar(cfg.c));
  kv.emplace_back("m", format_scalar(cfg.m));
  kv.emplace_back("kappa", format_scalar(cfg.kappa));
  kv.emplace_back("alpha", format_scalar(cfg.alpha));
  kv.emplace_back("width_scale", format_scalar(cfg.width_scale));
  kv.emplace_back("gap_count", std::to_string(cfg.gap_count));
  kv.emplace_back("width_tol", format_scalar(tol.width_tol));

  auto fam = counterexample_family(cfg);
  std::vector<ParamPoint> pts;
  std::vector<CompactSet> sets;
  for (std::size_t n = 0; n < fam.stages.size(); ++n) {
    pts.push_back(real_point(static_cast<Scalar>(n)));
    sets.push_back(fam.stages[n]);
  }
  pts.push_back(infinity_point());
  sets.push_back(fam.limit);
  auto trace = trace_from_sets(ultrametric_space(std::move(pts), cfg.kappa), std::move(sets),
                               cfg.m);

  TrackOptions topt = track_options(tol);
  if (topt.match_radius <= 0) topt.match_radius = 0.05;
  auto tracks = track_gaps(trace, topt);
  auto tips = detect_gap_tips(tracks, trace, tol.isolation_delta, topt);

  // Width of the newborn gap against d(n, inf), and d_H(F_n, F_inf) against
  // d(n, inf): the two exponents the construction separates.
  std::vector<Scalar> dx, wy;
  for (const auto& t : tracks) {
    std::size_t birth = t.birth_entry();
    if (birth == 0) continue;
    dx.push_back(std::exp(-std::pow(cfg.kappa, static_cast<Scalar>(birth))));
    wy.push_back(t.first().width());
  }
  auto width_fit = fit_power_law(dx, wy);
  std::vector<Scalar> hx, hy;
  const std::size_t inf_entry = trace.size() - 1;
  for (std::size_t n = 0; n + 1 < trace.size(); ++n) {
    hx.push_back(trace.grid.distance(n, inf_entry));
    hy.push_back(hausdorff(trace.spectra[n], trace.spectra[inf_entry]));
  }
  auto dh_fit = fit_power_law(hx, hy);

  Json j;
  j["version"] = kVersion;
  j["config"] = config_json(kv);
  j["width_exponent"] = to_json(width_fit);
  j["hausdorff_exponent"] = to_json(dh_fit);
  j["tips"] = tips_to_json(tips, trace.grid)["tips"];
  j["tracks"] = tracks_to_json(tracks, trace.grid)["tracks"];
  write_text_file(out_path(dir, prefix + "_report.json"), j.dump(2) + "\n");
  write_text_file(out_path(dir, prefix + "_trace.csv"), trace_csv(trace, kv));
  std::printf("gap width exponent vs d(n,inf): %.6g (expect alpha/(2 kappa) = %.6g)\n",
              width_fit.alpha, cfg.alpha / (2 * cfg.kappa));
  std::printf("Hausdorff exponent vs d(n,inf): %.6g (expect alpha/2 = %.6g)\n", dh_fit.alpha,
              cfg.alpha / 2);
  std::printf("tips: %zu\n", tips.size());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of operator fields: sweeps, gap tracking and Holder bounds"};
  app.set_version_flag("--version", std::string(kVersion));
  app.set_config("--config", "", "Read options from an INI file (sections per subcommand)");
  app.require_subcommand(1);

  ModelOptions m;
  GridOptions g;
  TolOptions tol;
  InjectOptions inject;
  CounterexampleConfig cex;
  std::string dir;
  std::string prefix;

  auto add_model = [&](CLI::App* sub) {
    sub->add_option("--model", m.model, "almost_mathieu | kohmoto | substitution");
    sub->add_option("--mu", m.mu, "Almost Mathieu coupling");
    sub->add_option("--lambda", m.lambda, "Kohmoto / substitution coupling");
    sub->add_option("--theta", m.theta, "phase offset");
    sub->add_option("--word", m.word, "fibonacci | thue_morse | period_doubling");
    sub->add_option("--level", m.level, "substitution iteration level");
  };
  auto add_grid = [&](CLI::App* sub) {
    sub->add_option("--grid-kind", g.kind, "closing | window | list | convergents | lambda");
    sub->add_option("--qmax", g.qmax, "closing grid: largest q in 1/2 +- 1/(2q)");
    sub->add_option("--center", g.center, "window grid: center rational p/q");
    sub->add_option("--denom", g.denom, "window grid: step denominator");
    sub->add_option("--halfwidth", g.halfwidth, "window grid: steps on each side");
    sub->add_option("--points", g.points, "list grid: comma-separated rationals");
    sub->add_option("--irrational", g.irrational, "convergents grid: golden | sqrt2m1");
    sub->add_option("--depth", g.depth, "convergents grid: ladder depth");
    sub->add_option("--lambda-max", g.lambda_max, "lambda grid: largest coupling");
    sub->add_option("--count", g.count, "lambda grid: number of dyadic points");
  };
  auto add_tols = [&](CLI::App* sub) {
    sub->add_option("--merge-tol", tol.merge_tol, "eigenvalue clustering tolerance");
    sub->add_option("--width-tol", tol.width_tol, "gap width closing threshold");
    sub->add_option("--match-radius", tol.match_radius, "gap matching radius (0 = auto)");
    sub->add_option("--eps", tol.eps, "edge continuity scale");
    sub->add_option("--isolation-delta", tol.isolation_delta, "tip isolation margin");
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out-dir", dir, "output directory")->envname("OPFIELD_OUT");
    sub->add_option("--prefix", prefix, "output file prefix (default: subcommand name)");
  };

  auto* sp = app.add_subcommand("spectrum", "Spectrum of one operator as interval bands");
  add_model(sp);
  sp->add_option("--t", m.t, "rational parameter p/q");
  add_tols(sp);
  add_out(sp);

  auto* gp = app.add_subcommand("gaps", "Gaps of one operator's spectrum");
  add_model(gp);
  gp->add_option("--t", m.t, "rational parameter p/q");
  add_tols(gp);
  add_out(gp);

  auto* sw = app.add_subcommand("sweep", "Spectra over a parameter grid, with gap tracks");
  add_model(sw);
  add_grid(sw);
  add_tols(sw);
  add_out(sw);

  auto* ho = app.add_subcommand("holder", "p2 and spectral Holder estimates over a sweep");
  add_model(ho);
  add_grid(ho);
  add_tols(ho);
  add_out(ho);

  auto* ve = app.add_subcommand("verify", "Quantitative bound checks over a sweep");
  add_model(ve);
  add_grid(ve);
  add_tols(ve);
  ve->add_option("--inject-shift", inject.shift,
                 "fault injection: shift one spectrum by this amount after estimation");
  ve->add_option("--inject-at", inject.at, "fault injection: entry index (-1 = middle)");
  add_out(ve);

  auto* ce = app.add_subcommand("counterexample", "Slow-closing nested gap family");
  ce->add_option("--c", cex.c, "accumulation point");
  ce->add_option("--m", cex.m, "right endpoint of F_0 = [0, m]");
  ce->add_option("--kappa", cex.kappa, "ultrametric base (> 1)");
  ce->add_option("--alpha", cex.alpha, "target Holder exponent");
  ce->add_option("--width-scale", cex.width_scale, "width constant C");
  ce->add_option("--gaps", cex.gap_count, "number of removed gaps N");
  add_tols(ce);
  add_out(ce);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (prefix.empty()) {
    for (const auto* sub : {sp, gp, sw, ho, ve, ce})
      if (sub->parsed()) prefix = sub->get_name();
  }

  try {
    if (sp->parsed()) return cmd_spectrum(m, g, tol, dir, prefix, false);
    if (gp->parsed()) return cmd_spectrum(m, g, tol, dir, prefix, true);
    if (sw->parsed()) return cmd_sweep(m, g, tol, dir, prefix);
    if (ho->parsed()) return cmd_holder(m, g, tol, dir, prefix);
    if (ve->parsed()) return cmd_verify(m, g, tol, inject, dir, prefix);
    if (ce->parsed()) return cmd_counterexample(cex, tol, dir, prefix);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
