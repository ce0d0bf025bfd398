#include "opfield/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace opfield {

Json to_json(const CompactSet& f) {
  Json intervals = Json::array();
  for (const auto& iv : f.intervals()) intervals.push_back(Json::array({iv.lo, iv.hi}));
  return Json{{"intervals", intervals}};
}

CompactSet compact_set_from_json(const Json& j) {
  std::vector<Interval> parts;
  for (const auto& iv : j.at("intervals"))
    parts.push_back(Interval{iv.at(0).get<Scalar>(), iv.at(1).get<Scalar>()});
  return CompactSet::from_intervals(std::move(parts));
}

Json to_json(const Operator& a) {
  Json j;
  if (const auto* t = std::get_if<SymTridiag>(&a)) {
    j["variant"] = "sym_tridiag";
    j["diag"] = std::vector<Scalar>(t->diag.begin(), t->diag.end());
    j["off"] = std::vector<Scalar>(t->off.begin(), t->off.end());
  } else if (const auto* p = std::get_if<PeriodicJacobi>(&a)) {
    j["variant"] = "periodic_jacobi";
    j["potential"] = std::vector<Scalar>(p->potential.begin(), p->potential.end());
  } else {
    const auto& d = std::get<DenseHermitian>(a);
    j["variant"] = "dense_hermitian";
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index r = 0; r < d.mat.rows(); ++r) {
      Json rre = Json::array(), rim = Json::array();
      for (Eigen::Index c = 0; c < d.mat.cols(); ++c) {
        rre.push_back(d.mat(r, c).real());
        rim.push_back(d.mat(r, c).imag());
      }
      re.push_back(rre);
      im.push_back(rim);
    }
    j["re"] = re;
    j["im"] = im;
  }
  return j;
}

Operator operator_from_json(const Json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "sym_tridiag") {
    auto dv = j.at("diag").get<std::vector<Scalar>>();
    auto ev = j.at("off").get<std::vector<Scalar>>();
    Vector d = Eigen::Map<Vector>(dv.data(), static_cast<Eigen::Index>(dv.size()));
    Vector e = Eigen::Map<Vector>(ev.data(), static_cast<Eigen::Index>(ev.size()));
    return SymTridiag(std::move(d), std::move(e));
  }
  if (variant == "periodic_jacobi") {
    auto pv = j.at("potential").get<std::vector<Scalar>>();
    Vector v = Eigen::Map<Vector>(pv.data(), static_cast<Eigen::Index>(pv.size()));
    return PeriodicJacobi(std::move(v));
  }
  if (variant == "dense_hermitian") {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto n = static_cast<Eigen::Index>(re.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
      for (Eigen::Index c = 0; c < n; ++c)
        m(r, c) = Complex(re.at(r).at(c).get<Scalar>(), im.at(r).at(c).get<Scalar>());
    return DenseHermitian::checked(m);
  }
  throw std::invalid_argument("operator_from_json: unknown variant " + variant);
}

Json to_json(const ParamPoint& p) {
  Json j;
  if (p.at_infinity) {
    j["infinity"] = true;
    return j;
  }
  j["value"] = p.value;
  if (p.has_rational()) {
    j["num"] = p.num;
    j["den"] = p.den;
  }
  return j;
}

Json to_json(const HolderEstimate& e) {
  Json j;
  j["degenerate"] = e.degenerate;
  if (e.degenerate) {
    j["alpha"] = "inf";
    j["constant"] = 0.0;
    return j;
  }
  j["alpha"] = e.alpha;
  j["constant"] = e.constant;
  j["r_squared"] = e.r_squared;
  j["n_points"] = e.n_points;
  j["scale_min"] = e.scale_min;
  j["scale_max"] = e.scale_max;
  return j;
}

namespace {

const char* status_name(TrackStatus s) {
  switch (s) {
    case TrackStatus::Open: return "open";
    case TrackStatus::Closing: return "closing";
    case TrackStatus::Closed: return "closed";
  }
  return "?";
}

}  // namespace

Json to_json(const GapTrack& t, const ParameterSpace& grid) {
  Json j;
  j["status"] = status_name(t.status);
  if (t.status == TrackStatus::Closed) {
    j["closed_at"] = Json{{"t", to_json(grid.points.at(t.closed_entry))},
                          {"c", t.closed_center}};
  }
  Json samples = Json::array();
  for (const auto& s : t.samples)
    samples.push_back(Json{{"t", to_json(grid.points.at(s.entry))},
                           {"a", s.gap.a},
                           {"b", s.gap.b}});
  j["samples"] = samples;
  if (!t.notes.empty()) j["notes"] = t.notes;
  return j;
}

Json tracks_to_json(const std::vector<GapTrack>& tracks, const ParameterSpace& grid) {
  Json arr = Json::array();
  for (const auto& t : tracks) arr.push_back(to_json(t, grid));
  return Json{{"tracks", arr}};
}

Json to_json(const GapTip& tip, const ParameterSpace& grid) {
  return Json{{"c", tip.c},
              {"t", to_json(grid.points.at(tip.entry))},
              {"isolated", tip.isolated},
              {"from_accumulation", tip.from_accumulation}};
}

Json tips_to_json(const std::vector<GapTip>& tips, const ParameterSpace& grid) {
  Json arr = Json::array();
  for (const auto& t : tips) arr.push_back(to_json(t, grid));
  return Json{{"tips", arr}};
}

namespace {

Json violations_to_json(const std::vector<EdgeViolation>& vs) {
  Json arr = Json::array();
  for (const auto& v : vs)
    arr.push_back(Json{{"entry", v.entry}, {"what", v.what}, {"magnitude", v.magnitude}});
  return arr;
}

}  // namespace

Json to_json(const EdgeContinuityReport& rep) {
  return Json{{"passed", rep.passed()},
              {"G1", violations_to_json(rep.g1)},
              {"G2", violations_to_json(rep.g2)},
              {"G3", violations_to_json(rep.g3)}};
}

Json to_json(const BoundsReport& rep) {
  Json checks = Json::array();
  for (const auto& c : rep.checks) {
    Json j{{"name", c.name},
           {"checked", c.checked},
           {"violations", c.violations},
           {"details", c.details}};
    if (std::isfinite(c.min_margin)) j["min_margin"] = c.min_margin;
    checks.push_back(j);
  }
  return Json{{"passed", rep.passed()}, {"checks", checks}};
}

std::string bounds_report_text(const BoundsReport& rep) {
  std::ostringstream os;
  os << "check                                 checked  violations  min_margin\n";
  for (const auto& c : rep.checks) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-36s %8d %11d  %.6g\n", c.name.c_str(), c.checked,
                  c.violations, c.min_margin);
    os << line;
    for (const auto& d : c.details) os << "    " << d << "\n";
  }
  os << (rep.passed() ? "all bounds hold\n" : "bound violations present\n");
  return os.str();
}

std::string edge_report_text(const EdgeContinuityReport& rep) {
  std::ostringstream os;
  auto dump = [&](const char* name, const std::vector<EdgeViolation>& vs) {
    os << name << ": " << (vs.empty() ? "pass" : "FAIL") << "\n";
    for (const auto& v : vs)
      os << "    entry " << v.entry << ": " << v.what << " (" << format_scalar(v.magnitude)
         << ")\n";
  };
  dump("G1", rep.g1);
  dump("G2", rep.g2);
  dump("G3", rep.g3);
  return os.str();
}

std::string format_scalar(Scalar x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

void append_header(std::ostringstream& os, const KeyValues& header) {
  for (const auto& [k, v] : header) os << "# " << k << "=" << v << "\n";
}

}  // namespace

std::string compact_set_csv(const CompactSet& f, const KeyValues& header) {
  std::ostringstream os;
  append_header(os, header);
  os << "lo,hi\n";
  for (const auto& iv : f.intervals())
    os << format_scalar(iv.lo) << "," << format_scalar(iv.hi) << "\n";
  return os.str();
}

std::string trace_csv(const SpectrumTrace& trace, const KeyValues& header) {
  std::ostringstream os;
  append_header(os, header);
  os << "t,interval_index,lo,hi\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const auto& p = trace.grid.points[i];
    std::string tlabel = p.at_infinity ? "inf" : format_scalar(p.value);
    const auto& parts = trace.spectra[i].intervals();
    for (std::size_t k = 0; k < parts.size(); ++k)
      os << tlabel << "," << k << "," << format_scalar(parts[k].lo) << ","
         << format_scalar(parts[k].hi) << "\n";
  }
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace opfield
