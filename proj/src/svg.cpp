#include "amap/svg.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "amap/error.hpp"

namespace amap {

using ojson = nlohmann::ordered_json;

namespace {

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Box {
  double min_x = std::numeric_limits<double>::infinity();
  double min_y = std::numeric_limits<double>::infinity();
  double max_x = -std::numeric_limits<double>::infinity();
  double max_y = -std::numeric_limits<double>::infinity();

  void add(Vec2 p) {
    min_x = std::min(min_x, p.x);
    min_y = std::min(min_y, p.y);
    max_x = std::max(max_x, p.x);
    max_y = std::max(max_y, p.y);
  }
  bool empty() const { return !(min_x <= max_x); }
};

// World metres to SVG pixels, y flipped.
struct View {
  Box box;
  double scale = 20.0;
  double margin = 30.0;

  double px(double x) const { return margin + (x - box.min_x) * scale; }
  double py(double y) const { return margin + (box.max_y - y) * scale; }
  double width() const { return 2 * margin + (box.max_x - box.min_x) * scale; }
  double height() const { return 2 * margin + (box.max_y - box.min_y) * scale; }
};

View fit(Box box, double target_px) {
  if (box.empty()) box = Box{0, 0, 1, 1};
  if (box.max_x - box.min_x < 1.0) box.max_x = box.min_x + 1.0;
  if (box.max_y - box.min_y < 1.0) box.max_y = box.min_y + 1.0;
  const double extent = std::max(box.max_x - box.min_x, box.max_y - box.min_y);
  View v;
  v.box = box;
  v.scale = std::clamp(target_px / extent, 2.0, 80.0);
  return v;
}

class Svg {
 public:
  Svg(double w, double h) {
    out_ << std::fixed << std::setprecision(2);
    out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
         << "\" viewBox=\"0 0 " << w << ' ' << h << "\">\n";
    out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }
  std::ostringstream& raw() { return out_; }
  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  std::ostringstream out_;
};

void draw_layout(Svg& svg, const View& v, const LayoutSnapshot& layout, double opacity) {
  auto& o = svg.raw();
  o << "<g class=\"layout\" opacity=\"" << opacity << "\">\n";
  for (const auto& s : layout.springs) {
    if (s.ends.size() < 2) continue;
    const bool bold = s.origin == SpringOrigin::Observation;
    const bool dashed = s.kind != SpringKind::Distance;
    const std::string colour = s.origin == SpringOrigin::Hierarchy ? "#9a9a9a" : "#3060c0";
    // Angle springs are drawn along both arms meeting at their vertex.
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    if (s.kind == SpringKind::RelativeAngle && s.ends.size() == 3) {
      segments = {{s.ends[0], s.ends[1]}, {s.ends[2], s.ends[1]}};
    } else {
      segments = {{s.ends[0], s.ends[1]}};
    }
    for (const auto& [a, b] : segments) {
      if (a >= layout.masses.size() || b >= layout.masses.size()) continue;
      const Vec2 pa = layout.masses[a].position, pb = layout.masses[b].position;
      o << "<line x1=\"" << v.px(pa.x) << "\" y1=\"" << v.py(pa.y) << "\" x2=\"" << v.px(pb.x)
        << "\" y2=\"" << v.py(pb.y) << "\" stroke=\"" << colour << "\" stroke-width=\""
        << (bold ? 3.0 : 1.0) << '"' << (dashed ? " stroke-dasharray=\"4 3\"" : "") << "/>\n";
    }
  }
  for (const auto& m : layout.masses) {
    const bool anchor = m.fixed;
    o << "<circle cx=\"" << v.px(m.position.x) << "\" cy=\"" << v.py(m.position.y) << "\" r=\""
      << (anchor ? 3.0 : 5.0) << "\" fill=\"" << (anchor ? "#202020" : "#e07020")
      << "\" stroke=\"black\" stroke-width=\"" << (anchor ? 0.5 : 1.0) << "\"/>\n";
    if (!anchor) {
      o << "<text x=\"" << v.px(m.position.x) + 7 << "\" y=\"" << v.py(m.position.y) - 7
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << escape(m.name) << "</text>\n";
    }
  }
  o << "</g>\n";
}

Vec2 read_xy(const ojson& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw Error(ErrorCode::MalformedTrace, "expected [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

SpringKind spring_kind(const std::string& s) {
  if (s == "distance") return SpringKind::Distance;
  if (s == "absolute-angle") return SpringKind::AbsoluteAngle;
  if (s == "relative-angle") return SpringKind::RelativeAngle;
  throw Error(ErrorCode::MalformedTrace, "unknown spring kind '" + s + "'");
}

SpringOrigin spring_origin(const std::string& s) {
  if (s == "template") return SpringOrigin::Template;
  if (s == "hierarchy") return SpringOrigin::Hierarchy;
  if (s == "observation") return SpringOrigin::Observation;
  throw Error(ErrorCode::MalformedTrace, "unknown spring origin '" + s + "'");
}

}  // namespace

LayoutSnapshot snapshot_of(const AbstractMap& map) {
  LayoutSnapshot out;
  for (const PointMass& m : map.system().masses()) {
    out.masses.push_back({m.toponym.str(), m.position, m.fixed});
  }
  for (const SpringSpec& s : map.springs()) {
    out.springs.push_back(
        {s.kind, {s.endpoints.begin(), s.endpoints.begin() + s.endpoint_count()}, s.origin});
  }
  return out;
}

LayoutSnapshot snapshot_from_json(const ojson& payload) {
  LayoutSnapshot out;
  try {
    for (const auto& m : payload.at("masses")) {
      out.masses.push_back(
          {m.at("name").get<std::string>(), read_xy(m.at("pos")), m.at("fixed").get<bool>()});
    }
    for (const auto& s : payload.at("springs")) {
      out.springs.push_back({spring_kind(s.at("kind").get<std::string>()),
                             s.at("ends").get<std::vector<std::size_t>>(),
                             spring_origin(s.at("origin").get<std::string>())});
    }
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::MalformedTrace, std::string("bad imagine event: ") + e.what());
  }
  return out;
}

std::string render_imagination(const LayoutSnapshot& layout,
                               const std::vector<EnergySample>& energy) {
  Box box;
  for (const auto& m : layout.masses) box.add(m.position);
  View v = fit(box, 700.0);
  if (layout.masses.empty()) v.box = Box{0, 0, 1, 1};
  const double inset_h = energy.empty() ? 0.0 : 160.0;
  const double width = std::max(v.width(), 320.0);
  Svg svg(width, v.height() + inset_h);
  draw_layout(svg, v, layout, 1.0);

  if (!energy.empty()) {
    auto& o = svg.raw();
    const double top = v.height() + 10, h = inset_h - 40, left = 50, w = width - 70;
    double t_max = energy.back().t, e_max = 0.0;
    for (const auto& s : energy) e_max = std::max(e_max, s.kinetic + s.potential);
    if (!(t_max > 0)) t_max = 1.0;
    if (!(e_max > 0)) e_max = 1.0;
    o << "<g class=\"energy\">\n";
    o << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w << "\" height=\"" << h
      << "\" fill=\"none\" stroke=\"#888\"/>\n";
    o << "<polyline fill=\"none\" stroke=\"#c03030\" points=\"";
    for (const auto& s : energy) {
      o << left + w * s.t / t_max << ',' << top + h * (1.0 - (s.kinetic + s.potential) / e_max)
        << ' ';
    }
    o << "\"/>\n";
    o << "<text x=\"" << left << "\" y=\"" << top + h + 16
      << "\" font-family=\"sans-serif\" font-size=\"11\">total energy, 0 to " << t_max
      << " s</text>\n";
    o << "</g>\n";
  }
  return svg.finish();
}

ReplayFrame replay_frame(const std::vector<TraceEvent>& events, std::optional<std::size_t> frame) {
  ReplayFrame out;
  bool have_world = false;
  std::size_t imagines = 0;
  try {
    for (const TraceEvent& e : events) {
      const ojson& p = e.payload;
      switch (e.kind) {
        case EventKind::World: {
          have_world = true;
          out.grid = p.at("grid").get<std::vector<std::string>>();
          out.resolution = p.at("resolution").get<double>();
          out.origin = read_xy(p.at("origin"));
          out.goal = p.at("goal").get<std::string>();
          out.path.push_back(read_xy(p.at("robot_start")));
          for (const auto& c : p.at("cues")) {
            out.cues.push_back({c.at("id").get<std::string>(), read_xy(c.at("pos")), false});
          }
          break;
        }
        case EventKind::Pose:
          out.path.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
          break;
        case EventKind::Cue: {
          const auto id = p.at("id").get<std::string>();
          for (auto& c : out.cues) {
            if (c.id == id) c.observed = true;
          }
          break;
        }
        case EventKind::Imagine:
          out.layout = snapshot_from_json(p);
          if (frame && imagines++ == *frame) return out;
          break;
        case EventKind::Goal:
          out.success = p.at("success").get<bool>();
          break;
        case EventKind::Energy:
        case EventKind::Exploration:
          break;
      }
    }
  } catch (const ojson::exception& e) {
    throw Error(ErrorCode::MalformedTrace, std::string("bad event payload: ") + e.what());
  }
  if (!have_world) throw Error(ErrorCode::MalformedTrace, "trace has no world event");
  if (frame) {
    throw Error(ErrorCode::MalformedTrace, "trace has only " + std::to_string(imagines) +
                                               " imagine events");
  }
  return out;
}

std::string render_replay(const ReplayFrame& f) {
  const int rows = static_cast<int>(f.grid.size());
  const int cols = rows > 0 ? static_cast<int>(f.grid.front().size()) : 0;
  Box box;
  box.add(f.origin);
  box.add(f.origin + f.resolution * Vec2{double(cols), double(rows)});
  View v = fit(box, 900.0);
  Svg svg(v.width(), v.height());
  auto& o = svg.raw();

  // Walls, merged into horizontal runs.
  o << "<g class=\"walls\" fill=\"#404040\">\n";
  for (int r = 0; r < rows; ++r) {
    const double y = f.origin.y + (rows - r) * f.resolution;
    for (int c = 0; c < cols;) {
      if (f.grid[r][c] != '#') {
        ++c;
        continue;
      }
      int end = c;
      while (end < cols && f.grid[r][end] == '#') ++end;
      const double x = f.origin.x + c * f.resolution;
      o << "<rect x=\"" << v.px(x) << "\" y=\"" << v.py(y) << "\" width=\""
        << (end - c) * f.resolution * v.scale << "\" height=\"" << f.resolution * v.scale
        << "\"/>\n";
      c = end;
    }
  }
  o << "</g>\n";

  if (f.layout) draw_layout(svg, v, *f.layout, 0.6);

  for (const auto& c : f.cues) {
    o << "<rect class=\"cue" << (c.observed ? " observed" : "") << "\" x=\""
      << v.px(c.position.x) - 4 << "\" y=\"" << v.py(c.position.y) - 4
      << "\" width=\"8\" height=\"8\" fill=\"" << (c.observed ? "#10a010" : "none")
      << "\" stroke=\"#10a010\" stroke-width=\"" << (c.observed ? 2.5 : 1.0) << "\"/>\n";
    o << "<text x=\"" << v.px(c.position.x) + 6 << "\" y=\"" << v.py(c.position.y) + 12
      << "\" font-family=\"sans-serif\" font-size=\"9\""
      << (c.observed ? " font-weight=\"bold\"" : "") << ">" << escape(c.id) << "</text>\n";
  }

  if (!f.path.empty()) {
    o << "<polyline class=\"path\" fill=\"none\" stroke=\"#d02090\" stroke-width=\"2\" points=\"";
    for (const Vec2& p : f.path) o << v.px(p.x) << ',' << v.py(p.y) << ' ';
    o << "\"/>\n";
    const Vec2 end = f.path.back();
    o << "<circle class=\"robot\" cx=\"" << v.px(end.x) << "\" cy=\"" << v.py(end.y)
      << "\" r=\"5\" fill=\"#d02090\"/>\n";
  }
  o << "<text x=\"8\" y=\"16\" font-family=\"sans-serif\" font-size=\"13\">goal: "
    << escape(f.goal);
  if (f.success) o << (*f.success ? " (found)" : " (not found)");
  o << "</text>\n";
  return svg.finish();
}

}  // namespace amap
