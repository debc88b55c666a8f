#include "morseflow/graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace morseflow {

int Graph::lower_end() const {
  if (junction_host < 0) return -1;
  for (int e = 0; e < end_count; e++)
    if (mate[e] == kJunctionMate) return e;
  return -1;
}

std::string combination_string(const CombinationVector& v) {
  std::ostringstream os;
  os << "(" << v.A << "," << v.B << "," << v.S << "," << v.Tp << "," << v.Tm << "," << v.Y << ","
     << v.Z << ")";
  return os.str();
}

std::vector<Site> circle_sites(const Circle& c) {
  std::vector<Site> sites;
  for (int u = 0; u < (int)c.units.size(); u++) {
    const Unit& un = c.units[u];
    switch (un.kind) {
      case UnitKind::Src:
        if (c.boundary) sites.push_back({Site::Open, u, -1, -1});
        for (int s = 0; s < (int)un.ends.size(); s++)
          sites.push_back({Site::End, u, s, un.ends[s]});
        if (c.boundary) sites.push_back({Site::Close, u, -1, -1});
        break;
      case UnitKind::Zero:
        sites.push_back({Site::ZeroV, u, -1, -1});
        break;
      case UnitKind::ASad:
      case UnitKind::ConnStart:
        sites.push_back({Site::End, u, 0, un.ends.at(0)});
        break;
      case UnitKind::Gap:
        break;
    }
  }
  return sites;
}

std::vector<EndPos> end_positions(const Graph& g) {
  std::vector<EndPos> pos(g.end_count);
  for (int c = 0; c < (int)g.circles.size(); c++)
    for (int u = 0; u < (int)g.circles[c].units.size(); u++) {
      const Unit& un = g.circles[c].units[u];
      for (int s = 0; s < (int)un.ends.size(); s++) pos[un.ends[s]] = {c, u, s};
    }
  return pos;
}

// ---------------------------------------------------------------------------
// Dart machinery

namespace {

struct Flat {
  // global site table
  struct GSite {
    int circle, idx;  // idx within the circle's site list
    Site site;
  };
  std::vector<GSite> sites;
  std::vector<int> circle_site_base;   // circle -> first global site id (-1 if none)
  std::vector<int> circle_site_count;

  // arcs: one per (circle, i): from site i to site (i+1) % k
  struct Arc {
    int circle, from, to;              // global site ids
    std::vector<int> gap_units;        // Gap units passed, in forward order
  };
  std::vector<Arc> arcs;
  std::vector<int> arc_out_of_site;    // site -> arc leaving it
  std::vector<int> arc_in_of_site;     // site -> arc arriving at it

  std::vector<int> site_of_end;        // end -> global site (-1 if absent)

  // dart ids: 2*a (forward), 2*a+1 (backward) for arc a;
  // then chord darts: chord_base + e;  then junction outs.
  int chord_base = 0;
  int jout_base = -1;  // toH1, toH1+1 = toH2, +2 = toLower
  int dart_count = 0;

  int h1 = -1, h2 = -1, lower = -1;  // junction ends
};

Flat flatten(const Graph& g) {
  Flat f;
  f.circle_site_base.assign(g.circles.size(), -1);
  f.circle_site_count.assign(g.circles.size(), 0);
  f.site_of_end.assign(g.end_count, -1);

  for (int c = 0; c < (int)g.circles.size(); c++) {
    auto ss = circle_sites(g.circles[c]);
    f.circle_site_base[c] = (int)f.sites.size();
    f.circle_site_count[c] = (int)ss.size();
    for (int i = 0; i < (int)ss.size(); i++) {
      if (ss[i].what == Site::End) f.site_of_end[ss[i].end] = (int)f.sites.size();
      f.sites.push_back({c, i, ss[i]});
    }
  }

  f.arc_out_of_site.assign(f.sites.size(), -1);
  f.arc_in_of_site.assign(f.sites.size(), -1);
  for (int c = 0; c < (int)g.circles.size(); c++) {
    int k = f.circle_site_count[c];
    if (k == 0) continue;
    int base = f.circle_site_base[c];
    for (int i = 0; i < k; i++) {
      int from = base + i, to = base + (i + 1) % k;
      f.arc_out_of_site[from] = (int)f.arcs.size();
      f.arc_in_of_site[to] = (int)f.arcs.size();
      f.arcs.push_back({c, from, to, {}});
    }
  }

  f.chord_base = 2 * (int)f.arcs.size();
  f.dart_count = f.chord_base + g.end_count;
  if (g.has_junction()) {
    f.h1 = g.junction_host;
    f.h2 = g.mate[f.h1];
    f.lower = g.lower_end();
    f.jout_base = f.dart_count;
    f.dart_count += 3;
  }
  return f;
}

// Gap collection above is fiddly for one-site circles; recompute directly.
void fix_gaps(const Graph& g, Flat& f) {
  for (auto& a : f.arcs) a.gap_units.clear();
  for (int c = 0; c < (int)g.circles.size(); c++) {
    int k = f.circle_site_count[c];
    if (k == 0) continue;
    int base = f.circle_site_base[c];
    const auto& units = g.circles[c].units;
    int n = (int)units.size();
    // Walk units in order; remember the arc that will absorb gaps: the arc
    // leaving the last emitted site.
    // Map each unit's first/last site:
    std::vector<int> first_site(n, -1), last_site(n, -1);
    for (int i = 0; i < k; i++) {
      int u = f.sites[base + i].site.unit;
      if (first_site[u] < 0) first_site[u] = i;
      last_site[u] = i;
    }
    for (int u = 0; u < n; u++) {
      if (units[u].kind != UnitKind::Gap) continue;
      // find previous unit with sites
      int prev = -1;
      for (int step = 1; step <= n; step++) {
        int w = ((u - step) % n + n) % n;
        if (first_site[w] >= 0) {
          prev = w;
          break;
        }
      }
      if (prev < 0) continue;  // circle has no sites at all
      int arc = f.arc_out_of_site[base + last_site[prev]];
      f.arcs[arc].gap_units.push_back(u);
    }
    // Keep gap order along each arc consistent with unit order.
    for (auto& a : f.arcs) {
      if (a.circle != c) continue;
      std::sort(a.gap_units.begin(), a.gap_units.end(), [&](int x, int y) {
        int u0 = f.sites[a.from].site.unit;
        auto rel = [&](int u) { return ((u - u0) % n + n) % n; };
        return rel(x) < rel(y);
      });
    }
  }
}

enum class DKind { ArcFwd, ArcBwd, Chord, JToH1, JToH2, JToLower };

struct DartRef {
  DKind kind;
  int idx;  // arc index or end id
};

DartRef decode_dart(const Flat& f, int d) {
  if (d < f.chord_base) return {d % 2 == 0 ? DKind::ArcFwd : DKind::ArcBwd, d / 2};
  if (f.jout_base >= 0 && d >= f.jout_base) {
    int k = d - f.jout_base;
    return {k == 0 ? DKind::JToH1 : (k == 1 ? DKind::JToH2 : DKind::JToLower), 0};
  }
  return {DKind::Chord, d - f.chord_base};
}

int dart_id(const Flat& f, DKind k, int idx) {
  switch (k) {
    case DKind::ArcFwd: return 2 * idx;
    case DKind::ArcBwd: return 2 * idx + 1;
    case DKind::Chord: return f.chord_base + idx;
    case DKind::JToH1: return f.jout_base;
    case DKind::JToH2: return f.jout_base + 1;
    case DKind::JToLower: return f.jout_base + 2;
  }
  return -1;
}

// Face successor: next dart = rotation successor of the reversed dart.
// Rotation at an end-site is (forward out, chord, backward out); at the
// junction it is (toH1, toLower, toH2) when junction_rot == 0, else
// (toH1, toH2, toLower).
int next_dart(const Graph& g, const Flat& f, int d) {
  DartRef r = decode_dart(f, d);
  auto continue_backward = [&](int site) {
    return dart_id(f, DKind::ArcBwd, f.arc_in_of_site[site]);
  };
  switch (r.kind) {
    case DKind::ArcFwd: {
      // arrives at arc.to; forward chains stay forward
      int to = f.arcs[r.idx].to;
      return dart_id(f, DKind::ArcFwd, f.arc_out_of_site[to]);
    }
    case DKind::ArcBwd: {
      int site = f.arcs[r.idx].from;  // backward dart arrives at the arc's from-site
      const Site& s = f.sites[site].site;
      if (s.what == Site::End) return dart_id(f, DKind::Chord, s.end);
      return continue_backward(site);
    }
    case DKind::Chord: {
      int e = r.idx;
      int m = g.mate[e];
      if (m == kJunctionMate) {
        // lower edge arrives at the junction
        return g.junction_rot == 0 ? dart_id(f, DKind::JToH2, 0) : dart_id(f, DKind::JToH1, 0);
      }
      if (g.has_junction() && (e == f.h1 || e == f.h2)) {
        // host half arrives at the junction
        if (e == f.h1)
          return g.junction_rot == 0 ? dart_id(f, DKind::JToLower, 0) : dart_id(f, DKind::JToH2, 0);
        return g.junction_rot == 0 ? dart_id(f, DKind::JToH1, 0) : dart_id(f, DKind::JToLower, 0);
      }
      return continue_backward(f.site_of_end[m]);
    }
    case DKind::JToH1: return continue_backward(f.site_of_end[f.h1]);
    case DKind::JToH2: return continue_backward(f.site_of_end[f.h2]);
    case DKind::JToLower: return continue_backward(f.site_of_end[f.lower]);
  }
  return -1;
}

}  // namespace

FaceTrace trace_faces(const Graph& g) {
  FaceTrace out;
  Flat f = flatten(g);
  fix_gaps(g, f);

  for (int c = 0; c < (int)g.circles.size(); c++)
    if (f.circle_site_count[c] > 0) out.cap_count++;

  std::vector<char> seen(f.dart_count, 0);
  for (int d0 = 0; d0 < f.dart_count; d0++) {
    if (seen[d0]) continue;
    // orbit
    std::vector<int> orbit;
    int d = d0;
    do {
      if (d < 0 || d >= f.dart_count || seen[d]) {
        out.consistent = false;
        break;
      }
      seen[d] = 1;
      orbit.push_back(d);
      d = next_dart(g, f, d);
    } while (d != d0);
    bool cap = true;
    for (int x : orbit)
      if (decode_dart(f, x).kind != DKind::ArcFwd) {
        cap = false;
        break;
      }
    if (cap) continue;

    Face face;
    for (int x : orbit) {
      DartRef r = decode_dart(f, x);
      switch (r.kind) {
        case DKind::ArcFwd:
          break;  // does not occur in interior faces
        case DKind::ArcBwd: {
          const auto& a = f.arcs[r.idx];
          // walking backward passes the arc's gaps in reverse order
          for (int i = (int)a.gap_units.size() - 1; i >= 0; i--)
            face.events.push_back({FaceEvent::GapPass, -1, a.circle, a.gap_units[i]});
          // then arrives at a.from; passing through a zero site is an event
          const Site& s = f.sites[a.from].site;
          if (s.what == Site::ZeroV) {
            face.events.push_back(
                {FaceEvent::ZeroPass, -1, f.sites[a.from].circle, s.unit});
            face.zero_count++;
          }
          break;
        }
        case DKind::Chord:
          face.events.push_back({FaceEvent::Turn, r.idx, -1, -1});
          break;
        case DKind::JToLower:
          face.events.push_back({FaceEvent::LambdaBack, f.lower, -1, -1});
          break;
        case DKind::JToH1:
        case DKind::JToH2: {
          // a pass-through occurred iff the previous dart was the far half
          face.events.push_back({FaceEvent::JGhost, -1, -1, -1});
          break;
        }
      }
    }
    // JToH1/JToH2 reached from the lower edge are exits, not ghost passes;
    // drop the ghost marker when the preceding event is a lower-edge turn.
    for (size_t i = 0; i < face.events.size(); i++) {
      if (face.events[i].kind != FaceEvent::JGhost) continue;
      size_t prev = (i + face.events.size() - 1) % face.events.size();
      if (face.events[prev].kind == FaceEvent::Turn && face.events[prev].end == f.lower)
        face.events.erase(face.events.begin() + i--);
    }
    out.faces.push_back(std::move(face));
  }

  // partition sanity
  for (char s : seen)
    if (!s) out.consistent = false;
  return out;
}

int list_count(const Graph& g) { return (int)g.circles.size(); }

int saddle_count(const Graph& g) {
  int pairs = 0, lambda = 0;
  for (int e = 0; e < g.end_count; e++) {
    if (g.mate[e] == kJunctionMate) lambda++;
    else if (g.mate[e] > e) pairs++;
  }
  return pairs + lambda;
}

int singular_point_count(const Graph& g) {
  int n = 0;
  auto pos = end_positions(g);
  auto kind_of_end = [&](int e) { return g.circles[pos[e].circle].units[pos[e].unit].kind; };
  for (const auto& c : g.circles) {
    if (!c.boundary) {
      n += 1;
      continue;
    }
    n += (int)c.units.size();
  }
  for (int e = 0; e < g.end_count; e++) {
    if (g.mate[e] == kJunctionMate) {
      if (kind_of_end(e) == UnitKind::Src) n += 1;  // SC lower saddle is internal
      n += 1;                                       // the junction saddle
      continue;
    }
    if (g.mate[e] < e) continue;
    UnitKind a = kind_of_end(e), b = kind_of_end(g.mate[e]);
    if (g.has_junction() && (e == g.junction_host || g.mate[e] == g.junction_host)) continue;
    if (a == UnitKind::Src && b == UnitKind::Src) n += 1;  // internal saddle
    else if ((a == UnitKind::Src && b == UnitKind::ConnStart) ||
             (b == UnitKind::Src && a == UnitKind::ConnStart))
      n += 1;  // saddle on a connection cell
  }
  FaceTrace t = trace_faces(g);
  for (const auto& fc : t.faces)
    if (fc.zero_count == 0) n += 1;  // internal sink
  return n;
}

bool literal_euler_ok(const Graph& g, const FaceTrace& t) {
  Flat f = flatten(g);
  int vertices = (int)f.sites.size() + (g.has_junction() ? 1 : 0);
  int darts = f.dart_count;
  if (darts % 2 != 0) {
    // junction adds 3 out-darts plus the lower chord dart: even overall;
    // oddness signals a malformed graph
    return false;
  }
  int edges = darts / 2;
  int faces = (int)t.faces.size() + t.cap_count;
  return vertices - edges + faces == 2;
}

bool connected(const Graph& g) {
  int n = (int)g.circles.size();
  if (n <= 1) return true;
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
  auto unite = [&](int a, int b) { parent[find(a)] = find(b); };

  auto pos = end_positions(g);
  for (int e = 0; e < g.end_count; e++) {
    int m = g.mate[e];
    if (m >= 0 && m > e) unite(pos[e].circle, pos[m].circle);
    if (m == kJunctionMate && g.junction_host >= 0) {
      unite(pos[e].circle, pos[g.junction_host].circle);
      unite(pos[e].circle, pos[g.mate[g.junction_host]].circle);
    }
  }
  int root = find(0);
  for (int i = 1; i < n; i++)
    if (find(i) != root) return false;
  return true;
}

FlowCheck check_flow(const Graph& g) {
  FlowCheck out;
  auto bad = [&](std::string why) {
    out.ok = false;
    out.why = std::move(why);
    return out;
  };

  // structure
  std::vector<int> seen_end(g.end_count, 0);
  for (int c = 0; c < (int)g.circles.size(); c++) {
    const Circle& cc = g.circles[c];
    if (!cc.boundary) {
      if (cc.units.size() != 1 || cc.units[0].kind != UnitKind::Src)
        return bad("internal circle must hold a single source");
    }
    int n = (int)cc.units.size();
    for (int u = 0; u < n; u++) {
      const Unit& un = cc.units[u];
      switch (un.kind) {
        case UnitKind::Src: break;
        case UnitKind::ASad:
        case UnitKind::ConnStart:
          if (un.ends.size() != 1) return bad("saddle unit needs exactly one end");
          break;
        default:
          if (!un.ends.empty()) return bad("sink unit carries ends");
      }
      if (!cc.boundary && un.kind != UnitKind::Src) return bad("non-source unit on internal circle");
      for (int e : un.ends) {
        if (e < 0 || e >= g.end_count) return bad("end id out of range");
        if (seen_end[e]++) return bad("end placed twice");
      }
      if (cc.boundary && n > 1) {
        UnitKind next = cc.units[(u + 1) % n].kind;
        if (source_like(un.kind) == source_like(next)) return bad("boundary alternation violated");
      }
    }
    if (cc.boundary && n == 1 && !cc.units.empty()) {
      // a single unit is its own cyclic neighbor; alternation needs >= 2
      return bad("boundary circle with a single singular point");
    }
  }
  for (int e = 0; e < g.end_count; e++) {
    if (!seen_end[e]) return bad("unplaced end");
    int m = g.mate[e];
    if (m == kJunctionMate) {
      if (!g.has_junction()) return bad("lower edge without junction");
      continue;
    }
    if (m < 0 || m >= g.end_count || m == e || g.mate[m] != e) return bad("mate not involutive");
  }
  if (g.has_junction()) {
    int h = g.junction_host;
    if (h < 0 || h >= g.end_count || g.mate[h] < 0) return bad("junction host invalid");
    if (g.lower_end() < 0) return bad("junction without lower edge");
  }

  if (!connected(g)) return bad("disconnected");
  out.trace = trace_faces(g);
  if (!out.trace.consistent) return bad("inconsistent rotation");
  if (!literal_euler_ok(g, out.trace)) return bad("not genus 0");
  for (const auto& fc : out.trace.faces)
    if (fc.zero_count > 1) return bad("face with two boundary sinks");
  return out;
}

CombinationVector combination_of(const Graph& g, const FaceTrace& t) {
  CombinationVector v;
  auto pos = end_positions(g);
  auto kind_of_end = [&](int e) { return g.circles[pos[e].circle].units[pos[e].unit].kind; };
  for (const auto& c : g.circles) {
    if (!c.boundary) {
      v.A++;
      continue;
    }
    for (const auto& u : c.units) switch (u.kind) {
        case UnitKind::Src: v.B++; break;
        case UnitKind::Zero: v.Z++; break;
        case UnitKind::ASad: v.Tp++; break;
        case UnitKind::Gap: v.Tm++; break;
        case UnitKind::ConnStart: break;
      }
  }
  for (int e = 0; e < g.end_count; e++) {
    int m = g.mate[e];
    if (m > e && kind_of_end(e) == UnitKind::Src && kind_of_end(m) == UnitKind::Src) v.S++;
  }
  for (const auto& fc : t.faces)
    if (fc.zero_count == 0) v.Y++;
  return v;
}

Graph mirrored(const Graph& g) {
  Graph m = g;
  for (auto& c : m.circles) {
    std::reverse(c.units.begin(), c.units.end());
    for (auto& u : c.units) std::reverse(u.ends.begin(), u.ends.end());
  }
  if (m.has_junction()) m.junction_rot ^= 1;
  return m;
}

std::string graph_json(const Graph& g) {
  Flat f = flatten(g);
  fix_gaps(g, f);
  std::ostringstream os;
  int holes = 0;
  for (const auto& c : g.circles)
    if (c.boundary) holes++;
  os << "{\"surface\":{\"holes\":" << holes << "},\"vertices\":[";
  for (size_t i = 0; i < f.sites.size(); i++) {
    const Site& s = f.sites[i].site;
    const char* color = s.what == Site::ZeroV ? "SinkWhite"
                        : s.what == Site::End ? "SaddleEnd"
                                              : "TransitionMark";
    os << (i ? "," : "") << "{\"id\":" << i << ",\"color\":\"" << color << "\"}";
  }
  os << "],\"edges\":[";
  int eid = 0;
  auto dashed = [&](const Flat::Arc& a) {
    const auto& c = g.circles[a.circle];
    if (!c.boundary) return true;
    const Site& from = f.sites[a.from].site;
    const Site& to = f.sites[a.to].site;
    // an arc is dashed iff it stays inside one source span
    if (from.unit != to.unit) return false;
    if (c.units[from.unit].kind != UnitKind::Src) return false;
    return from.what != Site::Close && to.what != Site::Open;
  };
  for (const auto& a : f.arcs) {
    os << (eid ? "," : "") << "{\"id\":" << eid << ",\"color\":\""
       << (dashed(a) ? "NeighborhoodArc" : "BoundaryArc") << "\",\"ends\":[" << a.from << ","
       << a.to << "]}";
    eid++;
  }
  for (int e = 0; e < g.end_count; e++) {
    int m = g.mate[e];
    if (m >= 0 && m < e) continue;
    int to = (m == kJunctionMate) ? -1 : f.site_of_end[m];
    os << (eid ? "," : "") << "{\"id\":" << eid << ",\"color\":\"Separatrix\",\"ends\":["
       << f.site_of_end[e] << "," << to << "]}";
    eid++;
  }
  os << "],\"cycles\":[";
  bool firstc = true;
  for (int c = 0; c < (int)g.circles.size(); c++) {
    if (f.circle_site_count[c] == 0) continue;
    os << (firstc ? "" : ",") << "{\"orientation\":\"+\",\"sequence\":[";
    firstc = false;
    for (int i = 0; i < f.circle_site_count[c]; i++)
      os << (i ? "," : "") << f.circle_site_base[c] + i;
    os << "]}";
  }
  os << "],\"rotation\":{";
  bool firstv = true;
  for (size_t i = 0; i < f.sites.size(); i++) {
    os << (firstv ? "" : ",") << "\"" << i << "\":[";
    firstv = false;
    // outgoing order: forward arc, chord (if any), backward arc
    int out = f.arc_out_of_site[i], in = f.arc_in_of_site[i];
    os << out;
    if (f.sites[i].site.what == Site::End) os << "," << (f.chord_base + f.sites[i].site.end);
    os << "," << in << "]";
  }
  os << "},\"marks\":{}}";
  return os.str();
}

}  // namespace morseflow
