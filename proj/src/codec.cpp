#include "morseflow/codec.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace morseflow {

namespace {

bool connection_prefix(const FlowCode& c) {
  if (!c.prefix) return false;
  BifBase b = c.prefix->base;
  return b == BifBase::SC || b == BifBase::HSC || b == BifBase::BSC;
}

}  // namespace

// ---------------------------------------------------------------------------
// Encoding

EncodeResult encode(const Graph& g_in, Basepoint bp, Orient o, NumberingMode nm) {
  EncodeResult out;
  Graph mirror_store;
  const Graph* gp = &g_in;
  if (o == Orient::Reversed) {
    mirror_store = mirrored(g_in);
    gp = &mirror_store;
    // map the basepoint into mirrored coordinates
    if (bp.what != Basepoint::AtEnd) {
      int n = (int)g_in.circles[bp.circle].units.size();
      bp.unit = n - 1 - bp.unit;
      if (bp.what == Basepoint::AtOpen) bp.what = Basepoint::AtClose;
      else if (bp.what == Basepoint::AtClose) bp.what = Basepoint::AtOpen;
    }
  }
  const Graph& g = *gp;

  // per-circle site lists
  int nc = (int)g.circles.size();
  std::vector<std::vector<Site>> sites(nc);
  for (int c = 0; c < nc; c++) sites[c] = circle_sites(g.circles[c]);
  auto pos = end_positions(g);
  std::vector<std::pair<int, int>> site_of_end(g.end_count, {-1, -1});  // (circle, site idx)
  for (int c = 0; c < nc; c++)
    for (int i = 0; i < (int)sites[c].size(); i++)
      if (sites[c][i].what == Site::End) site_of_end[sites[c][i].end] = {c, i};

  // locate the start site
  int start_circle = -1, start_site = -1;
  if (bp.what == Basepoint::AtEnd) {
    if (bp.end < 0 || bp.end >= g.end_count) {
      out.error = "BasepointNotOnCycle";
      return out;
    }
    std::tie(start_circle, start_site) = site_of_end[bp.end];
  } else {
    start_circle = bp.circle;
    for (int i = 0; i < (int)sites[start_circle].size(); i++) {
      const Site& s = sites[start_circle][i];
      if (s.unit != bp.unit) continue;
      if (bp.what == Basepoint::AtOpen && s.what == Site::Open) start_site = i;
      if (bp.what == Basepoint::AtClose && s.what == Site::Close) start_site = i;
      if (bp.what == Basepoint::AtZero && s.what == Site::ZeroV) start_site = i;
    }
  }
  if (start_circle < 0 || start_site < 0) {
    out.error = "BasepointNotOnCycle";
    return out;
  }

  // edge numbering
  auto edge_key = [&](int e) {
    int m = g.mate[e];
    return m == kJunctionMate ? e : std::min(e, m);
  };
  std::map<int, int> number_of_edge;
  int next_number = 1;
  if (nm == NumberingMode::Connection) {
    int low = g.lower_end();
    if (low < 0 || !g.has_junction()) {
      out.error = "NoConnection";
      return out;
    }
    number_of_edge[edge_key(low)] = 1;
    number_of_edge[edge_key(g.junction_host)] = 2;
    next_number = 3;
  } else if (nm == NumberingMode::BoundaryConn) {
    int conn = -1;
    for (int c = 0; c < nc && conn < 0; c++)
      for (const auto& u : g.circles[c].units)
        if (u.kind == UnitKind::ConnStart && !u.ends.empty()) {
          conn = u.ends[0];
          break;
        }
    if (conn < 0) {
      out.error = "NoConnection";
      return out;
    }
    number_of_edge[edge_key(conn)] = 1;
    next_number = 2;
  }

  out.number_of_end.assign(g.end_count, 0);
  out.emit_of_end.assign(g.end_count, {-1, -1});

  std::vector<char> visited(nc, 0);
  int visited_count = 0;

  auto traverse = [&](int c, int s0) {
    CodeList list{g.circles[c].boundary ? ListKind::Boundary : ListKind::InternalSource, {}};
    int li = (int)out.code.lists.size();
    int k = (int)sites[c].size();
    for (int step = 0; step < k; step++) {
      const Site& s = sites[c][(s0 + step) % k];
      switch (s.what) {
        case Site::Open: list.items.push_back(tok(TokKind::OpenSq)); break;
        case Site::Close: list.items.push_back(tok(TokKind::CloseSq)); break;
        case Site::ZeroV: list.items.push_back(tok(TokKind::Zero)); break;
        case Site::End: {
          int key = edge_key(s.end);
          auto it = number_of_edge.find(key);
          int num;
          if (it == number_of_edge.end()) {
            num = next_number++;
            number_of_edge[key] = num;
          } else {
            num = it->second;
          }
          out.number_of_end[s.end] = num;
          out.emit_of_end[s.end] = {li, (int)list.items.size()};
          list.items.push_back(tok_num(num));
          break;
        }
      }
    }
    out.code.lists.push_back(std::move(list));
    out.circle_of_list.push_back(c);
    visited[c] = 1;
    visited_count++;
  };

  int circles_with_sites = 0;
  for (int c = 0; c < nc; c++)
    if (!sites[c].empty()) circles_with_sites++;

  traverse(start_circle, start_site);
  while (visited_count < circles_with_sites) {
    // smallest-numbered edge from a visited circle to an unvisited one
    int best_end = -1, best_num = 0;
    for (int e = 0; e < g.end_count; e++) {
      int m = g.mate[e];
      if (m < 0) continue;
      if (!visited[site_of_end[e].first]) continue;
      if (visited[site_of_end[m].first]) continue;
      int num = out.number_of_end[e];
      if (num == 0) continue;
      if (best_end < 0 || num < best_num) {
        best_end = m;
        best_num = num;
      }
    }
    if (best_end < 0 && g.has_junction()) {
      // hop through the junction when the T separates the circles
      int low = g.lower_end();
      int h1 = g.junction_host, h2 = g.mate[g.junction_host];
      if (low >= 0 && visited[site_of_end[low].first]) {
        int target = g.junction_rot == 0 ? h2 : h1;
        if (!visited[site_of_end[target].first]) best_end = target;
        else if (!visited[site_of_end[g.mate[target]].first]) best_end = g.mate[target];
      } else if (low >= 0 && (visited[site_of_end[h1].first] || visited[site_of_end[h2].first])) {
        if (!visited[site_of_end[low].first]) best_end = low;
      }
    }
    if (best_end < 0) {
      out.error = "disconnected graph";
      return out;
    }
    auto [c, si] = site_of_end[best_end];
    traverse(c, si);
  }

  fix_comma_mode(out.code);
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Cycle algorithm (independent of the graph machinery)

CyclesResult cycles_of_code(const FlowCode& code) {
  CyclesResult out;
  // occurrences of each number
  std::map<int, std::vector<std::pair<int, int>>> occ;
  for (int li = 0; li < (int)code.lists.size(); li++) {
    const auto& items = code.lists[li].items;
    for (int i = 0; i < (int)items.size(); i++)
      if (items[i].kind == TokKind::Num) occ[items[i].num].push_back({li, i});
  }
  for (const auto& [n, v] : occ)
    if (v.size() != 2) {
      out.error = "NumberCountViolation: " + std::to_string(n);
      return out;
    }
  auto twin = [&](std::pair<int, int> p) {
    const auto& v = occ[code.lists[p.first].items[p.second].num];
    return v[0] == p ? v[1] : v[0];
  };

  std::set<std::pair<int, int>> seen;
  for (const auto& [n, v] : occ) {
    for (const auto& start : v) {
      if (seen.count(start)) continue;
      CyclesResult::Cycle cyc;
      std::pair<int, int> cur = start;
      do {
        seen.insert(cur);
        cyc.members.push_back(cur);
        // scan forward (cyclically) to the next number, collecting zeros
        const auto& items = code.lists[cur.first].items;
        int k = (int)items.size();
        int j = cur.second;
        std::pair<int, int> next{-1, -1};
        for (int step = 1; step <= k; step++) {
          const Token& t = items[(j + step) % k];
          if (t.kind == TokKind::Zero) {
            cyc.zeros++;
            cyc.content.push_back(0);
          } else if (t.kind == TokKind::Num) {
            next = {cur.first, (j + step) % k};
            break;
          }
        }
        cyc.content.push_back(code.lists[next.first].items[next.second].num);
        cur = twin(next);
      } while (cur != start);
      out.cycles.push_back(std::move(cyc));
    }
  }

  // lists without numbers each bound one cell holding their zeros
  for (int li = 0; li < (int)code.lists.size(); li++) {
    const auto& items = code.lists[li].items;
    bool has_num = false, has_unit = false;
    int zeros = 0;
    for (const auto& t : items) {
      if (t.kind == TokKind::Num) has_num = true;
      if (t.kind == TokKind::OpenSq || t.kind == TokKind::Zero) has_unit = true;
      if (t.kind == TokKind::Zero) zeros++;
    }
    if (!has_num && has_unit) {
      CyclesResult::Cycle cyc;
      cyc.zeros = zeros;
      for (int z = 0; z < zeros; z++) cyc.content.push_back(0);
      out.cycles.push_back(std::move(cyc));
    }
  }
  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Raw decoding (token level -> circles/units)

DecodeResult decode_raw(const FlowCode& code) {
  DecodeResult out;
  Graph& g = out.g;
  bool conn = connection_prefix(code);
  bool bsc = conn && code.prefix->base == BifBase::BSC;
  bool tkind = conn && !bsc;  // SC / HSC: number 1 is the lower edge

  // ends are created per number occurrence; pair them afterwards
  std::map<int, std::vector<int>> ends_of_num;
  int bsc_start_end = -1;

  for (int li = 0; li < (int)code.lists.size(); li++) {
    const CodeList& l = code.lists[li];
    Circle circle;
    circle.boundary = (l.kind == ListKind::Boundary);
    int n = (int)l.items.size();

    // allocate an end per number occurrence, in written order (the very
    // first number of a BSC code is the connection's start)
    std::map<int, int> end_at_item;
    for (int i = 0; i < n; i++) {
      if (l.items[i].kind != TokKind::Num) continue;
      int e = g.end_count++;
      g.mate.push_back(-1);
      end_at_item[i] = e;
      ends_of_num[l.items[i].num].push_back(e);
      if (bsc && li == 0 && bsc_start_end < 0 && l.items[i].num == 1) bsc_start_end = e;
    }

    if (!circle.boundary) {
      Unit u{UnitKind::Src, {}};
      for (auto& [i, e] : end_at_item) u.ends.push_back(e);
      circle.units.push_back(std::move(u));
      g.circles.push_back(std::move(circle));
      continue;
    }

    // boundary list: rotate to the first '[' so source spans do not wrap
    int start = 0;
    for (int i = 0; i < n; i++)
      if (l.items[i].kind == TokKind::OpenSq) {
        start = i;
        break;
      }
    bool in_sub = false;
    for (int step = 0; step < n; step++) {
      int i = (start + step) % n;
      const Token& t = l.items[i];
      switch (t.kind) {
        case TokKind::OpenSq:
          circle.units.push_back({UnitKind::Src, {}});
          in_sub = true;
          break;
        case TokKind::CloseSq:
          in_sub = false;
          break;
        case TokKind::Zero:
          circle.units.push_back({UnitKind::Zero, {}});
          break;
        case TokKind::Num: {
          int e = end_at_item[i];
          if (in_sub) {
            circle.units.back().ends.push_back(e);
          } else {
            UnitKind k = (e == bsc_start_end) ? UnitKind::ConnStart : UnitKind::ASad;
            circle.units.push_back({k, {e}});
          }
          break;
        }
        default:
          break;  // highlight parens carry no structure
      }
    }
    g.circles.push_back(std::move(circle));
  }

  // pair the ends
  for (auto& [n, v] : ends_of_num) {
    if (tkind && n == 1) {
      if (v.size() != 1) {
        out.error = "connection number 1 must occur once";
        return out;
      }
      g.mate[v[0]] = kJunctionMate;
      continue;
    }
    if (v.size() != 2) {
      out.error = "number " + std::to_string(n) + " occurs " + std::to_string(v.size()) + " times";
      return out;
    }
    g.mate[v[0]] = v[1];
    g.mate[v[1]] = v[0];
  }
  if (tkind) {
    auto it = ends_of_num.find(2);
    if (it == ends_of_num.end()) {
      out.error = "connection code lacks a host edge";
      return out;
    }
    g.junction_host = it->second[0];
    g.junction_rot = 0;
  }

  // insert Gap units between adjacent source-like units
  for (auto& c : g.circles) {
    if (!c.boundary || c.units.empty()) continue;
    std::vector<Unit> with_gaps;
    int n = (int)c.units.size();
    for (int i = 0; i < n; i++) {
      with_gaps.push_back(c.units[i]);
      const Unit& next = c.units[(i + 1) % n];
      if (source_like(c.units[i].kind) && source_like(next.kind))
        with_gaps.push_back({UnitKind::Gap, {}});
    }
    c.units = std::move(with_gaps);
  }

  out.ok = true;
  return out;
}

// ---------------------------------------------------------------------------
// Semantic validation

SemReport validate_semantics(const FlowCode& code) {
  SemReport rep;
  auto add = [&](const char* rule, std::string detail) {
    rep.findings.push_back({rule, std::move(detail)});
  };

  bool conn = connection_prefix(code);
  bool bsc = conn && code.prefix->base == BifBase::BSC;
  bool tkind = conn && !bsc;

  std::map<int, int> count;
  std::map<int, int> src_count;  // occurrences inside source regions
  std::map<int, int> thick_count;
  for (const auto& l : code.lists) {
    bool internal = l.kind == ListKind::InternalSource;
    // cyclic bracket regions
    int n = (int)l.items.size();
    std::vector<bool> in_region(n, internal);
    if (!internal) {
      int first_open = -1;
      for (int i = 0; i < n; i++)
        if (l.items[i].kind == TokKind::OpenSq) {
          first_open = i;
          break;
        }
      if (first_open >= 0) {
        bool inside = false;
        for (int s = 0; s < n; s++) {
          int i = (first_open + s) % n;
          if (l.items[i].kind == TokKind::OpenSq) inside = true;
          else if (l.items[i].kind == TokKind::CloseSq) inside = false;
          else in_region[i] = inside;
        }
      }
    }
    for (int i = 0; i < n; i++) {
      if (l.items[i].kind != TokKind::Num) continue;
      int v = l.items[i].num;
      count[v]++;
      if (in_region[i]) src_count[v]++;
      else thick_count[v]++;
    }
  }

  for (const auto& [v, c] : count) {
    int want = 2;
    if (tkind && v == 1) want = 1;
    if (c != want)
      add("P1", "number " + std::to_string(v) + " occurs " + std::to_string(c) + " times");
    if (v != 1 || !conn) {
      if (src_count[v] == 0 && count.count(v))
        add("SRC", "number " + std::to_string(v) + " lies in no source list");
    }
  }
  if (tkind) {
    if (!count.count(1)) add("P1", "connection codes require number 1");
    if (!count.count(2)) add("P1", "connection codes require the host edge 2");
    if (code.prefix->base == BifBase::SC && thick_count[1] > 0)
      add("SRC", "SC lower edge must start at a source");
    if (code.prefix->base == BifBase::HSC && src_count[1] > 0)
      add("SRC", "HSC lower edge must start on the boundary");
  }
  if (bsc) {
    if (count[1] != 2 || thick_count[1] != 2)
      add("P1", "BSC connection ends must both lie on the boundary");
  }

  // connectivity of the list graph via shared numbers
  int nl = (int)code.lists.size();
  if (nl > 1) {
    std::vector<int> parent(nl);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
      return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    std::map<int, int> first_list;
    for (int li = 0; li < nl; li++)
      for (const auto& t : code.lists[li].items)
        if (t.kind == TokKind::Num) {
          auto it = first_list.find(t.num);
          if (it == first_list.end()) first_list[t.num] = li;
          else parent[find(li)] = find(it->second);
        }
    int root = find(0);
    for (int li = 1; li < nl; li++)
      if (find(li) != root) {
        add("P3", "lists are not connected by shared numbers");
        break;
      }
  }

  rep.V = nl;
  rep.E = 0;
  for (const auto& [v, c] : count) {
    (void)v;
    rep.E++;
  }

  if (!conn) {
    bool p1_ok = true;
    for (const auto& f : rep.findings)
      if (f.rule == "P1") p1_ok = false;
    if (p1_ok) {
      CyclesResult cyc = cycles_of_code(code);
      if (cyc.ok) {
        rep.F = (int)cyc.cycles.size();
        for (const auto& c : cyc.cycles)
          if (c.zeros > 1) add("P2", "a cycle holds " + std::to_string(c.zeros) + " boundary sinks");
        if (rep.V - rep.E + rep.F != 2)
          add("P4", "V-E+F = " + std::to_string(rep.V - rep.E + rep.F));
      } else {
        add("P1", cyc.error);
      }
    }
  } else {
    // connection codes: validate through the graph
    bool p1_ok = true;
    for (const auto& f : rep.findings)
      if (f.rule == "P1") p1_ok = false;
    if (p1_ok) {
      DecodeResult raw = decode_raw(code);
      if (!raw.ok) {
        add("P1", raw.error);
      } else {
        FlowCheck chk = check_flow(raw.g);
        if (!chk.ok) {
          // try the other junction side before giving up
          bool saved = false;
          if (raw.g.has_junction()) {
            raw.g.junction_rot ^= 1;
            FlowCheck chk2 = check_flow(raw.g);
            if (chk2.ok) {
              chk = std::move(chk2);
              saved = true;
            }
          }
          if (!saved) {
            add("P4", chk.why);
            return rep;
          }
        }
        rep.F = (int)chk.trace.faces.size();
        rep.E = saddle_count(raw.g);
        for (const auto& fc : chk.trace.faces)
          if (fc.zero_count > 1) add("P2", "a face holds two boundary sinks");
        if (rep.V - rep.E + rep.F != 2)
          add("P4", "V-E+F = " + std::to_string(rep.V - rep.E + rep.F));
      }
    }
  }
  return rep;
}

DecodeResult decode(const FlowCode& code) {
  DecodeResult out;
  out.report = validate_semantics(code);
  if (!out.report.ok()) {
    out.error = "SemanticInvalid";
    return out;
  }
  out = decode_raw(code);
  out.report = SemReport{};
  if (!out.ok) return out;
  // pick the junction side that yields a valid flow
  FlowCheck chk = check_flow(out.g);
  if (!chk.ok && out.g.has_junction()) {
    out.g.junction_rot ^= 1;
    chk = check_flow(out.g);
  }
  if (!chk.ok) {
    out.ok = false;
    out.error = "SemanticInvalid: " + chk.why;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Canonicalization

std::vector<Basepoint> admissible_basepoints(const Graph& g) {
  std::vector<Basepoint> bps;
  for (int c = 0; c < (int)g.circles.size(); c++) {
    const Circle& cc = g.circles[c];
    bool any = false;
    for (int u = 0; u < (int)cc.units.size(); u++) {
      const Unit& un = cc.units[u];
      if (un.kind == UnitKind::Src && cc.boundary) {
        bps.push_back({Basepoint::AtOpen, -1, c, u});
        bps.push_back({Basepoint::AtClose, -1, c, u});
        any = true;
      }
      for (int e : un.ends) {
        bps.push_back({Basepoint::AtEnd, e, c, u});
        any = true;
      }
    }
    if (!any) {
      for (int u = 0; u < (int)cc.units.size(); u++)
        if (cc.units[u].kind == UnitKind::Zero) bps.push_back({Basepoint::AtZero, -1, c, u});
    }
  }
  return bps;
}

CanonicalResult canonical_code(const Graph& g, CanonMode mode) {
  CanonicalResult best;
  bool have = false;
  auto consider = [&](Basepoint bp, Orient o) {
    EncodeResult enc = encode(g, bp, o);
    if (!enc.ok) return;
    if (!have || code_less(enc.code, best.enc.code)) {
      best = {std::move(enc), bp, o};
      have = true;
    }
  };
  for (const Basepoint& bp : admissible_basepoints(g)) {
    consider(bp, Orient::AsStored);
    if (mode == CanonMode::UpToReflection) consider(bp, Orient::Reversed);
  }
  if (!have) best.enc.error = "no admissible basepoint";
  return best;
}

std::string canonical_string(const Graph& g, CanonMode mode) {
  CanonicalResult r = canonical_code(g, mode);
  return r.enc.ok ? serialize_code(r.enc.code) : std::string();
}

FlowCode symmetric_code(const FlowCode& code) {
  DecodeResult d = decode(code);
  if (!d.ok) return FlowCode{};
  CanonicalResult best;
  bool have = false;
  for (const Basepoint& bp : admissible_basepoints(d.g)) {
    EncodeResult enc = encode(d.g, bp, Orient::Reversed);
    if (!enc.ok) continue;
    if (!have || code_less(enc.code, best.enc.code)) {
      best = {std::move(enc), bp, Orient::Reversed};
      have = true;
    }
  }
  FlowCode out = best.enc.code;
  out.prefix = code.prefix;
  return out;
}

}  // namespace morseflow
