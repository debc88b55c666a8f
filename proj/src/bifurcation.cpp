#include "morseflow/bifurcation.hpp"

#include <algorithm>
#include <map>

#include "morseflow/reversal.hpp"

namespace morseflow {

namespace {

KindTag with_form(BifBase b, int sign, char form) { return KindTag{b, sign, form}; }

std::string key_single(KindTag k, FlowCode c) {
  c.prefix = k;
  fix_comma_mode(c);
  return serialize_code(c);
}

std::string key_pair(KindTag k, FlowCode a, FlowCode b) {
  std::string sa = key_single(k, std::move(a));
  std::string sb = key_single(k, std::move(b));
  if (sb < sa) std::swap(sa, sb);
  return sa + "||" + sb;
}

BifCode fail(std::string why) {
  BifCode out;
  out.error = std::move(why);
  return out;
}

int nu(const Circle& c, int u) { return (u + 1) % (int)c.units.size(); }
int pu(const Circle& c, int u) { return (u - 1 + (int)c.units.size()) % (int)c.units.size(); }

// wraps items [i, j) of list li in a highlight group (Blank when i == j)
void add_parens(FlowCode& code, int li, int i, int j) {
  auto& items = code.lists[li].items;
  if (i == j) {
    items.insert(items.begin() + i, {tok(TokKind::OpenPar), tok(TokKind::Blank), tok(TokKind::ClosePar)});
    return;
  }
  items.insert(items.begin() + j, tok(TokKind::ClosePar));
  items.insert(items.begin() + i, tok(TokKind::OpenPar));
}

BifCode pair_code(const Graph& g, Basepoint bp_f, Basepoint bp_r, KindTag k,
                  NumberingMode nm = NumberingMode::Plain) {
  EncodeResult f = encode(g, bp_f, Orient::AsStored, nm);
  EncodeResult r = encode(g, bp_r, Orient::Reversed, nm);
  if (!f.ok) return fail(f.error);
  if (!r.ok) return fail(r.error);
  BifCode out;
  out.ok = true;
  out.primary = f.code;
  out.primary.prefix = k;
  fix_comma_mode(out.primary);
  out.key = key_pair(k, f.code, r.code);
  return out;
}

BifCode single_code(const Graph& g, Basepoint bp, Orient o, KindTag k) {
  EncodeResult e = encode(g, bp, o);
  if (!e.ok) return fail(e.error);
  BifCode out;
  out.ok = true;
  out.primary = e.code;
  out.primary.prefix = k;
  fix_comma_mode(out.primary);
  out.key = key_single(k, e.code);
  return out;
}

struct EndInfo {
  std::vector<EndPos> pos;
  const Graph* g;
  UnitKind kind(int e) const { return g->circles[pos[e].circle].units[pos[e].unit].kind; }
  bool internal(int e) const { return !g->circles[pos[e].circle].boundary; }
};

EndInfo info(const Graph& g) { return {end_positions(g), &g}; }

}  // namespace

// ---------------------------------------------------------------------------
// A-codes

static BifCode sn_plus_a(const Graph& g, const BifMark& m) {
  EndInfo ei = info(g);
  if (m.end < 0 || m.end >= g.end_count) return fail("IllegalMark: no such end");
  if (ei.internal(m.end) == false) return fail("IllegalMark: SN source must be internal");
  int mm = g.mate[m.end];
  if (mm < 0) return fail("IllegalMark: connection edge");
  if (ei.kind(mm) != UnitKind::Src) return fail("IllegalMark: the saddle is not internal");
  if (ei.pos[mm].circle == ei.pos[m.end].circle)
    return fail("IllegalMark: collapsing would close a loop");
  Basepoint bp{Basepoint::AtEnd, m.end, -1, -1};
  return pair_code(g, bp, bp, with_form(BifBase::SN, +1, 'A'));
}

static BifCode hs_plus_a(const Graph& g, const BifMark& m) {
  EndInfo ei = info(g);
  const Circle& c = g.circles.at(m.circle);
  const Unit& u = c.units.at(m.unit);
  if (!c.boundary || u.kind != UnitKind::Src) return fail("IllegalMark: not a boundary source");
  if (m.index < 0 || m.index >= (int)u.ends.size()) return fail("IllegalMark: no such separatrix");
  int e = u.ends[m.index];
  int mm = g.mate[e];
  if (mm < 0 || ei.kind(mm) != UnitKind::Src)
    return fail("IllegalMark: the separatrix must enter an internal saddle");
  if (ei.pos[mm].circle == m.circle && ei.pos[mm].unit == m.unit)
    return fail("IllegalMark: collapsing would close a loop");
  Basepoint bp{Basepoint::AtEnd, e, -1, -1};
  return pair_code(g, bp, bp, with_form(BifBase::HS, +1, 'A'));
}

static BifCode hn_plus_a(const Graph& g, const BifMark& m) {
  EndInfo ei = info(g);
  const Circle& c = g.circles.at(m.circle);
  const Unit& u = c.units.at(m.unit);
  if (!c.boundary || u.kind != UnitKind::ASad) return fail("IllegalMark: not an a-saddle");
  int e = u.ends.at(0);
  int mm = g.mate[e];
  if (mm < 0 || !ei.internal(mm))
    return fail("IllegalMark: the entering separatrix must leave an internal source");
  Basepoint bp{Basepoint::AtEnd, e, -1, -1};
  return pair_code(g, bp, bp, with_form(BifBase::HN, +1, 'A'));
}

static BifCode bsn_plus_a(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  if ((int)c.units.size() < 4)
    return fail("IllegalMark: the component must hold at least 4 singular points");
  const Unit& gap = c.units.at(m.unit);
  const Unit& src = c.units.at(m.unit2);
  if (gap.kind != UnitKind::Gap || src.kind != UnitKind::Src)
    return fail("IllegalMark: expected a b-saddle next to a source");
  KindTag k = with_form(BifBase::BSN, +1, 'A');
  if (m.unit2 == nu(c, m.unit))
    return single_code(g, {Basepoint::AtOpen, -1, m.circle, m.unit2}, Orient::AsStored, k);
  if (m.unit2 == pu(c, m.unit))
    return single_code(g, {Basepoint::AtClose, -1, m.circle, m.unit2}, Orient::Reversed, k);
  return fail("IllegalMark: units are not adjacent");
}

static BifCode bds_a(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  if ((int)c.units.size() < 4)
    return fail("IllegalMark: the component must hold at least 4 singular points");
  const Unit& asad = c.units.at(m.unit);
  const Unit& gap = c.units.at(m.unit2);
  if (asad.kind != UnitKind::ASad || gap.kind != UnitKind::Gap)
    return fail("IllegalMark: expected a saddle next to a b-saddle");
  KindTag k = with_form(BifBase::BDS, 0, 'A');
  Basepoint bp{Basepoint::AtEnd, asad.ends.at(0), -1, -1};
  if (m.unit2 == nu(c, m.unit)) return single_code(g, bp, Orient::AsStored, k);
  if (m.unit2 == pu(c, m.unit)) return single_code(g, bp, Orient::Reversed, k);
  return fail("IllegalMark: units are not adjacent");
}

// ---------------------------------------------------------------------------
// B-codes

static BifCode hs_plus_b(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  const Unit& u = c.units.at(m.unit);
  if (!c.boundary || u.kind != UnitKind::ASad) return fail("IllegalMark: not an a-saddle");
  Basepoint bp{Basepoint::AtEnd, u.ends.at(0), -1, -1};
  return pair_code(g, bp, bp, with_form(BifBase::HS, +1, 'B'));
}

static BifCode hn_plus_b(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  const Unit& u = c.units.at(m.unit);
  if (!c.boundary || u.kind != UnitKind::Src) return fail("IllegalMark: not a boundary source");
  Basepoint bpf{Basepoint::AtOpen, -1, m.circle, m.unit};
  Basepoint bpr{Basepoint::AtClose, -1, m.circle, m.unit};
  return pair_code(g, bpf, bpr, with_form(BifBase::HN, +1, 'B'));
}

static EncodeResult sn_b_encode(const Graph& g, const BifMark& m, Orient o) {
  const Circle& c = g.circles.at(m.circle);
  int ui = c.boundary ? m.unit : 0;
  const Unit& u = c.units.at(ui);
  int deg = (int)u.ends.size();
  int p = m.index, r = m.run;
  Basepoint bp;
  if (o == Orient::AsStored) {
    if (r > 0) {
      bp = {Basepoint::AtEnd, u.ends[p % std::max(deg, 1)], -1, -1};
    } else if (!c.boundary) {
      bp = {Basepoint::AtEnd, u.ends[p % std::max(deg, 1)], -1, -1};
    } else if (p < deg) {
      bp = {Basepoint::AtEnd, u.ends[p], -1, -1};
    } else {
      bp = {Basepoint::AtClose, -1, m.circle, ui};
    }
  } else {
    if (r > 0) {
      bp = {Basepoint::AtEnd, u.ends[(p + r - 1) % std::max(deg, 1)], -1, -1};
    } else if (!c.boundary) {
      bp = {Basepoint::AtEnd, u.ends[((p - 1) % deg + deg) % std::max(deg, 1)], -1, -1};
    } else if (p >= 1) {
      bp = {Basepoint::AtEnd, u.ends[p - 1], -1, -1};
    } else {
      bp = {Basepoint::AtOpen, -1, m.circle, ui};
    }
  }
  EncodeResult e = encode(g, bp, o);
  if (e.ok) add_parens(e.code, 0, 0, r);
  return e;
}

static BifCode sn_plus_b(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  int ui = c.boundary ? m.unit : 0;
  const Unit& u = c.units.at(ui);
  if (u.kind != UnitKind::Src) return fail("IllegalMark: not a source");
  int deg = (int)u.ends.size();
  if (m.run < 0 || m.run > deg) return fail("IllegalMark: run too long");
  if (c.boundary && m.index + m.run > deg) return fail("IllegalMark: run leaves the arc");
  if (deg == 0 && !c.boundary) return fail("IllegalMark: bare internal source");
  EncodeResult f = sn_b_encode(g, m, Orient::AsStored);
  EncodeResult r = sn_b_encode(g, m, Orient::Reversed);
  if (!f.ok) return fail(f.error);
  if (!r.ok) return fail(r.error);
  KindTag k = with_form(BifBase::SN, +1, 'B');
  BifCode out;
  out.ok = true;
  out.primary = f.code;
  out.primary.prefix = k;
  fix_comma_mode(out.primary);
  out.key = key_pair(k, f.code, r.code);
  return out;
}

static BifCode bsn_plus_b(const Graph& g, const BifMark& m) {
  const Circle& c = g.circles.at(m.circle);
  const Unit& u = c.units.at(m.unit);
  if (!c.boundary || u.kind != UnitKind::Src) return fail("IllegalMark: not a boundary source");
  int deg = (int)u.ends.size();
  KindTag k = with_form(BifBase::BSN, +1, 'B');
  if (!m.gamma) {
    if (m.run > deg) return fail("IllegalMark: run too long");
    EncodeResult e;
    if (m.side == 0) e = encode(g, {Basepoint::AtOpen, -1, m.circle, m.unit}, Orient::AsStored);
    else e = encode(g, {Basepoint::AtClose, -1, m.circle, m.unit}, Orient::Reversed);
    if (!e.ok) return fail(e.error);
    add_parens(e.code, 0, 1, 1 + m.run);  // right after the opening bracket
    BifCode out;
    out.ok = true;
    out.primary = e.code;
    out.primary.prefix = k;
    fix_comma_mode(out.primary);
    out.key = key_single(k, e.code);
    return out;
  }
  // gamma-leading group: the run sits next to the twin slot
  int p = m.index;
  if (p < 0 || p >= deg) return fail("IllegalMark: no leading separatrix");
  if (m.side == 1 && p + m.run >= deg) return fail("IllegalMark: run leaves the arc");
  if (m.side == 0 && p - m.run < 0) return fail("IllegalMark: run leaves the arc");
  EncodeResult e;
  if (m.side == 1) e = encode(g, {Basepoint::AtEnd, u.ends[p], -1, -1}, Orient::AsStored);
  else e = encode(g, {Basepoint::AtEnd, u.ends[p], -1, -1}, Orient::Reversed);
  if (!e.ok) return fail(e.error);
  add_parens(e.code, 0, 0, 1 + m.run);
  BifCode out;
  out.ok = true;
  out.primary = e.code;
  out.primary.prefix = k;
  fix_comma_mode(out.primary);
  out.key = key_single(k, e.code);
  return out;
}

static BifCode bds_b(const Graph& g, const BifMark& m) {
  EndInfo ei = info(g);
  if (m.end < 0 || m.end >= g.end_count) return fail("IllegalMark: no cell separatrix");
  int mm = g.mate[m.end];
  if (mm < 0 || ei.kind(m.end) != UnitKind::Src || ei.kind(mm) != UnitKind::Src)
    return fail("IllegalMark: the marked saddle must be internal");
  const Circle& c = g.circles.at(m.circle);
  if (!c.boundary) return fail("IllegalMark: the trajectory must lie on the boundary");
  // the arc from unit to its successor; its source-like endpoint starts the code
  int ua = m.unit, ub = nu(c, ua);
  bool a_src = source_like(c.units[ua].kind);
  bool b_src = source_like(c.units[ub].kind);
  if (a_src == b_src) return fail("IllegalMark: not a boundary trajectory");
  KindTag k = with_form(BifBase::BDS, 0, 'B');
  EncodeResult e;
  int su = a_src ? ua : ub;
  const Unit& start = c.units[su];
  // traverse against the trajectory's flow: away from the arc
  Orient o = a_src ? Orient::Reversed : Orient::AsStored;
  Basepoint bp;
  if (start.kind == UnitKind::ASad) bp = {Basepoint::AtEnd, start.ends.at(0), -1, -1};
  else if (o == Orient::AsStored) bp = {Basepoint::AtOpen, -1, m.circle, su};
  else bp = {Basepoint::AtClose, -1, m.circle, su};
  e = encode(g, bp, o);
  if (!e.ok) return fail(e.error);
  auto [li, ii] = e.emit_of_end[m.end];
  if (li < 0) return fail("IllegalMark: separatrix not on the traversal");
  add_parens(e.code, li, ii, ii + 1);
  BifCode out;
  out.ok = true;
  out.primary = e.code;
  out.primary.prefix = k;
  fix_comma_mode(out.primary);
  out.key = key_single(k, e.code);
  return out;
}

// ---------------------------------------------------------------------------
// Connection codes

static int find_conn_start(const Graph& g) {
  for (int c = 0; c < (int)g.circles.size(); c++)
    for (const auto& u : g.circles[c].units)
      if (u.kind == UnitKind::ConnStart && !u.ends.empty()) return u.ends[0];
  return -1;
}

BifCode saddle_connection_code(const Graph& g, KindTag kind) {
  EndInfo ei = info(g);
  if (kind.base == BifBase::SC || (kind.base == BifBase::HSC && kind.sign > 0)) {
    if (!g.has_junction()) return fail("NoConnection");
    int low = g.lower_end();
    bool base_on_boundary = ei.kind(low) == UnitKind::ASad;
    if (kind.base == BifBase::SC && base_on_boundary) return fail("NoConnection: this is HSC");
    if (kind.base == BifBase::HSC && !base_on_boundary) return fail("NoConnection: this is SC");
    Basepoint bp{Basepoint::AtEnd, low, -1, -1};
    return pair_code(g, bp, bp, kind, NumberingMode::Connection);
  }
  if (kind.base == BifBase::HSC) {
    // minus sign: reverse into the plus structure
    ReverseResult r = reverse_flow(g);
    if (!r.ok) return fail(r.error);
    if (!r.g.has_junction()) return fail("NoConnection");
    BifCode plus = saddle_connection_code(r.g, with_form(BifBase::HSC, +1, 0));
    if (!plus.ok) return plus;
    KindTag mk = with_form(BifBase::HSC, -1, 0);
    plus.primary.prefix = mk;
    // rebuild the key under the minus prefix
    std::string a = plus.key.substr(0, plus.key.find("||"));
    std::string b = plus.key.substr(plus.key.find("||") + 2);
    auto flip = [&](std::string s) {
      return "HSC-" + s.substr(std::string("HSC+").size());
    };
    a = flip(a);
    b = flip(b);
    if (b < a) std::swap(a, b);
    plus.key = a + "||" + b;
    return plus;
  }
  if (kind.base == BifBase::BSC) {
    int cs = find_conn_start(g);
    if (cs < 0) return fail("NoConnection");
    Basepoint bp{Basepoint::AtEnd, cs, -1, -1};
    return pair_code(g, bp, bp, kind, NumberingMode::BoundaryConn);
  }
  return fail("NoConnection: unsupported kind");
}

// ---------------------------------------------------------------------------
// Reversal route for the minus kinds

BifCode minus_code_via_reversal(const Graph& g, const BifMark& m, KindTag kind, bool b_form) {
  ReverseResult rev = reverse_flow(g);
  if (!rev.ok) return fail(rev.error);
  BifMark t = m;  // transported mark
  switch (kind.base) {
    case BifBase::SN: {
      if (!b_form) {
        if (m.end < 0 || m.end >= g.end_count || rev.slot_of_turn[m.end] < 0)
          return fail("IllegalMark: no unstable sector there");
        t.end = rev.slot_of_turn[m.end];
        auto ei = info(rev.g);
        if (ei.internal(t.end) == false)
          return fail("IllegalMark: the unstable separatrix must reach an internal sink");
        t.circle = ei.pos[t.end].circle;
      }
      break;
    }
    case BifBase::BSN:
      // units keep their positions under reversal
      break;
    case BifBase::HS:
      t = BifMark{};
      t.circle = m.circle;
      t.unit = m.unit;
      t.index = m.index;
      break;
    case BifBase::HN:
      break;
    default:
      return fail("IllegalMark: not a minus kind");
  }
  KindTag plus = kind;
  plus.sign = +1;
  BifCode out;
  if (b_form) {
    plus.form = 'B';
    out = make_b_code(rev.g, t, plus);
  } else {
    plus.form = 'A';
    out = make_a_code(rev.g, t, plus);
  }
  if (!out.ok) return out;
  KindTag mk = kind;
  mk.sign = -1;
  mk.form = b_form ? 'B' : 'A';
  out.primary.prefix = mk;
  std::string from = kind_name(plus), to = kind_name(mk);
  std::string key = out.key;
  std::string fixed;
  size_t pos = 0;
  while (true) {
    size_t at = key.find(from, pos);
    if (at == std::string::npos) {
      fixed += key.substr(pos);
      break;
    }
    fixed += key.substr(pos, at - pos) + to;
    pos = at + from.size();
  }
  // keep the pair sorted under the new prefix
  size_t sep = fixed.find("||");
  if (sep != std::string::npos) {
    std::string a = fixed.substr(0, sep), b = fixed.substr(sep + 2);
    if (b < a) std::swap(a, b);
    fixed = a + "||" + b;
  }
  out.key = fixed;
  return out;
}

// ---------------------------------------------------------------------------
// Dispatch

BifCode make_a_code(const Graph& g, const BifMark& m, KindTag kind) {
  if (kind.sign < 0)
    return minus_code_via_reversal(g, m, kind, false);
  switch (kind.base) {
    case BifBase::SN: return sn_plus_a(g, m);
    case BifBase::HS: return hs_plus_a(g, m);
    case BifBase::HN: return hn_plus_a(g, m);
    case BifBase::BSN: return bsn_plus_a(g, m);
    case BifBase::BDS: return bds_a(g, m);
    default: return fail("IllegalMark: connection kinds take no A-code");
  }
}

BifCode make_b_code(const Graph& g, const BifMark& m, KindTag kind) {
  if (kind.sign < 0)
    return minus_code_via_reversal(g, m, kind, true);
  switch (kind.base) {
    case BifBase::SN: return sn_plus_b(g, m);
    case BifBase::HS: return hs_plus_b(g, m);
    case BifBase::HN: return hn_plus_b(g, m);
    case BifBase::BSN: return bsn_plus_b(g, m);
    case BifBase::BDS: return bds_b(g, m);
    default: return fail("IllegalMark: connection kinds take no B-code");
  }
}

// ---------------------------------------------------------------------------
// Mark enumeration

std::vector<BifMark> list_marks(const Graph& g, KindTag kind) {
  std::vector<BifMark> marks;
  EndInfo ei = info(g);
  switch (kind.base) {
    case BifBase::SN:
      for (int e = 0; e < g.end_count; e++) {
        if (!ei.internal(e)) continue;
        int mm = g.mate[e];
        if (mm < 0 || ei.kind(mm) != UnitKind::Src) continue;
        if (ei.pos[mm].circle == ei.pos[e].circle) continue;
        BifMark m;
        m.end = e;
        marks.push_back(m);
      }
      break;
    case BifBase::BSN:
      for (int c = 0; c < (int)g.circles.size(); c++) {
        const Circle& cc = g.circles[c];
        if (!cc.boundary || (int)cc.units.size() < 4) continue;
        for (int u = 0; u < (int)cc.units.size(); u++) {
          if (cc.units[u].kind != UnitKind::Gap) continue;
          for (int v : {nu(cc, u), pu(cc, u)}) {
            if (cc.units[v].kind != UnitKind::Src) continue;
            BifMark m;
            m.circle = c;
            m.unit = u;
            m.unit2 = v;
            marks.push_back(m);
          }
        }
      }
      break;
    case BifBase::BDS:
      for (int c = 0; c < (int)g.circles.size(); c++) {
        const Circle& cc = g.circles[c];
        if (!cc.boundary || (int)cc.units.size() < 4) continue;
        for (int u = 0; u < (int)cc.units.size(); u++) {
          if (cc.units[u].kind != UnitKind::ASad) continue;
          for (int v : {nu(cc, u), pu(cc, u)}) {
            if (cc.units[v].kind != UnitKind::Gap) continue;
            BifMark m;
            m.circle = c;
            m.unit = u;
            m.unit2 = v;
            marks.push_back(m);
          }
        }
      }
      break;
    case BifBase::HS:
      for (int c = 0; c < (int)g.circles.size(); c++)
        for (int u = 0; u < (int)g.circles[c].units.size(); u++)
          if (g.circles[c].boundary && g.circles[c].units[u].kind == UnitKind::ASad) {
            BifMark m;
            m.circle = c;
            m.unit = u;
            marks.push_back(m);
          }
      break;
    case BifBase::HN:
      for (int c = 0; c < (int)g.circles.size(); c++)
        for (int u = 0; u < (int)g.circles[c].units.size(); u++)
          if (g.circles[c].boundary && g.circles[c].units[u].kind == UnitKind::Src) {
            BifMark m;
            m.circle = c;
            m.unit = u;
            marks.push_back(m);
          }
      break;
    default:
      break;
  }
  return marks;
}

// ---------------------------------------------------------------------------
// Collapse surgeries

namespace {

// Rebuilds a graph, dropping the listed ends and applying unit edits.
struct Surgeon {
  Graph out;
  std::vector<int> end_map;  // old -> new, -1 dropped

  explicit Surgeon(const Graph& g) : end_map(g.end_count, -2) { out.junction_host = -1; }

  int fresh() {
    int e = out.end_count++;
    out.mate.push_back(-1);
    return e;
  }
  int mapped(const Graph& g, int old) {
    if (end_map[old] == -2) {
      end_map[old] = fresh();
    }
    (void)g;
    return end_map[old];
  }
  void finish(const Graph& g) {
    for (int e = 0; e < g.end_count; e++) {
      if (end_map[e] < 0) continue;
      int m = g.mate[e];
      if (m == kJunctionMate) {
        out.mate[end_map[e]] = kJunctionMate;
      } else if (m >= 0 && end_map[m] >= 0) {
        out.mate[end_map[e]] = end_map[m];
      }
    }
    if (g.has_junction() && end_map[g.junction_host] >= 0)
      out.junction_host = end_map[g.junction_host];
    out.junction_rot = g.junction_rot;
  }
};

}  // namespace

static CollapseOut collapse_sn(const Graph& g, const BifMark& m) {
  CollapseOut out;
  EndInfo ei = info(g);
  int eps = m.end, mm = g.mate[eps];
  if (eps < 0 || mm < 0 || !ei.internal(eps) || ei.kind(mm) != UnitKind::Src ||
      ei.pos[mm].circle == ei.pos[eps].circle) {
    out.error = "IllegalMark";
    return out;
  }
  int vc = ei.pos[eps].circle;
  const Unit& vu = g.circles[vc].units[0];
  int deg = (int)vu.ends.size();
  int at = (int)(std::find(vu.ends.begin(), vu.ends.end(), eps) - vu.ends.begin());
  std::vector<int> run;
  for (int k = 1; k < deg; k++) run.push_back(vu.ends[(at + k) % deg]);

  Surgeon s(g);
  s.end_map[eps] = -1;
  s.end_map[mm] = -1;
  int new_circle_of_z = -1, new_unit_of_z = -1, pos_of_m = -1;
  for (int c = 0; c < (int)g.circles.size(); c++) {
    if (c == vc) continue;
    Circle nc;
    nc.boundary = g.circles[c].boundary;
    for (int u = 0; u < (int)g.circles[c].units.size(); u++) {
      const Unit& un = g.circles[c].units[u];
      Unit copy{un.kind, {}};
      for (int e : un.ends) {
        if (e == mm) {
          // splice the emerged run in place of the lost separatrix
          new_circle_of_z = (int)s.out.circles.size();
          new_unit_of_z = u;
          pos_of_m = (int)copy.ends.size();
          for (int re : run) copy.ends.push_back(s.mapped(g, re));
        } else {
          copy.ends.push_back(s.mapped(g, e));
        }
      }
      nc.units.push_back(std::move(copy));
    }
    s.out.circles.push_back(std::move(nc));
  }
  s.finish(g);
  out.g = std::move(s.out);
  out.bmark.circle = new_circle_of_z;
  out.bmark.unit = new_unit_of_z;
  out.bmark.index = pos_of_m;
  out.bmark.run = (int)run.size();
  out.ok = new_circle_of_z >= 0;
  if (!out.ok) out.error = "collapse lost the host source";
  return out;
}

static CollapseOut collapse_bsn(const Graph& g, const BifMark& m) {
  CollapseOut out;
  const Circle& c = g.circles.at(m.circle);
  int gu = m.unit, vu = m.unit2;
  if (c.units[gu].kind != UnitKind::Gap || c.units[vu].kind != UnitKind::Src ||
      (int)c.units.size() < 4) {
    out.error = "IllegalMark";
    return out;
  }
  bool stored_dir = (gu == nu(c, vu));  // collapse flow v -> gap runs with storage
  int wu = stored_dir ? nu(c, gu) : pu(c, gu);
  const std::vector<int>& run = c.units[vu].ends;
  UnitKind wkind = c.units[wu].kind;

  Surgeon s(g);
  int tw = -1;  // twin slot when the neighbor is an a-saddle
  if (wkind == UnitKind::ASad) tw = g.mate[c.units[wu].ends[0]];

  for (int ci = 0; ci < (int)g.circles.size(); ci++) {
    Circle nc;
    nc.boundary = g.circles[ci].boundary;
    for (int u = 0; u < (int)g.circles[ci].units.size(); u++) {
      if (ci == m.circle && (u == gu || u == vu)) continue;
      const Unit& un = g.circles[ci].units[u];
      Unit copy{un.kind, {}};
      bool src_w = wkind == UnitKind::Src && ci == m.circle && u == wu;
      if (src_w && stored_dir)
        for (int re : run) copy.ends.push_back(s.mapped(g, re));
      for (int e : un.ends) {
        if (wkind == UnitKind::ASad && e == tw) {
          // the run climbs the a-saddle's separatrix to its source
          if (stored_dir) {
            for (int re : run) copy.ends.push_back(s.mapped(g, re));
            copy.ends.push_back(s.mapped(g, e));
          } else {
            copy.ends.push_back(s.mapped(g, e));
            for (int re : run) copy.ends.push_back(s.mapped(g, re));
          }
        } else {
          copy.ends.push_back(s.mapped(g, e));
        }
      }
      if (src_w && !stored_dir)
        for (int re : run) copy.ends.push_back(s.mapped(g, re));
      nc.units.push_back(std::move(copy));
    }
    s.out.circles.push_back(std::move(nc));
  }
  s.finish(g);
  out.g = std::move(s.out);

  // B-mark: locate the emerged run (or the leading separatrix) afresh
  EndInfo e2 = info(out.g);
  if (wkind == UnitKind::Src) {
    int probe = run.empty() ? -1 : s.end_map[run[0]];
    if (probe >= 0) {
      out.bmark.circle = e2.pos[probe].circle;
      out.bmark.unit = e2.pos[probe].unit;
    } else {
      // empty run: the source past the gap carries a blank highlight
      out.bmark.circle = m.circle;
      out.bmark.unit = wu - (gu < wu ? 1 : 0) - (vu < wu ? 1 : 0);
      int n_new = (int)out.g.circles[m.circle].units.size();
      out.bmark.unit = ((out.bmark.unit % n_new) + n_new) % n_new;
    }
    out.bmark.side = stored_dir ? 0 : 1;
    out.bmark.run = (int)run.size();
  } else {
    int tw_new = s.end_map[tw];
    out.bmark.gamma = true;
    out.bmark.circle = e2.pos[tw_new].circle;
    out.bmark.unit = e2.pos[tw_new].unit;
    out.bmark.index = e2.pos[tw_new].slot;
    out.bmark.side = stored_dir ? 0 : 1;
    out.bmark.run = (int)run.size();
  }
  out.ok = true;
  return out;
}

static CollapseOut collapse_bds(const Graph& g, const BifMark& m) {
  CollapseOut out;
  const Circle& c = g.circles.at(m.circle);
  int tu = m.unit, gu = m.unit2;
  if (c.units[tu].kind != UnitKind::ASad || c.units[gu].kind != UnitKind::Gap ||
      (int)c.units.size() < 4) {
    out.error = "IllegalMark";
    return out;
  }
  bool stored_dir = (gu == nu(c, tu));
  int wu = stored_dir ? nu(c, gu) : pu(c, gu);
  int a = c.units[tu].ends[0];
  int q = g.mate[a];
  EndInfo ei = info(g);
  if (q < 0 || ei.kind(q) != UnitKind::Src) {
    out.error = "IllegalMark: saddle edge lacks a source end";
    return out;
  }
  UnitKind wkind = c.units[wu].kind;
  int tw = wkind == UnitKind::ASad ? g.mate[c.units[wu].ends[0]] : -1;

  Surgeon s(g);
  s.end_map[a] = -1;
  int eps_new = -1;
  for (int ci = 0; ci < (int)g.circles.size(); ci++) {
    Circle nc;
    nc.boundary = g.circles[ci].boundary;
    for (int u = 0; u < (int)g.circles[ci].units.size(); u++) {
      if (ci == m.circle && (u == tu || u == gu)) continue;
      const Unit& un = g.circles[ci].units[u];
      Unit copy{un.kind, {}};
      bool src_w = wkind == UnitKind::Src && ci == m.circle && u == wu;
      if (src_w && stored_dir) {
        eps_new = s.fresh();
        copy.ends.push_back(eps_new);
      }
      for (int e : un.ends) {
        if (tw >= 0 && e == tw) {
          if (stored_dir) {
            eps_new = s.fresh();
            copy.ends.push_back(eps_new);
            copy.ends.push_back(s.mapped(g, e));
          } else {
            copy.ends.push_back(s.mapped(g, e));
            eps_new = s.fresh();
            copy.ends.push_back(eps_new);
          }
        } else {
          copy.ends.push_back(s.mapped(g, e));
        }
      }
      if (src_w && !stored_dir) {
        eps_new = s.fresh();
        copy.ends.push_back(eps_new);
      }
      nc.units.push_back(std::move(copy));
    }
    s.out.circles.push_back(std::move(nc));
  }
  s.finish(g);
  if (eps_new < 0) {
    out.error = "collapse found no emerging sector";
    return out;
  }
  s.out.mate[eps_new] = s.end_map[q];
  s.out.mate[s.end_map[q]] = eps_new;
  out.g = std::move(s.out);

  // B-mark: the emerged separatrix plus the merged boundary trajectory
  out.bmark.end = eps_new;
  out.bmark.circle = m.circle;
  int lo = std::min(tu, gu), hi = std::max(tu, gu);
  int before;  // unit (new index) whose following arc is the merged trajectory
  if (hi == lo + 1) before = lo - 1;
  else before = (int)c.units.size() - 3;  // the pair wrapped around the seam
  int nunits = (int)c.units.size() - 2;
  before = ((before % nunits) + nunits) % nunits;
  out.bmark.unit = before;
  out.ok = true;
  return out;
}

CollapseOut collapse_mark(const Graph& g, const BifMark& m, KindTag kind) {
  switch (kind.base) {
    case BifBase::SN: return collapse_sn(g, m);
    case BifBase::BSN: return collapse_bsn(g, m);
    case BifBase::BDS: return collapse_bds(g, m);
    default: {
      CollapseOut out;
      out.error = "IllegalMark: kind has no collapse";
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Connection rewrites

namespace {

bool rewrite_valid(const Graph& before, Graph& after) {
  FlowCheck chk = check_flow(after);
  if (!chk.ok && after.has_junction()) {
    after.junction_rot ^= 1;
    chk = check_flow(after);
  }
  if (!chk.ok) return false;
  return singular_point_count(after) == singular_point_count(before);
}

}  // namespace

std::vector<Rewrite> connection_rewrites(const Graph& g) {
  std::vector<Rewrite> out;
  EndInfo ei = info(g);

  // pairs of separatrices sharing a source corner
  struct SourceRef {
    int circle, unit;
    bool cyclic;
  };
  std::vector<SourceRef> sources;
  for (int c = 0; c < (int)g.circles.size(); c++)
    for (int u = 0; u < (int)g.circles[c].units.size(); u++)
      if (g.circles[c].units[u].kind == UnitKind::Src)
        sources.push_back({c, u, !g.circles[c].boundary});

  for (const auto& src : sources) {
    const std::vector<int>& ends = g.circles[src.circle].units[src.unit].ends;
    int deg = (int)ends.size();
    int pairs = src.cyclic ? deg : deg - 1;
    for (int i = 0; i < pairs; i++) {
      for (int dir = 0; dir < 2; dir++) {
        int a = dir == 0 ? ends[i] : ends[(i + 1) % deg];
        int b = dir == 0 ? ends[(i + 1) % deg] : ends[i];
        if (a == b) continue;
        int ma = g.mate[a], mb = g.mate[b];
        if (ma < 0 || mb < 0) continue;
        if (std::min(a, ma) == std::min(b, mb)) continue;  // same saddle
        if (ei.kind(mb) != UnitKind::Src) continue;         // s2 must be internal
        bool hsc = ei.kind(ma) == UnitKind::ASad;
        if (!hsc && ei.kind(ma) != UnitKind::Src) continue;

        Surgeon s(g);
        s.end_map[a] = -1;
        for (int c = 0; c < (int)g.circles.size(); c++) {
          Circle nc;
          nc.boundary = g.circles[c].boundary;
          for (int u = 0; u < (int)g.circles[c].units.size(); u++) {
            const Unit& un = g.circles[c].units[u];
            Unit copy{un.kind, {}};
            for (int e : un.ends)
              if (e != a) copy.ends.push_back(s.mapped(g, e));
            if (!(c == src.circle && u == src.unit && copy.ends.empty() && !nc.boundary))
              nc.units.push_back(std::move(copy));
            else
              nc.units.push_back(std::move(copy));  // kept; validity check rejects
          }
          s.out.circles.push_back(std::move(nc));
        }
        s.finish(g);
        s.out.mate[s.end_map[ma]] = kJunctionMate;
        s.out.junction_host = s.end_map[b];
        s.out.junction_rot = 0;
        Graph cand = std::move(s.out);
        if (!rewrite_valid(g, cand)) continue;
        out.push_back({std::move(cand), with_form(hsc ? BifBase::HSC : BifBase::SC,
                                                  hsc ? +1 : 0, 0)});
      }
    }
  }

  // a separatrix and the boundary trajectory beyond the arc's end
  for (const auto& src : sources) {
    if (src.cyclic) continue;
    const Circle& c = g.circles[src.circle];
    const std::vector<int>& ends = c.units[src.unit].ends;
    if (ends.empty()) continue;
    for (int side = 0; side < 2; side++) {
      int a = side == 0 ? ends.back() : ends.front();
      int beyond = side == 0 ? nu(c, src.unit) : pu(c, src.unit);
      if (c.units[beyond].kind != UnitKind::Gap) continue;
      int ma = g.mate[a];
      if (ma < 0) continue;
      bool bsc = ei.kind(ma) == UnitKind::ASad;
      if (!bsc && ei.kind(ma) != UnitKind::Src) continue;

      Surgeon s(g);
      s.end_map[a] = -1;
      int conn_end = -1;
      for (int ci = 0; ci < (int)g.circles.size(); ci++) {
        Circle nc;
        nc.boundary = g.circles[ci].boundary;
        for (int u = 0; u < (int)g.circles[ci].units.size(); u++) {
          const Unit& un = g.circles[ci].units[u];
          if (ci == src.circle && u == beyond) {
            conn_end = s.fresh();
            nc.units.push_back({UnitKind::ConnStart, {conn_end}});
            continue;
          }
          Unit copy{un.kind, {}};
          for (int e : un.ends)
            if (e != a) copy.ends.push_back(s.mapped(g, e));
          nc.units.push_back(std::move(copy));
        }
        s.out.circles.push_back(std::move(nc));
      }
      s.finish(g);
      s.out.mate[conn_end] = s.end_map[ma];
      s.out.mate[s.end_map[ma]] = conn_end;
      Graph cand = std::move(s.out);
      if (!rewrite_valid(g, cand)) continue;
      out.push_back({std::move(cand),
                     bsc ? with_form(BifBase::BSC, 0, 0) : with_form(BifBase::HSC, -1, 0)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// B -> A conversion

static FlowCode shift_numbers(FlowCode c, int delta, int below = 1 << 30) {
  for (auto& l : c.lists)
    for (auto& t : l.items)
      if (t.kind == TokKind::Num && t.num < below) t.num += delta;
  return c;
}

// extracts the highlight group: returns (list, first item, count) and the
// contained numbers; removes the paren tokens and optionally the numbers
static bool take_group(FlowCode& c, int& li, int& at, std::vector<int>& nums, bool remove_nums) {
  for (li = 0; li < (int)c.lists.size(); li++) {
    auto& items = c.lists[li].items;
    for (int i = 0; i < (int)items.size(); i++) {
      if (items[i].kind != TokKind::OpenPar) continue;
      int j = i + 1;
      while (j < (int)items.size() && items[j].kind != TokKind::ClosePar) {
        if (items[j].kind == TokKind::Num) nums.push_back(items[j].num);
        j++;
      }
      if (j >= (int)items.size()) return false;
      at = i;
      if (remove_nums) {
        items.erase(items.begin() + i, items.begin() + j + 1);
      } else {
        items.erase(items.begin() + j);  // ')'
        items.erase(items.begin() + i);  // '('
      }
      return true;
    }
  }
  return false;
}

static void rotate_to_min(CodeList& l) {
  int n = (int)l.items.size();
  if (n == 0) return;
  int best = -1;
  std::vector<Token> best_items;
  for (int s = 0; s < n; s++) {
    if (l.items[s].kind != TokKind::Num) continue;
    std::vector<Token> rot(l.items.begin() + s, l.items.end());
    rot.insert(rot.end(), l.items.begin(), l.items.begin() + s);
    if (best < 0 || rot[0].num < best ||
        (rot[0].num == best && [&] {
          CodeList x{l.kind, rot}, y{l.kind, best_items};
          FlowCode a, b;
          a.lists.push_back(x);
          b.lists.push_back(y);
          return code_less(a, b);
        }())) {
      best = rot[0].num;
      best_items = std::move(rot);
    }
  }
  if (best >= 0) l.items = std::move(best_items);
}

static int first_nonzero(const CodeList& l) {
  for (const auto& t : l.items)
    if (t.kind == TokKind::Num) return t.num;
  return 1 << 30;
}

FlowCode b_to_a(const FlowCode& bcode, std::string* error) {
  auto bad = [&](std::string why) {
    if (error) *error = std::move(why);
    return FlowCode{};
  };
  if (!bcode.prefix || bcode.prefix->form != 'B') return bad("NotConvertibleKind");
  KindTag k = *bcode.prefix;
  if (k.base == BifBase::HS || k.base == BifBase::HN)
    return bad("NotConvertibleKind: HS/HN B-codes are plain marked Morse codes");

  if (k.base == BifBase::SN) {
    FlowCode c = shift_numbers(bcode, +1);
    int li, at;
    std::vector<int> nums;
    if (!take_group(c, li, at, nums, true)) return bad("no highlight group");
    c.lists[li].items.insert(c.lists[li].items.begin() + at, tok_num(1));
    CodeList head{ListKind::InternalSource, {}};
    head.items.push_back(tok_num(1));
    for (int n : nums) head.items.push_back(tok_num(n));
    c.lists.insert(c.lists.begin(), head);
    KindTag ak = k;
    ak.form = 'A';
    c.prefix = ak;
    fix_comma_mode(c);
    return c;
  }

  if (k.base == BifBase::BDS) {
    std::vector<int> nums;
    {
      FlowCode probe = bcode;
      int li, at;
      if (!take_group(probe, li, at, nums, false)) return bad("no highlight group");
    }
    if (nums.size() != 1) return bad("BDS group must hold one number");
    int kk = nums[0];
    FlowCode c = bcode;
    int li, at;
    std::vector<int> drop;
    take_group(c, li, at, drop, true);  // remove parens and the number
    for (auto& l : c.lists)
      for (auto& t : l.items) {
        if (t.kind != TokKind::Num) continue;
        if (t.num == kk) t.num = 1;
        else if (t.num < kk) t.num += 1;
      }
    c.lists[0].items.insert(c.lists[0].items.begin(), tok_num(1));
    for (auto& l : c.lists) rotate_to_min(l);
    std::stable_sort(c.lists.begin(), c.lists.end(),
                     [](const CodeList& a, const CodeList& b) {
                       return first_nonzero(a) < first_nonzero(b);
                     });
    KindTag ak = k;
    ak.form = 'A';
    c.prefix = ak;
    fix_comma_mode(c);
    return c;
  }

  if (k.base == BifBase::BSN) {
    // reconstruct the collapsed pair explicitly
    FlowCode plain = bcode;
    int li, at;
    std::vector<int> nums;
    FlowCode probe = plain;
    if (!take_group(probe, li, at, nums, false)) return bad("no highlight group");
    DecodeResult d = decode_raw(probe);
    if (!d.ok) return bad(d.error);
    // gap insertion mirrors decode()
    for (auto& c : d.g.circles) {
      if (!c.boundary || c.units.empty()) continue;
      std::vector<Unit> with_gaps;
      int n = (int)c.units.size();
      for (int i = 0; i < n; i++) {
        with_gaps.push_back(c.units[i]);
        if (source_like(c.units[i].kind) && source_like(c.units[(i + 1) % n].kind))
          with_gaps.push_back({UnitKind::Gap, {}});
      }
      c.units = std::move(with_gaps);
    }
    Graph& g = d.g;
    // locate the group's ends: ends were allocated in item order per list
    std::vector<int> group_ends;
    {
      int next_end = 0;
      for (int l2 = 0; l2 < (int)probe.lists.size(); l2++) {
        for (int i = 0; i < (int)probe.lists[l2].items.size(); i++) {
          if (probe.lists[l2].items[i].kind != TokKind::Num) continue;
          if (l2 == li && i >= at && i < at + (int)nums.size()) group_ends.push_back(next_end);
          next_end++;
        }
      }
    }
    EndInfo ei = info(g);
    int zc = -1, zu = -1;
    if (!group_ends.empty()) {
      zc = ei.pos[group_ends[0]].circle;
      zu = ei.pos[group_ends[0]].unit;
    } else {
      // blank group: the span whose '[' immediately precedes the group
      zc = li;
      const auto& items = probe.lists[li].items;
      int ordinal = 0;
      bool found = false;
      for (int i = 0; i < (int)items.size(); i++) {
        if (items[i].kind != TokKind::OpenSq) continue;
        if (i + 1 == at || (at == 0 && i == (int)items.size() - 1)) {
          found = true;
          break;
        }
        ordinal++;
      }
      if (!found) ordinal = 0;
      // decode rotates the list to its first '['; spans keep their cyclic
      // order, so count Src units from the start
      int rotated_first = 0;
      {
        int first_open = -1;
        for (int i = 0; i < (int)items.size(); i++)
          if (items[i].kind == TokKind::OpenSq) {
            first_open = i;
            break;
          }
        int n = (int)items.size();
        int seen = 0;
        for (int s2 = 0; s2 < n && first_open >= 0; s2++) {
          int i = (first_open + s2) % n;
          if (items[i].kind != TokKind::OpenSq) continue;
          if (i + 1 == at || (at == 0 && i == n - 1)) {
            rotated_first = seen;
            break;
          }
          seen++;
        }
      }
      int seen = 0;
      for (int u = 0; u < (int)g.circles[li].units.size(); u++)
        if (g.circles[li].units[u].kind == UnitKind::Src) {
          if (seen == rotated_first) {
            zu = u;
            break;
          }
          seen++;
        }
      if (zu < 0) return bad("blank group outside a source span");
    }
    const Unit& z = g.circles[zc].units[zu];
    int p0 = group_ends.empty()
                 ? 0
                 : (int)(std::find(z.ends.begin(), z.ends.end(), group_ends[0]) - z.ends.begin());
    bool case2 = p0 > 0;
    std::vector<int> run = group_ends;
    int anchor_unit = zu;  // insert the pair before this unit
    if (case2) {
      int gamma = group_ends[0];
      run.assign(group_ends.begin() + 1, group_ends.end());
      int t0 = g.mate[gamma];
      if (t0 < 0 || ei.kind(t0) != UnitKind::ASad)
        return bad("leading separatrix enters no boundary saddle");
      anchor_unit = ei.pos[t0].unit;
      zc = ei.pos[t0].circle;
    }
    // build the before-flow: remove the run from its source, insert (V, Gap)
    Graph before = g;
    if (!group_ends.empty()) {
      Unit& zz = before.circles[ei.pos[group_ends[0]].circle].units[ei.pos[group_ends[0]].unit];
      std::vector<int> kept;
      for (int e : zz.ends)
        if (std::find(run.begin(), run.end(), e) == run.end()) kept.push_back(e);
      zz.ends = std::move(kept);
    }
    Circle& host = before.circles[zc];
    std::vector<Unit> rebuilt;
    int gap_at = -1, v_at = -1;
    for (int u = 0; u < (int)host.units.size(); u++) {
      if (u == anchor_unit) {
        v_at = (int)rebuilt.size();
        rebuilt.push_back({UnitKind::Src, run});
        gap_at = (int)rebuilt.size();
        rebuilt.push_back({UnitKind::Gap, {}});
      }
      rebuilt.push_back(host.units[u]);
    }
    host.units = std::move(rebuilt);
    FlowCheck chk = check_flow(before);
    if (!chk.ok) return bad("reconstruction is not a flow: " + chk.why);
    BifMark am;
    am.circle = zc;
    am.unit = gap_at;
    am.unit2 = v_at;
    KindTag ak = k;
    ak.form = 'A';
    BifCode a = make_a_code(before, am, ak);
    if (!a.ok) return bad(a.error);
    return a.primary;
  }
  return bad("NotConvertibleKind");
}

}  // namespace morseflow
