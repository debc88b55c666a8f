#include "morseflow/reversal.hpp"

#include <algorithm>

namespace morseflow {

namespace {

enum class ChordClass {
  Internal,   // slot-slot: reverses to an internal saddle edge
  ASaddle,    // slot-ASad: reverses to a collapsed b-saddle
  ConnEdge,   // ConnStart-slot (half-boundary connection): reverses to the host edge
  BoundConn,  // ConnStart-ASad (boundary connection): reverses in place
  Lambda,     // the lower edge of a T
  Host,       // a half of the host edge; invisible after reversal
};

}  // namespace

ReverseResult reverse_flow(const Graph& g) {
  ReverseResult out;
  auto fail = [&](std::string why) {
    out.ok = false;
    out.error = std::move(why);
    return out;
  };

  FaceTrace trace = trace_faces(g);
  if (!trace.consistent) return fail("inconsistent rotation");

  auto pos = end_positions(g);
  auto unit_kind = [&](int e) { return g.circles[pos[e].circle].units[pos[e].unit].kind; };

  auto classify = [&](int e) -> ChordClass {
    int m = g.mate[e];
    if (m == kJunctionMate) return ChordClass::Lambda;
    if (g.has_junction() && (e == g.junction_host || m == g.junction_host)) return ChordClass::Host;
    UnitKind a = unit_kind(e), b = unit_kind(m);
    if (a == UnitKind::Src && b == UnitKind::Src) return ChordClass::Internal;
    if (a == UnitKind::ConnStart || b == UnitKind::ConnStart) {
      if (a == UnitKind::Src || b == UnitKind::Src) return ChordClass::ConnEdge;
      return ChordClass::BoundConn;
    }
    return ChordClass::ASaddle;
  };

  // The lower edge's side sectors are unstable separatrices only when its
  // visible end lies at a source (internal connection); a T-base on the
  // boundary has boundary rays there instead.
  auto lambda_has_sectors = [&]() {
    int le = g.lower_end();
    return le >= 0 && unit_kind(le) == UnitKind::Src;
  };
  auto inflow = [&](const FaceEvent& ev) {
    switch (ev.kind) {
      case FaceEvent::GapPass:
      case FaceEvent::JGhost:
        return true;
      case FaceEvent::LambdaBack:
        return lambda_has_sectors();
      case FaceEvent::Turn: {
        ChordClass c = classify(ev.end);
        if (c == ChordClass::Lambda) return lambda_has_sectors();
        return c == ChordClass::Internal || c == ChordClass::ConnEdge;
      }
      default:
        return false;
    }
  };

  // ---- pass A: allocate fan slots per face ------------------------------
  Graph& r = out.g;
  r.end_count = 0;
  out.slot_of_turn.assign(g.end_count, -1);
  int lambda_back_slot = -1, jghost_slot = -1;
  std::map<std::pair<int, int>, int> gap_slot;           // old gap unit -> fan slot
  std::map<std::pair<int, int>, std::vector<int>> fans;  // old zero unit -> linear fan
  std::vector<std::vector<int>> circle_fans;             // zero-free faces -> cyclic fan
  out.circle_of_face.assign(trace.faces.size(), -1);

  int n_boundary = 0;
  for (const auto& c : g.circles)
    if (c.boundary) n_boundary++;

  for (int fi = 0; fi < (int)trace.faces.size(); fi++) {
    const Face& f = trace.faces[fi];
    if (f.zero_count > 1) return fail("face with two boundary sinks");
    // order events: linear fans start right after the zero
    std::vector<FaceEvent> evs = f.events;
    if (f.zero_count == 1) {
      int zi = -1;
      for (int i = 0; i < (int)evs.size(); i++)
        if (evs[i].kind == FaceEvent::ZeroPass) zi = i;
      std::rotate(evs.begin(), evs.begin() + (zi + 1) % (int)evs.size(), evs.end());
    }
    std::vector<int> slots;
    for (const auto& ev : evs) {
      if (!inflow(ev)) continue;
      int e = r.end_count++;
      slots.push_back(e);
      switch (ev.kind) {
        case FaceEvent::Turn: out.slot_of_turn[ev.end] = e; break;
        case FaceEvent::LambdaBack: lambda_back_slot = e; break;
        case FaceEvent::JGhost: jghost_slot = e; break;
        case FaceEvent::GapPass: gap_slot[{ev.circle, ev.unit}] = e; break;
        default: break;
      }
    }
    if (f.zero_count == 1) {
      const FaceEvent* z = nullptr;
      for (const auto& ev : f.events)
        if (ev.kind == FaceEvent::ZeroPass) z = &ev;
      fans[{z->circle, z->unit}] = std::move(slots);
    } else {
      out.circle_of_face[fi] = n_boundary + (int)circle_fans.size();
      circle_fans.push_back(std::move(slots));
    }
  }

  // ---- pass B: transform boundary circles -------------------------------
  r.mate.assign(r.end_count, -1);
  auto new_end = [&]() {
    int e = r.end_count++;
    r.mate.push_back(-1);
    return e;
  };

  std::map<std::pair<int, int>, int> unit_new_end;  // old (c,u) -> end placed on the new unit
  for (int c = 0; c < (int)g.circles.size(); c++) {
    const Circle& cc = g.circles[c];
    if (!cc.boundary) continue;
    Circle nc;
    nc.boundary = true;
    for (int u = 0; u < (int)cc.units.size(); u++) {
      const Unit& un = cc.units[u];
      switch (un.kind) {
        case UnitKind::Src:
          nc.units.push_back({UnitKind::Zero, {}});
          break;
        case UnitKind::Zero: {
          auto it = fans.find({c, u});
          nc.units.push_back({UnitKind::Src, it == fans.end() ? std::vector<int>{} : it->second});
          break;
        }
        case UnitKind::ASad: {
          int e0 = un.ends.at(0);
          if (g.mate[e0] == kJunctionMate) {
            // T-base of a half-boundary connection: the reversed connection
            // leaves here and enters the saddle that owns the ghost sector
            int e = new_end();
            unit_new_end[{c, u}] = e;
            nc.units.push_back({UnitKind::ConnStart, {e}});
          } else if (unit_kind(g.mate[e0]) == UnitKind::ConnStart) {
            int e = new_end();
            unit_new_end[{c, u}] = e;
            nc.units.push_back({UnitKind::ConnStart, {e}});
          } else {
            nc.units.push_back({UnitKind::Gap, {}});
          }
          break;
        }
        case UnitKind::Gap: {
          int e = new_end();
          unit_new_end[{c, u}] = e;
          out.asad_end_of_gap[{c, u}] = e;
          nc.units.push_back({UnitKind::ASad, {e}});
          break;
        }
        case UnitKind::ConnStart: {
          int e = new_end();
          unit_new_end[{c, u}] = e;
          nc.units.push_back({UnitKind::ASad, {e}});
          break;
        }
      }
    }
    r.circles.push_back(std::move(nc));
  }
  for (auto& fan : circle_fans) {
    Circle nc;
    nc.boundary = false;
    nc.units.push_back({UnitKind::Src, fan});
    r.circles.push_back(std::move(nc));
  }
  r.mate.resize(r.end_count, -1);

  // ---- pass C: wire the pairs -------------------------------------------
  auto wire = [&](int a, int b) {
    r.mate[a] = b;
    r.mate[b] = a;
  };
  std::vector<char> done(g.end_count, 0);
  int lambda_end_old = -1;
  for (int e = 0; e < g.end_count; e++) {
    if (done[e]) continue;
    int m = g.mate[e];
    switch (classify(e)) {
      case ChordClass::Internal: {
        done[e] = done[m] = 1;
        int a = out.slot_of_turn[e], b = out.slot_of_turn[m];
        if (a < 0 || b < 0) return fail("internal edge misses a face slot");
        wire(a, b);
        break;
      }
      case ChordClass::ASaddle: {
        done[e] = done[m] = 1;
        // the a-saddle's unit became a Gap; its stable edge reverses to the
        // unstable pencil, which is invisible
        break;
      }
      case ChordClass::ConnEdge: {
        done[e] = done[m] = 1;
        int a = out.slot_of_turn[e], b = out.slot_of_turn[m];
        if (a < 0 || b < 0) return fail("connection edge misses a face slot");
        wire(a, b);  // this is the reversed host edge E2'
        int cs = unit_kind(e) == UnitKind::ConnStart ? e : m;
        auto it = unit_new_end.find({pos[cs].circle, pos[cs].unit});
        if (it == unit_new_end.end()) return fail("connection start not transformed");
        // the old ConnStart becomes the T-base: its end is the lower edge
        r.mate[it->second] = kJunctionMate;
        r.junction_host = a;
        break;
      }
      case ChordClass::BoundConn: {
        done[e] = done[m] = 1;
        int a = unit_new_end.at({pos[e].circle, pos[e].unit});
        int b = unit_new_end.at({pos[m].circle, pos[m].unit});
        wire(a, b);
        break;
      }
      case ChordClass::Lambda: {
        done[e] = 1;
        lambda_end_old = e;
        break;
      }
      case ChordClass::Host:
        done[e] = done[m] = 1;
        break;
    }
  }

  // every collapsed b-saddle pairs its face slot with the new a-saddle
  for (auto& [cu, slot] : gap_slot) {
    auto it = unit_new_end.find(cu);
    if (it == unit_new_end.end()) return fail("gap not transformed");
    wire(slot, it->second);
  }

  if (g.has_junction()) {
    if (lambda_end_old < 0 || jghost_slot < 0) return fail("junction reversal lost a sector");
    if (unit_kind(lambda_end_old) == UnitKind::Src) {
      // internal connection: the lower saddle's sectors pair into the new
      // host edge and the ghost sector carries the new lower edge
      int a = out.slot_of_turn[lambda_end_old], b = lambda_back_slot;
      if (a < 0 || b < 0) return fail("lower edge misses a face slot");
      wire(a, b);
      r.junction_host = a;
      r.mate[jghost_slot] = kJunctionMate;
    } else {
      // T-base on the boundary: reverses to a plain half-boundary connection
      // from the base (now a ConnStart) to the ghost sector's source slot
      int cs_end = unit_new_end.at({pos[lambda_end_old].circle, pos[lambda_end_old].unit});
      r.mate[cs_end] = jghost_slot;
      r.mate[jghost_slot] = cs_end;
      r.junction_host = -1;
    }
  } else if (r.junction_host < 0) {
    r.junction_host = -1;
  }

  // pick the junction side that keeps the flow valid
  if (r.junction_host >= 0) {
    r.junction_rot = 0;
    FlowCheck chk = check_flow(r);
    if (!chk.ok) {
      r.junction_rot = 1;
      chk = check_flow(r);
      if (!chk.ok) return fail("reversed junction defies both rotations: " + chk.why);
    }
  } else {
    FlowCheck chk = check_flow(r);
    if (!chk.ok) return fail("reversal produced an invalid flow: " + chk.why);
  }

  out.ok = true;
  return out;
}

}  // namespace morseflow
