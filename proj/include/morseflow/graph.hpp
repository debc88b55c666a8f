#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "morseflow/code.hpp"

// The distinguishing graph of a flow, stored as circles of units.
//
// A boundary circle alternates source-like units (Src, ASad, and connection
// targets) with sink-like units (Zero, Gap, ConnStart).  Internal source
// circles hold a single Src unit whose ends are in cyclic order.  Separatrix
// edges pair ends; collapsed b-saddles are kept as Gap units so the flow is
// recoverable.  Codimension-1 diagrams add either a boundary connection
// (ConnStart -> ASad / source slot) or a T-junction: the lower edge's hidden
// end attaches to the middle of a host edge.

namespace morseflow {

enum class UnitKind : uint8_t {
  Src,        // source neighborhood arc (gray); carries ordered separatrix ends
  Zero,       // boundary sink (white vertex)
  ASad,       // a-saddle (black vertex, one end); also the target of a connection
  Gap,        // collapsed b-saddle
  ConnStart,  // start of a saddle connection leaving the boundary
};

inline bool source_like(UnitKind k) { return k == UnitKind::Src || k == UnitKind::ASad; }
inline bool sink_like(UnitKind k) { return !source_like(k); }

struct Unit {
  UnitKind kind;
  std::vector<int> ends;

  bool operator==(const Unit&) const = default;
};

struct Circle {
  bool boundary = true;
  std::vector<Unit> units;

  bool operator==(const Circle&) const = default;
};

constexpr int kJunctionMate = -2;

struct Graph {
  std::vector<Circle> circles;
  int end_count = 0;
  std::vector<int> mate;   // mate[e] >= 0, or kJunctionMate for the lower edge
  int junction_host = -1;  // one end of the host edge (E2); -1 when no junction
  int junction_rot = 0;    // 0: rotation at the junction is (host half, lower edge, far half)

  bool has_junction() const { return junction_host >= 0; }
  int lower_end() const;  // the lower edge's visible end (-1 if none)
};

struct SurfaceId {
  int holes = 1;  // disk 1, cylinder 2, pants 3
  int chi_double() const { return 4 - 2 * holes; }
};

// (A,B,S,T+,T-,Y,Z) counts of singular points by type.
struct CombinationVector {
  int A = 0, B = 0, S = 0, Tp = 0, Tm = 0, Y = 0, Z = 0;
  int n() const { return A + B + S + Tp + Tm + Y + Z; }
  CombinationVector reversed() const { return {Y, Z, S, Tm, Tp, A, B}; }
  auto as_tuple() const { return std::tie(A, B, S, Tp, Tm, Y, Z); }
  bool operator==(const CombinationVector&) const = default;
  bool operator<(const CombinationVector& o) const { return as_tuple() < o.as_tuple(); }
};

std::string combination_string(const CombinationVector& v);

// ---------------------------------------------------------------------------
// Flattened sites (graph vertices) of a circle, in cyclic order.  Gap units
// produce no site; their positions ride on the following arc.

struct Site {
  enum What : uint8_t { Open, Close, End, ZeroV } what;
  int unit;
  int slot;  // index into the unit's ends for What::End
  int end;   // end id for What::End, else -1
};

std::vector<Site> circle_sites(const Circle& c);

struct EndPos {
  int circle = -1, unit = -1, slot = -1;
};
std::vector<EndPos> end_positions(const Graph& g);

// ---------------------------------------------------------------------------
// Face tracing.  Faces are the 2-cells of the complement (cap sides of
// circles excluded).  Events appear in boundary-walk order.

struct FaceEvent {
  enum Kind : uint8_t {
    Turn,       // walk turned onto the chord at this end's site
    LambdaBack, // walk descended the lower edge from the junction side
    JGhost,     // walk passed through the junction (the free unstable sector)
    ZeroPass,
    GapPass,
  } kind;
  int end = -1;             // Turn: the end at the turning site
  int circle = -1, unit = -1;  // ZeroPass / GapPass
};

struct Face {
  std::vector<FaceEvent> events;
  int zero_count = 0;
};

struct FaceTrace {
  std::vector<Face> faces;   // interior faces only
  int cap_count = 0;         // one per circle with sites
  bool consistent = true;    // dart partition sanity
};

FaceTrace trace_faces(const Graph& g);

// Counts for the code-level Euler formula: V = lists, E = saddles, F = faces.
int list_count(const Graph& g);
int saddle_count(const Graph& g);  // distinct edge numbers (junction host counts once)
int singular_point_count(const Graph& g);  // all singular points of the flow

// Literal sphere check: vertices - arcs/chords + all faces (caps included) == 2.
bool literal_euler_ok(const Graph& g, const FaceTrace& t);

bool connected(const Graph& g);

// Full flow validity: structure, connectivity, sphere Euler, one sink per face.
struct FlowCheck {
  bool ok = true;
  std::string why;
  FaceTrace trace;
};
FlowCheck check_flow(const Graph& g);

CombinationVector combination_of(const Graph& g, const FaceTrace& t);

// Orientation mirror: reverses every circle (and each arc's end order).
// End ids are preserved; unit index u on circle c maps to the returned
// per-circle offsets (new_index = unit_count - 1 - old_index).
Graph mirrored(const Graph& g);

// JSON document per the external schema.
std::string graph_json(const Graph& g);

}  // namespace morseflow
