#pragma once

#include <string>
#include <vector>

#include "morseflow/codec.hpp"
#include "morseflow/graph.hpp"

// Construction of bifurcation codes.  A-codes mark the collapsing element on
// the flow before the bifurcation; B-codes mark the emerged elements on the
// flow after it.  Connection kinds (SC, HSC, BSC) are encoded at the moment
// of bifurcation from diagrams carrying the connection.

namespace morseflow {

// Element reference; the meaning of the fields depends on kind and form:
//   SN+ A: end       = stable separatrix end on an internal source circle
//   SN- A: end       = turning end naming the unstable sector (dart end->mate)
//   BSN+ A: circle/unit = Gap, unit2 = adjacent Src
//   BSN- A: circle/unit = ASad, unit2 = adjacent Zero
//   HS+ A: circle/unit = boundary Src, index = slot
//   HS- A: circle/unit = Zero, index = incoming-separatrix fan position
//   HN+ A: circle/unit = ASad          HN- A: circle/unit = Gap
//   BDS A: circle/unit = ASad, unit2 = adjacent Gap
//   SN+/- B: circle/unit = source, index = run position, run = length
//   BSN+/- B: circle/unit = source, side = 0 front / 1 back, run = length;
//             or gamma = true with index = the leading slot
//   HS+/- B: circle/unit = ASad        HN+/- B: circle/unit = boundary Src
//   BDS B: end = the cell-side separatrix end, circle/unit = the boundary
//          trajectory (arc following that unit)
struct BifMark {
  int end = -1;
  int circle = -1, unit = -1, unit2 = -1;
  int index = -1;
  int run = 0;
  int side = 0;
  bool gamma = false;
};

struct BifCode {
  bool ok = false;
  std::string error;
  FlowCode primary;  // canonical-orientation code (stored orientation for pair kinds)
  std::string key;   // topological-equivalence key: one code, or the sorted pair
};

BifCode make_a_code(const Graph& g, const BifMark& m, KindTag kind);
BifCode make_b_code(const Graph& g, const BifMark& m, KindTag kind);

// Moment-of-bifurcation encodings for diagrams carrying a saddle connection.
BifCode saddle_connection_code(const Graph& g, KindTag kind);

// Minus-kind codes via flow reversal (SN-, BSN-, HS-, HN-, HSC-).
BifCode minus_code_via_reversal(const Graph& g, const BifMark& m, KindTag kind, bool b_form);

// Theorem-style B->A conversion.  SN and BDS transforms are the quoted
// renumbering rules; BSN reconstructs the collapsed pair explicitly.
FlowCode b_to_a(const FlowCode& bcode, std::string* error);

// Admissible marks of the given kind on g (A-marks for SN+/BSN+/BDS on the
// before-flow, B-marks for HS+/HN+ on the moment flow).
std::vector<BifMark> list_marks(const Graph& g, KindTag kind);

// Collapse the marked element (SN+/BSN+/BDS A-marks): the flow after the
// bifurcation plus the matching B-mark.
struct CollapseOut {
  bool ok = false;
  std::string error;
  Graph g;
  BifMark bmark;
};
CollapseOut collapse_mark(const Graph& g, const BifMark& m, KindTag kind);

// All valid connection diagrams obtained from g by the T-path rewrite,
// tagged SC / HSC+ / HSC- / BSC.
struct Rewrite {
  Graph g;
  KindTag kind;
};
std::vector<Rewrite> connection_rewrites(const Graph& g);

}  // namespace morseflow
