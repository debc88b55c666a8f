#pragma once

#include <string>
#include <utility>
#include <vector>

#include "morseflow/code.hpp"
#include "morseflow/graph.hpp"

// Graph <-> code conversion, the cycle algorithm, semantic validation, and
// canonicalization.

namespace morseflow {

enum class Orient : uint8_t { AsStored, Reversed };

struct Basepoint {
  enum What : uint8_t { AtEnd, AtOpen, AtClose, AtZero } what = AtEnd;
  int end = -1;              // AtEnd
  int circle = -1, unit = -1;  // bracket / zero sites
};

// Saddle numbering during encoding.  Connection: the lower edge is 1 and the
// host edge 2 before traversal numbering starts at 3; BoundaryConn: the
// connection pair is 1 and traversal numbering starts at 2.
enum class NumberingMode : uint8_t { Plain, Connection, BoundaryConn };

struct EncodeResult {
  bool ok = false;
  std::string error;
  FlowCode code;
  std::vector<int> number_of_end;               // end -> saddle number (0 = unseen)
  std::vector<std::pair<int, int>> emit_of_end;  // end -> (list, item) position
  std::vector<int> circle_of_list;               // list -> circle id
};

// Writes the code of g read from the given basepoint.  Reversed orientation
// traverses every circle backward (transition marks swap).
EncodeResult encode(const Graph& g, Basepoint bp, Orient o,
                    NumberingMode nm = NumberingMode::Plain);

// ---------------------------------------------------------------------------

struct SemFinding {
  std::string rule;  // "P1".."P4" or "SRC"
  std::string detail;
};

struct SemReport {
  std::vector<SemFinding> findings;
  int V = 0, E = 0, F = 0;
  bool ok() const { return findings.empty(); }
};

// Checks the code properties: every number twice (dialect-aware for
// connection prefixes), one boundary sink per cycle, list connectivity, the
// Euler formula, and the source-list rule.
SemReport validate_semantics(const FlowCode& code);

struct CyclesResult {
  bool ok = false;
  std::string error;
  struct Cycle {
    std::vector<std::pair<int, int>> members;  // (list, item) of visited occurrences
    int zeros = 0;
    std::vector<int> content;  // numbers and 0s in traversal order
  };
  std::vector<Cycle> cycles;
};

// The jump rule on number occurrences; zeros join the cycle of the scan that
// passes them.  Lists without numbers each form one cycle holding their
// zeros.  Requires every number to occur exactly twice.
CyclesResult cycles_of_code(const FlowCode& code);

struct DecodeResult {
  bool ok = false;
  Graph g;
  SemReport report;  // populated on semantic failure
  std::string error;
};

// Builds the distinguishing graph of a semantically valid code.  Collapsed
// b-saddles are materialized as Gap units from the boundary alternation.
DecodeResult decode(const FlowCode& code);

// Token-level build without semantic validation (shared by decode and the
// connection-code validator).
DecodeResult decode_raw(const FlowCode& code);

// ---------------------------------------------------------------------------

enum class CanonMode : uint8_t { OrientedOnly, UpToReflection };

struct CanonicalResult {
  EncodeResult enc;
  Basepoint bp;
  Orient o = Orient::AsStored;
};

// Lexicographic minimum of the code over all admissible basepoints (every
// separatrix endpoint and transition mark) and the allowed orientations.
CanonicalResult canonical_code(const Graph& g, CanonMode mode);

// All admissible basepoints of g (used by canonicalization and tests).
std::vector<Basepoint> admissible_basepoints(const Graph& g);

// Canonical-basepoint encoding of the mirror image (plain Morse codes).
FlowCode symmetric_code(const FlowCode& code);

std::string canonical_string(const Graph& g, CanonMode mode);

}  // namespace morseflow
