#pragma once

#include <map>
#include <string>

#include "morseflow/graph.hpp"

// Time reversal of a flow at the distinguishing-graph level.  Sources and
// sinks trade places: every interior face becomes a source circle (or a
// boundary source at its sink), boundary sources become sinks, a-saddles
// become collapsed b-saddles and vice versa.  The surface orientation is
// kept, so circle positions and cyclic orders survive.

namespace morseflow {

struct ReverseResult {
  bool ok = false;
  std::string error;
  Graph g;

  // old end e -> new end carrying the reversed stable separatrix that the
  // walk turn at e's site produced (-1 when that chord reverses to nothing)
  std::vector<int> slot_of_turn;

  // old (circle, unit) of a Gap -> the reversed a-saddle's end
  std::map<std::pair<int, int>, int> asad_end_of_gap;

  // boundary circles keep their index and unit positions; internal circles
  // are replaced by one circle per zero-free face, appended in face order
  std::vector<int> circle_of_face;  // face index -> new circle (-1 if boundary fan)
};

ReverseResult reverse_flow(const Graph& g);

}  // namespace morseflow
