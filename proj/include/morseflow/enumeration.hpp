#pragma once

#include <string>
#include <vector>

#include "morseflow/bifurcation.hpp"
#include "morseflow/graph.hpp"

// Exhaustive classification: singular-point count vectors, Morse flows up to
// equivalence (optionally also up to reversal), and codimension-1
// bifurcations per kind, with the published-table comparison.

namespace morseflow {

// All solutions of the count constraints at exactly n points (no quotient).
std::vector<CombinationVector> combination_solutions(SurfaceId s, int n);

// Solutions over [n_lo, n_hi] up to reversal; representatives are the
// lexicographic maximum of each {v, reversed(v)} pair.
std::vector<CombinationVector> combinations(SurfaceId s, int n_lo, int n_hi);

CombinationVector combination_representative(const CombinationVector& v);

enum class Quotient : uint8_t { UpToEquivalence, UpToEquivalenceAndReversal };

struct MorseFamily {
  std::vector<Graph> flows;        // sorted by canonical key
  std::vector<std::string> keys;   // canonical code (reflection absorbed)
  std::vector<bool> self_inverse;  // reversal fixes the class
};

// Generates every Morse flow with n singular points on the surface, one
// representative per class of the requested quotient.  Deterministic.
MorseFamily enumerate_morse(SurfaceId s, int n, Quotient q);

struct BifFamily {
  std::vector<std::string> keys;  // sorted equivalence keys (code or code pair)
  std::vector<FlowCode> reps;     // one emitted code per class
};

// Bifurcation classes with n singular points at the bifurcation moment.
// Saddle-node kinds scan flows with n+1 points for collapsible marks;
// HS/HN mark the moment flows; connection kinds rewrite them.
BifFamily enumerate_bifurcations(SurfaceId s, int n, BifBase base, int sign = +1);

// Connection diagrams of all kinds pooled, up to equivalence and reversal
// (the published figure families).
int connection_family_size(SurfaceId s, int n_max);

struct TableRow {
  std::string surface;
  int n = 0;
  int counts[8] = {0};  // SN+, BSN+, HS+, HN+, BDS, SC, HSC+, BSC
  int sum = 0;          // 2*(sign-paired kinds) + unpaired kinds
  int paper[8] = {-1, -1, -1, -1, -1, -1, -1, -1};
  int paper_sum = -1;
};

// Computed counts beside the published values; deltas are reported and
// never overwrite either side.
std::vector<TableRow> summary_table(const std::vector<SurfaceId>& surfaces, int n_lo, int n_hi);

std::string table_text(const std::vector<TableRow>& rows);
std::string table_csv(const std::vector<TableRow>& rows);

// The published table values (paper[] and paper_sum) for a surface/row.
bool paper_row(const std::string& surface, int n, int out_counts[8], int& out_sum);

const char* surface_name(SurfaceId s);

}  // namespace morseflow
