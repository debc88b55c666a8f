#include "doctest.h"
#include "morseflow/bifurcation.hpp"
#include "morseflow/reversal.hpp"

using namespace morseflow;

namespace {

Graph decoded(const std::string& s) {
  auto p = parse_code(s);
  REQUIRE(p.ok);
  auto d = decode(p.code);
  CAPTURE(d.error);
  REQUIRE(d.ok);
  return d.g;
}

std::string emitted(const BifCode& b) {
  CHECK(b.error.empty());
  REQUIRE(b.ok);
  return serialize_code(b.primary);
}

// Fig-1 style flow: ends are allocated in written order, so
//   edge 1 = {0, 2}, edge 2 = {1, 3}, edge 3 = {4, 5}
Graph fig1() { return decoded("{12]0[}[123]{3}"); }

}  // namespace

TEST_CASE("SN+ A-code of the inner source separatrix") {
  Graph g = fig1();
  BifMark m;
  m.end = 2;  // edge 1's end on the internal circle
  BifCode c = make_a_code(g, m, KindTag{BifBase::SN, +1, 'A'});
  CHECK(emitted(c) == "SN+^A[123]{12]0[}{3}");
}

TEST_CASE("SN- A-code of the separatrix leaving the first saddle") {
  Graph g = fig1();
  BifMark m;
  m.end = 0;  // edge 1's unstable sector toward the internal sink
  BifCode c = make_a_code(g, m, KindTag{BifBase::SN, -1, 'A'});
  CHECK(emitted(c) == "SN-^A[123]{1]0[3}{2}");
}

TEST_CASE("SN+ B-code via the collapse") {
  Graph g = fig1();
  BifMark m;
  m.end = 2;
  CollapseOut col = collapse_mark(g, m, KindTag{BifBase::SN, +1, 'A'});
  CAPTURE(col.error);
  REQUIRE(col.ok);
  CHECK(check_flow(col.g).ok);
  BifCode b = make_b_code(col.g, col.bmark, KindTag{BifBase::SN, +1, 'B'});
  CHECK(emitted(b) == "SN+^B{(12)1]0[}{2}");
}

TEST_CASE("SN- B-code via reversal and collapse") {
  Graph g = fig1();
  auto rev = reverse_flow(g);
  REQUIRE(rev.ok);
  BifMark m;
  m.end = rev.slot_of_turn[0];
  REQUIRE(m.end >= 0);
  CollapseOut col = collapse_mark(rev.g, m, KindTag{BifBase::SN, +1, 'A'});
  CAPTURE(col.error);
  REQUIRE(col.ok);
  BifCode b = make_b_code(col.g, col.bmark, KindTag{BifBase::SN, +1, 'B'});
  REQUIRE(b.ok);
  FlowCode code = b.primary;
  code.prefix = KindTag{BifBase::SN, -1, 'B'};
  CHECK(serialize_code(code) == "SN-^B{(12)]0[2}{1}");
}

TEST_CASE("BSN+ A- and B-codes of the four-source disk flow") {
  Graph g = decoded("{[1]0[]}[1]");
  // units: Src[1], Zero, Src[], Gap
  BifMark m;
  m.circle = 0;
  m.unit = 3;   // the collapsed b-saddle
  m.unit2 = 0;  // the adjacent source carrying separatrix 1
  BifCode a = make_a_code(g, m, KindTag{BifBase::BSN, +1, 'A'});
  CHECK(emitted(a) == "BSN+^A{[1]0[]}[1]");

  CollapseOut col = collapse_mark(g, m, KindTag{BifBase::BSN, +1, 'A'});
  CAPTURE(col.error);
  REQUIRE(col.ok);
  CHECK(check_flow(col.g).ok);
  BifCode b = make_b_code(col.g, col.bmark, KindTag{BifBase::BSN, +1, 'B'});
  CHECK(emitted(b) == "BSN+^B{[(1)]0}[1]");
}

TEST_CASE("HS+ codes on the worked flow") {
  Graph g = fig1();
  BifMark a;
  a.circle = 0;
  a.unit = 0;  // boundary source
  a.index = 0; // its first separatrix
  CHECK(emitted(make_a_code(g, a, KindTag{BifBase::HS, +1, 'A'})) == "HS+^A{12]0[}[123]{3}");

  BifMark b;
  b.circle = 2;
  b.unit = 0;  // the a-saddle on the inner circle
  CHECK(emitted(make_b_code(g, b, KindTag{BifBase::HS, +1, 'B'})) == "HS+^B{1}[123]{23]0[}");
}

TEST_CASE("HN+ codes on the worked flow") {
  Graph g = fig1();
  BifMark a;
  a.circle = 2;
  a.unit = 0;  // the a-saddle with its entering separatrix
  CHECK(emitted(make_a_code(g, a, KindTag{BifBase::HN, +1, 'A'})) == "HN+^A{1}[123]{23]0[}");

  BifMark b;
  b.circle = 0;
  b.unit = 0;  // the boundary source
  CHECK(emitted(make_b_code(g, b, KindTag{BifBase::HN, +1, 'B'})) == "HN+^B{[12]0}[123]{3}");
}

TEST_CASE("BDS A-code on the seven-point disk flow") {
  Graph g = decoded("{120}[1][2]");
  // units: ASad(1), Gap, ASad(2), Zero
  BifMark m;
  m.circle = 0;
  m.unit = 0;
  m.unit2 = 1;
  CHECK(emitted(make_a_code(g, m, KindTag{BifBase::BDS, 0, 'A'})) == "BDS^A{120}[1][2]");
}

TEST_CASE("BDS B-code of the worked flow") {
  Graph g = fig1();
  BifMark m;
  m.end = 3;    // edge 2's end on the internal circle (the cell separatrix)
  m.circle = 2;
  m.unit = 1;   // the trajectory from the hidden b-saddle back to the a-saddle
  BifCode b = make_b_code(g, m, KindTag{BifBase::BDS, 0, 'B'});
  CHECK(emitted(b) == "BDS^B{1}[12(3)]{23]0[}");
}

TEST_CASE("connection codes regenerate from their diagrams") {
  Graph sc = decoded("SC{12]0[}[2]");
  CHECK(emitted(saddle_connection_code(sc, KindTag{BifBase::SC, 0, 0})) == "SC{12]0[}[2]");

  Graph hsc = decoded("HSC{10[2]0}[2]");
  CHECK(emitted(saddle_connection_code(hsc, KindTag{BifBase::HSC, +1, 0})) == "HSC+{10[2]0}[2]");

  Graph bsc = decoded("BSC{12}{1}{2]0[}");
  CHECK(emitted(saddle_connection_code(bsc, KindTag{BifBase::BSC, 0, 0})) == "BSC{12}{1}{2]0[}");
}

TEST_CASE("syntactic B-to-A conversions reproduce the worked pairs") {
  auto conv = [](const char* s) {
    auto p = parse_code(s);
    REQUIRE(p.ok);
    std::string err;
    FlowCode a = b_to_a(p.code, &err);
    CAPTURE(err);
    REQUIRE(!a.lists.empty());
    return serialize_code(a);
  };
  CHECK(conv("SN+^B{(12)1]0[}{2}") == "SN+^A[123]{12]0[}{3}");
  CHECK(conv("BDS^B{1}[12(3)]{23]0[}") == "BDS^A{12}{1]0[3}[23]");
  CHECK(conv("BSN+^B{[(1)]0}[1]") == "BSN+^A{[1]0[]}[1]");
}

TEST_CASE("HS and HN B-codes do not convert") {
  auto p = parse_code("HS+^B{1}[123]{23]0[}");
  REQUIRE(p.ok);
  std::string err;
  FlowCode a = b_to_a(p.code, &err);
  CHECK(a.lists.empty());
  CHECK(err.find("NotConvertibleKind") != std::string::npos);
}

TEST_CASE("HS- A-code equals the HS+ A-code of the reversed flow") {
  // mark the boundary sink of the worked flow and one of its incoming
  // separatrices (both arrive from internal saddles)
  Graph g = fig1();
  auto rev = reverse_flow(g);
  REQUIRE(rev.ok);
  BifMark minus;
  minus.circle = 0;
  minus.unit = 1;  // the Zero unit of the outer circle
  minus.index = 0;
  BifCode via_minus = make_a_code(g, minus, KindTag{BifBase::HS, -1, 'A'});
  REQUIRE(via_minus.ok);
  BifMark plus = minus;
  BifCode direct = make_a_code(rev.g, plus, KindTag{BifBase::HS, +1, 'A'});
  REQUIRE(direct.ok);
  FlowCode relabeled = direct.primary;
  relabeled.prefix = KindTag{BifBase::HS, -1, 'A'};
  CHECK(serialize_code(via_minus.primary) == serialize_code(relabeled));
}
