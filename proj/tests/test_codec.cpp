#include "doctest.h"
#include "morseflow/codec.hpp"

using namespace morseflow;

namespace {

FlowCode parsed(const std::string& s) {
  auto p = parse_code(s);
  REQUIRE(p.ok);
  return p.code;
}

Graph decoded(const std::string& s) {
  auto d = decode(parsed(s));
  CAPTURE(d.error);
  REQUIRE(d.ok);
  return d.g;
}

}  // namespace

TEST_CASE("cycle algorithm on the worked example") {
  auto c = cycles_of_code(parsed("{12]0[}[123]{3}"));
  REQUIRE(c.ok);
  CHECK(c.cycles.size() == 2);
  int zero_cycles = 0;
  for (const auto& cy : c.cycles) zero_cycles += cy.zeros;
  CHECK(zero_cycles == 1);
}

TEST_CASE("cycle algorithm trivia") {
  auto c = cycles_of_code(parsed("{[]0}"));
  REQUIRE(c.ok);
  REQUIRE(c.cycles.size() == 1);
  CHECK(c.cycles[0].zeros == 1);

  auto bad = cycles_of_code(parsed("[12]{1}{2}{2}"));
  CHECK(!bad.ok);  // 2 occurs three times
}

TEST_CASE("semantic validation matches the code properties") {
  auto rep = validate_semantics(parsed("{12]0[}[123]{3}"));
  CHECK(rep.ok());
  CHECK(rep.V == 3);
  CHECK(rep.E == 3);
  CHECK(rep.F == 2);

  // two trivial lists share no numbers
  auto r2 = validate_semantics(parsed("{[]0}{[]0}"));
  CHECK(!r2.ok());
  bool p3 = false;
  for (auto& f : r2.findings) p3 |= (f.rule == "P3");
  CHECK(p3);

  // a number occurring once
  auto r3 = validate_semantics(parsed("{12]0[}[124]{3}"));
  CHECK(!r3.ok());

  // both ends of an edge on thick arcs
  auto r4 = validate_semantics(parsed("{1}{1}"));
  CHECK(!r4.ok());
  bool src = false;
  for (auto& f : r4.findings) src |= (f.rule == "SRC");
  CHECK(src);
}

TEST_CASE("decode and face tracing agree with the cycle algorithm") {
  for (const char* s : {"{12]0[}[123]{3}", "{[]0}", "{[1]0}{1}", "{[]0[]}", "{[]}",
                        "{[12]0}[123]{3}", "{120}[1][2]", "{[1]0[]}[1]"}) {
    CAPTURE(s);
    Graph g = decoded(s);
    FaceTrace t = trace_faces(g);
    auto cyc = cycles_of_code(parsed(s));
    REQUIRE(cyc.ok);
    CHECK(t.faces.size() == cyc.cycles.size());
    FlowCheck chk = check_flow(g);
    CAPTURE(chk.why);
    CHECK(chk.ok);
  }
}

TEST_CASE("euler counts of small graphs") {
  Graph g = decoded("{[]0}");
  FaceTrace t = trace_faces(g);
  CHECK(t.faces.size() == 1);
  CHECK(list_count(g) == 1);
  CHECK(saddle_count(g) == 0);

  Graph h = decoded("{[1]0}{1}");
  FaceTrace th = trace_faces(h);
  CHECK(th.faces.size() == 1);
  CHECK(list_count(h) == 2);
  CHECK(saddle_count(h) == 1);

  Graph f = decoded("{12]0[}[123]{3}");
  CHECK(trace_faces(f).faces.size() == 2);
}

TEST_CASE("boundary cycle count equals the list count") {
  Graph g = decoded("{12]0[}[123]{3}");
  CHECK(g.circles.size() == 3);
  Graph h = decoded("{[]0}");
  CHECK(h.circles.size() == 1);
}

TEST_CASE("encode reproduces the worked example from its basepoint") {
  Graph g = decoded("{12]0[}[123]{3}");
  // the basepoint is the first end of the boundary source's span
  Basepoint bp;
  bp.what = Basepoint::AtEnd;
  // find the boundary circle's source span and take its first end
  for (int c = 0; c < (int)g.circles.size(); c++) {
    if (!g.circles[c].boundary) continue;
    for (const auto& u : g.circles[c].units)
      if (u.kind == UnitKind::Src && u.ends.size() == 2) bp.end = u.ends[0];
  }
  REQUIRE(bp.end >= 0);
  auto enc = encode(g, bp, Orient::AsStored);
  REQUIRE(enc.ok);
  CHECK(serialize_code(enc.code) == "{12]0[}[123]{3}");
}

TEST_CASE("canonical code is basepoint-invariant") {
  Graph g = decoded("{12]0[}[123]{3}");
  std::string canon = canonical_string(g, CanonMode::OrientedOnly);
  CHECK(!canon.empty());
  // decoding any re-encoding yields the same canonical form
  for (const Basepoint& bp : admissible_basepoints(g)) {
    auto enc = encode(g, bp, Orient::AsStored);
    REQUIRE(enc.ok);
    Graph h = decoded(serialize_code(enc.code));
    CHECK(canonical_string(h, CanonMode::OrientedOnly) == canon);
  }
}

TEST_CASE("canonical code under reflection absorbs mirroring") {
  Graph g = decoded("{12]0[}[123]{3}");
  Graph m = mirrored(g);
  CHECK(canonical_string(g, CanonMode::UpToReflection) ==
        canonical_string(m, CanonMode::UpToReflection));
}

TEST_CASE("symmetric code is an involution up to re-encoding") {
  for (const char* s : {"{[]0}", "{[1]0}{1}", "{12]0[}[123]{3}"}) {
    CAPTURE(s);
    FlowCode c = parsed(s);
    FlowCode sym = symmetric_code(c);
    REQUIRE(!sym.lists.empty());
    FlowCode back = symmetric_code(sym);
    Graph g0 = decoded(s);
    auto d = decode(back);
    REQUIRE(d.ok);
    CHECK(canonical_string(g0, CanonMode::OrientedOnly) ==
          canonical_string(d.g, CanonMode::OrientedOnly));
  }
  CHECK(serialize_code(symmetric_code(parsed("{[]0}"))) == "{[]0}");
}

TEST_CASE("connection codes decode and validate") {
  for (const char* s : {"SC{12]0[}[2]", "HSC{10[2]0}[2]", "BSC{12}{1}{2]0[}"}) {
    CAPTURE(s);
    auto rep = validate_semantics(parsed(s));
    for (auto& f : rep.findings) CAPTURE(f.rule + ": " + f.detail);
    CHECK(rep.ok());
    auto d = decode(parsed(s));
    CAPTURE(d.error);
    CHECK(d.ok);
  }
}

TEST_CASE("degenerate codes") {
  // single empty boundary list: Euler fails
  CHECK(!validate_semantics(parsed("{}")).ok());
  // source plus hidden b-saddle: a real three-point flow
  CHECK(validate_semantics(parsed("{[]}")).ok());
  // two sources, sink, hidden b-saddle: a real four-point flow
  CHECK(validate_semantics(parsed("{[]0[]}")).ok());
  // adjacent boundary sinks in one face
  CHECK(!validate_semantics(parsed("{[1]00}{1}")).ok());
}
