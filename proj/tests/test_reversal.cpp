#include "doctest.h"
#include "morseflow/codec.hpp"
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

std::string canon(const Graph& g) { return canonical_string(g, CanonMode::UpToReflection); }

}  // namespace

TEST_CASE("reversal of tiny flows") {
  // the trivial disk flow is self-inverse
  Graph g = decoded("{[]0}");
  auto r = reverse_flow(g);
  CAPTURE(r.error);
  REQUIRE(r.ok);
  CHECK(canon(r.g) == canon(g));

  // source + hidden b-saddle reverses to sink + a-saddle, and back
  Graph h = decoded("{[]}");
  auto rh = reverse_flow(h);
  REQUIRE(rh.ok);
  CHECK(canon(rh.g) != canon(h));
  auto back = reverse_flow(rh.g);
  REQUIRE(back.ok);
  CHECK(canon(back.g) == canon(h));
}

TEST_CASE("reversal is an involution on sample flows") {
  for (const char* s : {"{[]0}", "{[]}", "{[1]0}{1}", "{[]0[]}", "{12]0[}[123]{3}",
                        "{[12]0}[123]{3}", "{120}[1][2]", "{[1]0[]}[1]", "{12}{1]0[3}[23]"}) {
    CAPTURE(s);
    Graph g = decoded(s);
    auto r1 = reverse_flow(g);
    CAPTURE(r1.error);
    REQUIRE(r1.ok);
    CHECK(check_flow(r1.g).ok);
    auto r2 = reverse_flow(r1.g);
    CAPTURE(r2.error);
    REQUIRE(r2.ok);
    CHECK(canon(r2.g) == canon(g));
  }
}

TEST_CASE("reversal swaps the combination counts") {
  Graph g = decoded("{12]0[}[123]{3}");
  auto t = trace_faces(g);
  CombinationVector v = combination_of(g, t);
  auto r = reverse_flow(g);
  REQUIRE(r.ok);
  CombinationVector w = combination_of(r.g, trace_faces(r.g));
  CHECK(w == v.reversed());
}

TEST_CASE("the four-point cylinder flows are self-inverse") {
  // source+sink on one circle, a-saddle+b-saddle on the other
  Graph g = decoded("{[1]0}{1}");
  auto r = reverse_flow(g);
  REQUIRE(r.ok);
  CHECK(canon(r.g) == canon(g));
}

TEST_CASE("connection diagrams reverse consistently") {
  // internal connection reverses to an internal connection
  Graph sc = decoded("SC{12]0[}[2]");
  auto r = reverse_flow(sc);
  CAPTURE(r.error);
  REQUIRE(r.ok);
  CHECK(r.g.has_junction());
  auto r2 = reverse_flow(r.g);
  REQUIRE(r2.ok);
  CHECK(r2.g.has_junction());

  // half-boundary connection reverses to the mirror-signed structure
  Graph hsc = decoded("HSC{10[2]0}[2]");
  auto h1 = reverse_flow(hsc);
  CAPTURE(h1.error);
  REQUIRE(h1.ok);
  CHECK(!h1.g.has_junction());  // the reversed T-base starts the connection
  auto h2 = reverse_flow(h1.g);
  CAPTURE(h2.error);
  REQUIRE(h2.ok);
  CHECK(h2.g.has_junction());

  // boundary connection reverses to a boundary connection
  Graph bsc = decoded("BSC{12}{1}{2]0[}");
  auto b1 = reverse_flow(bsc);
  CAPTURE(b1.error);
  REQUIRE(b1.ok);
  auto b2 = reverse_flow(b1.g);
  REQUIRE(b2.ok);
}
