#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Textual flow codes: bracketed token lists with an optional bifurcation
// prefix.  A code is a sequence of lists; boundary lists are written in
// curly braces and may contain square-bracket transition marks, internal
// source lists are written in square brackets.

namespace morseflow {

enum class TokKind : uint8_t {
  Num,       // saddle index, >= 1
  Zero,      // boundary sink
  OpenSq,    // '[' inside a boundary list (thick->dashed transition)
  CloseSq,   // ']' inside a boundary list (dashed->thick transition)
  OpenPar,   // '(' highlight group start (B-codes)
  ClosePar,  // ')' highlight group end
  Blank,     // the empty highlight "( )"
};

struct Token {
  TokKind kind;
  int num = 0;  // for TokKind::Num

  bool operator==(const Token&) const = default;
};

inline Token tok_num(int n) { return Token{TokKind::Num, n}; }
inline Token tok(TokKind k) { return Token{k, 0}; }

enum class ListKind : uint8_t { Boundary, InternalSource };

struct CodeList {
  ListKind kind;
  std::vector<Token> items;

  bool operator==(const CodeList&) const = default;
};

// Bifurcation kind tag.  sign: +1, -1, or 0 when the kind carries none;
// form: 'A', 'B', or 0 for the connection kinds and moment diagrams.
enum class BifBase : uint8_t { SN, BSN, HS, HN, BDS, SC, HSC, BSC };

struct KindTag {
  BifBase base;
  int sign = 0;
  char form = 0;

  bool operator==(const KindTag&) const = default;
};

std::string kind_name(const KindTag& k);  // canonical spelling, e.g. "SN+^A"

struct FlowCode {
  std::optional<KindTag> prefix;
  std::vector<CodeList> lists;
  bool comma_mode = false;  // true iff any saddle index >= 10

  bool operator==(const FlowCode&) const = default;
};

// ---------------------------------------------------------------------------
// Diagnostics

enum class DiagCode : uint8_t {
  UnbalancedBracket,
  IllegalTokenInContext,
  BadPrefix,
  EmptyCode,
  CommaRuleViolation,
  RepairedBracket,  // warning: a stray '}' was re-read as ']'
};

struct Diag {
  DiagCode code;
  size_t offset = 0;  // byte offset into the input
  std::string detail;
};

std::string diag_string(const Diag& d);

struct ParseOutcome {
  bool ok = false;
  FlowCode code;
  Diag error;                  // valid when !ok
  std::vector<Diag> warnings;  // e.g. bracket repair
};

// Parses a candidate flow code.  Whitespace is insignificant.  Prefixes are
// accepted in plain ("SN+^A") and underscore ("SN_+^A") spellings; output
// spelling is always the plain one.  Never throws on arbitrary input.
ParseOutcome parse_code(std::string_view text);

// Canonical text of a code.  Commas separate adjacent numbers and zeros iff
// comma_mode; the empty highlight is written "( )".
std::string serialize_code(const FlowCode& code);

// Recomputes comma_mode from the numbers present.
void fix_comma_mode(FlowCode& code);

// ---------------------------------------------------------------------------
// Prefix-dialect checks (start fragments and highlight placement).

struct SyntaxFinding {
  std::string rule;
  std::string detail;
};

// Checks the start-fragment and parenthesis/bracket placement rules for the
// code's prefix kind.  Empty report = admissible.  Codes without a prefix
// are checked only for highlight-group well-formedness (none allowed).
std::vector<SyntaxFinding> validate_syntax(const FlowCode& code);

// Token ordering used for canonical comparisons:
// '{' < '[' < '(' < '0' < 1 < 2 < ... < ')' < ']' < '}'.
int token_rank(const Token& t);

// Lexicographic comparison of whole codes under token_rank, including list
// delimiters.  Prefix tags are ignored (callers compare same-kind codes).
bool code_less(const FlowCode& a, const FlowCode& b);

}  // namespace morseflow
