#include "morseflow/code.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <sstream>

namespace morseflow {

std::string kind_name(const KindTag& k) {
  static const char* base_names[] = {"SN", "BSN", "HS", "HN", "BDS", "SC", "HSC", "BSC"};
  std::string s = base_names[static_cast<int>(k.base)];
  if (k.sign > 0) s += '+';
  if (k.sign < 0) s += '-';
  if (k.form) {
    s += '^';
    s += k.form;
  }
  return s;
}

std::string diag_string(const Diag& d) {
  static const char* names[] = {"UnbalancedBracket", "IllegalTokenInContext", "BadPrefix",
                                "EmptyCode",         "CommaRuleViolation",    "RepairedBracket"};
  std::ostringstream os;
  os << names[static_cast<int>(d.code)] << " at byte " << d.offset;
  if (!d.detail.empty()) os << ": " << d.detail;
  return os.str();
}

namespace {

// Longest-match prefix table.  Underscore before the sign is optional on
// input; the canonical spelling has none.
struct PrefixSpelling {
  const char* text;
  BifBase base;
  int sign;
  bool wants_form;  // ^A or ^B must follow
};

constexpr PrefixSpelling kPrefixes[] = {
    {"BSN_+", BifBase::BSN, +1, true}, {"BSN_-", BifBase::BSN, -1, true},
    {"BSN+", BifBase::BSN, +1, true},  {"BSN-", BifBase::BSN, -1, true},
    {"HSC_+", BifBase::HSC, +1, false}, {"HSC_-", BifBase::HSC, -1, false},
    {"HSC+", BifBase::HSC, +1, false}, {"HSC-", BifBase::HSC, -1, false},
    {"HSC", BifBase::HSC, +1, false},  // paper writes the + kind unsigned
    {"BSC", BifBase::BSC, 0, false},
    {"BDS", BifBase::BDS, 0, true},
    {"SN_+", BifBase::SN, +1, true},   {"SN_-", BifBase::SN, -1, true},
    {"SN+", BifBase::SN, +1, true},    {"SN-", BifBase::SN, -1, true},
    {"HS_+", BifBase::HS, +1, true},   {"HS_-", BifBase::HS, -1, true},
    {"HS+", BifBase::HS, +1, true},    {"HS-", BifBase::HS, -1, true},
    {"HN_+", BifBase::HN, +1, true},   {"HN_-", BifBase::HN, -1, true},
    {"HN+", BifBase::HN, +1, true},    {"HN-", BifBase::HN, -1, true},
    {"SC", BifBase::SC, 0, false},
};

struct Lexer {
  std::string_view text;
  size_t pos = 0;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) pos++;
  }
  bool eof() {
    skip_ws();
    return pos >= text.size();
  }
  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }
  char get() {
    skip_ws();
    return pos < text.size() ? text[pos++] : '\0';
  }
};

ParseOutcome fail(DiagCode c, size_t off, std::string detail) {
  ParseOutcome out;
  out.ok = false;
  out.error = Diag{c, off, std::move(detail)};
  return out;
}

// Parses the body (everything after the prefix).  Digits are individual
// tokens unless the code contains commas, in which case digit runs are
// multi-digit numbers.
ParseOutcome parse_body(std::string_view text, size_t base_off, std::optional<KindTag> prefix,
                        bool comma_mode) {
  ParseOutcome out;
  out.code.prefix = prefix;
  out.code.comma_mode = comma_mode;
  Lexer lx{text};

  auto read_number = [&](int& value) -> bool {
    // first digit already known non-'0' or part of a multi-digit run
    size_t start = lx.pos;
    long v = 0;
    while (lx.pos < lx.text.size() && std::isdigit(static_cast<unsigned char>(lx.text[lx.pos]))) {
      v = v * 10 + (lx.text[lx.pos] - '0');
      lx.pos++;
      if (v > 1000000) return false;
      if (!comma_mode) break;  // single-digit tokens without commas
    }
    (void)start;
    value = static_cast<int>(v);
    return true;
  };

  bool in_list = false;
  ListKind list_kind = ListKind::Boundary;
  bool in_paren = false;  // inside a highlight group
  CodeList cur;
  size_t list_off = 0;
  int paren_items = 0;
  bool last_was_numlike = false;  // for comma-rule enforcement

  // Boundary lists may start mid-arc, so their '[' / ']' structure can wrap
  // around the end of the list.  Brackets are collected permissively and the
  // cyclic rules are checked when the list closes.
  auto close_boundary_list = [&](size_t off) -> std::optional<Diag> {
    int opens = 0, closes = 0;
    TokKind prev = TokKind::Blank;
    bool have_prev = false;
    TokKind first_bracket = TokKind::Blank;
    for (const Token& t : cur.items) {
      if (t.kind != TokKind::OpenSq && t.kind != TokKind::CloseSq) continue;
      if (t.kind == TokKind::OpenSq) opens++;
      else closes++;
      if (!have_prev) first_bracket = t.kind;
      if (have_prev && prev == t.kind)
        return Diag{DiagCode::UnbalancedBracket, off, "brackets do not alternate"};
      prev = t.kind;
      have_prev = true;
    }
    if (opens != closes)
      return Diag{DiagCode::UnbalancedBracket, off, "unequal '[' and ']' counts"};
    (void)first_bracket;
    // zeros must lie outside the cyclic bracket regions
    size_t n = cur.items.size();
    size_t first_open = n;
    for (size_t i = 0; i < n; i++)
      if (cur.items[i].kind == TokKind::OpenSq) {
        first_open = i;
        break;
      }
    if (first_open < n) {
      bool inside = false;
      for (size_t s = 0; s < n; s++) {
        size_t i = (first_open + s) % n;
        if (cur.items[i].kind == TokKind::OpenSq) inside = true;
        else if (cur.items[i].kind == TokKind::CloseSq) inside = false;
        else if (inside && cur.items[i].kind == TokKind::Zero)
          return Diag{DiagCode::IllegalTokenInContext, off, "'0' inside '[...]'"};
      }
    }
    return std::nullopt;
  };

  while (!lx.eof()) {
    size_t off = base_off + lx.pos;
    char c = lx.get();
    switch (c) {
      case '{':
        if (in_list) return fail(DiagCode::IllegalTokenInContext, off, "'{' inside a list");
        in_list = true;
        list_kind = ListKind::Boundary;
        cur = CodeList{ListKind::Boundary, {}};
        list_off = off;
        last_was_numlike = false;
        break;
      case '}': {
        if (!in_list || list_kind != ListKind::Boundary)
          return fail(DiagCode::UnbalancedBracket, off, "unexpected '}'");
        if (in_paren) return fail(DiagCode::UnbalancedBracket, off, "'}' inside '(...)'");
        if (auto d = close_boundary_list(off)) {
          ParseOutcome bad;
          bad.error = *d;
          return bad;
        }
        out.code.lists.push_back(cur);
        in_list = false;
        break;
      }
      case '[':
        if (!in_list) {
          in_list = true;
          list_kind = ListKind::InternalSource;
          cur = CodeList{ListKind::InternalSource, {}};
          list_off = off;
          last_was_numlike = false;
        } else if (list_kind == ListKind::Boundary) {
          if (in_paren) return fail(DiagCode::IllegalTokenInContext, off, "'[' inside '(...)'");
          cur.items.push_back(tok(TokKind::OpenSq));
          last_was_numlike = false;
        } else {
          return fail(DiagCode::IllegalTokenInContext, off, "'[' inside an internal list");
        }
        break;
      case ']':
        if (!in_list) return fail(DiagCode::UnbalancedBracket, off, "unexpected ']'");
        if (in_paren) return fail(DiagCode::UnbalancedBracket, off, "']' inside '(...)'");
        if (list_kind == ListKind::InternalSource) {
          out.code.lists.push_back(cur);
          in_list = false;
        } else {
          cur.items.push_back(tok(TokKind::CloseSq));
        }
        last_was_numlike = false;
        break;
      case '(':
        if (!in_list) return fail(DiagCode::IllegalTokenInContext, off, "'(' outside a list");
        if (in_paren) return fail(DiagCode::IllegalTokenInContext, off, "nested '('");
        cur.items.push_back(tok(TokKind::OpenPar));
        in_paren = true;
        paren_items = 0;
        last_was_numlike = false;
        break;
      case ')':
        if (!in_paren) return fail(DiagCode::UnbalancedBracket, off, "')' without '('");
        if (paren_items == 0) cur.items.push_back(tok(TokKind::Blank));
        cur.items.push_back(tok(TokKind::ClosePar));
        in_paren = false;
        last_was_numlike = false;
        break;
      case ',':
        if (!comma_mode) return fail(DiagCode::CommaRuleViolation, off, "comma in a single-digit code");
        if (!last_was_numlike) return fail(DiagCode::CommaRuleViolation, off, "comma not between numbers");
        last_was_numlike = false;
        break;
      default: {
        if (!std::isdigit(static_cast<unsigned char>(c))) {
          return fail(DiagCode::IllegalTokenInContext, off,
                      std::string("unexpected character '") + c + "'");
        }
        if (!in_list) return fail(DiagCode::IllegalTokenInContext, off, "number outside a list");
        if (comma_mode && last_was_numlike)
          return fail(DiagCode::CommaRuleViolation, off, "missing comma between numbers");
        lx.pos--;  // re-read the digit
        int value = 0;
        if (!read_number(value))
          return fail(DiagCode::IllegalTokenInContext, off, "number too large");
        if (value == 0) {
          if (list_kind == ListKind::InternalSource)
            return fail(DiagCode::IllegalTokenInContext, off, "'0' inside an internal list");
          if (in_paren) return fail(DiagCode::IllegalTokenInContext, off, "'0' inside '(...)'");
          cur.items.push_back(tok(TokKind::Zero));
        } else {
          cur.items.push_back(tok_num(value));
          if (in_paren) paren_items++;
        }
        last_was_numlike = true;
        break;
      }
    }
  }
  if (in_list) {
    return fail(DiagCode::UnbalancedBracket, base_off + list_off, "missing list closer");
  }
  if (out.code.lists.empty())
    return fail(DiagCode::EmptyCode, base_off + text.size(), "no lists");

  // Highlight groups: at most one per code, and blanks only alone.
  int groups = 0;
  for (const auto& l : out.code.lists)
    for (size_t i = 0; i < l.items.size(); i++)
      if (l.items[i].kind == TokKind::OpenPar) groups++;
  if (groups > 1)
    return fail(DiagCode::IllegalTokenInContext, base_off, "more than one highlight group");

  // Comma rule: multi-digit saddles require comma mode.
  int max_num = 0;
  for (const auto& l : out.code.lists)
    for (const auto& t : l.items)
      if (t.kind == TokKind::Num) max_num = std::max(max_num, t.num);
  if (max_num >= 10 && !comma_mode)
    return fail(DiagCode::CommaRuleViolation, base_off, "index >= 10 requires commas");
  if (max_num < 10 && comma_mode)
    return fail(DiagCode::CommaRuleViolation, base_off, "commas present but all indices < 10");

  out.ok = true;
  return out;
}

std::optional<std::pair<KindTag, size_t>> parse_prefix(std::string_view text, bool& bad,
                                                       std::string& why) {
  bad = false;
  size_t i = 0;
  while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) i++;
  if (i >= text.size() || !std::isalpha(static_cast<unsigned char>(text[i]))) return std::nullopt;
  for (const auto& p : kPrefixes) {
    std::string_view name(p.text);
    if (text.substr(i, name.size()) != name) continue;
    size_t j = i + name.size();
    KindTag tag{p.base, p.sign, 0};
    if (j < text.size() && text[j] == '^') {
      j++;
      if (j >= text.size() || (text[j] != 'A' && text[j] != 'B')) {
        bad = true;
        why = "expected A or B after '^'";
        return std::nullopt;
      }
      tag.form = text[j];
      j++;
    }
    if (p.wants_form && tag.form == 0) {
      bad = true;
      why = "kind " + std::string(name) + " requires ^A or ^B";
      return std::nullopt;
    }
    if (!p.wants_form && tag.form != 0) {
      bad = true;
      why = "kind " + std::string(name) + " takes no ^A/^B";
      return std::nullopt;
    }
    return std::make_pair(tag, j);
  }
  bad = true;
  why = "unknown prefix";
  return std::nullopt;
}

}  // namespace

ParseOutcome parse_code(std::string_view text) {
  bool bad_prefix = false;
  std::string why;
  std::optional<KindTag> prefix;
  size_t body_start = 0;

  if (auto p = parse_prefix(text, bad_prefix, why)) {
    prefix = p->first;
    body_start = p->second;
  } else if (bad_prefix) {
    return fail(DiagCode::BadPrefix, 0, why);
  }

  std::string_view body = text.substr(body_start);
  bool comma_mode = body.find(',') != std::string_view::npos;
  ParseOutcome out = parse_body(body, body_start, prefix, comma_mode);
  if (out.ok) return out;

  // Single-token repair: a stray '}' where ']' balances the code (a known
  // typo pattern).  Accept only when exactly one substitution parses.
  if (out.error.code == DiagCode::UnbalancedBracket ||
      out.error.code == DiagCode::IllegalTokenInContext) {
    std::string buf(body);
    int fixes = 0;
    ParseOutcome fixed;
    size_t fix_pos = 0;
    for (size_t i = 0; i < buf.size(); i++) {
      if (buf[i] != '}') continue;
      buf[i] = ']';
      ParseOutcome attempt = parse_body(buf, body_start, prefix, comma_mode);
      if (attempt.ok) {
        fixes++;
        fixed = attempt;
        fix_pos = body_start + i;
      }
      buf[i] = '}';
    }
    if (fixes == 1) {
      fixed.warnings.push_back(
          Diag{DiagCode::RepairedBracket, fix_pos, "stray '}' read as ']'"});
      return fixed;
    }
  }
  return out;
}

std::string serialize_code(const FlowCode& code) {
  std::string s;
  if (code.prefix) s += kind_name(*code.prefix);
  for (const auto& l : code.lists) {
    s += (l.kind == ListKind::Boundary) ? '{' : '[';
    bool last_numlike = false;
    for (const auto& t : l.items) {
      bool numlike = (t.kind == TokKind::Num || t.kind == TokKind::Zero);
      if (code.comma_mode && numlike && last_numlike) s += ',';
      switch (t.kind) {
        case TokKind::Num: s += std::to_string(t.num); break;
        case TokKind::Zero: s += '0'; break;
        case TokKind::OpenSq: s += '['; break;
        case TokKind::CloseSq: s += ']'; break;
        case TokKind::OpenPar: s += '('; break;
        case TokKind::ClosePar: s += ')'; break;
        case TokKind::Blank: s += ' '; break;
      }
      last_numlike = numlike;
    }
    s += (l.kind == ListKind::Boundary) ? '}' : ']';
  }
  return s;
}

void fix_comma_mode(FlowCode& code) {
  int max_num = 0;
  for (const auto& l : code.lists)
    for (const auto& t : l.items)
      if (t.kind == TokKind::Num) max_num = std::max(max_num, t.num);
  code.comma_mode = max_num >= 10;
}

// ---------------------------------------------------------------------------
// Prefix-dialect syntax checks

namespace {

// Flattened token stream including list delimiters, for start-fragment tests.
std::vector<Token> flat_tokens(const FlowCode& code) {
  std::vector<Token> v;
  for (const auto& l : code.lists) {
    v.push_back(tok(l.kind == ListKind::Boundary ? TokKind::OpenPar : TokKind::OpenSq));
    // delimiters encoded separately below; this helper is only used where
    // exact delimiter identity matters, so keep a faithful encoding:
    v.pop_back();
    v.push_back(Token{l.kind == ListKind::Boundary ? TokKind::OpenPar : TokKind::OpenSq, -1});
    for (const auto& t : l.items) v.push_back(t);
    v.push_back(Token{l.kind == ListKind::Boundary ? TokKind::ClosePar : TokKind::CloseSq, -2});
  }
  return v;
}

bool is_list_open(const Token& t, ListKind k) {
  return t.num == -1 && t.kind == (k == ListKind::Boundary ? TokKind::OpenPar : TokKind::OpenSq);
}

// Whether the i-th item of a boundary list lies inside a square-bracket
// region under the cyclic reading (regions may wrap around the list end).
std::vector<bool> bracket_region(const CodeList& l) {
  std::vector<bool> in(l.items.size(), false);
  if (l.kind != ListKind::Boundary) {
    in.assign(l.items.size(), true);
    return in;
  }
  // Find the first OpenSq; walk cyclically from there.
  size_t n = l.items.size();
  size_t start = n;
  for (size_t i = 0; i < n; i++)
    if (l.items[i].kind == TokKind::OpenSq) {
      start = i;
      break;
    }
  if (start == n) return in;
  bool inside = false;
  for (size_t k = 0; k < n; k++) {
    size_t i = (start + k) % n;
    if (l.items[i].kind == TokKind::OpenSq) inside = true;
    else if (l.items[i].kind == TokKind::CloseSq) inside = false;
    else in[i] = inside;
  }
  return in;
}

struct Occurrence {
  int list, item;
};

std::vector<Occurrence> occurrences_of(const FlowCode& c, int num) {
  std::vector<Occurrence> v;
  for (size_t li = 0; li < c.lists.size(); li++)
    for (size_t i = 0; i < c.lists[li].items.size(); i++)
      if (c.lists[li].items[i].kind == TokKind::Num && c.lists[li].items[i].num == num)
        v.push_back({static_cast<int>(li), static_cast<int>(i)});
  return v;
}

}  // namespace

std::vector<SyntaxFinding> validate_syntax(const FlowCode& code) {
  std::vector<SyntaxFinding> findings;
  auto add = [&](std::string rule, std::string detail) {
    findings.push_back({std::move(rule), std::move(detail)});
  };

  // Highlight-group inventory.
  int groups = 0, group_list = -1, group_items = 0;
  bool group_blank = false, group_in_brackets = false;
  for (size_t li = 0; li < code.lists.size(); li++) {
    const auto& l = code.lists[li];
    auto region = bracket_region(l);
    for (size_t i = 0; i < l.items.size(); i++) {
      if (l.items[i].kind != TokKind::OpenPar) continue;
      groups++;
      group_list = static_cast<int>(li);
      group_in_brackets = (l.kind == ListKind::InternalSource) || region[i % region.size()];
      group_items = 0;
      for (size_t j = i + 1; j < l.items.size() && l.items[j].kind != TokKind::ClosePar; j++) {
        if (l.items[j].kind == TokKind::Blank) group_blank = true;
        if (l.items[j].kind == TokKind::Num) group_items++;
      }
    }
  }

  if (!code.prefix) {
    if (groups > 0) add("paren", "highlight group without a bifurcation prefix");
    return findings;
  }
  const KindTag k = *code.prefix;
  const bool is_b = k.form == 'B';

  if (code.lists.empty()) {
    add("start", "empty code");
    return findings;
  }
  const CodeList& first = code.lists.front();
  auto first_tok = [&](size_t i) -> const Token* {
    return i < first.items.size() ? &first.items[i] : nullptr;
  };

  // Start fragments.  Degenerate marked sources (no separatrices) make the
  // fragment "{[]" instead of "{[1"; both are admitted where noted.
  auto starts_num1 = [&](size_t at) {
    const Token* t = first_tok(at);
    return t && t->kind == TokKind::Num && t->num == 1;
  };
  auto is_open_sq = [&](size_t at) {
    const Token* t = first_tok(at);
    return t && t->kind == TokKind::OpenSq;
  };
  auto is_close_sq = [&](size_t at) {
    const Token* t = first_tok(at);
    return t && t->kind == TokKind::CloseSq;
  };
  auto is_open_par = [&](size_t at) {
    const Token* t = first_tok(at);
    return t && t->kind == TokKind::OpenPar;
  };

  switch (k.base) {
    case BifBase::SN:
      if (!is_b) {
        if (first.kind != ListKind::InternalSource || !starts_num1(0))
          add("start", "SN A-code must start [1");
      } else {
        if (!is_open_par(0)) add("start", "SN B-code must start with the highlight group");
      }
      break;
    case BifBase::BSN:
      if (!is_b) {
        if (first.kind != ListKind::Boundary || !is_open_sq(0) ||
            !(starts_num1(1) || is_close_sq(1)))
          add("start", "BSN A-code must start {[1 (or {[] for a bare source)");
      } else {
        if (first.kind != ListKind::Boundary)
          add("start", "BSN B-code must start with a boundary list");
      }
      break;
    case BifBase::HS:
      if (first.kind != ListKind::Boundary || !starts_num1(0))
        add("start", "HS code must start {1");
      break;
    case BifBase::HN:
      if (!is_b) {
        if (first.kind != ListKind::Boundary || !starts_num1(0))
          add("start", "HN A-code must start {1");
      } else {
        if (first.kind != ListKind::Boundary || !is_open_sq(0) ||
            !(starts_num1(1) || is_close_sq(1)))
          add("start", "HN B-code must start {[1 (or {[] for a bare source)");
      }
      break;
    case BifBase::BDS:
      if (!is_b) {
        if (first.kind != ListKind::Boundary || !starts_num1(0))
          add("start", "BDS A-code must start {1");
      } else {
        if (first.kind != ListKind::Boundary ||
            !(starts_num1(0) || is_open_sq(0)))
          add("start", "BDS B-code must start {1 or {[");
      }
      break;
    case BifBase::SC:
    case BifBase::HSC:
    case BifBase::BSC:
      // Connection codes begin at the connection; the first list starts with
      // its number 1 (SC lower-edge end lies in a source region, so the list
      // may open with a bracket first).
      break;
  }

  // Highlight-group placement.  Only SN/BSN/BDS B-codes carry one; HS/HN
  // B-codes are plain marked Morse codes.
  bool wants_group = is_b && (k.base == BifBase::SN || k.base == BifBase::BSN ||
                              k.base == BifBase::BDS);
  if (wants_group) {
    if (groups != 1) {
      add("paren", "B-code requires exactly one highlight group");
    } else {
      if (k.base == BifBase::BSN && !group_in_brackets)
        add("paren", "BSN B-code group must lie inside square brackets");
      if (k.base == BifBase::SN && !group_in_brackets)
        add("paren", "SN B-code group must lie inside a source region");
      if (k.base == BifBase::BDS && (group_items != 1 || group_blank))
        add("paren", "BDS B-code group must hold exactly one number");
    }
    (void)group_list;
  } else if (groups > 0) {
    add("paren", "this kind carries no highlight group");
  }

  // Bracket-placement rules for the first unit.
  auto occ1 = occurrences_of(code, 1);
  if (!occ1.empty() && k.form) {
    const auto& l0 = code.lists[occ1[0].list];
    auto region0 = bracket_region(l0);
    bool first1_in_brackets =
        l0.kind == ListKind::InternalSource || (occ1[0].item < (int)region0.size() && region0[occ1[0].item]);
    if (k.base == BifBase::HS && !is_b && !first1_in_brackets)
      add("unit1", "HS A-code: first 1 must lie in square brackets");
    if (k.base == BifBase::HS && is_b && first1_in_brackets)
      add("unit1", "HS B-code: first 1 must not lie in square brackets");
    if (k.base == BifBase::HN && !is_b) {
      if (occ1.size() < 2) {
        add("unit1", "HN A-code: 1 must occur twice");
      } else if (code.lists[occ1[1].list].kind != ListKind::InternalSource) {
        add("unit1", "HN A-code: second 1 must lie in an internal source list");
      }
    }
  }

  (void)flat_tokens;
  (void)is_list_open;
  return findings;
}

int token_rank(const Token& t) {
  switch (t.kind) {
    case TokKind::Num: return 4 + t.num;  // 1 -> 5, ...
    case TokKind::Zero: return 3;
    case TokKind::OpenSq: return 1;
    case TokKind::CloseSq: return 2000000001;
    case TokKind::OpenPar: return 2;
    case TokKind::ClosePar: return 2000000000;
    case TokKind::Blank: return 4;
  }
  return 0;
}

bool code_less(const FlowCode& a, const FlowCode& b) {
  // Compare flattened streams: '{' rank 0, '}' rank max, '[' / ']' as items.
  auto stream = [](const FlowCode& c) {
    std::vector<int> v;
    for (const auto& l : c.lists) {
      v.push_back(l.kind == ListKind::Boundary ? 0 : 1);
      for (const auto& t : l.items) v.push_back(token_rank(t));
      v.push_back(l.kind == ListKind::Boundary ? 2000000002 : 2000000001);
    }
    return v;
  };
  return stream(a) < stream(b);
}

}  // namespace morseflow
