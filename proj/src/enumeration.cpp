#include "morseflow/enumeration.hpp"

#include <algorithm>
#include <cstdlib>
#include <atomic>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "morseflow/codec.hpp"
#include "morseflow/reversal.hpp"

namespace morseflow {

const char* surface_name(SurfaceId s) {
  switch (s.holes) {
    case 1: return "disk";
    case 2: return "cylinder";
    case 3: return "pants";
    default: return "surface";
  }
}

// ---------------------------------------------------------------------------
// Count constraints

std::vector<CombinationVector> combination_solutions(SurfaceId s, int n) {
  std::vector<CombinationVector> out;
  int chi = s.chi_double();
  for (int A = 0; A <= n; A++)
    for (int B = 0; A + B <= n; B++)
      for (int S = 0; A + B + S <= n; S++)
        for (int Tp = 0; A + B + S + Tp <= n; Tp++)
          for (int Tm = 0; A + B + S + Tp + Tm <= n; Tm++)
            for (int Y = 0; A + B + S + Tp + Tm + Y <= n; Y++) {
              int Z = n - (A + B + S + Tp + Tm + Y);
              if (A + B <= 0 || Y + Z <= 0) continue;
              int btz = B + Tp + Tm + Z;
              if (btz % 2 != 0 || btz < 2 * s.holes) continue;
              if (2 * A - 2 * S + 2 * Y + B - (Tp + Tm) + Z != chi) continue;
              if (B + Tp != Z + Tm) continue;
              out.push_back({A, B, S, Tp, Tm, Y, Z});
            }
  std::sort(out.begin(), out.end());
  return out;
}

CombinationVector combination_representative(const CombinationVector& v) {
  CombinationVector r = v.reversed();
  return v < r ? r : v;
}

std::vector<CombinationVector> combinations(SurfaceId s, int n_lo, int n_hi) {
  std::set<CombinationVector> seen;
  std::vector<CombinationVector> out;
  for (int n = n_lo; n <= n_hi; n++)
    for (const auto& v : combination_solutions(s, n)) {
      CombinationVector r = combination_representative(v);
      if (seen.insert(r).second) out.push_back(r);
    }
  std::sort(out.begin(), out.end(), [](const CombinationVector& a, const CombinationVector& b) {
    return std::make_tuple(a.n(), a.as_tuple()) < std::make_tuple(b.n(), b.as_tuple());
  });
  return out;
}

// ---------------------------------------------------------------------------
// Flow generation

namespace {

struct Generator {
  SurfaceId surface;
  CombinationVector cv;
  std::map<std::string, Graph>* found;  // canonical key -> representative
  Quotient quotient;

  std::vector<std::vector<UnitKind>> circle_units;  // boundary circles
  std::vector<int> degrees;                         // per source

  void run() {
    std::vector<int> ks(surface.holes, 0);
    compose_pairs(0, cv.B + cv.Tp);
  }

  // choose k_i >= 1 source-like points per boundary circle
  std::vector<int> ks;
  void compose_pairs(int i, int left) {
    if (i == surface.holes) {
      if (left == 0) {
        circle_units.assign(surface.holes, {});
        fill_circle(0, 0, cv.B, cv.Tp, cv.Z, cv.Tm);
      }
      return;
    }
    ks.resize(surface.holes);
    for (int k = 1; k + (surface.holes - i - 1) <= left; k++) {
      ks[i] = k;
      compose_pairs(i + 1, left - k);
    }
  }

  // alternate source-like / sink-like unit kinds around each circle
  void fill_circle(int ci, int pos, int b, int tp, int z, int tm) {
    if (ci == surface.holes) {
      place_degrees(b, tp, z, tm);
      return;
    }
    if (pos == 2 * ks[ci]) {
      fill_circle(ci + 1, 0, b, tp, z, tm);
      return;
    }
    bool src_like = pos % 2 == 0;
    if (src_like) {
      if (b > 0) {
        circle_units[ci].push_back(UnitKind::Src);
        fill_circle(ci, pos + 1, b - 1, tp, z, tm);
        circle_units[ci].pop_back();
      }
      if (tp > 0) {
        circle_units[ci].push_back(UnitKind::ASad);
        fill_circle(ci, pos + 1, b, tp - 1, z, tm);
        circle_units[ci].pop_back();
      }
    } else {
      if (z > 0) {
        circle_units[ci].push_back(UnitKind::Zero);
        fill_circle(ci, pos + 1, b, tp, z - 1, tm);
        circle_units[ci].pop_back();
      }
      if (tm > 0) {
        circle_units[ci].push_back(UnitKind::Gap);
        fill_circle(ci, pos + 1, b, tp, z, tm - 1);
        circle_units[ci].pop_back();
      }
    }
  }

  void place_degrees(int b, int tp, int z, int tm) {
    if (b || tp || z || tm) return;  // counts must be exhausted
    int sources = cv.A + cv.B;
    int slots = 2 * cv.S + cv.Tp;
    degrees.assign(sources, 0);
    compose_degrees(0, sources, slots);
  }

  void compose_degrees(int i, int sources, int left) {
    if (i == sources) {
      if (left == 0) build_and_match();
      return;
    }
    // internal sources need a separatrix to stay connected
    int lo = (i < cv.A && sources + surface.holes > 1) ? 1 : 0;
    for (int d = lo; d <= left; d++) {
      degrees[i] = d;
      compose_degrees(i + 1, sources, left - d);
    }
  }

  Graph skeleton;
  std::vector<int> free_ends;       // ends to be matched
  std::vector<bool> end_is_asad;

  void build_and_match() {
    skeleton = Graph{};
    free_ends.clear();
    end_is_asad.clear();
    int next_end = 0;
    int src_index = 0;
    for (int a = 0; a < cv.A; a++) {
      Circle c;
      c.boundary = false;
      Unit u{UnitKind::Src, {}};
      for (int d = 0; d < degrees[src_index]; d++) u.ends.push_back(next_end++);
      src_index++;
      c.units.push_back(std::move(u));
      skeleton.circles.push_back(std::move(c));
    }
    for (int ci = 0; ci < surface.holes; ci++) {
      Circle c;
      c.boundary = true;
      for (UnitKind k : circle_units[ci]) {
        Unit u{k, {}};
        if (k == UnitKind::Src) {
          for (int d = 0; d < degrees[src_index]; d++) u.ends.push_back(next_end++);
          src_index++;
        } else if (k == UnitKind::ASad) {
          u.ends.push_back(next_end++);
        }
        c.units.push_back(std::move(u));
      }
      skeleton.circles.push_back(std::move(c));
    }
    skeleton.end_count = next_end;
    skeleton.mate.assign(next_end, -1);
    end_is_asad.assign(next_end, false);
    {
      auto pos = end_positions(skeleton);
      for (int e = 0; e < next_end; e++)
        end_is_asad[e] =
            skeleton.circles[pos[e].circle].units[pos[e].unit].kind == UnitKind::ASad;
    }
    free_ends.resize(next_end);
    for (int e = 0; e < next_end; e++) free_ends[e] = e;
    match(0);
  }

  void match(int from) {
    // find the first unmatched end
    int a = -1;
    for (int e = from; e < skeleton.end_count; e++)
      if (skeleton.mate[e] < 0) {
        a = e;
        break;
      }
    if (a < 0) {
      accept();
      return;
    }
    for (int b = a + 1; b < skeleton.end_count; b++) {
      if (skeleton.mate[b] >= 0) continue;
      if (end_is_asad[a] && end_is_asad[b]) continue;  // every edge needs a source end
      skeleton.mate[a] = b;
      skeleton.mate[b] = a;
      match(a + 1);
      skeleton.mate[a] = -1;
      skeleton.mate[b] = -1;
    }
  }

  void accept() {
    FlowCheck chk = check_flow(skeleton);
    if (!chk.ok) return;
    int zero_free = 0;
    for (const auto& f : chk.trace.faces)
      if (f.zero_count == 0) zero_free++;
    if (zero_free != cv.Y) return;

    std::string key = canonical_string(skeleton, CanonMode::UpToReflection);
    if (key.empty()) return;
    if (quotient == Quotient::UpToEquivalenceAndReversal) {
      ReverseResult rev = reverse_flow(skeleton);
      if (rev.ok) {
        std::string rkey = canonical_string(rev.g, CanonMode::UpToReflection);
        if (!rkey.empty() && rkey < key) key = rkey;
      }
    }
    auto it = found->find(key);
    if (it == found->end()) (*found)[key] = skeleton;
  }
};

int thread_budget() {
  if (const char* env = std::getenv("MORSEFLOW_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? std::min(hw, 8u) : 1;
}

std::mutex cache_mutex;
std::map<std::tuple<int, int, int>, MorseFamily> family_cache;

}  // namespace

MorseFamily enumerate_morse(SurfaceId s, int n, Quotient q) {
  {
    std::lock_guard<std::mutex> lk(cache_mutex);
    auto it = family_cache.find({s.holes, n, (int)q});
    if (it != family_cache.end()) return it->second;
  }

  std::vector<CombinationVector> vectors = combination_solutions(s, n);
  int threads = thread_budget();
  std::vector<std::map<std::string, Graph>> parts(vectors.size());

  auto work = [&](size_t i) {
    Generator gen;
    gen.surface = s;
    gen.cv = vectors[i];
    gen.found = &parts[i];
    gen.quotient = q;
    gen.run();
  };
  if (threads <= 1 || vectors.size() <= 1) {
    for (size_t i = 0; i < vectors.size(); i++) work(i);
  } else {
    std::vector<std::future<void>> futs;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; t++)
      futs.push_back(std::async(std::launch::async, [&] {
        for (size_t i = next++; i < vectors.size(); i = next++) work(i);
      }));
    for (auto& f : futs) f.get();
  }

  std::map<std::string, Graph> merged;
  for (auto& p : parts) merged.merge(p);

  MorseFamily fam;
  for (auto& [key, g] : merged) {
    fam.keys.push_back(key);
    fam.flows.push_back(g);
    bool self = false;
    ReverseResult rev = reverse_flow(g);
    if (rev.ok)
      self = canonical_string(rev.g, CanonMode::UpToReflection) ==
             canonical_string(g, CanonMode::UpToReflection);
    fam.self_inverse.push_back(self);
  }

  std::lock_guard<std::mutex> lk(cache_mutex);
  family_cache[{s.holes, n, (int)q}] = fam;
  return fam;
}

// ---------------------------------------------------------------------------
// Bifurcation counting

BifFamily enumerate_bifurcations(SurfaceId s, int n, BifBase base, int sign) {
  BifFamily out;
  std::map<std::string, FlowCode> classes;

  auto scan_marks = [&](const MorseFamily& fam, KindTag kind, bool b_form) {
    for (const Graph& g : fam.flows) {
      for (const BifMark& m : list_marks(g, kind)) {
        BifCode c = b_form ? make_b_code(g, m, kind) : make_a_code(g, m, kind);
        if (!c.ok) continue;
        classes.emplace(c.key, c.primary);
      }
    }
  };

  switch (base) {
    case BifBase::SN:
    case BifBase::BSN:
    case BifBase::BDS: {
      MorseFamily fam = enumerate_morse(s, n + 1, Quotient::UpToEquivalence);
      scan_marks(fam, KindTag{base, base == BifBase::BDS ? 0 : sign, 'A'}, false);
      break;
    }
    case BifBase::HS:
    case BifBase::HN: {
      MorseFamily fam = enumerate_morse(s, n, Quotient::UpToEquivalence);
      scan_marks(fam, KindTag{base, sign, 'B'}, true);
      break;
    }
    case BifBase::SC:
    case BifBase::HSC:
    case BifBase::BSC: {
      MorseFamily fam = enumerate_morse(s, n, Quotient::UpToEquivalence);
      for (const Graph& g : fam.flows) {
        for (const Rewrite& rw : connection_rewrites(g)) {
          if (rw.kind.base != base) continue;
          if (base == BifBase::HSC && rw.kind.sign != sign) continue;
          BifCode c = saddle_connection_code(rw.g, rw.kind);
          if (!c.ok) continue;
          classes.emplace(c.key, c.primary);
        }
      }
      break;
    }
  }

  for (auto& [k, rep] : classes) {
    out.keys.push_back(k);
    out.reps.push_back(rep);
  }
  return out;
}

int connection_family_size(SurfaceId s, int n_max) {
  // pooled SC / HSC+ / HSC- / BSC diagrams up to equivalence and reversal
  std::set<std::string> classes;
  for (int n = 2; n <= n_max; n++) {
    MorseFamily fam = enumerate_morse(s, n, Quotient::UpToEquivalence);
    for (const Graph& g : fam.flows) {
      for (const Rewrite& rw : connection_rewrites(g)) {
        BifCode c = saddle_connection_code(rw.g, rw.kind);
        if (!c.ok) continue;
        std::string key = c.key;
        ReverseResult rev = reverse_flow(rw.g);
        if (rev.ok) {
          KindTag rk = rw.kind;
          if (rw.kind.base == BifBase::HSC) rk.sign = -rw.kind.sign;
          BifCode rc = saddle_connection_code(rev.g, rk);
          if (rc.ok) {
            // strip kind spellings so HSC+ and HSC- pool together
            std::string a = key, b = rc.key;
            auto strip = [](std::string t) {
              size_t i = 0;
              std::string out;
              while (i < t.size()) {
                if (t.compare(i, 4, "HSC+") == 0 || t.compare(i, 4, "HSC-") == 0) {
                  out += "HSC";
                  i += 4;
                } else {
                  out += t[i++];
                }
              }
              return out;
            };
            a = strip(a);
            b = strip(b);
            key = std::min(a, b);
          }
        }
        classes.insert(key);
      }
    }
  }
  return (int)classes.size();
}

// ---------------------------------------------------------------------------
// Tables

bool paper_row(const std::string& surface, int n, int out_counts[8], int& out_sum) {
  struct Row {
    const char* s;
    int n;
    int c[8];
    int sum;
  };
  static const Row rows[] = {
      {"disk", 3, {1, 1, 1, 1, 0, 0, 0, 0}, 8},
      {"disk", 4, {3, 1, 2, 3, 0, 0, 0, 0}, 18},
      {"disk", 5, {12, 10, 3, 4, 5, 0, 2, 0}, 69},
      {"disk", 6, {25, 11, 11, 22, 22, 7, 3, 1}, 173},
      {"cylinder", 4, {0, 0, 2, 2, 0, 0, 0, 1}, 9},
      {"cylinder", 5, {2, 7, 4, 4, 2, 0, 1, 2}, 40},
      {"cylinder", 6, {16, 17, 16, 19, 11, 2, 10, 9}, 168},
      {"pants", 6, {0, 0, 4, 3, 0, 0, 0, 4}, 18},
  };
  for (const Row& r : rows) {
    if (surface == r.s && n == r.n) {
      std::copy(r.c, r.c + 8, out_counts);
      out_sum = r.sum;
      return true;
    }
  }
  return false;
}

std::vector<TableRow> summary_table(const std::vector<SurfaceId>& surfaces, int n_lo, int n_hi) {
  static const BifBase order[8] = {BifBase::SN,  BifBase::BSN, BifBase::HS, BifBase::HN,
                                   BifBase::BDS, BifBase::SC,  BifBase::HSC, BifBase::BSC};
  std::vector<TableRow> rows;
  for (SurfaceId s : surfaces) {
    for (int n = n_lo; n <= n_hi; n++) {
      TableRow row;
      row.surface = surface_name(s);
      row.n = n;
      for (int k = 0; k < 8; k++)
        row.counts[k] = (int)enumerate_bifurcations(s, n, order[k]).keys.size();
      row.sum = 2 * (row.counts[0] + row.counts[1] + row.counts[2] + row.counts[3] +
                     row.counts[6]) +
                row.counts[4] + row.counts[5] + row.counts[7];
      paper_row(row.surface, n, row.paper, row.paper_sum);
      rows.push_back(row);
    }
  }
  return rows;
}

static const char* kKindNames[8] = {"SN+", "BSN+", "HS+", "HN+", "BDS", "SC", "HSC+", "BSC"};

std::string table_text(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "surface    n";
  for (const char* k : kKindNames) os << "  " << k;
  os << "   sum  paper  delta\n";
  for (const TableRow& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-9s %2d", r.surface.c_str(), r.n);
    os << buf;
    for (int k = 0; k < 8; k++) {
      std::snprintf(buf, sizeof(buf), "  %3d", r.counts[k]);
      os << buf;
      if (r.paper[k] >= 0 && r.paper[k] != r.counts[k]) os << "*";
    }
    std::snprintf(buf, sizeof(buf), "  %4d", r.sum);
    os << buf;
    if (r.paper_sum >= 0) {
      std::snprintf(buf, sizeof(buf), "  %5d  %+d", r.paper_sum, r.sum - r.paper_sum);
      os << buf;
    } else {
      os << "      -      -";
    }
    os << "\n";
  }
  os << "(* marks a published value that differs from the computed one)\n";
  return os.str();
}

std::string table_csv(const std::vector<TableRow>& rows) {
  std::ostringstream os;
  os << "surface,n,SN+,BSN+,HS+,HN+,BDS,SC,HSC+,BSC,sum,paper_sum,delta\n";
  for (const TableRow& r : rows) {
    os << r.surface << "," << r.n;
    for (int k = 0; k < 8; k++) os << "," << r.counts[k];
    os << "," << r.sum << ",";
    if (r.paper_sum >= 0) os << r.paper_sum << "," << (r.sum - r.paper_sum);
    else os << ",";
    os << "\n";
  }
  return os.str();
}

}  // namespace morseflow
