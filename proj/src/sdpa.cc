#include "copk/sdpa.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace copk {

namespace {

std::string fmt_double(double v) {
  if (v == 0.0) v = 0.0;  // print -0.0 as "0" so reimports stay byte-stable
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// entry key: (constraint matrix 0..m, block 1.., i <= j 1-based)
using EntryKey = std::tuple<int, int, int, int>;

class Builder {
 public:
  void add(int matno, int blkno, int i, int j, double v) {
    if (v == 0.0) return;
    if (i > j) std::swap(i, j);
    entries_[{matno, blkno, i, j}] += v;
  }

  std::string emit(int m, const std::vector<int>& block_sizes,
                   const std::vector<double>& cvec) const {
    std::ostringstream out;
    out << m << "\n" << block_sizes.size() << "\n";
    for (size_t i = 0; i < block_sizes.size(); ++i)
      out << (i ? " " : "") << block_sizes[i];
    out << "\n";
    for (size_t i = 0; i < cvec.size(); ++i) out << (i ? " " : "") << fmt_double(cvec[i]);
    out << "\n";
    for (const auto& [key, v] : entries_) {
      if (v == 0.0) continue;
      const auto& [matno, blkno, i, j] = key;
      out << matno << " " << blkno << " " << i << " " << j << " " << fmt_double(v) << "\n";
    }
    return out.str();
  }

 private:
  std::map<EntryKey, double> entries_;
};

bool lmi_eligible(const ConicProblem& p) {
  return p.mat_vars.empty() && p.equalities.empty();
}

std::string export_lmi(const ConicProblem& p, SdpaMapping& mapping) {
  // file primal: min c.x  s.t.  sum_i x_i F_i - F0 >= 0 (blockwise)
  const int m = p.num_vars();
  Builder b;
  std::vector<int> sizes;
  std::vector<double> cvec(m, 0.0);
  for (const auto& [v, cf] : p.objective.terms) cvec[v] = -cf;

  int blk = 0;
  for (const auto& memb : p.memberships) {
    ++blk;
    auto put_expr = [&](const LinExpr& e, int i, int j) {
      b.add(0, blk, i, j, -e.c0);
      for (const auto& [v, cf] : e.terms) b.add(v + 1, blk, i, j, cf);
    };
    switch (memb.kind) {
      case ConeKind::Nonneg:
        sizes.push_back(-memb.dim);
        for (int r = 0; r < memb.dim; ++r) put_expr(memb.entries[r], r + 1, r + 1);
        break;
      case ConeKind::Soc:
        // arrow lowering: [[t, z'], [z, t I]] of order dim
        sizes.push_back(memb.dim);
        for (int d = 1; d <= memb.dim; ++d) put_expr(memb.entries[0], d, d);
        for (int r = 1; r < memb.dim; ++r) put_expr(memb.entries[r], 1, r + 1);
        break;
      case ConeKind::Psd: {
        sizes.push_back(memb.dim);
        int r = 0;
        for (int i = 0; i < memb.dim; ++i)
          for (int j = 0; j <= i; ++j, ++r) put_expr(memb.entries[r], j + 1, i + 1);
        break;
      }
    }
  }
  mapping.use_dual_value = false;
  mapping.offset = p.objective.c0;
  return b.emit(m, sizes, cvec);
}

std::string export_general(const ConicProblem& p, SdpaMapping& mapping) {
  // file dual: max <F0, Y>  s.t.  <F_i, Y> = c_i, Y >= 0 (blockwise)
  const int nv = p.num_vars();

  // classify scalars: matrix-variable entries map to their block, the rest are
  // split into nonnegative pairs on a diagonal block.
  struct VarSlot {
    int mat = -1;  // mat var index, or -1 for split scalar
    int i = 0, j = 0;
    int split_pos = 0;  // index into the free list
  };
  std::vector<VarSlot> slot(nv);
  std::vector<int> free_vars;
  std::vector<bool> is_mat(nv, false);
  for (size_t mv = 0; mv < p.mat_vars.size(); ++mv) {
    const auto& M = p.mat_vars[mv];
    int r = 0;
    for (int i = 0; i < M.dim; ++i)
      for (int j = 0; j <= i; ++j, ++r) {
        slot[M.first_var + r] = {(int)mv, i, j, 0};
        is_mat[M.first_var + r] = true;
      }
  }
  for (int v = 0; v < nv; ++v)
    if (!is_mat[v]) {
      slot[v].split_pos = (int)free_vars.size();
      free_vars.push_back(v);
    }

  std::vector<int> sizes;
  const int split_blk = free_vars.empty() ? 0 : 1;
  if (split_blk) sizes.push_back(-2 * (int)free_vars.size());
  std::vector<int> memb_blk(p.memberships.size());
  for (size_t i = 0; i < p.memberships.size(); ++i) {
    const auto& m = p.memberships[i];
    memb_blk[i] = (int)sizes.size() + 1;
    sizes.push_back(m.kind == ConeKind::Nonneg ? -m.dim : m.dim);
  }
  std::vector<int> mat_blk(p.mat_vars.size());
  for (size_t i = 0; i < p.mat_vars.size(); ++i) {
    mat_blk[i] = (int)sizes.size() + 1;
    sizes.push_back(p.mat_vars[i].dim);
  }

  Builder b;
  // weight w on scalar var v inside constraint matrix `matno`
  auto put_var = [&](int matno, int v, double w) {
    const VarSlot& s = slot[v];
    if (s.mat >= 0) {
      b.add(matno, mat_blk[s.mat], s.j + 1, s.i + 1, s.i == s.j ? w : w / 2.0);
    } else {
      b.add(matno, split_blk, 2 * s.split_pos + 1, 2 * s.split_pos + 1, w);
      b.add(matno, split_blk, 2 * s.split_pos + 2, 2 * s.split_pos + 2, -w);
    }
  };

  std::vector<double> cvec;
  int matno = 0;
  for (const auto& eq : p.equalities) {
    ++matno;
    for (const auto& [v, cf] : eq.terms) put_var(matno, v, cf);
    cvec.push_back(-eq.c0);
  }
  for (size_t mi = 0; mi < p.memberships.size(); ++mi) {
    const auto& memb = p.memberships[mi];
    const int blk = memb_blk[mi];
    // tie slack entry (i, j) (1-based, i <= j) to expression e
    auto tie = [&](const LinExpr& e, int i, int j) {
      ++matno;
      b.add(matno, blk, i, j, i == j ? 1.0 : 0.5);
      for (const auto& [v, cf] : e.terms) put_var(matno, v, -cf);
      cvec.push_back(e.c0);
    };
    switch (memb.kind) {
      case ConeKind::Nonneg:
        for (int r = 0; r < memb.dim; ++r) tie(memb.entries[r], r + 1, r + 1);
        break;
      case ConeKind::Soc:
        tie(memb.entries[0], 1, 1);
        for (int r = 1; r < memb.dim; ++r) tie(memb.entries[r], 1, r + 1);
        for (int d = 2; d <= memb.dim; ++d) tie(memb.entries[0], d, d);
        // the tail of the arrow must stay t I exactly; unlike the LMI side
        // these slack entries are file variables, so pin them to zero
        for (int i = 2; i <= memb.dim; ++i)
          for (int j = i + 1; j <= memb.dim; ++j) {
            ++matno;
            b.add(matno, blk, i, j, 0.5);
            cvec.push_back(0.0);
          }
        break;
      case ConeKind::Psd: {
        int r = 0;
        for (int i = 0; i < memb.dim; ++i)
          for (int j = 0; j <= i; ++j, ++r) tie(memb.entries[r], j + 1, i + 1);
        break;
      }
    }
  }
  for (const auto& [v, cf] : p.objective.terms) put_var(0, v, cf);

  mapping.use_dual_value = true;
  mapping.offset = p.objective.c0;
  return b.emit(matno, sizes, cvec);
}

}  // namespace

std::string export_sdpa_string(const ConicProblem& p, SdpaMapping* mapping) {
  p.validate();
  SdpaMapping mp;
  std::string text = lmi_eligible(p) ? export_lmi(p, mp) : export_general(p, mp);
  if (mapping) *mapping = mp;
  return text;
}

SdpaMapping export_sdpa(const ConicProblem& p, const std::string& path) {
  SdpaMapping mp;
  std::string text = export_sdpa_string(p, &mp);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << text;
  return mp;
}

namespace {

struct Tokenizer {
  std::istringstream in;
  std::string line;
  int lineno = 0;

  explicit Tokenizer(const std::string& text) : in(text) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw std::runtime_error("sdpa parse error at line " + std::to_string(lineno) + ": " + msg);
  }

  // next content line with soft separators normalized to spaces
  bool next_line() {
    while (std::getline(in, line)) {
      ++lineno;
      size_t first = line.find_first_not_of(" \t\r");
      if (first == std::string::npos) continue;
      if (line[first] == '*' || line[first] == '"') continue;  // comment
      for (char& c : line)
        if (c == ',' || c == '{' || c == '}' || c == '(' || c == ')' || c == '\r' || c == '\t')
          c = ' ';
      return true;
    }
    return false;
  }
};

std::vector<double> parse_doubles(Tokenizer& tk, size_t expected, const char* what) {
  std::vector<double> vals;
  std::istringstream ls(tk.line);
  std::string tok;
  while (ls >> tok) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
      tk.fail(std::string("bad ") + what + " value '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.size() != expected)
    tk.fail(std::string("expected ") + std::to_string(expected) + " " + what + " values, got " +
            std::to_string(vals.size()));
  return vals;
}

}  // namespace

ConicProblem import_sdpa_string(const std::string& text) {
  Tokenizer tk(text);

  auto read_int_line = [&](const char* what) {
    if (!tk.next_line()) tk.fail(std::string("missing ") + what);
    std::istringstream ls(tk.line);
    long v;
    if (!(ls >> v)) tk.fail(std::string("bad ") + what);
    // trailing tokens on the count lines are tolerated (some writers annotate)
    return (int)v;
  };

  const int m = read_int_line("variable count");
  if (m < 0) tk.fail("negative variable count");
  const int nblocks = read_int_line("block count");
  if (nblocks < 1) tk.fail("block count must be positive");

  if (!tk.next_line()) tk.fail("missing block size line");
  std::vector<int> sizes;
  {
    std::istringstream ls(tk.line);
    long v;
    while (ls >> v) sizes.push_back((int)v);
    if ((int)sizes.size() != nblocks)
      tk.fail("expected " + std::to_string(nblocks) + " block sizes, got " +
              std::to_string(sizes.size()));
    for (int s : sizes)
      if (s == 0) tk.fail("zero block size");
  }

  if (!tk.next_line()) tk.fail("missing cost line");
  std::vector<double> cvec = parse_doubles(tk, (size_t)m, "cost");

  // per block: map (i, j) -> accumulated coefficient per constraint matrix
  std::vector<std::map<std::pair<int, int>, std::map<int, double>>> data(nblocks);
  while (tk.next_line()) {
    std::istringstream ls(tk.line);
    long matno, blkno, i, j;
    std::string val;
    if (!(ls >> matno >> blkno >> i >> j >> val)) tk.fail("malformed entry line");
    std::string extra;
    if (ls >> extra) tk.fail("trailing token '" + extra + "' on entry line");
    if (matno < 0 || matno > m) tk.fail("constraint index out of range");
    if (blkno < 1 || blkno > nblocks) tk.fail("block index out of range");
    const int dim = std::abs(sizes[blkno - 1]);
    if (i < 1 || j < 1 || i > dim || j > dim) tk.fail("entry index out of range");
    if (i > j) std::swap(i, j);
    if (sizes[blkno - 1] < 0 && i != j) tk.fail("off-diagonal entry in diagonal block");
    double v = 0.0;
    auto res = std::from_chars(val.data(), val.data() + val.size(), v);
    if (res.ec != std::errc() || res.ptr != val.data() + val.size())
      tk.fail("bad entry value '" + val + "'");
    data[blkno - 1][{(int)i, (int)j}][(int)matno] += v;
  }

  ConicProblem p;
  for (int v = 1; v <= m; ++v) p.add_var("x" + std::to_string(v));
  for (int v = 0; v < m; ++v) p.objective.add(v, -cvec[v]);

  for (int bi = 0; bi < nblocks; ++bi) {
    Membership memb;
    const int dim = std::abs(sizes[bi]);
    memb.dim = dim;
    memb.kind = sizes[bi] < 0 ? ConeKind::Nonneg : ConeKind::Psd;
    memb.label = "block" + std::to_string(bi + 1);
    auto expr_at = [&](int i, int j) {  // 1-based, i <= j
      LinExpr e;
      auto it = data[bi].find({i, j});
      if (it != data[bi].end())
        for (const auto& [matno, v] : it->second) {
          if (matno == 0)
            e.add_const(-v);
          else
            e.add(matno - 1, v);
        }
      return e;
    };
    if (memb.kind == ConeKind::Nonneg) {
      for (int d = 1; d <= dim; ++d) memb.entries.push_back(expr_at(d, d));
    } else {
      for (int i = 1; i <= dim; ++i)
        for (int j = 1; j <= i; ++j) memb.entries.push_back(expr_at(j, i));
    }
    p.memberships.push_back(std::move(memb));
  }
  p.validate();
  return p;
}

ConicProblem import_sdpa(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return import_sdpa_string(ss.str());
}

}  // namespace copk
