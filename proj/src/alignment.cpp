#include "clustermerge/alignment.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <vector>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

namespace clustermerge {

namespace {

// clang-format off
constexpr ScoringMatrix::Table kPam250 = {{
//     A   R   N   D   C   Q   E   G   H   I   L   K   M   F   P   S   T   W   Y   V   X
    {  2, -2,  0,  0, -2,  0,  0,  1, -1, -1, -2, -1, -1, -3,  1,  1,  1, -6, -3,  0,  0},  // A
    { -2,  6,  0, -1, -4,  1, -1, -3,  2, -2, -3,  3,  0, -4,  0,  0, -1,  2, -4, -2, -1},  // R
    {  0,  0,  2,  2, -4,  1,  1,  0,  2, -2, -3,  1, -2, -3,  0,  1,  0, -4, -2, -2,  0},  // N
    {  0, -1,  2,  4, -5,  2,  3,  1,  1, -2, -4,  0, -3, -6, -1,  0,  0, -7, -4, -2, -1},  // D
    { -2, -4, -4, -5, 12, -5, -5, -3, -3, -2, -6, -5, -5, -4, -3,  0, -2, -8,  0, -2, -3},  // C
    {  0,  1,  1,  2, -5,  4,  2, -1,  3, -2, -2,  1, -1, -5,  0, -1, -1, -5, -4, -2, -1},  // Q
    {  0, -1,  1,  3, -5,  2,  4,  0,  1, -2, -3,  0, -2, -5, -1,  0,  0, -7, -4, -2, -1},  // E
    {  1, -3,  0,  1, -3, -1,  0,  5, -2, -3, -4, -2, -3, -5,  0,  1,  0, -7, -5, -1, -1},  // G
    { -1,  2,  2,  1, -3,  3,  1, -2,  6, -2, -2,  0, -2, -2,  0, -1, -1, -3,  0, -2, -1},  // H
    { -1, -2, -2, -2, -2, -2, -2, -3, -2,  5,  2, -2,  2,  1, -2, -1,  0, -5, -1,  4, -1},  // I
    { -2, -3, -3, -4, -6, -2, -3, -4, -2,  2,  6, -3,  4,  2, -3, -3, -2, -2, -1,  2, -1},  // L
    { -1,  3,  1,  0, -5,  1,  0, -2,  0, -2, -3,  5,  0, -5, -1,  0,  0, -3, -4, -2, -1},  // K
    { -1,  0, -2, -3, -5, -1, -2, -3, -2,  2,  4,  0,  6,  0, -2, -2, -1, -4, -2,  2, -1},  // M
    { -3, -4, -3, -6, -4, -5, -5, -5, -2,  1,  2, -5,  0,  9, -5, -3, -3,  0,  7, -1, -2},  // F
    {  1,  0,  0, -1, -3,  0, -1,  0,  0, -2, -3, -1, -2, -5,  6,  1,  0, -6, -5, -1, -1},  // P
    {  1,  0,  1,  0,  0, -1,  0,  1, -1, -1, -3,  0, -2, -3,  1,  2,  1, -2, -3, -1,  0},  // S
    {  1, -1,  0,  0, -2, -1,  0,  0, -1,  0, -2,  0, -1, -3,  0,  1,  3, -5, -3,  0,  0},  // T
    { -6,  2, -4, -7, -8, -5, -7, -7, -3, -5, -2, -3, -4,  0, -6, -2, -5, 17,  0, -6, -4},  // W
    { -3, -4, -2, -4,  0, -4, -4, -5,  0, -1, -1, -4, -2,  7, -5, -3, -3,  0, 10, -2, -2},  // Y
    {  0, -2, -2, -2, -2, -2, -2, -1, -2,  4,  2, -2,  2, -1, -1, -1,  0, -6, -2,  4, -1},  // V
    {  0, -1,  0, -1, -3, -1, -1, -1, -1, -1, -1, -1, -1, -2, -1,  0,  0, -4, -2, -1, -1},  // X
}};
// clang-format on

constexpr int kNegInf = std::numeric_limits<int>::min() / 4;

// Packed (row, col) of the first aligned residue pair, 1-based.
using Origin = std::uint64_t;
constexpr Origin pack(std::uint32_t row, std::uint32_t col) {
  return (static_cast<Origin>(row) << 32) | col;
}
constexpr std::uint32_t origin_row(Origin o) { return static_cast<std::uint32_t>(o >> 32); }
constexpr std::uint32_t origin_col(Origin o) { return static_cast<std::uint32_t>(o); }

struct Scratch {
  std::vector<int> h;
  std::vector<int> e;
  std::vector<Origin> h_origin;
  std::vector<Origin> e_origin;
};

thread_local Scratch tls_scratch;

}  // namespace

ScoringMatrix::ScoringMatrix(std::string name, const Table& table)
    : name_(std::move(name)), table_(table) {}

const ScoringMatrix& ScoringMatrix::pam250() {
  static const ScoringMatrix kMatrix("PAM250", kPam250);
  return kMatrix;
}

ScoringMatrix parse_matrix(std::istream& in, std::string name) {
  std::vector<std::vector<int>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream tokens(line);
    std::vector<std::string> words;
    for (std::string w; tokens >> w;) words.push_back(w);
    if (words.empty() || words.front().front() == '#') continue;

    auto is_label = [](const std::string& w) {
      return w.size() == 1 && std::isalpha(static_cast<unsigned char>(w[0]));
    };
    if (std::all_of(words.begin(), words.end(), is_label)) {
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (i >= kAlphabet.size() || std::toupper(words[i][0]) != kAlphabet[i]) {
          throw InputError("matrix header must list residues in order ARNDCQEGHILKMFPSTWYV[X]");
        }
      }
      continue;
    }
    std::size_t first = 0;
    if (is_label(words.front())) {
      if (rows.size() >= kAlphabet.size() || std::toupper(words.front()[0]) != kAlphabet[rows.size()]) {
        throw InputError("matrix row label '" + words.front() + "' out of order");
      }
      first = 1;
    }
    std::vector<int> row;
    for (std::size_t i = first; i < words.size(); ++i) {
      try {
        std::size_t used = 0;
        row.push_back(std::stoi(words[i], &used));
        if (used != words[i].size()) throw std::invalid_argument(words[i]);
      } catch (const std::logic_error&) {
        throw InputError("non-integer matrix entry '" + words[i] + "'");
      }
    }
    rows.push_back(std::move(row));
  }

  const std::size_t dim = rows.size();
  if (dim != 20 && dim != 21) {
    throw InputError("matrix must have 20 or 21 rows, found " + std::to_string(dim));
  }
  ScoringMatrix::Table table{};
  for (std::size_t r = 0; r < dim; ++r) {
    if (rows[r].size() != dim) {
      throw InputError("matrix row " + std::to_string(r + 1) + " has " +
                       std::to_string(rows[r].size()) + " entries, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) table[r][c] = rows[r][c];
  }
  ScoringMatrix matrix(std::move(name), table);
  AlignmentParams probe;
  probe.matrix = matrix;
  probe.validate();
  return matrix;
}

ScoringMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file " + path.string());
  return parse_matrix(in, path.filename().string());
}

void AlignmentParams::validate() const {
  if (gap_extend < 0 || gap_open < gap_extend) {
    throw InputError("gap penalties must satisfy gap_open >= gap_extend >= 0");
  }
  const auto& t = matrix.table();
  for (int r = 0; r < kAlphabetSize; ++r) {
    for (int c = 0; c < r; ++c) {
      if (t[r][c] != t[c][r]) throw InputError("substitution matrix is not symmetric");
    }
  }
}

void Thresholds::validate() const {
  if (similarity < 0 || full_merge < similarity || max_uncovered < 0) {
    throw InputError("thresholds must satisfy full_merge >= similarity >= 0 and max_uncovered >= 0");
  }
}

AlignmentResult sw_align(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                         const AlignmentParams& params) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  AlignmentResult result;
  if (m == 0 || n == 0) return result;

  const int open = params.gap_open;
  const int extend = params.gap_extend;

  Scratch& s = tls_scratch;
  s.h.assign(n + 1, 0);
  s.e.assign(n + 1, kNegInf);
  s.h_origin.assign(n + 1, 0);
  s.e_origin.assign(n + 1, 0);

  int best = 0;
  std::uint32_t best_row = 0, best_col = 0;
  Origin best_origin = 0;

  for (std::size_t i = 1; i <= m; ++i) {
    const auto& row = params.matrix.row(a[i - 1]);
    int h_diag = 0;
    Origin h_diag_origin = 0;
    int h_left = 0;
    Origin h_left_origin = 0;
    int f = kNegInf;
    Origin f_origin = 0;

    for (std::size_t j = 1; j <= n; ++j) {
      // Gap consuming a[i-1] (vertical). Opening wins ties.
      const int e_open = s.h[j] - open;
      const int e_ext = s.e[j] - extend;
      if (e_open >= e_ext) {
        s.e[j] = e_open;
        s.e_origin[j] = s.h_origin[j];
      } else {
        s.e[j] = e_ext;
      }
      // Gap consuming b[j-1] (horizontal).
      const int f_open = h_left - open;
      const int f_ext = f - extend;
      if (f_open >= f_ext) {
        f = f_open;
        f_origin = h_left_origin;
      } else {
        f = f_ext;
      }

      const int diag = h_diag + row[b[j - 1]];
      int h = 0;
      Origin h_origin = 0;
      if (diag > 0 && diag >= s.e[j] && diag >= f) {
        h = diag;
        h_origin = h_diag > 0 ? h_diag_origin : pack(static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j));
      } else if (s.e[j] > 0 && s.e[j] >= f) {
        h = s.e[j];
        h_origin = s.e_origin[j];
      } else if (f > 0) {
        h = f;
        h_origin = f_origin;
      }

      h_diag = s.h[j];
      h_diag_origin = s.h_origin[j];
      s.h[j] = h;
      s.h_origin[j] = h_origin;
      h_left = h;
      h_left_origin = h_origin;

      if (h > best) {
        best = h;
        best_row = static_cast<std::uint32_t>(i);
        best_col = static_cast<std::uint32_t>(j);
        best_origin = h_origin;
      }
    }
  }

  if (best > 0) {
    result.score = best;
    result.span_a = {origin_row(best_origin) - 1, best_row};
    result.span_b = {origin_col(best_origin) - 1, best_col};
  }
  return result;
}

namespace {

int score_scalar(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                 const AlignmentParams& params) {
  const std::size_t m = a.size();
  const std::size_t n = b.size();
  if (m == 0 || n == 0) return 0;

  const int open = params.gap_open;
  const int extend = params.gap_extend;

  Scratch& s = tls_scratch;
  s.h.assign(n + 1, 0);
  s.e.assign(n + 1, kNegInf);
  int* h_col = s.h.data();
  int* e_col = s.e.data();
  const std::uint8_t* bp = b.data();

  int best = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const int* row = params.matrix.row(a[i]).data();
    int h_diag = 0;
    int h_left = 0;
    int f = kNegInf;
    for (std::size_t j = 1; j <= n; ++j) {
      const int e = std::max(h_col[j] - open, e_col[j] - extend);
      e_col[j] = e;
      f = std::max(h_left - open, f - extend);
      int h = std::max(h_diag + row[bp[j - 1]], 0);
      h = std::max(h, std::max(e, f));
      h_diag = h_col[j];
      h_col[j] = h;
      h_left = h;
      best = std::max(best, h);
    }
  }
  return best;
}

#if defined(__SSE2__)

// Striped 16-bit kernel over a query profile of `a` (eight lanes, lane k holds
// query positions k*seg .. k*seg+seg-1). Returns -1 when a score may have
// saturated; the caller then falls back to the scalar loop.
int score_striped(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                  const AlignmentParams& params) {
  constexpr int kLanes = 8;
  const std::size_t m = a.size();
  const std::size_t seg = (m + kLanes - 1) / kLanes;

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wignored-attributes"
  struct Buffers {
    std::vector<__m128i> profile, h_load, h_store, e;
  };
#pragma GCC diagnostic pop
  thread_local Buffers buf;
  buf.profile.resize(kAlphabetSize * seg);
  for (int c = 0; c < kAlphabetSize; ++c) {
    const auto& row = params.matrix.row(static_cast<std::uint8_t>(c));
    for (std::size_t j = 0; j < seg; ++j) {
      alignas(16) std::int16_t lanes[kLanes];
      for (int k = 0; k < kLanes; ++k) {
        const std::size_t pos = k * seg + j;
        lanes[k] = pos < m ? static_cast<std::int16_t>(row[a[pos]]) : 0;
      }
      buf.profile[c * seg + j] = _mm_load_si128(reinterpret_cast<const __m128i*>(lanes));
    }
  }
  const __m128i zero = _mm_setzero_si128();
  constexpr std::int16_t kLow = std::numeric_limits<std::int16_t>::min() / 2;
  const __m128i low = _mm_set1_epi16(kLow);
  // Lane shift that feeds "no gap" into lane 0.
  const auto shift_in_low = [](__m128i v) { return _mm_insert_epi16(_mm_slli_si128(v, 2), kLow, 0); };
  buf.h_load.assign(seg, zero);
  buf.h_store.assign(seg, zero);
  buf.e.assign(seg, low);

  const __m128i gap_open = _mm_set1_epi16(static_cast<std::int16_t>(params.gap_open));
  const __m128i gap_extend = _mm_set1_epi16(static_cast<std::int16_t>(params.gap_extend));
  __m128i best = zero;
  __m128i* h_load = buf.h_load.data();
  __m128i* h_store = buf.h_store.data();
  __m128i* e_col = buf.e.data();

  for (std::uint8_t residue : b) {
    const __m128i* prof = buf.profile.data() + residue * seg;
    __m128i f = low;
    __m128i h = _mm_slli_si128(h_store[seg - 1], 2);
    std::swap(h_load, h_store);
    for (std::size_t j = 0; j < seg; ++j) {
      h = _mm_max_epi16(_mm_adds_epi16(h, prof[j]), zero);
      h = _mm_max_epi16(h, e_col[j]);
      h = _mm_max_epi16(h, f);
      best = _mm_max_epi16(best, h);
      h_store[j] = h;
      const __m128i h_open = _mm_subs_epi16(h, gap_open);
      e_col[j] = _mm_max_epi16(_mm_subs_epi16(e_col[j], gap_extend), h_open);
      f = _mm_max_epi16(_mm_subs_epi16(f, gap_extend), h_open);
      h = h_load[j];
    }
    // Carry vertical gaps across segment boundaries until they stop mattering.
    f = shift_in_low(f);
    std::size_t j = 0;
    while (_mm_movemask_epi8(_mm_cmpgt_epi16(f, _mm_subs_epi16(h_store[j], gap_open))) != 0) {
      h = _mm_max_epi16(h_store[j], f);
      h_store[j] = h;
      best = _mm_max_epi16(best, h);
      e_col[j] = _mm_max_epi16(e_col[j], _mm_subs_epi16(h, gap_open));
      f = _mm_subs_epi16(f, gap_extend);
      if (++j == seg) {
        j = 0;
        f = shift_in_low(f);
      }
    }
  }

  alignas(16) std::int16_t lanes[kLanes];
  _mm_store_si128(reinterpret_cast<__m128i*>(lanes), best);
  const int result = *std::max_element(lanes, lanes + kLanes);
  return result >= std::numeric_limits<std::int16_t>::max() - 64 ? -1 : result;
}

bool fits_16_bit(const AlignmentParams& params) {
  constexpr int kLimit = 1000;
  if (params.gap_open > kLimit || params.gap_extend > kLimit) return false;
  for (const auto& row : params.matrix.table()) {
    for (int v : row) {
      if (v > kLimit || v < -kLimit) return false;
    }
  }
  return true;
}

#endif

}  // namespace

int sw_score(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             const AlignmentParams& params) {
  if (a.empty() || b.empty()) return 0;
#if defined(__SSE2__)
  if (fits_16_bit(params)) {
    const int score = score_striped(a, b, params);
    if (score >= 0) return score;
  }
#endif
  return score_scalar(a, b, params);
}

AlignmentResult sw_align(const Sequence& a, const Sequence& b, const AlignmentParams& params) {
  return sw_align(std::span<const std::uint8_t>(a.encoded), std::span<const std::uint8_t>(b.encoded), params);
}

int sw_score(const Sequence& a, const Sequence& b, const AlignmentParams& params) {
  return sw_score(std::span<const std::uint8_t>(a.encoded), std::span<const std::uint8_t>(b.encoded), params);
}

int self_score(const Sequence& seq, const AlignmentParams& params) {
  int total = 0;
  for (auto code : seq.encoded) total += params.matrix.score(code, code);
  return total;
}

}  // namespace clustermerge
