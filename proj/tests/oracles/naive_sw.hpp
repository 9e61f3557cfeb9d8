#pragma once

// Textbook three-matrix Gotoh recurrence with a full traceback, written
// independently of the library's linear-memory implementation. Quadratic
// memory; test use only.

#include <cstdint>
#include <string>
#include <vector>

#include "clustermerge/alignment.hpp"

namespace oracle {

struct NaiveAlignment {
  long long score = 0;
  std::uint32_t a_begin = 0, a_end = 0;
  std::uint32_t b_begin = 0, b_end = 0;
};

inline NaiveAlignment naive_sw(const std::string& a, const std::string& b,
                               const clustermerge::AlignmentParams& params) {
  using Grid = std::vector<std::vector<long long>>;
  const long long kNeg = -(1LL << 40);
  const std::size_t m = a.size(), n = b.size();
  Grid H(m + 1, std::vector<long long>(n + 1, 0));
  Grid E(m + 1, std::vector<long long>(n + 1, kNeg));  // gap consuming a (vertical)
  Grid F(m + 1, std::vector<long long>(n + 1, kNeg));  // gap consuming b (horizontal)
  auto sub = [&](char x, char y) {
    return static_cast<long long>(params.matrix.score(
        static_cast<std::uint8_t>(clustermerge::residue_code(x)),
        static_cast<std::uint8_t>(clustermerge::residue_code(y))));
  };

  long long best = 0;
  std::size_t bi = 0, bj = 0;
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      E[i][j] = std::max(H[i - 1][j] - params.gap_open, E[i - 1][j] - params.gap_extend);
      F[i][j] = std::max(H[i][j - 1] - params.gap_open, F[i][j - 1] - params.gap_extend);
      long long h = std::max({0LL, H[i - 1][j - 1] + sub(a[i - 1], b[j - 1]), E[i][j], F[i][j]});
      H[i][j] = h;
      if (h > best) {
        best = h;
        bi = i;
        bj = j;
      }
    }
  }

  NaiveAlignment out;
  out.score = best;
  if (best == 0) return out;

  // Traceback: diagonal, then up, then left; gaps prefer to have just opened.
  enum State { kH, kE, kF } state = kH;
  std::size_t i = bi, j = bj;
  for (;;) {
    if (state == kH) {
      const long long diag = H[i - 1][j - 1] + sub(a[i - 1], b[j - 1]);
      if (H[i][j] == diag) {
        if (H[i - 1][j - 1] == 0) break;  // (i, j) is the first aligned pair
        --i;
        --j;
      } else if (H[i][j] == E[i][j]) {
        state = kE;
      } else {
        state = kF;
      }
    } else if (state == kE) {
      if (E[i][j] == H[i - 1][j] - params.gap_open) state = kH;
      --i;
    } else {
      if (F[i][j] == H[i][j - 1] - params.gap_open) state = kH;
      --j;
    }
  }
  out.a_begin = static_cast<std::uint32_t>(i - 1);
  out.b_begin = static_cast<std::uint32_t>(j - 1);
  out.a_end = static_cast<std::uint32_t>(bi);
  out.b_end = static_cast<std::uint32_t>(bj);
  return out;
}

}  // namespace oracle
