#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "clustermerge/sequence_store.hpp"

namespace clustermerge {

/// Integer substitution scores over kAlphabet (20 amino acids plus X).
class ScoringMatrix {
 public:
  using Table = std::array<std::array<int, kAlphabetSize>, kAlphabetSize>;

  ScoringMatrix() : ScoringMatrix(pam250()) {}
  ScoringMatrix(std::string name, const Table& table);

  /// Dayhoff PAM250 in the common integer (1/3 bit) scaling.
  static const ScoringMatrix& pam250();

  int score(std::uint8_t a, std::uint8_t b) const noexcept { return table_[a][b]; }
  const std::array<int, kAlphabetSize>& row(std::uint8_t a) const noexcept { return table_[a]; }
  const Table& table() const noexcept { return table_; }
  const std::string& name() const noexcept { return name_; }

  bool operator==(const ScoringMatrix& other) const noexcept { return table_ == other.table_; }

 private:
  std::string name_;
  Table table_{};
};

/// Reads a whitespace-delimited 20x20 or 21x21 matrix in ARNDCQEGHILKMFPSTWYV[X]
/// order. An optional letter header row and letter row labels are accepted.
/// A 20x20 file scores X as 0 against everything.
ScoringMatrix parse_matrix(std::istream& in, std::string name);
ScoringMatrix load_matrix(const std::filesystem::path& path);

struct AlignmentParams {
  ScoringMatrix matrix = ScoringMatrix::pam250();
  int gap_open = 37;    // first residue of a gap
  int gap_extend = 7;   // each additional gap residue

  /// Throws InputError unless gap_open >= gap_extend >= 0 and the matrix is
  /// symmetric.
  void validate() const;
};

struct Thresholds {
  int similarity = 181;    // T
  int full_merge = 250;    // mT
  int max_uncovered = 15;  // mU

  void validate() const;
};

/// Half-open residue interval [begin, end).
struct Span {
  std::uint32_t begin = 0;
  std::uint32_t end = 0;

  std::uint32_t size() const noexcept { return end - begin; }
  bool empty() const noexcept { return end == begin; }
  bool operator==(const Span&) const = default;
};

struct AlignmentResult {
  int score = 0;
  Span span_a;
  Span span_b;

  bool operator==(const AlignmentResult&) const = default;
};

enum class Side { A, B };

/// Smith-Waterman local alignment with affine gaps. Among equal-scoring end
/// cells the lexicographically smallest (row, column) wins; the start is the
/// one a traceback preferring diagonal, then up, then left would reach. Runs
/// in linear memory by carrying alignment origins through the recurrence.
AlignmentResult sw_align(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
                         const AlignmentParams& params);
AlignmentResult sw_align(const Sequence& a, const Sequence& b, const AlignmentParams& params);

/// Score-only fast path; always equal to sw_align(...).score.
int sw_score(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
             const AlignmentParams& params);
int sw_score(const Sequence& a, const Sequence& b, const AlignmentParams& params);

/// Sum of diagonal substitution scores over the sequence.
int self_score(const Sequence& seq, const AlignmentParams& params);

/// Residues of one side left outside the aligned footprint.
inline std::uint32_t uncovered(const AlignmentResult& result, Side which, std::size_t seq_len) {
  const Span& span = which == Side::A ? result.span_a : result.span_b;
  return static_cast<std::uint32_t>(seq_len) - span.size();
}

/// Inclusive boundary: a score equal to the threshold counts as similar.
inline bool is_similar(int score, const Thresholds& th) noexcept {
  return score >= th.similarity;
}

}  // namespace clustermerge
