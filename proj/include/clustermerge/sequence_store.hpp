#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clustermerge {

/// Dataset ordinal of a sequence. Everything downstream of the store refers to
/// sequences by this 4-byte index and never copies residue data.
using SeqIndex = std::uint32_t;

/// Raised for malformed user input (FASTA, matrix files, config).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Residue alphabet in matrix order, with 'X' (unknown) last.
inline constexpr std::string_view kAlphabet = "ARNDCQEGHILKMFPSTWYVX";
inline constexpr int kAlphabetSize = 21;

/// Maps an uppercase residue letter to its code in kAlphabet, or -1.
int residue_code(char c) noexcept;

struct Sequence {
  SeqIndex index = 0;
  std::string id;
  std::string residues;
  std::vector<std::uint8_t> encoded;  // residue codes, same length as residues

  std::size_t length() const noexcept { return residues.size(); }
};

class SequenceStore {
 public:
  SequenceStore() = default;

  /// Builds a store from (id, residues) records. Residues are normalized and
  /// validated exactly as load_fasta does.
  static SequenceStore from_records(
      std::vector<std::pair<std::string, std::string>> records);

  const Sequence& get(SeqIndex index) const;
  const Sequence& operator[](SeqIndex index) const noexcept {
    return sequences_[index];
  }

  std::size_t size() const noexcept { return sequences_.size(); }
  bool empty() const noexcept { return sequences_.empty(); }
  std::span<const Sequence> sequences() const noexcept { return sequences_; }

  /// Order-sensitive 64-bit FNV-1a digest over every residue string.
  std::uint64_t checksum() const noexcept { return checksum_; }

 private:
  void append(std::string id, std::string residues);

  std::vector<Sequence> sequences_;
  std::uint64_t checksum_ = 0;
};

SequenceStore load_fasta(const std::filesystem::path& path);
SequenceStore parse_fasta(std::istream& in);

/// Writes the store as FASTA, 60 residues per line.
void write_fasta(const SequenceStore& store, std::ostream& out);
void write_fasta(const SequenceStore& store, const std::filesystem::path& path);

}  // namespace clustermerge
