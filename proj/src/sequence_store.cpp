#include "clustermerge/sequence_store.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>

namespace clustermerge {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::array<std::int8_t, 256> make_code_table() {
  std::array<std::int8_t, 256> table{};
  for (auto& v : table) v = -1;
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) {
    table[static_cast<unsigned char>(kAlphabet[i])] = static_cast<std::int8_t>(i);
  }
  return table;
}

constexpr auto kCodeTable = make_code_table();

std::uint64_t fnv_mix(std::uint64_t h, std::uint8_t byte) {
  return (h ^ byte) * kFnvPrime;
}

// Uppercases, drops trailing '*' stop characters and rejects anything outside
// the alphabet.
std::string normalize_residues(std::string raw, const std::string& id) {
  for (auto& c : raw) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  while (!raw.empty() && raw.back() == '*') raw.pop_back();
  for (char c : raw) {
    if (residue_code(c) < 0) {
      throw InputError("invalid residue '" + std::string(1, c) + "' at record \"" + id + "\"");
    }
  }
  if (raw.empty()) throw InputError("empty sequence body at record \"" + id + "\"");
  return raw;
}

}  // namespace

int residue_code(char c) noexcept {
  return kCodeTable[static_cast<unsigned char>(c)];
}

SequenceStore SequenceStore::from_records(
    std::vector<std::pair<std::string, std::string>> records) {
  SequenceStore store;
  store.sequences_.reserve(records.size());
  for (auto& [id, residues] : records) {
    auto normalized = normalize_residues(std::move(residues), id);
    store.append(std::move(id), std::move(normalized));
  }
  return store;
}

void SequenceStore::append(std::string id, std::string residues) {
  if (sequences_.empty()) checksum_ = kFnvOffset;
  Sequence seq;
  seq.index = static_cast<SeqIndex>(sequences_.size());
  seq.id = std::move(id);
  seq.encoded.resize(residues.size());
  std::transform(residues.begin(), residues.end(), seq.encoded.begin(),
                 [](char c) { return static_cast<std::uint8_t>(residue_code(c)); });

  // Length prefix keeps record boundaries significant.
  std::uint64_t len = residues.size();
  for (int b = 0; b < 8; ++b) checksum_ = fnv_mix(checksum_, static_cast<std::uint8_t>(len >> (8 * b)));
  for (char c : residues) checksum_ = fnv_mix(checksum_, static_cast<std::uint8_t>(c));

  seq.residues = std::move(residues);
  sequences_.push_back(std::move(seq));
}

const Sequence& SequenceStore::get(SeqIndex index) const {
  if (index >= sequences_.size()) {
    throw std::out_of_range("sequence index " + std::to_string(index) +
                            " out of range (store size " +
                            std::to_string(sequences_.size()) + ")");
  }
  return sequences_[index];
}

SequenceStore parse_fasta(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> records;
  std::string line;
  bool have_header = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (line[first] == '>') {
      std::string header = line.substr(first + 1);
      auto id_begin = header.find_first_not_of(" \t");
      std::string id;
      if (id_begin != std::string::npos) {
        auto id_end = header.find_first_of(" \t", id_begin);
        id = header.substr(id_begin, id_end == std::string::npos ? std::string::npos : id_end - id_begin);
      }
      records.emplace_back(std::move(id), std::string{});
      have_header = true;
      continue;
    }
    if (!have_header) throw InputError("malformed FASTA: sequence line before any header");
    auto last = line.find_last_not_of(" \t");
    records.back().second.append(line, first, last - first + 1);
  }
  return SequenceStore::from_records(std::move(records));
}

SequenceStore load_fasta(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open FASTA file " + path.string());
  return parse_fasta(in);
}

void write_fasta(const SequenceStore& store, std::ostream& out) {
  constexpr std::size_t kLineWidth = 60;
  for (const auto& seq : store.sequences()) {
    out << '>' << seq.id << '\n';
    for (std::size_t pos = 0; pos < seq.residues.size(); pos += kLineWidth) {
      out.write(seq.residues.data() + pos,
                static_cast<std::streamsize>(std::min(kLineWidth, seq.residues.size() - pos)));
      out << '\n';
    }
  }
}

void write_fasta(const SequenceStore& store, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write FASTA file " + path.string());
  write_fasta(store, out);
}

}  // namespace clustermerge
