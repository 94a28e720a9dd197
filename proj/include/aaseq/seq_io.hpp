#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace aaseq {

/// Ordered residue alphabet. Ordinals follow the order of `symbols`, and
/// every lexicographic comparison in the library uses ordinal order rather
/// than byte order.
class Alphabet {
 public:
  static constexpr std::string_view kAminoAcids = "ACDEFGHIKLMNPQRSTVWYXBZJ*";
  static constexpr std::string_view kNucleotides = "ACGTN";

  /// Throws InvalidParameter on duplicate symbols or fewer than two symbols.
  /// Symbols are uppercased.
  explicit Alphabet(std::string_view symbols);

  static Alphabet amino_acids() { return Alphabet(kAminoAcids); }
  static Alphabet nucleotides() { return Alphabet(kNucleotides); }
  /// Accepts the preset names "amino" / "nucleotide" or a literal symbol list.
  static Alphabet from_spec(std::string_view spec);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::string& symbols() const noexcept { return symbols_; }
  char symbol(std::size_t ordinal) const { return symbols_.at(ordinal); }

  bool contains(char c) const noexcept { return index_[static_cast<unsigned char>(c)] >= 0; }
  /// Ordinal of `c`, or -1 if `c` is not a symbol. `c` must already be uppercase.
  int ordinal(char c) const noexcept { return index_[static_cast<unsigned char>(c)]; }

  bool operator==(const Alphabet& other) const { return symbols_ == other.symbols_; }

 private:
  std::string symbols_;
  std::array<int, 256> index_{};
};

struct FastaRecord {
  std::string id;
  std::string residues;

  bool operator==(const FastaRecord&) const = default;
};

struct LabeledSequence {
  std::string id;
  std::string residues;
  std::string label;

  bool operator==(const LabeledSequence&) const = default;
};

struct Dataset {
  std::vector<LabeledSequence> sequences;
  /// Sorted, distinct class names.
  std::vector<std::string> classes;

  std::size_t num_classes() const noexcept { return classes.size(); }
  /// Ordinal of `label` in `classes`; throws UnknownLabel.
  std::size_t class_index(std::string_view label) const;

  bool operator==(const Dataset&) const = default;
};

/// Parses FASTA text. Wrapped sequence lines are joined, residues uppercased,
/// the id is the header text up to the first whitespace. CRLF is accepted.
std::vector<FastaRecord> parse_fasta(std::string_view text, const Alphabet& alphabet);

/// Parses a two-column `id<TAB>class` table. Blank lines are skipped.
/// Throws DuplicateId when an id repeats.
std::map<std::string, std::string> parse_label_table(std::string_view text);

struct AttachResult {
  Dataset dataset;
  /// Ids of records that had no label and were dropped.
  std::vector<std::string> unlabeled;
};

/// Joins records with labels. Unlabeled records are dropped and reported in
/// `unlabeled`; throws NoLabeledRecords if nothing matched.
AttachResult attach_labels(const std::vector<FastaRecord>& records,
                           const std::map<std::string, std::string>& labels);

struct SynthParams {
  int num_classes = 3;
  int per_class = 100;
  int length = 60;
  int motif_len = 6;
  double noise = 0.05;
  std::uint64_t seed = 0;
};

struct SynthOutput {
  Dataset dataset;
  /// motifs[c] is the motif planted into every sequence of classes[c].
  std::vector<std::string> motifs;
};

/// Synthetic labeled dataset: each class gets a distinct random motif planted
/// at a random offset in uniform random residues, then every residue is
/// independently substituted with probability `noise`. Deterministic in seed.
SynthOutput synth_dataset(const SynthParams& params, const Alphabet& alphabet);

/// One-hot encoding of `label` over `classes`. Throws UnknownLabel.
Eigen::VectorXd one_hot(std::string_view label, const std::vector<std::string>& classes);

/// n x C matrix of one-hot rows in dataset order.
Eigen::MatrixXd one_hot_rows(const Dataset& dataset);

/// FASTA export, residues wrapped at `width` columns (0 disables wrapping).
std::string to_fasta(const Dataset& dataset, std::size_t width = 60);
std::string to_label_tsv(const Dataset& dataset);

}  // namespace aaseq
