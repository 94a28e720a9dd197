#include "aaseq/seq_io.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "aaseq/error.hpp"
#include "aaseq/rng.hpp"
#include "format.hpp"

namespace aaseq {

namespace {

char upper(char c) { return static_cast<char>(std::toupper(static_cast<unsigned char>(c))); }

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; });
}

}  // namespace

Alphabet::Alphabet(std::string_view symbols) {
  index_.fill(-1);
  for (char raw : symbols) {
    const char c = upper(raw);
    if (index_[static_cast<unsigned char>(c)] >= 0) {
      throw Error(ErrorKind::InvalidParameter, "Alphabet",
                  std::string("duplicate symbol '") + c + "'");
    }
    index_[static_cast<unsigned char>(c)] = static_cast<int>(symbols_.size());
    symbols_.push_back(c);
  }
  if (symbols_.size() < 2) {
    throw Error(ErrorKind::InvalidParameter, "Alphabet", "at least two symbols required");
  }
}

Alphabet Alphabet::from_spec(std::string_view spec) {
  if (spec == "amino" || spec == "protein") return amino_acids();
  if (spec == "nucleotide" || spec == "dna") return nucleotides();
  return Alphabet(spec);
}

std::size_t Dataset::class_index(std::string_view label) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  if (it == classes.end() || *it != label) {
    throw Error(ErrorKind::UnknownLabel, "class_index", "label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - classes.begin());
}

std::vector<FastaRecord> parse_fasta(std::string_view text, const Alphabet& alphabet) {
  std::vector<FastaRecord> records;
  for (std::string_view line : detail::split_lines(text)) {
    if (!line.empty() && line.front() == '>') {
      if (!records.empty() && records.back().residues.empty()) {
        throw Error(ErrorKind::HeaderWithoutSequence, "parse_fasta",
                    "record '" + records.back().id + "' has no residues");
      }
      std::string_view header = line.substr(1);
      const auto first = header.find_first_not_of(" \t");
      header = first == std::string_view::npos ? std::string_view{} : header.substr(first);
      const std::string id(header.substr(0, header.find_first_of(" \t")));
      if (id.empty()) {
        throw Error(ErrorKind::InvalidParameter, "parse_fasta",
                    "empty header id at record " + std::to_string(records.size() + 1));
      }
      records.push_back({id, {}});
      continue;
    }
    if (is_blank(line)) continue;
    if (records.empty()) {
      throw Error(ErrorKind::InvalidParameter, "parse_fasta", "sequence data before first header");
    }
    FastaRecord& record = records.back();
    for (char raw : line) {
      if (raw == ' ' || raw == '\t') continue;
      const char c = upper(raw);
      if (!alphabet.contains(c)) {
        throw Error(ErrorKind::IllegalResidue, "parse_fasta",
                    "record '" + record.id + "' position " +
                        std::to_string(record.residues.size() + 1) + ": '" + raw + "'");
      }
      record.residues.push_back(c);
    }
  }
  if (records.empty()) {
    throw Error(ErrorKind::EmptyInput, "parse_fasta", "no FASTA records");
  }
  if (records.back().residues.empty()) {
    throw Error(ErrorKind::HeaderWithoutSequence, "parse_fasta",
                "record '" + records.back().id + "' has no residues");
  }
  return records;
}

std::map<std::string, std::string> parse_label_table(std::string_view text) {
  std::map<std::string, std::string> labels;
  std::size_t line_no = 0;
  for (std::string_view line : detail::split_lines(text)) {
    ++line_no;
    if (is_blank(line)) continue;
    const auto tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size()) {
      throw Error(ErrorKind::InvalidParameter, "parse_label_table",
                  "line " + std::to_string(line_no) + ": expected 'id<TAB>class'");
    }
    std::string id(line.substr(0, tab));
    std::string label(line.substr(tab + 1));
    if (label.find('\t') != std::string::npos) {
      throw Error(ErrorKind::InvalidParameter, "parse_label_table",
                  "line " + std::to_string(line_no) + ": more than two columns");
    }
    if (!labels.emplace(id, std::move(label)).second) {
      throw Error(ErrorKind::DuplicateId, "parse_label_table",
                  "id '" + id + "' at line " + std::to_string(line_no));
    }
  }
  return labels;
}

AttachResult attach_labels(const std::vector<FastaRecord>& records,
                           const std::map<std::string, std::string>& labels) {
  AttachResult result;
  std::set<std::string> classes;
  for (const FastaRecord& record : records) {
    const auto it = labels.find(record.id);
    if (it == labels.end()) {
      result.unlabeled.push_back(record.id);
      continue;
    }
    classes.insert(it->second);
    result.dataset.sequences.push_back({record.id, record.residues, it->second});
  }
  if (result.dataset.sequences.empty()) {
    throw Error(ErrorKind::NoLabeledRecords, "attach_labels",
                "none of " + std::to_string(records.size()) + " records has a label");
  }
  result.dataset.classes.assign(classes.begin(), classes.end());
  return result;
}

SynthOutput synth_dataset(const SynthParams& p, const Alphabet& alphabet) {
  auto invalid = [](const std::string& what) {
    return Error(ErrorKind::InvalidParameter, "synth_dataset", what);
  };
  if (p.num_classes < 2) throw invalid("num_classes must be >= 2");
  if (p.per_class < 1) throw invalid("per_class must be >= 1");
  if (p.length < 1) throw invalid("length must be >= 1");
  if (p.motif_len < 1 || p.motif_len > p.length) throw invalid("motif_len must be in [1, length]");
  if (!(p.noise >= 0.0 && p.noise < 1.0)) throw invalid("noise must be in [0, 1)");

  Rng rng(p.seed);
  const std::uint64_t sigma = alphabet.size();
  auto draw_symbol = [&] { return alphabet.symbol(rng.index(sigma)); };

  SynthOutput out;
  std::set<std::string> seen;
  while (out.motifs.size() < static_cast<std::size_t>(p.num_classes)) {
    std::string motif(static_cast<std::size_t>(p.motif_len), ' ');
    for (char& c : motif) c = draw_symbol();
    // Short motifs over small alphabets can collide; redraw until distinct.
    if (seen.insert(motif).second) out.motifs.push_back(std::move(motif));
    if (seen.size() >= 1'000'000) throw invalid("cannot draw distinct motifs");
  }

  const int width = static_cast<int>(std::to_string(p.num_classes - 1).size());
  for (int c = 0; c < p.num_classes; ++c) {
    std::string name = std::to_string(c);
    out.dataset.classes.push_back("class_" + std::string(width - name.size(), '0') + name);
  }

  const int id_width = static_cast<int>(std::to_string(p.num_classes * p.per_class).size());
  int serial = 0;
  for (int c = 0; c < p.num_classes; ++c) {
    const std::string& motif = out.motifs[static_cast<std::size_t>(c)];
    for (int s = 0; s < p.per_class; ++s) {
      std::string residues(static_cast<std::size_t>(p.length), ' ');
      for (char& r : residues) r = draw_symbol();
      const auto offset = rng.index(static_cast<std::uint64_t>(p.length - p.motif_len + 1));
      residues.replace(offset, motif.size(), motif);
      for (char& r : residues) {
        if (rng.uniform() < p.noise) {
          // Substitute with a different symbol.
          const auto shift = 1 + rng.index(sigma - 1);
          r = alphabet.symbol((static_cast<std::uint64_t>(alphabet.ordinal(r)) + shift) % sigma);
        }
      }
      std::string id = std::to_string(serial++);
      id = "seq" + std::string(id_width - id.size(), '0') + id;
      out.dataset.sequences.push_back({std::move(id), std::move(residues),
                                       out.dataset.classes[static_cast<std::size_t>(c)]});
    }
  }
  return out;
}

Eigen::VectorXd one_hot(std::string_view label, const std::vector<std::string>& classes) {
  const auto it = std::find(classes.begin(), classes.end(), label);
  if (it == classes.end()) {
    throw Error(ErrorKind::UnknownLabel, "one_hot", "label '" + std::string(label) + "'");
  }
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(classes.size()));
  v(it - classes.begin()) = 1.0;
  return v;
}

Eigen::MatrixXd one_hot_rows(const Dataset& dataset) {
  const auto n = static_cast<Eigen::Index>(dataset.sequences.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(dataset.num_classes()));
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i, static_cast<Eigen::Index>(
             dataset.class_index(dataset.sequences[static_cast<std::size_t>(i)].label))) = 1.0;
  }
  return y;
}

std::string to_fasta(const Dataset& dataset, std::size_t width) {
  std::string out;
  for (const LabeledSequence& s : dataset.sequences) {
    out += '>';
    out += s.id;
    out += '\n';
    if (width == 0) {
      out += s.residues;
      out += '\n';
      continue;
    }
    for (std::size_t i = 0; i < s.residues.size(); i += width) {
      out.append(s.residues, i, width);
      out += '\n';
    }
  }
  return out;
}

std::string to_label_tsv(const Dataset& dataset) {
  std::string out;
  for (const LabeledSequence& s : dataset.sequences) {
    out += s.id;
    out += '\t';
    out += s.label;
    out += '\n';
  }
  return out;
}

}  // namespace aaseq
