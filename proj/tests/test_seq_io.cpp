#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

#include "aaseq/error.hpp"
#include "aaseq/seq_io.hpp"

using namespace aaseq;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected aaseq::Error";
  return ErrorKind::Io;
}

}  // namespace

TEST(Alphabet, PresetsAndIndex) {
  const Alphabet amino = Alphabet::amino_acids();
  EXPECT_EQ(amino.size(), 25u);
  for (std::size_t i = 0; i < amino.size(); ++i) {
    EXPECT_EQ(amino.ordinal(amino.symbol(i)), static_cast<int>(i));
  }
  EXPECT_EQ(Alphabet::from_spec("nucleotide").symbols(), "ACGTN");
  EXPECT_EQ(Alphabet::from_spec("acgt").symbols(), "ACGT");
  EXPECT_EQ(kind_of([] { Alphabet("AA"); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { Alphabet("A"); }), ErrorKind::InvalidParameter);
}

TEST(ParseFasta, JoinsWrappedLines) {
  const auto records = parse_fasta(">s1\nACDE\nFG\n", Alphabet::amino_acids());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0], (FastaRecord{"s1", "ACDEFG"}));
}

TEST(ParseFasta, KeepsRecordOrder) {
  const auto records = parse_fasta(">a\nMK\n>b\nVV\n", Alphabet::amino_acids());
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0], (FastaRecord{"a", "MK"}));
  EXPECT_EQ(records[1], (FastaRecord{"b", "VV"}));
}

TEST(ParseFasta, IllegalResidueReportsIdAndPosition) {
  try {
    parse_fasta(">s1\nAC1E\n", Alphabet::amino_acids());
    FAIL() << "expected IllegalResidue";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllegalResidue);
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'s1'"), std::string::npos) << msg;
    EXPECT_NE(msg.find("position 3"), std::string::npos) << msg;
  }
}

TEST(ParseFasta, UppercasesAndAcceptsCrlf) {
  const auto records =
      parse_fasta(">x desc text\r\nacgt\r\nNN\r\n", Alphabet::nucleotides());
  ASSERT_EQ(records.size(), 1u);
  EXPECT_EQ(records[0].id, "x");
  EXPECT_EQ(records[0].residues, "ACGTNN");
}

TEST(ParseFasta, ErrorCases) {
  const Alphabet a = Alphabet::amino_acids();
  EXPECT_EQ(kind_of([&] { parse_fasta("", a); }), ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of([&] { parse_fasta("\n\n", a); }), ErrorKind::EmptyInput);
  EXPECT_EQ(kind_of([&] { parse_fasta(">a\n>b\nMK\n", a); }), ErrorKind::HeaderWithoutSequence);
  EXPECT_EQ(kind_of([&] { parse_fasta(">a\nMK\n>b\n", a); }), ErrorKind::HeaderWithoutSequence);
  EXPECT_EQ(kind_of([&] { parse_fasta("MK\n>a\nMK\n", a); }), ErrorKind::InvalidParameter);
}

TEST(ParseFasta, RecordCountEqualsHeaderCount) {
  const Alphabet a = Alphabet::nucleotides();
  std::string text;
  for (int i = 0; i < 37; ++i) text += ">r" + std::to_string(i) + "\nACGT\nGG\n";
  EXPECT_EQ(parse_fasta(text, a).size(), 37u);
}

TEST(AttachLabels, ClassesAreSortedDistinct) {
  const std::vector<FastaRecord> records{{"s1", "MK"}, {"s2", "VV"}};
  const auto result = attach_labels(records, parse_label_table("s2\tB.1.1\ns1\tB.1\n"));
  EXPECT_EQ(result.dataset.classes, (std::vector<std::string>{"B.1", "B.1.1"}));
  EXPECT_EQ(result.dataset.sequences.size(), 2u);
  EXPECT_TRUE(result.unlabeled.empty());
}

TEST(AttachLabels, DropsUnlabeledWithWarning) {
  const std::vector<FastaRecord> records{{"s1", "MK"}, {"s2", "VV"}};
  const auto result = attach_labels(records, parse_label_table("s1\tB.1\n"));
  EXPECT_EQ(result.dataset.sequences.size(), 1u);
  EXPECT_EQ(result.unlabeled, (std::vector<std::string>{"s2"}));
}

TEST(AttachLabels, Errors) {
  EXPECT_EQ(kind_of([] { parse_label_table("s1\tA\ns1\tB\n"); }), ErrorKind::DuplicateId);
  EXPECT_EQ(kind_of([] { parse_label_table("s1 A\n"); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([] { attach_labels({{"s1", "MK"}}, parse_label_table("zz\tA\n")); }),
            ErrorKind::NoLabeledRecords);
  EXPECT_EQ(parse_label_table("a\tX\r\nb\tY\r\n").at("b"), "Y");
}

TEST(OneHot, EncodesOrdinal) {
  const std::vector<std::string> classes{"a", "b", "c"};
  const Eigen::VectorXd v = one_hot("b", classes);
  EXPECT_EQ(v, Eigen::Vector3d(0, 1, 0));
  EXPECT_DOUBLE_EQ(v.sum(), 1.0);
  EXPECT_EQ(kind_of([] { one_hot("z", {"a", "b"}); }), ErrorKind::UnknownLabel);
}

TEST(SynthDataset, DeterministicInSeed) {
  const Alphabet a = Alphabet::amino_acids();
  const SynthParams p{3, 100, 50, 6, 0.0, 7};
  const auto first = synth_dataset(p, a);
  const auto second = synth_dataset(p, a);
  EXPECT_EQ(first.dataset, second.dataset);
  EXPECT_EQ(to_fasta(first.dataset), to_fasta(second.dataset));

  SynthParams other = p;
  other.seed = 8;
  EXPECT_NE(synth_dataset(other, a).dataset.sequences, first.dataset.sequences);
}

TEST(SynthDataset, NoiseFreeSequencesContainTheirMotif) {
  const auto out = synth_dataset({2, 10, 20, 5, 0.0, 1}, Alphabet::amino_acids());
  ASSERT_EQ(out.motifs.size(), 2u);
  EXPECT_NE(out.motifs[0], out.motifs[1]);
  for (const LabeledSequence& s : out.dataset.sequences) {
    const std::size_t c = out.dataset.class_index(s.label);
    EXPECT_NE(s.residues.find(out.motifs[c]), std::string::npos) << s.id;
    EXPECT_EQ(s.residues.size(), 20u);
  }
  EXPECT_EQ(out.dataset.classes, (std::vector<std::string>{"class_0", "class_1"}));
}

TEST(SynthDataset, RejectsInvalidParameters) {
  const Alphabet a = Alphabet::nucleotides();
  EXPECT_EQ(kind_of([&] { synth_dataset({2, 10, 20, 5, 1.0, 1}, a); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { synth_dataset({1, 10, 20, 5, 0.0, 1}, a); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { synth_dataset({2, 0, 20, 5, 0.0, 1}, a); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { synth_dataset({2, 10, 4, 5, 0.0, 1}, a); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { synth_dataset({2, 10, 20, 5, -0.1, 1}, a); }),
            ErrorKind::InvalidParameter);
}

TEST(SynthDataset, ClassNamesSortNumerically) {
  const auto out = synth_dataset({12, 1, 10, 3, 0.0, 2}, Alphabet::amino_acids());
  EXPECT_TRUE(std::is_sorted(out.dataset.classes.begin(), out.dataset.classes.end()));
  EXPECT_EQ(out.dataset.classes.front(), "class_00");
  EXPECT_EQ(out.dataset.classes.back(), "class_11");
}

// Property: export to FASTA + TSV and re-import yields an equal dataset.
TEST(DatasetRoundTrip, FastaAndTsv) {
  const Alphabet a = Alphabet::amino_acids();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int length = 5 + static_cast<int>(seed * 13 % 150);
    const auto synth = synth_dataset({2 + static_cast<int>(seed % 4), 3, length, 3, 0.1, seed}, a);
    for (std::size_t width : {std::size_t{0}, std::size_t{7}, std::size_t{60}}) {
      const auto records = parse_fasta(to_fasta(synth.dataset, width), a);
      const auto back = attach_labels(records, parse_label_table(to_label_tsv(synth.dataset)));
      EXPECT_EQ(back.dataset, synth.dataset) << "seed " << seed << " width " << width;
    }
  }
}
