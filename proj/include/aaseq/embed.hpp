#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "aaseq/seq_io.hpp"

namespace aaseq {

enum class EmbedMethod {
  KmerSpectrum,  // Spike2Vec-style k-mer frequency vector
  Minimizer,
  Spaced,
};

std::string_view to_string(EmbedMethod method);
/// Accepts "spike2vec" / "kmer_spectrum", "minimizer", "spaced".
EmbedMethod parse_embed_method(std::string_view name);

/// Largest spectrum width accepted, |alphabet|^mer_length.
inline constexpr std::uint64_t kMaxSpectrumWidth = std::uint64_t{1} << 24;

struct SpectrumConfig {
  EmbedMethod method = EmbedMethod::KmerSpectrum;
  int k = 3;
  int m = 3;
  int g = 9;
  Alphabet alphabet = Alphabet::amino_acids();

  /// Per-method defaults: k=3 spectrum, (k=9, m=3) minimizer, (k=4, g=9) spaced.
  static SpectrumConfig defaults(EmbedMethod method, Alphabet alphabet = Alphabet::amino_acids());

  /// Throws InvalidParameter / InvalidM on constraint violations.
  void validate() const;
  /// Length of the mers that index the spectrum: k, m or k.
  int mer_length() const;
  /// Window a sequence must cover for one count: k, k or g.
  int window_length() const;
  std::size_t width() const;
};

/// Base-|alphabet| integer of the mer's ordinals, first symbol most
/// significant. Throws IllegalResidue for symbols outside the alphabet.
std::size_t rank_mer(std::string_view mer, const Alphabet& alphabet);
std::string unrank_mer(std::size_t rank, int length, const Alphabet& alphabet);

/// All contiguous length-k windows, left to right. Views alias `residues`.
std::vector<std::string_view> enumerate_kmers(std::string_view residues, int k);

/// Smallest m-window, in alphabet-ordinal order, over the k-mer read forward
/// and reversed. Throws InvalidM unless 1 <= m < kmer.size().
std::string minimizer_of_kmer(std::string_view kmer, int m, const Alphabet& alphabet);

Eigen::VectorXd kmer_spectrum(std::string_view residues, const SpectrumConfig& cfg);
Eigen::VectorXd minimizer_spectrum(std::string_view residues, const SpectrumConfig& cfg);
/// Counts, for every length-g window, the k-mer formed by its first k
/// characters; the remaining g-k positions are the gap.
Eigen::VectorXd spaced_spectrum(std::string_view residues, const SpectrumConfig& cfg);
/// Dispatches on cfg.method.
Eigen::VectorXd spectrum(std::string_view residues, const SpectrumConfig& cfg);

enum class ColumnMeaning { MerRank, PcRank };

struct FeatureMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> row_ids;
  ColumnMeaning columns = ColumnMeaning::MerRank;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

struct PcaModel {
  Eigen::VectorXd mean;
  /// d x r, orthonormal columns ordered by nonincreasing variance.
  Eigen::MatrixXd components;
  Eigen::VectorXd explained_variance;
};

/// Principal components of the rows of `data` via a thin SVD of the centered
/// matrix. Each component's largest-magnitude entry is made positive.
/// Throws InvalidR unless 1 <= r <= min(n, d), InvalidParameter if n < 2.
PcaModel fit_pca(const Eigen::MatrixXd& data, int r);
/// (row - mean) * components for every row. Throws DimensionMismatch.
Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& data);
FeatureMatrix apply_pca(const PcaModel& model, const FeatureMatrix& matrix);

struct EmbedOptions {
  /// PCA runs when the spectrum width exceeds this.
  std::size_t pca_threshold = 1000;
  int pca_components = 500;
};

/// One spectrum row per sequence, in dataset order. Widths above the PCA
/// threshold are reduced to min(pca_components, n, d) columns; PCA is fit on
/// the whole matrix; with fewer than two rows PCA is skipped. SequenceTooShort names the offending sequence id.
FeatureMatrix embed_dataset(const Dataset& dataset, const SpectrumConfig& cfg,
                            const EmbedOptions& options = {});

/// CSV with header `id,c0,c1,...`; values printed with round-trip precision.
std::string to_matrix_csv(const FeatureMatrix& matrix);
FeatureMatrix parse_matrix_csv(std::string_view text);

}  // namespace aaseq
