#include "aaseq/embed.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/SVD>

#include "aaseq/error.hpp"
#include "format.hpp"

namespace aaseq {

namespace {

// Ordinals of `residues`, throwing IllegalResidue on foreign symbols.
std::vector<int> ordinals(std::string_view residues, const Alphabet& alphabet, const char* op) {
  std::vector<int> out(residues.size());
  for (std::size_t i = 0; i < residues.size(); ++i) {
    const int o = alphabet.ordinal(residues[i]);
    if (o < 0) {
      throw Error(ErrorKind::IllegalResidue, op,
                  "position " + std::to_string(i + 1) + ": '" + residues[i] + "'");
    }
    out[i] = o;
  }
  return out;
}

std::size_t rank_of(const int* ords, int length, std::size_t sigma) {
  std::size_t rank = 0;
  for (int i = 0; i < length; ++i) rank = rank * sigma + static_cast<std::size_t>(ords[i]);
  return rank;
}

void require_length(std::string_view residues, int window, const char* op) {
  if (residues.size() < static_cast<std::size_t>(window)) {
    throw Error(ErrorKind::SequenceTooShort, op,
                "length " + std::to_string(residues.size()) + " < window " +
                    std::to_string(window));
  }
}

void require_method(const SpectrumConfig& cfg, EmbedMethod expected, const char* op) {
  if (cfg.method != expected) {
    throw Error(ErrorKind::InvalidParameter, op,
                "config method is " + std::string(to_string(cfg.method)));
  }
  cfg.validate();
}

// Smallest m-window of `ords` (length k) by ordinal sequence, over forward
// and reversed windows. Writes the winning window's ordinals to `best`.
void minimizer_ordinals(const int* ords, int k, int m, std::vector<int>& reversed,
                        std::vector<int>& best) {
  reversed.assign(ords, ords + k);
  std::reverse(reversed.begin(), reversed.end());
  const int* best_ptr = ords;
  auto consider = [&](const int* candidate) {
    if (std::lexicographical_compare(candidate, candidate + m, best_ptr, best_ptr + m)) {
      best_ptr = candidate;
    }
  };
  for (int i = 1; i + m <= k; ++i) consider(ords + i);
  for (int i = 0; i + m <= k; ++i) consider(reversed.data() + i);
  best.assign(best_ptr, best_ptr + m);
}

}  // namespace

std::string_view to_string(EmbedMethod method) {
  switch (method) {
    case EmbedMethod::KmerSpectrum: return "spike2vec";
    case EmbedMethod::Minimizer: return "minimizer";
    case EmbedMethod::Spaced: return "spaced";
  }
  return "unknown";
}

EmbedMethod parse_embed_method(std::string_view name) {
  if (name == "spike2vec" || name == "kmer_spectrum" || name == "kmer") {
    return EmbedMethod::KmerSpectrum;
  }
  if (name == "minimizer") return EmbedMethod::Minimizer;
  if (name == "spaced") return EmbedMethod::Spaced;
  throw Error(ErrorKind::InvalidParameter, "parse_embed_method",
              "unknown method '" + std::string(name) + "'");
}

SpectrumConfig SpectrumConfig::defaults(EmbedMethod method, Alphabet alphabet) {
  SpectrumConfig cfg{method, 3, 3, 9, std::move(alphabet)};
  if (method == EmbedMethod::Minimizer) cfg.k = 9;
  if (method == EmbedMethod::Spaced) cfg.k = 4;
  return cfg;
}

void SpectrumConfig::validate() const {
  if (k < 1) throw Error(ErrorKind::InvalidParameter, "SpectrumConfig", "k must be >= 1");
  if (method == EmbedMethod::Minimizer && (m < 1 || m >= k)) {
    throw Error(ErrorKind::InvalidM, "SpectrumConfig",
                "minimizer needs 1 <= m < k (m=" + std::to_string(m) + ", k=" +
                    std::to_string(k) + ")");
  }
  if (method == EmbedMethod::Spaced && (g < 1 || k >= g)) {
    throw Error(ErrorKind::InvalidParameter, "SpectrumConfig",
                "spaced needs k < g (k=" + std::to_string(k) + ", g=" + std::to_string(g) + ")");
  }
  std::uint64_t width = 1;
  for (int i = 0; i < mer_length(); ++i) {
    width *= alphabet.size();
    if (width > kMaxSpectrumWidth) {
      throw Error(ErrorKind::InvalidParameter, "SpectrumConfig",
                  "spectrum width " + std::to_string(alphabet.size()) + "^" +
                      std::to_string(mer_length()) + " exceeds " +
                      std::to_string(kMaxSpectrumWidth));
    }
  }
}

int SpectrumConfig::mer_length() const { return method == EmbedMethod::Minimizer ? m : k; }

int SpectrumConfig::window_length() const { return method == EmbedMethod::Spaced ? g : k; }

std::size_t SpectrumConfig::width() const {
  std::size_t width = 1;
  for (int i = 0; i < mer_length(); ++i) width *= alphabet.size();
  return width;
}

std::size_t rank_mer(std::string_view mer, const Alphabet& alphabet) {
  const auto ords = ordinals(mer, alphabet, "rank_mer");
  return rank_of(ords.data(), static_cast<int>(ords.size()), alphabet.size());
}

std::string unrank_mer(std::size_t rank, int length, const Alphabet& alphabet) {
  std::string mer(static_cast<std::size_t>(length), ' ');
  for (int i = length - 1; i >= 0; --i) {
    mer[static_cast<std::size_t>(i)] = alphabet.symbol(rank % alphabet.size());
    rank /= alphabet.size();
  }
  return mer;
}

std::vector<std::string_view> enumerate_kmers(std::string_view residues, int k) {
  std::vector<std::string_view> kmers;
  if (k < 1 || residues.size() < static_cast<std::size_t>(k)) return kmers;
  kmers.reserve(residues.size() - static_cast<std::size_t>(k) + 1);
  for (std::size_t i = 0; i + static_cast<std::size_t>(k) <= residues.size(); ++i) {
    kmers.push_back(residues.substr(i, static_cast<std::size_t>(k)));
  }
  return kmers;
}

std::string minimizer_of_kmer(std::string_view kmer, int m, const Alphabet& alphabet) {
  if (m < 1 || static_cast<std::size_t>(m) >= kmer.size()) {
    throw Error(ErrorKind::InvalidM, "minimizer_of_kmer",
                "need 1 <= m < " + std::to_string(kmer.size()) + ", got " + std::to_string(m));
  }
  const auto ords = ordinals(kmer, alphabet, "minimizer_of_kmer");
  std::vector<int> reversed, best;
  minimizer_ordinals(ords.data(), static_cast<int>(ords.size()), m, reversed, best);
  std::string out;
  for (int o : best) out.push_back(alphabet.symbol(static_cast<std::size_t>(o)));
  return out;
}

Eigen::VectorXd kmer_spectrum(std::string_view residues, const SpectrumConfig& cfg) {
  require_method(cfg, EmbedMethod::KmerSpectrum, "kmer_spectrum");
  require_length(residues, cfg.k, "kmer_spectrum");
  const auto ords = ordinals(residues, cfg.alphabet, "kmer_spectrum");
  const std::size_t sigma = cfg.alphabet.size();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.width()));
  for (std::size_t i = 0; i + static_cast<std::size_t>(cfg.k) <= ords.size(); ++i) {
    counts(static_cast<Eigen::Index>(rank_of(ords.data() + i, cfg.k, sigma))) += 1.0;
  }
  return counts;
}

Eigen::VectorXd minimizer_spectrum(std::string_view residues, const SpectrumConfig& cfg) {
  require_method(cfg, EmbedMethod::Minimizer, "minimizer_spectrum");
  require_length(residues, cfg.k, "minimizer_spectrum");
  const auto ords = ordinals(residues, cfg.alphabet, "minimizer_spectrum");
  const std::size_t sigma = cfg.alphabet.size();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.width()));
  std::vector<int> reversed, best;
  for (std::size_t i = 0; i + static_cast<std::size_t>(cfg.k) <= ords.size(); ++i) {
    minimizer_ordinals(ords.data() + i, cfg.k, cfg.m, reversed, best);
    counts(static_cast<Eigen::Index>(rank_of(best.data(), cfg.m, sigma))) += 1.0;
  }
  return counts;
}

Eigen::VectorXd spaced_spectrum(std::string_view residues, const SpectrumConfig& cfg) {
  require_method(cfg, EmbedMethod::Spaced, "spaced_spectrum");
  require_length(residues, cfg.g, "spaced_spectrum");
  const auto ords = ordinals(residues, cfg.alphabet, "spaced_spectrum");
  const std::size_t sigma = cfg.alphabet.size();
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg.width()));
  for (std::size_t i = 0; i + static_cast<std::size_t>(cfg.g) <= ords.size(); ++i) {
    // First k characters of the g-mer.
    counts(static_cast<Eigen::Index>(rank_of(ords.data() + i, cfg.k, sigma))) += 1.0;
  }
  return counts;
}

Eigen::VectorXd spectrum(std::string_view residues, const SpectrumConfig& cfg) {
  switch (cfg.method) {
    case EmbedMethod::KmerSpectrum: return kmer_spectrum(residues, cfg);
    case EmbedMethod::Minimizer: return minimizer_spectrum(residues, cfg);
    case EmbedMethod::Spaced: return spaced_spectrum(residues, cfg);
  }
  throw Error(ErrorKind::InvalidParameter, "spectrum", "unknown method");
}

PcaModel fit_pca(const Eigen::MatrixXd& data, int r) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) throw Error(ErrorKind::InvalidParameter, "fit_pca", "need at least 2 rows");
  if (r < 1 || r > std::min(n, d)) {
    throw Error(ErrorKind::InvalidR, "fit_pca",
                "r=" + std::to_string(r) + " not in [1, " + std::to_string(std::min(n, d)) + "]");
  }
  PcaModel model;
  model.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centered = data.rowwise() - model.mean.transpose();

  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  model.components = svd.matrixV().leftCols(r);
  model.explained_variance =
      svd.singularValues().head(r).array().square() / static_cast<double>(n - 1);

  for (Eigen::Index j = 0; j < r; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, j) < 0) model.components.col(j) *= -1.0;
  }
  return model;
}

Eigen::MatrixXd apply_pca(const PcaModel& model, const Eigen::MatrixXd& data) {
  if (data.cols() != model.mean.size()) {
    throw Error(ErrorKind::DimensionMismatch, "apply_pca",
                "matrix has " + std::to_string(data.cols()) + " columns, model expects " +
                    std::to_string(model.mean.size()));
  }
  return (data.rowwise() - model.mean.transpose()) * model.components;
}

FeatureMatrix apply_pca(const PcaModel& model, const FeatureMatrix& matrix) {
  return {apply_pca(model, matrix.values), matrix.row_ids, ColumnMeaning::PcRank};
}

FeatureMatrix embed_dataset(const Dataset& dataset, const SpectrumConfig& cfg,
                            const EmbedOptions& options) {
  cfg.validate();
  const auto n = static_cast<Eigen::Index>(dataset.sequences.size());
  const auto d = static_cast<Eigen::Index>(cfg.width());
  FeatureMatrix out;
  out.values.resize(n, d);
  out.row_ids.reserve(dataset.sequences.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const LabeledSequence& seq = dataset.sequences[static_cast<std::size_t>(i)];
    try {
      out.values.row(i) = spectrum(seq.residues, cfg).transpose();
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SequenceTooShort && e.kind() != ErrorKind::IllegalResidue) throw;
      throw Error(e.kind(), "embed_dataset", "sequence '" + seq.id + "': " + e.what());
    }
    out.row_ids.push_back(seq.id);
  }
  // A single row has no variance to decompose; keep the raw spectrum.
  if (static_cast<std::size_t>(d) > options.pca_threshold && n >= 2) {
    const Eigen::Index r =
        std::min<Eigen::Index>({static_cast<Eigen::Index>(options.pca_components), n, d});
    const PcaModel model = fit_pca(out.values, static_cast<int>(r));
    out = apply_pca(model, out);
  }
  return out;
}

std::string to_matrix_csv(const FeatureMatrix& matrix) {
  std::string out = "id";
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) out += ",c" + std::to_string(j);
  out += '\n';
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    out += matrix.row_ids[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
      out += ',';
      out += detail::format_double(matrix.values(i, j));
    }
    out += '\n';
  }
  return out;
}

FeatureMatrix parse_matrix_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty()) throw Error(ErrorKind::EmptyInput, "parse_matrix_csv", "empty matrix file");
  const auto header = detail::split(lines[0], ',');
  if (header.empty() || header[0] != "id") {
    throw Error(ErrorKind::InvalidParameter, "parse_matrix_csv", "header must start with 'id'");
  }
  const auto d = static_cast<Eigen::Index>(header.size() - 1);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (header[static_cast<std::size_t>(j + 1)] != "c" + std::to_string(j)) {
      throw Error(ErrorKind::InvalidParameter, "parse_matrix_csv",
                  "header column " + std::to_string(j + 1) + " must be c" + std::to_string(j));
    }
  }
  FeatureMatrix out;
  std::vector<std::vector<double>> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    if (lines[li].empty()) continue;
    const auto fields = detail::split(lines[li], ',');
    if (static_cast<Eigen::Index>(fields.size()) != d + 1) {
      throw Error(ErrorKind::DimensionMismatch, "parse_matrix_csv",
                  "line " + std::to_string(li + 1) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(d + 1));
    }
    out.row_ids.emplace_back(fields[0]);
    std::vector<double> row(static_cast<std::size_t>(d));
    for (Eigen::Index j = 0; j < d; ++j) {
      row[static_cast<std::size_t>(j)] =
          detail::parse_double(fields[static_cast<std::size_t>(j + 1)], "parse_matrix_csv");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::EmptyInput, "parse_matrix_csv", "no data rows");
  out.values.resize(static_cast<Eigen::Index>(rows.size()), d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < d; ++j) {
      out.values(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace aaseq
