#pragma once

// Multiclass linear classifier trained by full-batch averaged-gradient steps
// with a fixed-coefficient Anderson term.
//
// Weights are a C x d matrix W. Each sample contributes the outer product
// (y - p) x^T to the averaged update direction, where p is the normalized
// prediction for W x; per class row this is exactly the scalar update
// y_c - p_c applied along x. The update per iteration is
//
//   W <- W + alpha * (W_prev - W_prev2) + step * grad     (history available)
//   W <- W + step * grad                                  (otherwise)
//
// where W_prev and W_prev2 are the pre-update iterates recorded in the two
// preceding iterations. The history term therefore first fires at
// iteration 3. `grad` is the ascent direction on the log-likelihood; in
// softmax mode it equals the negative gradient of the mean cross-entropy.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace aaseq {

enum class NormMode {
  Softmax,   // exp(s - max s) / sum, a proper distribution
  PaperSum,  // s / sum(s); may be negative or exceed one
};

std::string_view to_string(NormMode mode);
/// Accepts "softmax", "paper-sum" or "paper_sum".
NormMode parse_norm_mode(std::string_view name);

struct TrainConfig {
  double alpha = 0.0;
  int iters = 700;
  std::uint64_t seed = 0;
  NormMode norm = NormMode::Softmax;
  double epsilon = 1e-10;
  /// Multiplier on the averaged gradient. 1.0 reproduces the unit step.
  double step = 1.0;

  /// Throws InvalidParameter.
  void validate() const;
};

struct ModelState {
  Eigen::MatrixXd weights;
  std::optional<Eigen::MatrixXd> prev;
  std::optional<Eigen::MatrixXd> prev2;
  int iteration = 0;
};

struct TraceRecord {
  int iteration = 0;
  double mean_loss = 0.0;
  double accuracy = 0.0;

  bool operator==(const TraceRecord&) const = default;
};

enum class TrainStatus { Ok, NonFinite };

struct TrainingTrace {
  std::vector<TraceRecord> records;
  TrainStatus status = TrainStatus::Ok;
  /// Set when training aborted early.
  std::string diagnostic;
  /// paper_sum samples whose score sum fell below epsilon and were replaced
  /// by the uniform distribution, summed over all iterations.
  long long degenerate_samples = 0;
};

struct TrainResult {
  ModelState state;
  TrainingTrace trace;
};

/// Per-iteration instrumentation, called after the update is applied.
struct IterationEvent {
  int iteration = 0;
  bool anderson_active = false;
  const TraceRecord* record = nullptr;
};
using IterationObserver = std::function<void(const IterationEvent&)>;

/// C x d i.i.d. standard normal entries from a seeded generator.
Eigen::MatrixXd init_weights(int num_classes, int dim, std::uint64_t seed);

/// W x. Throws DimensionMismatch.
Eigen::VectorXd predict_scores(const Eigen::MatrixXd& weights, const Eigen::VectorXd& x);

/// Throws DegenerateSum in PaperSum mode when |sum(scores)| < epsilon.
Eigen::VectorXd normalize_prediction(const Eigen::VectorXd& scores, NormMode mode,
                                     double epsilon = 1e-10);

/// -sum_i y_i log(max(p_i, 0) + epsilon).
double cross_entropy(const Eigen::VectorXd& y, const Eigen::VectorXd& p, double epsilon = 1e-10);

/// (1/n) sum_s (y_s - p_s) x_s^T over rows of X (n x d) and Y (n x C).
/// Throws DimensionMismatch; DegenerateSum (with the sample index) in
/// PaperSum mode.
Eigen::MatrixXd batch_gradient(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                               const Eigen::MatrixXd& weights, NormMode mode,
                               double epsilon = 1e-10);

/// W + alpha (prev - prev2) + grad when `prev2` is given, else W + grad.
/// Throws DimensionMismatch, or NonFiniteWeights if the result is not finite.
Eigen::MatrixXd aa_update(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& prev,
                          const Eigen::MatrixXd* prev2, const Eigen::MatrixXd& grad,
                          double alpha);

/// Fraction of rows whose argmax agrees; ties go to the lowest index.
double accuracy(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictions);

/// Full training run. Requires C >= 2, n >= 1 and finite features.
/// Divergence is reported through trace.status rather than thrown.
TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& cfg, const IterationObserver& observer = {});

struct AlphaRun {
  double alpha = 0.0;
  bool failed = false;
  double final_loss = 0.0;
  std::optional<int> iterations_to_threshold;
  TrainingTrace trace;
};

struct AlphaSweepResult {
  /// Sorted by alpha.
  std::vector<AlphaRun> runs;
  /// Minimum final loss among successful runs, ties to the smallest alpha.
  std::optional<double> best_alpha;

  const AlphaRun* find(double alpha) const;
};

/// 0.0, 0.1, ..., 1.0.
std::vector<double> default_alpha_grid();

/// One same-seed training run per alpha; final training loss selects the
/// best. A diverged run is marked failed and the sweep continues.
AlphaSweepResult alpha_sweep(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                             const TrainConfig& base, const std::vector<double>& grid,
                             double loss_threshold);

/// First 1-based iteration whose mean loss is <= threshold.
std::optional<int> iterations_to_threshold(const TrainingTrace& trace, double threshold);

}  // namespace aaseq
