#include "aaseq/trainer.hpp"

#include <algorithm>
#include <cmath>

#include "aaseq/error.hpp"
#include "aaseq/rng.hpp"

namespace aaseq {

namespace {

Eigen::Index argmax(const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < v.size(); ++i) {
    if (v(i) > v(best)) best = i;
  }
  return best;
}

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

struct BatchEval {
  Eigen::MatrixXd grad;
  double loss_sum = 0.0;
  long long correct = 0;
  long long degenerate = 0;
};

void check_batch_dims(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                      const Eigen::MatrixXd& weights, const char* op) {
  if (features.rows() != targets.rows() || weights.cols() != features.cols() ||
      weights.rows() != targets.cols()) {
    throw Error(ErrorKind::DimensionMismatch, op,
                "X " + shape(features) + ", Y " + shape(targets) + ", W " + shape(weights));
  }
  if (features.rows() < 1) throw Error(ErrorKind::InvalidParameter, op, "no samples");
}

// One pass over the samples at fixed weights. With `uniform_fallback`, a
// PaperSum sample with a degenerate score sum uses the uniform distribution
// instead of throwing.
BatchEval evaluate_batch(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                         const Eigen::MatrixXd& weights, NormMode mode, double epsilon,
                         bool uniform_fallback) {
  const Eigen::Index n = features.rows();
  const Eigen::Index num_classes = weights.rows();
  BatchEval eval;
  eval.grad = Eigen::MatrixXd::Zero(weights.rows(), weights.cols());
  Eigen::VectorXd x, y, p;
  for (Eigen::Index s = 0; s < n; ++s) {
    x = features.row(s).transpose();
    y = targets.row(s).transpose();
    const Eigen::VectorXd scores = weights * x;
    try {
      p = normalize_prediction(scores, mode, epsilon);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DegenerateSum) throw;
      if (!uniform_fallback) {
        throw Error(ErrorKind::DegenerateSum, "batch_gradient",
                    "sample " + std::to_string(s) + ": " + e.what());
      }
      p = Eigen::VectorXd::Constant(num_classes, 1.0 / static_cast<double>(num_classes));
      ++eval.degenerate;
    }
    eval.loss_sum += cross_entropy(y, p, epsilon);
    if (argmax(p) == argmax(y)) ++eval.correct;
    eval.grad.noalias() += (y - p) * x.transpose();
  }
  eval.grad /= static_cast<double>(n);
  return eval;
}

}  // namespace

std::string_view to_string(NormMode mode) {
  return mode == NormMode::Softmax ? "softmax" : "paper-sum";
}

NormMode parse_norm_mode(std::string_view name) {
  if (name == "softmax") return NormMode::Softmax;
  if (name == "paper-sum" || name == "paper_sum") return NormMode::PaperSum;
  throw Error(ErrorKind::InvalidParameter, "parse_norm_mode",
              "unknown normalization '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  auto invalid = [](const std::string& what) {
    return Error(ErrorKind::InvalidParameter, "TrainConfig", what);
  };
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw invalid("alpha must be in [0, 1]");
  if (iters < 1) throw invalid("iters must be >= 1");
  if (!(epsilon > 0.0)) throw invalid("epsilon must be > 0");
  if (!(step > 0.0) || !std::isfinite(step)) throw invalid("step must be finite and > 0");
}

Eigen::MatrixXd init_weights(int num_classes, int dim, std::uint64_t seed) {
  if (num_classes < 1 || dim < 1) {
    throw Error(ErrorKind::InvalidParameter, "init_weights", "dimensions must be positive");
  }
  Rng rng(seed);
  Eigen::MatrixXd w(num_classes, dim);
  // Row-major fill order keeps the layout independent of storage order.
  for (int c = 0; c < num_classes; ++c) {
    for (int j = 0; j < dim; ++j) w(c, j) = rng.normal();
  }
  return w;
}

Eigen::VectorXd predict_scores(const Eigen::MatrixXd& weights, const Eigen::VectorXd& x) {
  if (weights.cols() != x.size()) {
    throw Error(ErrorKind::DimensionMismatch, "predict_scores",
                "W " + shape(weights) + " vs x of length " + std::to_string(x.size()));
  }
  return weights * x;
}

Eigen::VectorXd normalize_prediction(const Eigen::VectorXd& scores, NormMode mode,
                                     double epsilon) {
  if (scores.size() == 0) {
    throw Error(ErrorKind::InvalidParameter, "normalize_prediction", "empty scores");
  }
  if (mode == NormMode::Softmax) {
    const Eigen::VectorXd e = (scores.array() - scores.maxCoeff()).exp().matrix();
    return e / e.sum();
  }
  const double sum = scores.sum();
  if (!(std::abs(sum) >= epsilon)) {
    throw Error(ErrorKind::DegenerateSum, "normalize_prediction",
                "|sum(scores)| = " + std::to_string(std::abs(sum)) + " below epsilon");
  }
  return scores / sum;
}

double cross_entropy(const Eigen::VectorXd& y, const Eigen::VectorXd& p, double epsilon) {
  if (y.size() != p.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cross_entropy",
                std::to_string(y.size()) + " vs " + std::to_string(p.size()));
  }
  double loss = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0) loss -= y(i) * std::log(std::max(p(i), 0.0) + epsilon);
  }
  return loss;
}

Eigen::MatrixXd batch_gradient(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                               const Eigen::MatrixXd& weights, NormMode mode, double epsilon) {
  check_batch_dims(features, targets, weights, "batch_gradient");
  return evaluate_batch(features, targets, weights, mode, epsilon, false).grad;
}

Eigen::MatrixXd aa_update(const Eigen::MatrixXd& weights, const Eigen::MatrixXd& prev,
                          const Eigen::MatrixXd* prev2, const Eigen::MatrixXd& grad,
                          double alpha) {
  const bool history = prev2 != nullptr;
  if (grad.rows() != weights.rows() || grad.cols() != weights.cols() ||
      (history && (prev.rows() != weights.rows() || prev.cols() != weights.cols() ||
                   prev2->rows() != weights.rows() || prev2->cols() != weights.cols()))) {
    throw Error(ErrorKind::DimensionMismatch, "aa_update",
                "W " + shape(weights) + ", grad " + shape(grad));
  }
  Eigen::MatrixXd next;
  if (history && alpha != 0.0) {
    next = weights + alpha * (prev - *prev2) + grad;
  } else {
    next = weights + grad;
  }
  if (!next.allFinite()) {
    throw Error(ErrorKind::NonFiniteWeights, "aa_update", "update produced non-finite weights");
  }
  return next;
}

double accuracy(const Eigen::MatrixXd& targets, const Eigen::MatrixXd& predictions) {
  if (targets.rows() != predictions.rows() || targets.cols() != predictions.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "accuracy",
                "Y " + shape(targets) + " vs P " + shape(predictions));
  }
  if (targets.rows() == 0) return 0.0;
  long long correct = 0;
  for (Eigen::Index i = 0; i < targets.rows(); ++i) {
    if (argmax(targets.row(i).transpose()) == argmax(predictions.row(i).transpose())) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(targets.rows());
}

TrainResult train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                  const TrainConfig& cfg, const IterationObserver& observer) {
  cfg.validate();
  if (targets.cols() < 2) {
    throw Error(ErrorKind::InvalidParameter, "train", "need at least 2 classes");
  }
  if (features.rows() < 1 || features.rows() != targets.rows() || features.cols() < 1) {
    throw Error(ErrorKind::DimensionMismatch, "train",
                "X " + shape(features) + " vs Y " + shape(targets));
  }
  if (!features.allFinite()) {
    throw Error(ErrorKind::InvalidParameter, "train", "features contain non-finite values");
  }

  const auto n = static_cast<double>(features.rows());
  TrainResult result;
  ModelState& state = result.state;
  TrainingTrace& trace = result.trace;
  state.weights = init_weights(static_cast<int>(targets.cols()),
                               static_cast<int>(features.cols()), cfg.seed);
  trace.records.reserve(static_cast<std::size_t>(cfg.iters));

  for (int t = 1; t <= cfg.iters; ++t) {
    BatchEval eval = evaluate_batch(features, targets, state.weights, cfg.norm, cfg.epsilon, true);
    if (cfg.step != 1.0) eval.grad *= cfg.step;
    trace.degenerate_samples += eval.degenerate;
    trace.records.push_back({t, eval.loss_sum / n, static_cast<double>(eval.correct) / n});

    const bool anderson = state.prev2.has_value();
    Eigen::MatrixXd next;
    try {
      next = anderson ? aa_update(state.weights, *state.prev, &*state.prev2, eval.grad, cfg.alpha)
                      : aa_update(state.weights, state.weights, nullptr, eval.grad, cfg.alpha);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NonFiniteWeights) throw;
      trace.status = TrainStatus::NonFinite;
      trace.diagnostic = "iteration " + std::to_string(t) + ": " + e.what();
      return result;
    }
    // Shift the history: the pre-update iterate becomes the newest snapshot.
    state.prev2 = std::move(state.prev);
    state.prev = std::move(state.weights);
    state.weights = std::move(next);
    state.iteration = t;
    if (observer) observer({t, anderson, &trace.records.back()});
  }
  return result;
}

const AlphaRun* AlphaSweepResult::find(double alpha) const {
  for (const AlphaRun& run : runs) {
    if (run.alpha == alpha) return &run;
  }
  return nullptr;
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(static_cast<double>(i) / 10.0);
  return grid;
}

std::optional<int> iterations_to_threshold(const TrainingTrace& trace, double threshold) {
  for (const TraceRecord& r : trace.records) {
    if (r.mean_loss <= threshold) return r.iteration;
  }
  return std::nullopt;
}

AlphaSweepResult alpha_sweep(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                             const TrainConfig& base, const std::vector<double>& grid,
                             double loss_threshold) {
  if (grid.empty()) throw Error(ErrorKind::InvalidParameter, "alpha_sweep", "empty alpha grid");
  std::vector<double> alphas = grid;
  for (double a : alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error(ErrorKind::InvalidParameter, "alpha_sweep",
                  "alpha " + std::to_string(a) + " outside [0, 1]");
    }
  }
  std::sort(alphas.begin(), alphas.end());
  alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());

  AlphaSweepResult result;
  for (double a : alphas) {
    TrainConfig cfg = base;
    cfg.alpha = a;
    AlphaRun run;
    run.alpha = a;
    run.trace = train(features, targets, cfg).trace;
    run.failed = run.trace.status != TrainStatus::Ok;
    if (!run.trace.records.empty()) run.final_loss = run.trace.records.back().mean_loss;
    run.iterations_to_threshold = iterations_to_threshold(run.trace, loss_threshold);
    result.runs.push_back(std::move(run));
  }
  // Runs are in ascending alpha, so strict '<' keeps the smallest alpha on ties.
  const AlphaRun* best = nullptr;
  for (const AlphaRun& run : result.runs) {
    if (!run.failed && (best == nullptr || run.final_loss < best->final_loss)) best = &run;
  }
  if (best != nullptr) result.best_alpha = best->alpha;
  return result;
}

}  // namespace aaseq
