#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "aaseq/error.hpp"
#include "aaseq/trainer.hpp"
#include "oracles.hpp"

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

struct Problem {
  Eigen::MatrixXd x;
  Eigen::MatrixXd y;
};

// Gaussian blobs, one per class, with one-hot targets.
Problem blobs(int classes, int per_class, int dim, unsigned seed, double spread = 0.6) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd centers(classes, dim);
  for (int c = 0; c < classes; ++c)
    for (int j = 0; j < dim; ++j) centers(c, j) = normal(gen);
  Problem p;
  p.x.resize(classes * per_class, dim);
  p.y = Eigen::MatrixXd::Zero(classes * per_class, classes);
  for (int c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i) {
      const int row = c * per_class + i;
      for (int j = 0; j < dim; ++j) p.x(row, j) = centers(c, j) + spread * normal(gen);
      p.y(row, c) = 1.0;
    }
  }
  return p;
}

// Plain averaged-gradient loop with softmax, written without the library's
// training code. Returns the per-iteration mean loss.
std::vector<double> plain_loop(const Problem& p, Eigen::MatrixXd w, int iters, double eps) {
  std::vector<double> losses;
  const Eigen::Index n = p.x.rows();
  for (int t = 0; t < iters; ++t) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(w.rows(), w.cols());
    double loss = 0;
    for (Eigen::Index s = 0; s < n; ++s) {
      const Eigen::VectorXd x = p.x.row(s).transpose();
      const Eigen::VectorXd y = p.y.row(s).transpose();
      const Eigen::VectorXd scores = w * x;
      const Eigen::VectorXd e = (scores.array() - scores.maxCoeff()).exp().matrix();
      const Eigen::VectorXd prob = e / e.sum();
      for (Eigen::Index c = 0; c < y.size(); ++c) {
        if (y(c) != 0.0) loss -= y(c) * std::log(std::max(prob(c), 0.0) + eps);
      }
      grad.noalias() += (y - prob) * x.transpose();
    }
    grad /= static_cast<double>(n);
    losses.push_back(loss / static_cast<double>(n));
    w = w + grad;
  }
  return losses;
}

}  // namespace

TEST(InitWeights, DeterministicAndStandardNormal) {
  EXPECT_EQ(init_weights(3, 4, 9), init_weights(3, 4, 9));
  EXPECT_NE(init_weights(3, 4, 9), init_weights(3, 4, 10));

  const Eigen::MatrixXd w = init_weights(100, 100, 1);
  const double mean = w.mean();
  const double var = (w.array() - mean).square().sum() / (w.size() - 1);
  EXPECT_LT(std::abs(mean), 0.05);
  EXPECT_NEAR(var, 1.0, 0.05);
  EXPECT_EQ(kind_of([] { init_weights(0, 3, 1); }), ErrorKind::InvalidParameter);
}

TEST(PredictScores, Examples) {
  Eigen::MatrixXd w(2, 3);
  w << 1, 0, 2, -1, 1, 0;
  EXPECT_EQ(predict_scores(w, Eigen::Vector3d(1, 2, 3)), Eigen::Vector2d(7, 1));
  EXPECT_EQ(predict_scores(Eigen::MatrixXd::Zero(2, 3), Eigen::Vector3d(1, 2, 3)),
            Eigen::Vector2d(0, 0));
  EXPECT_EQ(kind_of([&] { predict_scores(w, Eigen::Vector2d(1, 2)); }),
            ErrorKind::DimensionMismatch);
}

TEST(NormalizePrediction, Examples) {
  EXPECT_EQ(normalize_prediction(Eigen::Vector2d(1, 3), NormMode::PaperSum),
            Eigen::Vector2d(0.25, 0.75));
  EXPECT_EQ(normalize_prediction(Eigen::Vector2d(-1, 2), NormMode::PaperSum),
            Eigen::Vector2d(-1, 2));
  EXPECT_EQ(normalize_prediction(Eigen::Vector2d(0, 0), NormMode::Softmax),
            Eigen::Vector2d(0.5, 0.5));
  EXPECT_EQ(kind_of([] { normalize_prediction(Eigen::Vector2d(1, -1), NormMode::PaperSum); }),
            ErrorKind::DegenerateSum);
  EXPECT_EQ(parse_norm_mode("paper_sum"), NormMode::PaperSum);
  EXPECT_EQ(kind_of([] { parse_norm_mode("max"); }), ErrorKind::InvalidParameter);
}

// Property: softmax rows are distributions; paper_sum preserves argmax and sums to one.
TEST(NormalizePrediction, Invariants) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> unif(-5, 5);
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::VectorXd s(4);
    for (int i = 0; i < 4; ++i) s(i) = unif(gen);
    const Eigen::VectorXd soft = normalize_prediction(s, NormMode::Softmax);
    EXPECT_NEAR(soft.sum(), 1.0, 1e-12);
    EXPECT_GE(soft.minCoeff(), 0.0);

    s = s.cwiseAbs();
    const Eigen::VectorXd ps = normalize_prediction(s, NormMode::PaperSum);
    EXPECT_NEAR(ps.sum(), 1.0, 1e-9);
    Eigen::Index a = 0, b = 0;
    s.maxCoeff(&a);
    ps.maxCoeff(&b);
    EXPECT_EQ(a, b);
  }
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy(Eigen::Vector2d(1, 0), Eigen::Vector2d(1, 0)), 0.0, 1e-9);
  EXPECT_NEAR(cross_entropy(Eigen::Vector2d(1, 0), Eigen::Vector2d(0.5, 0.5)), 0.693147, 1e-6);
  EXPECT_NEAR(cross_entropy(Eigen::Vector2d(1, 0), Eigen::Vector2d(2, -1)), -0.693147, 1e-6);
  // Negative probability is clamped before the log.
  EXPECT_NEAR(cross_entropy(Eigen::Vector2d(0, 1), Eigen::Vector2d(2, -1)), -std::log(1e-10),
              1e-9);
}

TEST(BatchGradient, ZeroWhenPredictionMatchesTarget) {
  Eigen::MatrixXd x(2, 2);
  x << 1, 2, 3, 4;
  Eigen::MatrixXd y(2, 2);
  y << 0.5, 0.5, 0.5, 0.5;
  EXPECT_EQ(batch_gradient(x, y, Eigen::MatrixXd::Zero(2, 2), NormMode::Softmax),
            Eigen::MatrixXd::Zero(2, 2));
}

TEST(BatchGradient, MatchesFiniteDifferences) {
  for (unsigned seed = 0; seed < 10; ++seed) {
    const Problem p = blobs(3, 2, 5, seed);
    const Eigen::MatrixXd w = init_weights(3, 5, seed) * 0.5;
    const Eigen::MatrixXd g = batch_gradient(p.x, p.y, w, NormMode::Softmax, 1e-10);
    const Eigen::MatrixXd fd = -oracle::finite_difference_gradient(p.x, p.y, w, 1e-6, 0.0);
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      EXPECT_LT(std::abs(g(i) - fd(i)) / std::abs(fd(i)), 1e-5) << "seed " << seed << " entry " << i;
    }
  }
}

TEST(BatchGradient, AveragesPerSampleContributions) {
  const Problem p = blobs(2, 1, 3, 4);
  const Eigen::MatrixXd w = init_weights(2, 3, 4);
  const Eigen::MatrixXd g0 = batch_gradient(p.x.topRows(1), p.y.topRows(1), w, NormMode::Softmax);
  const Eigen::MatrixXd g1 =
      batch_gradient(p.x.bottomRows(1), p.y.bottomRows(1), w, NormMode::Softmax);
  const Eigen::MatrixXd g = batch_gradient(p.x, p.y, w, NormMode::Softmax);
  EXPECT_LT((g - (g0 + g1) / 2).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BatchGradient, Errors) {
  const Problem p = blobs(2, 2, 3, 5);
  EXPECT_EQ(kind_of([&] { batch_gradient(p.x, p.y, Eigen::MatrixXd::Zero(2, 4), NormMode::Softmax); }),
            ErrorKind::DimensionMismatch);
  Eigen::MatrixXd w(2, 3);
  w << 1, 0, 0, -1, 0, 0;
  Eigen::MatrixXd x(1, 3);
  x << 1, 1, 1;
  Eigen::MatrixXd y(1, 2);
  y << 1, 0;
  try {
    batch_gradient(x, y, w, NormMode::PaperSum);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateSum);
    EXPECT_NE(std::string(e.what()).find("sample 0"), std::string::npos);
  }
}

TEST(AaUpdate, Examples) {
  const Eigen::MatrixXd w = (Eigen::MatrixXd(1, 2) << 1, 1).finished();
  const Eigen::MatrixXd prev = (Eigen::MatrixXd(1, 2) << 0.5, 0.5).finished();
  const Eigen::MatrixXd prev2 = (Eigen::MatrixXd(1, 2) << 0, 1).finished();
  const Eigen::MatrixXd grad = (Eigen::MatrixXd(1, 2) << 0.1, -0.1).finished();
  const Eigen::MatrixXd next = aa_update(w, prev, &prev2, grad, 0.5);
  EXPECT_NEAR(next(0, 0), 1.35, 1e-15);
  EXPECT_NEAR(next(0, 1), 0.65, 1e-15);

  const Eigen::MatrixXd plain = w + grad;
  EXPECT_EQ(aa_update(w, prev, &prev2, grad, 0.0), plain);  // bitwise
  EXPECT_EQ(aa_update(w, prev, nullptr, grad, 0.9), plain);

  const Eigen::MatrixXd huge = Eigen::MatrixXd::Constant(1, 2, 1e308);
  EXPECT_EQ(kind_of([&] { aa_update(huge, huge, nullptr, huge, 0.0); }),
            ErrorKind::NonFiniteWeights);
  EXPECT_EQ(kind_of([&] { aa_update(w, prev, nullptr, Eigen::MatrixXd::Zero(2, 2), 0.0); }),
            ErrorKind::DimensionMismatch);
}

TEST(Accuracy, Examples) {
  Eigen::MatrixXd y(2, 2), p(2, 2);
  y << 1, 0, 0, 1;
  p << 0.9, 0.1, 0.2, 0.8;
  EXPECT_EQ(accuracy(y, p), 1.0);
  p << 0.1, 0.9, 0.2, 0.8;
  EXPECT_EQ(accuracy(y, p), 0.5);
  p << 0.5, 0.5, 0.5, 0.5;  // ties go to class 0
  EXPECT_EQ(accuracy(y, p), 0.5);
}

TEST(Train, AlphaZeroMatchesPlainLoopBitwise) {
  const Problem p = blobs(3, 15, 6, 21);
  TrainConfig cfg;
  cfg.alpha = 0.0;
  cfg.iters = 60;
  cfg.seed = 5;
  const TrainResult result = train(p.x, p.y, cfg);
  const std::vector<double> expected = plain_loop(p, init_weights(3, 6, 5), 60, cfg.epsilon);
  ASSERT_EQ(result.trace.records.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_EQ(result.trace.records[i].mean_loss, expected[i]) << "iteration " << i + 1;
    EXPECT_EQ(result.trace.records[i].iteration, static_cast<int>(i) + 1);
  }
}

TEST(Train, AndersonBranchFiresFromIterationThree) {
  const Problem p = blobs(2, 10, 4, 22);
  for (int iters : {1, 2, 3, 10}) {
    TrainConfig cfg;
    cfg.alpha = 0.5;
    cfg.iters = iters;
    int active = 0;
    int first_active = 0;
    const TrainResult r = train(p.x, p.y, cfg, [&](const IterationEvent& ev) {
      if (ev.anderson_active) {
        ++active;
        if (first_active == 0) first_active = ev.iteration;
      }
    });
    EXPECT_EQ(active, std::max(0, iters - 2));
    if (iters >= 3) EXPECT_EQ(first_active, 3);
    EXPECT_EQ(r.trace.records.size(), static_cast<std::size_t>(iters));
    EXPECT_EQ(r.state.iteration, iters);
  }
}

TEST(Train, AndersonUsesLaggedHistory) {
  const Problem p = blobs(2, 6, 3, 23);
  TrainConfig cfg;
  cfg.alpha = 0.7;
  cfg.iters = 4;
  cfg.seed = 3;
  // Re-derive the iterates by hand from the documented update.
  std::vector<Eigen::MatrixXd> w{init_weights(2, 3, 3)};
  for (int t = 1; t <= 4; ++t) {
    const Eigen::MatrixXd& cur = w.back();
    Eigen::MatrixXd next = cur + batch_gradient(p.x, p.y, cur, NormMode::Softmax);
    if (t >= 3) next += 0.7 * (w[t - 2] - w[t - 3]);
    w.push_back(next);
  }
  const TrainResult r = train(p.x, p.y, cfg);
  EXPECT_LT((r.state.weights - w.back()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Train, DeterministicAndSeedDependent) {
  const Problem p = blobs(3, 8, 5, 24);
  TrainConfig cfg;
  cfg.alpha = 0.3;
  cfg.iters = 30;
  cfg.seed = 8;
  const TrainResult a = train(p.x, p.y, cfg);
  const TrainResult b = train(p.x, p.y, cfg);
  EXPECT_EQ(a.trace.records, b.trace.records);
  EXPECT_EQ(a.state.weights, b.state.weights);
  cfg.seed = 9;
  EXPECT_NE(train(p.x, p.y, cfg).trace.records, a.trace.records);
}

// Property: softmax loss is bounded below and accuracy stays in [0, 1].
TEST(Train, SoftmaxTraceInvariants) {
  const double eps = 1e-10;
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Problem p = blobs(4, 6, 5, 30 + seed);
    TrainConfig cfg;
    cfg.alpha = 0.1 * seed;
    cfg.iters = 40;
    cfg.seed = seed;
    for (const TraceRecord& r : train(p.x, p.y, cfg).trace.records) {
      EXPECT_GE(r.mean_loss, -std::log(1 + eps));
      EXPECT_GE(r.accuracy, 0.0);
      EXPECT_LE(r.accuracy, 1.0);
    }
  }
}

TEST(Train, PaperSumRunsAndCountsDegenerateSamples) {
  const Problem p = blobs(3, 5, 4, 31);
  TrainConfig cfg;
  cfg.norm = NormMode::PaperSum;
  cfg.iters = 5;
  cfg.step = 1e-3;
  const TrainResult r = train(p.x, p.y, cfg);
  EXPECT_EQ(r.trace.records.size(), 5u);
  EXPECT_GE(r.trace.degenerate_samples, 0);

  // All-zero features make every score sum zero.
  TrainConfig zero_cfg = cfg;
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(p.x.rows(), p.x.cols());
  const TrainResult z = train(zeros, p.y, zero_cfg);
  EXPECT_EQ(z.trace.degenerate_samples, 5 * zeros.rows());
  EXPECT_NEAR(z.trace.records.front().mean_loss, std::log(3.0), 1e-9);
}

TEST(Train, DivergenceIsReportedNotThrown) {
  const Problem p = blobs(2, 4, 3, 32);
  TrainConfig cfg;
  cfg.iters = 10;
  const TrainResult r = train(p.x * 1e300, p.y, cfg);
  EXPECT_EQ(r.trace.status, TrainStatus::NonFinite);
  EXPECT_FALSE(r.trace.diagnostic.empty());
  EXPECT_LT(r.trace.records.size(), 10u);
}

TEST(Train, RejectsInvalidConfig) {
  const Problem p = blobs(2, 4, 3, 33);
  TrainConfig cfg;
  cfg.alpha = 1.5;
  EXPECT_EQ(kind_of([&] { train(p.x, p.y, cfg); }), ErrorKind::InvalidParameter);
  cfg.alpha = 0.0;
  cfg.iters = 0;
  EXPECT_EQ(kind_of([&] { train(p.x, p.y, cfg); }), ErrorKind::InvalidParameter);
  cfg.iters = 5;
  EXPECT_EQ(kind_of([&] { train(p.x, p.y.leftCols(1), cfg); }), ErrorKind::InvalidParameter);
}

TEST(AlphaSweep, SingletonGridEqualsTrain) {
  const Problem p = blobs(3, 6, 4, 40);
  TrainConfig base;
  base.iters = 20;
  base.seed = 2;
  const AlphaSweepResult sweep = alpha_sweep(p.x, p.y, base, {0.4}, 0.0);
  ASSERT_EQ(sweep.runs.size(), 1u);
  base.alpha = 0.4;
  EXPECT_EQ(sweep.runs[0].trace.records, train(p.x, p.y, base).trace.records);
  EXPECT_EQ(sweep.best_alpha, 0.4);
}

TEST(AlphaSweep, DefaultGridSharesFirstIteration) {
  const Problem p = blobs(3, 10, 5, 41);
  TrainConfig base;
  base.iters = 50;
  const AlphaSweepResult sweep = alpha_sweep(p.x, p.y, base, default_alpha_grid(), 0.5);
  ASSERT_EQ(sweep.runs.size(), 11u);
  for (std::size_t i = 0; i < sweep.runs.size(); ++i) {
    EXPECT_EQ(sweep.runs[i].alpha, default_alpha_grid()[i]);
    EXPECT_EQ(sweep.runs[i].trace.records[0].mean_loss,
              sweep.runs[0].trace.records[0].mean_loss);
    // Iterations 1 and 2 do not see alpha at all.
    EXPECT_EQ(sweep.runs[i].trace.records[1], sweep.runs[0].trace.records[1]);
  }
  ASSERT_TRUE(sweep.best_alpha.has_value());
  const AlphaRun* best = sweep.find(*sweep.best_alpha);
  ASSERT_NE(best, nullptr);
  for (const AlphaRun& run : sweep.runs) EXPECT_LE(best->final_loss, run.final_loss);
}

TEST(AlphaSweep, FailedRunsAreMarked) {
  const Problem p = blobs(2, 4, 3, 42);
  TrainConfig base;
  base.iters = 5;
  const AlphaSweepResult sweep = alpha_sweep(p.x * 1e300, p.y, base, {0.0, 0.5}, 0.0);
  ASSERT_EQ(sweep.runs.size(), 2u);
  EXPECT_TRUE(sweep.runs[0].failed);
  EXPECT_TRUE(sweep.runs[1].failed);
  EXPECT_FALSE(sweep.best_alpha.has_value());
}

TEST(AlphaSweep, RejectsBadGrid) {
  const Problem p = blobs(2, 4, 3, 43);
  EXPECT_EQ(kind_of([&] { alpha_sweep(p.x, p.y, {}, {}, 0.0); }), ErrorKind::InvalidParameter);
  EXPECT_EQ(kind_of([&] { alpha_sweep(p.x, p.y, {}, {0.5, 1.2}, 0.0); }),
            ErrorKind::InvalidParameter);
}

TEST(IterationsToThreshold, FirstCrossing) {
  TrainingTrace t;
  t.records = {{1, 3.0, 0}, {2, 1.0, 0}, {3, 2.0, 0}, {4, 0.5, 0}};
  EXPECT_EQ(iterations_to_threshold(t, 1.0), 2);
  EXPECT_EQ(iterations_to_threshold(t, 0.5), 4);
  EXPECT_FALSE(iterations_to_threshold(t, 0.1).has_value());
}
