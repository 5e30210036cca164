#include <doctest.h>

#include <Eigen/Dense>
#include <fstream>
#include <random>

#include "builders.hpp"
#include "partmotion/common/error.hpp"
#include "partmotion/conditioning/condition_grid.hpp"
#include "partmotion/conditioning/masking.hpp"
#include "partmotion/conditioning/pca.hpp"
#include "partmotion/conditioning/text_encoder.hpp"
#include "partmotion/diffusion/denoiser.hpp"

using namespace partmotion;
using namespace partmotion::conditioning;
using annotation::PartId;
using testutil::seg;

namespace {

std::vector<std::string> someLabels(std::size_t n) {
  std::vector<std::string> out;
  const char* verbs[] = {"raise", "lower", "wave", "swing", "bend", "step", "turn", "nod", "lift", "shake"};
  const char* objs[] = {"left arm", "right arm", "head", "spine", "legs", "body", "hand", "knee"};
  for (std::size_t i = 0; out.size() < n; ++i) {
    out.push_back(std::string(verbs[i % 10]) + " " + objs[(i / 10) % 8] + (i >= 80 ? " slowly" : ""));
  }
  return out;
}

struct Fixture {
  ToyHashEncoder encoder{32, 0};
  PcaProjector projector = fitLabelPca(someLabels(40), encoder, 8);
  LabelEmbedder embedder{encoder, projector};
};

}  // namespace

TEST_SUITE("conditioning") {
  TEST_CASE("toy encoder is deterministic and unit-norm") {
    ToyHashEncoder enc(64, 3);
    CHECK(enc.encode("walk forward") == enc.encode("walk forward"));
    CHECK(enc.encode("walk forward").norm() == doctest::Approx(1.0));
    CHECK(enc.encode("").size() == 64);
    CHECK(enc.encode("walk forward") != enc.encode("walk backward"));
    CHECK(ToyHashEncoder(64, 4).encode("walk") != enc.encode("walk"));
    // Shared words correlate.
    CHECK(enc.encode("raise left arm").dot(enc.encode("raise the left arm")) >
          enc.encode("raise left arm").dot(enc.encode("nod head")));
  }

  TEST_CASE("encoder specs") {
    CHECK(makeTextEncoder("toy-hash:16")->dim() == 16);
    CHECK(makeTextEncoder("toy-hash:16:5")->fingerprint() == "toy-hash:16:5");
    CHECK_THROWS_AS(makeTextEncoder("clip"), Error);
    CHECK_THROWS_AS(makeTextEncoder("pretrained:/nonexistent/table.json"), Error);
  }

  TEST_CASE("precomputed encoder table") {
    const auto path = std::filesystem::temp_directory_path() / "pm_table.json";
    nlohmann::json j{{"name", "tiny"}, {"dim", 2}, {"embeddings", {{"walk", {1.0, 0.0}}, {"run", {0.0, 2.0}}}}};
    std::ofstream(path) << j.dump();
    const auto enc = makeTextEncoder("pretrained:" + path.string());
    CHECK(enc->dim() == 2);
    CHECK(enc->encode("walk")[0] == doctest::Approx(1.0));
    CHECK_THROWS_AS(enc->encode("swim"), Error);
    std::filesystem::remove(path);
  }

  TEST_CASE("PCA on an exact subspace preserves distances") {
    std::mt19937_64 rng(2);
    std::normal_distribution<double> n;
    const int E = 12, D = 3, N = 30;
    Eigen::MatrixXd basis(E, D), coeff(N, D);
    for (int i = 0; i < E * D; ++i) basis.data()[i] = n(rng);
    for (int i = 0; i < N * D; ++i) coeff.data()[i] = n(rng);
    const Eigen::MatrixXd X = coeff * basis.transpose();
    const auto p = fitPca(X, D);
    CHECK((p.components.transpose() * p.components - Eigen::MatrixXd::Identity(D, D)).norm() < 1e-6);
    for (int a = 0; a < N; ++a) {
      for (int b = a + 1; b < N; ++b) {
        const double orig = (X.row(a) - X.row(b)).norm();
        const double proj = (p.project(X.row(a).transpose()) - p.project(X.row(b).transpose())).norm();
        CHECK(std::abs(orig - proj) < 1e-5);
      }
    }
  }

  TEST_CASE("full-rank PCA is an orthogonal transform") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n;
    const int E = 6, N = 20;
    Eigen::MatrixXd X(N, E);
    for (int i = 0; i < N * E; ++i) X.data()[i] = n(rng);
    const auto p = fitPca(X, E);
    for (int a = 0; a < N; ++a) {
      for (int b = 0; b < N; ++b) {
        const Eigen::VectorXd xa = X.row(a).transpose() - p.mean, xb = X.row(b).transpose() - p.mean;
        CHECK(std::abs(xa.dot(xb) - p.project(X.row(a).transpose()).dot(p.project(X.row(b).transpose()))) < 1e-5);
      }
    }
  }

  TEST_CASE("rank-one cloud leaves the second component empty") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n;
    const int E = 5, N = 40;
    Eigen::VectorXd dir(E);
    dir << 1, 2, -1, 0.5, 3;
    Eigen::MatrixXd X(N, E);
    for (int i = 0; i < N; ++i) {
      X.row(i) = n(rng) * dir.transpose();
      for (int k = 0; k < E; ++k) X(i, k) += 1e-9 * n(rng);
    }
    const auto p = fitPca(X, 2);
    CHECK(p.explainedVariance[0] > 1.0);
    CHECK(p.explainedVariance[1] < 1e-12);
  }

  TEST_CASE("PCA sign convention and reconstruction error") {
    Fixture f;
    for (Eigen::Index c = 0; c < f.projector.components.cols(); ++c) {
      Eigen::Index arg;
      f.projector.components.col(c).cwiseAbs().maxCoeff(&arg);
      CHECK(f.projector.components(arg, c) > 0.0);
    }
    // Reconstruction error never grows with D.
    const auto labels = someLabels(40);
    double prev = 1e300;
    for (std::size_t D : {2, 4, 8, 16, 30}) {
      const auto p = fitLabelPca(labels, f.encoder, D);
      double err = 0.0;
      for (const auto& l : labels) {
        const auto e = f.encoder.encode(l);
        err += (p.reconstruct(p.project(e)) - e).squaredNorm();
      }
      CHECK(err <= prev + 1e-9);
      prev = err;
    }
  }

  TEST_CASE("PCA preconditions") {
    ToyHashEncoder enc(16);
    try {
      fitLabelPca({"a", "b", "a"}, enc, 3);
      FAIL("expected INSUFFICIENT_LABELS");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kInsufficientLabels);
    }
    CHECK_THROWS_AS(fitLabelPca(someLabels(40), enc, 17), Error);
  }

  TEST_CASE("projector JSON round-trip keeps the fingerprint") {
    Fixture f;
    const auto back = PcaProjector::fromJson(f.projector.toJson());
    CHECK(back.fingerprint() == f.projector.fingerprint());
    CHECK(back.encoderFingerprint == f.encoder.fingerprint());
  }

  TEST_CASE("all-unknown annotation gives a zero grid") {
    Fixture f;
    auto a = testutil::simpleAnnotation(6, "unknown", {seg("unknown", 0, 6)});
    const auto g = buildConditionGrid(a, f.embedder);
    for (double v : g.partFeatures.values()) CHECK(v == 0.0);
    for (double v : g.actionFeatures.values()) CHECK(v == 0.0);
    for (auto k : g.known) CHECK(k == 0);
    CHECK_FALSE(g.sequenceKnown);
  }

  TEST_CASE("single action window expands to identical rows") {
    Fixture f;
    auto a = testutil::simpleAnnotation(4, "s", {seg("wave left arm", 0, 4)});
    const auto g = buildConditionGrid(a, f.embedder);
    const auto& expect = f.embedder.labelFeature("wave left arm");
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t c = 0; c < g.pcaDim; ++c) {
        CHECK(g.actionFeatures(t, c) == expect[static_cast<Eigen::Index>(c)]);
      }
      CHECK(g.isKnown(t, annotation::kActionColumn));
    }
  }

  TEST_CASE("part block matches direct per-frame evaluation") {
    Fixture f;
    auto a = testutil::simpleAnnotation(4, "s", {seg("walk", 0, 4)});
    a.part(PartId::kLeftArm) = {seg("raise left arm", 0, 2), seg("unknown", 2, 4)};
    const auto g = buildConditionGrid(a, f.embedder);
    const std::size_t col0 = annotation::index(PartId::kLeftArm) * g.pcaDim;
    const Eigen::VectorXd direct = f.projector.project(f.encoder.encode("raise left arm"));
    for (std::size_t t = 0; t < 4; ++t) {
      for (std::size_t c = 0; c < g.pcaDim; ++c) {
        const double want = t < 2 ? direct[static_cast<Eigen::Index>(c)] : 0.0;
        CHECK(std::abs(g.partFeatures(t, col0 + c) - want) < 1e-12);
      }
      CHECK(g.isKnown(t, annotation::index(PartId::kLeftArm)) == (t < 2));
    }
    CHECK(g.sequenceKnown);
    CHECK(buildConditionGrid(a, f.embedder) == g);
  }

  TEST_CASE("Beta draws average to the target rate") {
    MaskingConfig cfg;
    cfg.targetRate = 0.5;
    std::mt19937_64 rng(17);
    double sum = 0.0;
    for (int i = 0; i < 10000; ++i) sum += drawPartDropProbability(cfg, rng);
    CHECK(sum / 10000 >= 0.48);
    CHECK(sum / 10000 <= 0.52);

    cfg.targetRate = 0.0;
    CHECK(cfg.clampedRate() == doctest::Approx(0.02));
    CHECK(cfg.alpha() > 0.0);
    cfg.targetRate = 1.0;
    CHECK(cfg.clampedRate() == doctest::Approx(0.98));
    CHECK(cfg.beta() > 0.0);
  }

  TEST_CASE("masking zeroes whole segments and is reproducible") {
    Fixture f;
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
      auto a = testutil::randomAnnotation(rng);
      const auto g = buildConditionGrid(a, f.embedder);
      MaskingStats stats;
      const auto m = applyStochasticMasking(g, MaskingConfig{}, 1000 + trial, &stats);
      CHECK(applyStochasticMasking(g, MaskingConfig{}, 1000 + trial) == m);
      for (std::size_t t = 0; t < m.numFrames; ++t) {
        for (std::size_t k = 0; k < kNumParts; ++k) {
          const bool was = g.isKnown(t, k);
          const bool is = m.isKnown(t, k);
          CHECK((!is || was));
          for (std::size_t c = 0; c < m.pcaDim; ++c) {
            const double v = m.partFeatures(t, k * m.pcaDim + c);
            if (!is) {
              CHECK(v == 0.0);
            } else {
              CHECK(v == g.partFeatures(t, k * g.pcaDim + c));
            }
          }
        }
      }
      // Segment granularity: each labeled segment is fully kept or fully dropped.
      for (std::size_t k = 0; k < kNumParts; ++k) {
        for (const auto& s : a.parts[k]) {
          if (s.label.isUnknown()) continue;
          const bool first = m.isKnown(static_cast<std::size_t>(s.start), k);
          for (int t = s.start; t < s.end; ++t) CHECK(m.isKnown(static_cast<std::size_t>(t), k) == first);
        }
      }
      if (stats.sequenceDropped) {
        CHECK_FALSE(m.sequenceKnown);
        for (double v : m.sequenceEmbedding) CHECK(v == 0.0);
      }
    }
  }

  TEST_CASE("surviving fraction of labeled segments is 1 - r") {
    Fixture f;
    auto a = testutil::simpleAnnotation(40, "s", {seg("walk", 0, 40)});
    for (auto& p : a.parts) p = {seg("raise left arm", 0, 20), seg("nod head", 20, 40)};
    const auto g = buildConditionGrid(a, f.embedder);
    MaskingConfig cfg;
    cfg.targetRate = 0.3;
    std::size_t labeled = 0, dropped = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
      MaskingStats st;
      applyStochasticMasking(g, cfg, s, &st);
      labeled += st.labeledPartSegments;
      dropped += st.droppedPartSegments;
    }
    CHECK(static_cast<double>(dropped) / labeled == doctest::Approx(0.3).epsilon(0.05));
  }

  TEST_CASE("model input has T+2 tokens and isolates the sequence token") {
    Fixture f;
    diffusion::DenoiserConfig cfg;
    cfg.featureDim = 11;
    cfg.pcaDim = f.projector.outputDim();
    cfg.textDim = f.encoder.dim();
    cfg.width = 16;
    cfg.depth = 1;
    cfg.heads = 2;
    cfg.maxFrames = 40;
    const diffusion::Denoiser model(cfg, 1);
    for (int T : {2, 7, 40}) {
      auto a = testutil::simpleAnnotation(T, "a person walks", {seg("walk", 0, T)});
      const auto g = buildConditionGrid(a, f.embedder);
      nn::Mat x(static_cast<std::size_t>(T), 11, 0.3);
      const auto in = model.assembleInput(g, x, 5);
      CHECK(in.rows() == static_cast<std::size_t>(T) + 2);
      CHECK(in.cols() == 16);

      auto b = a;
      b.sequence = {seg("a person jumps", 0, T)};
      const auto in2 = model.assembleInput(buildConditionGrid(b, f.embedder), x, 5);
      for (std::size_t r = 0; r < in.rows(); ++r) {
        bool same = true;
        for (std::size_t c = 0; c < in.cols(); ++c) same = same && in(r, c) == in2(r, c);
        CHECK(same == (r != 1));
      }
      const auto t0 = model.assembleInput(g, x, 0);
      const auto t99 = model.assembleInput(g, x, 99);
      bool differs = false;
      for (std::size_t c = 0; c < in.cols(); ++c) differs = differs || t0(0, c) != t99(0, c);
      CHECK(differs);
    }
    auto a = testutil::simpleAnnotation(5, "s", {seg("walk", 0, 5)});
    nn::Mat wrong(5, 10);
    try {
      model.assembleInput(buildConditionGrid(a, f.embedder), wrong, 3);
      FAIL("expected SHAPE_MISMATCH");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kShapeMismatch);
    }
  }
}
