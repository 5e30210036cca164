#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "builders.hpp"
#include "partmotion/agent/agreement.hpp"
#include "partmotion/agent/annotator.hpp"
#include "partmotion/agent/backend.hpp"
#include "partmotion/agent/mock_backend.hpp"
#include "partmotion/agent/prompt.hpp"
#include "partmotion/agent/response.hpp"
#include "partmotion/annotation/io.hpp"
#include "partmotion/common/binary_io.hpp"
#include "partmotion/common/error.hpp"

using namespace partmotion;
using namespace partmotion::agent;
using annotation::Label;
using annotation::PartId;
using testutil::seg;

namespace {

AgentRequest walkRequest() {
  AgentRequest r;
  r.id = "walk_0";
  r.numFrames = 60;
  r.fps = 20.0;
  r.sequence = {seg("a person walks", 0, 60)};
  r.actions = {seg("walk", 0, 60)};
  return r;
}

ErrorCode codeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::kConfig;
}

// Records every prompt and answers from a script.
class RecordingBackend final : public AgentBackend {
 public:
  explicit RecordingBackend(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const std::string& prompt) override {
    prompts.push_back(prompt);
    return replies_[std::min(prompts.size() - 1, replies_.size() - 1)];
  }
  std::string name() const override {
    return "recording";
  }
  std::vector<std::string> prompts;

 private:
  std::vector<std::string> replies_;
};

std::string validResponseFor(int T) {
  nlohmann::json j;
  j["sequence"] = {{{"label", "a person walks"}, {"start", 0}, {"end", T}}};
  j["actions"] = {{{"label", "walk"}, {"start", 0}, {"end", T}}};
  j["parts"] = nlohmann::json::object();
  j["parts"]["left_leg"] = {{{"label", "steps"}, {"start", 0}, {"end", T}}};
  return j.dump();
}

}  // namespace

TEST_SUITE("agent") {
  TEST_CASE("prompt embeds segments, bounds and the unknown instruction") {
    const auto prompt = buildDecompositionPrompt(walkRequest(), defaultPromptTemplate());
    CHECK(prompt.find("walk") != std::string::npos);
    CHECK(prompt.find("[0, 60)") != std::string::npos);
    CHECK(prompt.find("unknown") != std::string::npos);
    CHECK(prompt.find("strict JSON") != std::string::npos);
    CHECK(prompt.find("left_arm") != std::string::npos);
    CHECK(prompt.find(kRequestMarker) != std::string::npos);
    CHECK(prompt.find("{duration}") == std::string::npos);
  }

  TEST_CASE("missing placeholder is a template error naming it") {
    std::string tmpl = defaultPromptTemplate();
    const auto pos = tmpl.find("{parts}");
    REQUIRE(pos != std::string::npos);
    tmpl.erase(pos, 7);
    try {
      buildDecompositionPrompt(walkRequest(), tmpl);
      FAIL("expected a template error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kTemplate);
      CHECK(e.detail() == "{parts}");
    }
    CHECK(codeOf([] {
            buildDecompositionPrompt(walkRequest(), "{duration} {fps} {parts} {sequence} {actions} {schema}");
          }) == ErrorCode::kTemplate);
  }

  TEST_CASE("sequence-only request still builds a prompt") {
    auto r = walkRequest();
    r.actions.clear();
    const auto prompt = buildDecompositionPrompt(r, defaultPromptTemplate());
    CHECK(prompt.find("(none)") != std::string::npos);
    CHECK(prompt.find("a person walks") != std::string::npos);
  }

  TEST_CASE("well-formed response parses and validates") {
    const auto resp = parseAgentResponse(validResponseFor(60), 60, 20.0);
    const auto ann = responseToAnnotation(resp, "x", 60, 20.0);
    CHECK(annotation::isValid(ann));
    CHECK(ann.part(PartId::kLeftLeg)[0].label == Label("steps"));
    CHECK(ann.part(PartId::kHead) == annotation::Track{seg("unknown", 0, 60)});
  }

  TEST_CASE("response errors carry their codes") {
    auto j = nlohmann::json::parse(validResponseFor(60));
    j["parts"]["left_leg"][0]["end"] = 61;
    CHECK(codeOf([&] { parseAgentResponse(j.dump(), 60, 20.0); }) == ErrorCode::kTimeOutOfRange);

    auto o = nlohmann::json::parse(validResponseFor(60));
    o["parts"]["left_arm"] = {{{"label", "a"}, {"start", 0}, {"end", 30}}, {{"label", "b"}, {"start", 20}, {"end", 60}}};
    CHECK(codeOf([&] { parseAgentResponse(o.dump(), 60, 20.0); }) == ErrorCode::kOverlap);

    auto s = nlohmann::json::parse(validResponseFor(60));
    s["parts"]["tail"] = nlohmann::json::array();
    CHECK(codeOf([&] { parseAgentResponse(s.dump(), 60, 20.0); }) == ErrorCode::kSchemaViolation);

    auto t = nlohmann::json::parse(validResponseFor(60));
    t["actions"][0]["start"] = "zero";
    CHECK(codeOf([&] { parseAgentResponse(t.dump(), 60, 20.0); }) == ErrorCode::kSchemaViolation);

    CHECK(codeOf([] { parseAgentResponse("I cannot help with that.", 60, 20.0); }) == ErrorCode::kMalformedJson);
    CHECK(codeOf([] { parseAgentResponse("{\"sequence\": [", 60, 20.0); }) == ErrorCode::kMalformedJson);
  }

  TEST_CASE("prose preamble is tolerated through brace matching") {
    const std::string raw = "Sure! Here is the decomposition:\n" + validResponseFor(60) + "\nHope this helps.";
    CHECK_NOTHROW(parseAgentResponse(raw, 60, 20.0));
    CHECK(extractJsonObject(R"(x {"a": "}{", "b": {"c": 1}} y)") == std::string(R"({"a": "}{", "b": {"c": 1}})"));
    CHECK_FALSE(extractJsonObject("{ never closed").has_value());
  }

  TEST_CASE("unknown strings in any case normalize to UNKNOWN") {
    auto j = nlohmann::json::parse(validResponseFor(60));
    j["parts"]["head"] = {{{"label", "UNKNOWN"}, {"start", 0}, {"end", 60}}};
    const auto resp = parseAgentResponse(j.dump(), 60, 20.0);
    CHECK(resp.parts[annotation::index(PartId::kHead)][0].label.isUnknown());
  }

  TEST_CASE("mock backend decomposes walk per the shipped rule table") {
    MockBackend backend(defaultRuleTable());
    Annotator annotator(backend, AnnotatorConfig{});
    const auto ann = annotator.annotate(walkRequest());
    CHECK(annotation::isValid(ann));
    auto only = [&](PartId p) { return ann.part(p); };
    CHECK(only(PartId::kLeftLeg) == annotation::Track{seg("steps", 0, 60)});
    CHECK(only(PartId::kRightLeg) == annotation::Track{seg("steps", 0, 60)});
    CHECK(only(PartId::kTrajectory) == annotation::Track{seg("moves forward", 0, 60)});
    CHECK(only(PartId::kLeftArm) == annotation::Track{seg("swings", 0, 60)});
    CHECK(only(PartId::kRightArm) == annotation::Track{seg("swings", 0, 60)});
    CHECK(only(PartId::kHead) == annotation::Track{seg("unknown", 0, 60)});
    CHECK(only(PartId::kSpine) == annotation::Track{seg("unknown", 0, 60)});
    CHECK(ann.actions == walkRequest().actions);
  }

  TEST_CASE("unrecognized verb yields unknown on every part") {
    auto r = walkRequest();
    r.actions = {seg("walk", 0, 30), seg("zorbulate", 30, 60)};
    MockBackend backend(defaultRuleTable());
    Annotator annotator(backend, AnnotatorConfig{});
    const auto ann = annotator.annotate(r);
    for (const auto& track : ann.parts) {
      const auto* s = annotation::segmentAt(track, 45);
      REQUIRE(s != nullptr);
      CHECK(s->label.isUnknown());
      CHECK(s->start <= 30);
    }
    CHECK(annotation::segmentAt(ann.part(PartId::kLeftLeg), 10)->label == Label("steps"));
  }

  TEST_CASE("mock backend is a pure function of the prompt") {
    MockBackend a(defaultRuleTable()), b(defaultRuleTable());
    const auto prompt = buildDecompositionPrompt(walkRequest(), defaultPromptTemplate());
    CHECK(a.complete(prompt) == b.complete(prompt));
    CHECK(a.complete(prompt) == a.complete(prompt));
  }

  TEST_CASE("rule table matching is first-match bag-of-words") {
    const auto& t = defaultRuleTable();
    REQUIRE(t.find("walk and wave") != nullptr);
    CHECK(t.find("walk and wave")->parts[annotation::index(PartId::kRightArm)] == std::optional<std::string>("waves"));
    CHECK(t.find("Wave, left hand")->parts[annotation::index(PartId::kLeftArm)] == std::optional<std::string>("waves"));
    CHECK(t.find("zorbulate") == nullptr);
  }

  TEST_CASE("garbage backend exhausts its attempts") {
    ScriptedBackend backend({"this is not json"});
    AnnotatorConfig cfg;
    cfg.maxAttempts = 2;
    Annotator annotator(backend, cfg);
    try {
      annotator.annotate(walkRequest());
      FAIL("expected exhausted retries");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kExhaustedRetries);
      CHECK(e.detail().find("MALFORMED_JSON") != std::string::npos);
    }
    CHECK(backend.calls() == 2);
  }

  TEST_CASE("retries append the failure reason and can recover") {
    RecordingBackend backend({"garbage", validResponseFor(60)});
    Annotator annotator(backend, AnnotatorConfig{});
    const auto ann = annotator.annotate(walkRequest());
    CHECK(annotation::isValid(ann));
    REQUIRE(backend.prompts.size() == 2);
    CHECK(backend.prompts[1].rfind(backend.prompts[0], 0) == 0);
    CHECK(backend.prompts[1].find("previous output was invalid because") != std::string::npos);
  }

  TEST_CASE("re-timed action boundaries are rejected") {
    auto j = nlohmann::json::parse(validResponseFor(60));
    j["actions"] = {{{"label", "walk"}, {"start", 0}, {"end", 30}}, {{"label", "stand"}, {"start", 30}, {"end", 60}}};
    RecordingBackend backend({j.dump()});
    AnnotatorConfig cfg;
    cfg.maxAttempts = 1;
    Annotator annotator(backend, cfg);
    CHECK(codeOf([&] { annotator.annotate(walkRequest()); }) == ErrorCode::kExhaustedRetries);
  }

  TEST_CASE("transcript logs one line per attempt") {
    const auto path = std::filesystem::temp_directory_path() / "pm_transcript_test.ndjson";
    std::filesystem::remove(path);
    {
      TranscriptLog log(path);
      RecordingBackend backend({"garbage", validResponseFor(60)});
      Annotator annotator(backend, AnnotatorConfig{}, nullptr, &log);
      annotator.annotate(walkRequest());
    }
    const auto rows = readNdjson(path);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0]["request_id"] == "walk_0");
    CHECK(rows[0]["raw_response"] == "garbage");
    CHECK(rows[0]["status"] != rows[1]["status"]);
    CHECK(rows[1]["attempt"] == 2);
    std::filesystem::remove(path);
  }

  TEST_CASE("batch annotation keeps input order across threads") {
    std::vector<AgentRequest> reqs;
    for (int i = 0; i < 12; ++i) {
      auto r = walkRequest();
      r.id = "r" + std::to_string(i);
      r.numFrames = 40 + i;
      r.sequence = {seg("a person walks", 0, r.numFrames)};
      r.actions = {seg(i % 2 ? "nod" : "walk", 0, r.numFrames)};
      reqs.push_back(r);
    }
    MockBackend backend(defaultRuleTable());
    AnnotatorConfig cfg;
    cfg.parallelism = 4;
    Annotator annotator(backend, cfg);
    const auto out = annotator.annotateBatch(reqs);
    REQUIRE(out.size() == reqs.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
      REQUIRE(out[i].annotation.has_value());
      CHECK(out[i].annotation->id == reqs[i].id);
      CHECK(out[i].annotation->numFrames == reqs[i].numFrames);
    }
  }

  TEST_CASE("rate limiter spaces requests") {
    RateLimiter unlimited(0.0);
    CHECK(unlimited.unlimited());
    RateLimiter limiter(600.0);  // one token per 0.1 s
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 3; ++i) {
      limiter.acquire();
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(elapsed >= 0.18);
  }

  TEST_CASE("Gwet AC1 hand-derived examples") {
    CHECK(gwetAc1({{{1, 1}, {1, 0}, {0, 0}, {1, 1}}}) == doctest::Approx((0.75 - 0.46875) / (1 - 0.46875)));
    CHECK(gwetAc1({{{1, 1}, {1, 0}, {0, 0}, {1, 1}}}) == doctest::Approx(0.5294).epsilon(1e-4));
    CHECK(gwetAc1({{{1, 0}, {0, 1}}}) == doctest::Approx(-1.0));
    RatingsTable all;
    all.rows.assign(50, {1, 1, 1});
    CHECK(gwetAc1(all) == doctest::Approx(1.0));
  }

  TEST_CASE("AC1 is permutation invariant and 1 only for constant rows") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
      RatingsTable t;
      for (int i = 0; i < 10; ++i) {
        t.rows.push_back({static_cast<int>(rng() % 2), static_cast<int>(rng() % 2), static_cast<int>(rng() % 2)});
      }
      const double base = gwetAc1(t);
      auto cols = t;
      for (auto& r : cols.rows) {
        std::swap(r[0], r[2]);
      }
      auto rows = t;
      std::reverse(rows.rows.begin(), rows.rows.end());
      CHECK(gwetAc1(cols) == doctest::Approx(base));
      CHECK(gwetAc1(rows) == doctest::Approx(base));
      bool constant = true;
      for (const auto& r : t.rows) {
        constant = constant && r[0] == r[1] && r[1] == r[2];
      }
      CHECK((base == doctest::Approx(1.0)) == constant);
    }
  }

  TEST_CASE("AC1 rejects malformed tables") {
    CHECK(codeOf([] { gwetAc1({{{1}, {0}}}); }) == ErrorCode::kInvalidAnnotation);
    CHECK(codeOf([] { gwetAc1({}); }) == ErrorCode::kInvalidAnnotation);
    CHECK(codeOf([] { gwetAc1({{{1, 2}}}); }) == ErrorCode::kInvalidAnnotation);
    CHECK(codeOf([] { gwetAc1({{{1, 0}, {1}}}); }) == ErrorCode::kInvalidAnnotation);
  }

  TEST_CASE("backend factory") {
    BackendConfig cfg;
    cfg.kind = "mock";
    CHECK(makeBackend(cfg)->name() == "mock");
    cfg.kind = "garbage";
    CHECK_NOTHROW(makeBackend(cfg));
    cfg.kind = "telepathy";
    CHECK(codeOf([&] { makeBackend(cfg); }) == ErrorCode::kConfig);
  }
}
