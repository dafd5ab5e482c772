#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "threadsumm/error.hpp"
#include "threadsumm/gateway.hpp"
#include "threadsumm/mock_provider.hpp"
#include "threadsumm/planning.hpp"

using namespace threadsumm;

namespace {

DocumentSet docs(std::vector<std::string> texts) {
  DocumentSet ds;
  ds.documents = std::move(texts);
  return ds;
}

Gateway make_gateway(std::vector<ScriptEntry> script) {
  return Gateway(std::make_shared<MockChatProvider>(std::move(script)),
                 std::make_shared<MockEmbeddingProvider>(3, 16));
}

}  // namespace

TEST_CASE("parse_list_response strips bullets and numbering") {
  auto items = parse_list_response("- Mazda 323\n- Craigslist\n- Australia");
  CHECK(items == std::vector<std::string>{"Mazda 323", "Craigslist", "Australia"});

  CHECK(parse_list_response("1. first\n2. second") ==
        std::vector<std::string>{"first", "second"});
  CHECK(parse_list_response("1) first\n2) second") ==
        std::vector<std::string>{"first", "second"});
  CHECK(parse_list_response("* a\n* b") == std::vector<std::string>{"a", "b"});
}

TEST_CASE("parse_list_response drops unmarked preamble when markers exist") {
  auto items = parse_list_response("Here are the ACUs you asked for:\n- one\n- two");
  CHECK(items == std::vector<std::string>{"one", "two"});
  // Without any markers, bare lines are all items.
  CHECK(parse_list_response("alpha\nbeta").size() == 2);
}

TEST_CASE("normalizers behave as the dedup keys") {
  CHECK(normalize_label("  Mazda   323  ") == "Mazda 323");
  CHECK(normalize_acu("Cash is anonymous.") == "cash is anonymous");
  CHECK(normalize_acu("CASH IS ANONYMOUS!!") == "cash is anonymous");
  CHECK(normalize_acu("  spaced   out ;") == "spaced out");
}

TEST_CASE("extract_aspects parses, orders, and deduplicates labels") {
  auto gw = make_gateway(
      {{ScriptEntry::Kind::Substring, "unique aspects", "- Mazda 323\n- Craigslist\n- Australia"}});
  auto aspects = extract_aspects(gw, docs({"car thread"}), {});
  REQUIRE(aspects.size() == 3);
  CHECK(aspects[0].label == "Mazda 323");
  CHECK(aspects[1].label == "Craigslist");
  CHECK(aspects[2].label == "Australia");
  CHECK(aspects[2].index == 2);
}

TEST_CASE("extract_aspects is case-insensitive, first form wins") {
  auto gw = make_gateway({{ScriptEntry::Kind::Substring, "unique aspects", "Price\nprice\nPRICE"}});
  auto aspects = extract_aspects(gw, docs({"x"}), {});
  REQUIRE(aspects.size() == 1);
  CHECK(aspects[0].label == "Price");
}

TEST_CASE("extract_aspects fails on an empty list") {
  auto gw = make_gateway({{ScriptEntry::Kind::Substring, "unique aspects", "   \n  "}});
  try {
    extract_aspects(gw, docs({"x"}), {});
    FAIL("expected planning error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Planning);
  }
  CHECK_THROWS_AS(extract_aspects(gw, docs({}), {}), Error);
}

TEST_CASE("generate_acus parses a numbered list into tagged ACUs") {
  auto gw = make_gateway(
      {{ScriptEntry::Kind::Substring, "Aspect:\nCar",
        "1. The car has sub-30k miles.\n2. The car is a 1988 Mazda 323."}});
  auto acus = generate_acus(gw, docs({"doc"}), {"Car", 4}, {});
  REQUIRE(acus.size() == 2);
  CHECK(acus[0].text == "The car has sub-30k miles.");
  CHECK(acus[1].text == "The car is a 1988 Mazda 323.");
  CHECK(acus[0].aspect_index == 4);
  CHECK(acus[1].aspect_index == 4);
}

TEST_CASE("deduplicate collapses normalization-equal ACUs, first wins") {
  auto out = deduplicate({{"Cash is anonymous.", 0, 0}, {"cash is anonymous", 1, 1}});
  REQUIRE(out.size() == 1);
  CHECK(out[0].text == "Cash is anonymous.");
  CHECK(out[0].id == 0);
}

TEST_CASE("deduplicate reassigns contiguous ids") {
  auto out = deduplicate({{"A.", 0, 0}, {"B.", 0, 1}, {"a.", 1, 2}});
  REQUIRE(out.size() == 2);
  CHECK(out[0].text == "A.");
  CHECK(out[1].text == "B.");
  CHECK(out[0].id == 0);
  CHECK(out[1].id == 1);
}

TEST_CASE("deduplicate is an identity on disjoint input and is idempotent") {
  std::vector<ACU> in = {{"One.", 0, 0}, {"Two.", 0, 1}, {"Three.", 1, 2}};
  auto once = deduplicate(in);
  REQUIRE(once.size() == 3);
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].text == in[i].text);
    CHECK(once[i].id == i);
  }
  auto twice = deduplicate(once);
  REQUIRE(twice.size() == once.size());
  for (std::size_t i = 0; i < once.size(); ++i) CHECK(twice[i].text == once[i].text);
}

TEST_CASE("plan assembles aspects and cross-aspect-deduplicated ACUs") {
  auto gw = make_gateway({
      {ScriptEntry::Kind::Substring, "unique aspects", "- Battery\n- Price"},
      {ScriptEntry::Kind::Substring, "Aspect:\nBattery",
       "- Battery lasts two days.\n- Charging is slow."},
      {ScriptEntry::Kind::Substring, "Aspect:\nPrice",
       "- The price dropped.\n- battery lasts two days"},
  });
  std::vector<std::string> warnings;
  auto result = plan(gw, docs({"phone thread"}), {}, &warnings);
  CHECK(result.aspects.size() == 2);
  REQUIRE(result.acus.size() == 3);  // cross-aspect duplicate removed
  CHECK(result.acus[0].text == "Battery lasts two days.");
  CHECK(result.acus[2].text == "The price dropped.");
  for (std::size_t i = 0; i < result.acus.size(); ++i) CHECK(result.acus[i].id == i);
  CHECK(warnings.empty());
}

TEST_CASE("plan warns on empty aspects and fails when all are empty") {
  auto gw = make_gateway({
      {ScriptEntry::Kind::Substring, "unique aspects", "- Battery\n- Price"},
      {ScriptEntry::Kind::Substring, "Aspect:\nBattery", "- Battery lasts two days."},
      {ScriptEntry::Kind::Substring, "Aspect:\nPrice", "  "},
  });
  std::vector<std::string> warnings;
  auto result = plan(gw, docs({"x"}), {}, &warnings);
  CHECK(result.acus.size() == 1);
  bool warned_empty = false, warned_ratio = false;
  for (const auto& w : warnings) {
    if (w.find("Price") != std::string::npos) warned_empty = true;
    if (w.find("fewer ACUs") != std::string::npos) warned_ratio = true;
  }
  CHECK(warned_empty);
  CHECK(warned_ratio);  // r=1 < n=2

  auto gw2 = make_gateway({
      {ScriptEntry::Kind::Substring, "unique aspects", "- Battery"},
      {ScriptEntry::Kind::Substring, "Aspect:\nBattery", " "},
  });
  try {
    plan(gw2, docs({"x"}), {}, nullptr);
    FAIL("expected planning error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Planning);
  }
}

TEST_CASE("embedding dedup removes exact repeats when enabled") {
  // The hash embedder gives identical vectors only for identical text, so
  // plant two ACUs that normalize differently but embed identically via a
  // shared override.
  auto chat = std::make_shared<MockChatProvider>(std::vector<ScriptEntry>{
      {ScriptEntry::Kind::Substring, "unique aspects", "- Topic"},
      {ScriptEntry::Kind::Substring, "Aspect:\nTopic",
       "- The cat sat down\n- A feline seated itself\n- Something unrelated entirely"}});
  auto emb = std::make_shared<MockEmbeddingProvider>(1, 8);
  emb->set_override("The cat sat down", {1, 0, 0});
  emb->set_override("A feline seated itself", {0.99, 0.141, 0});
  emb->set_override("Something unrelated entirely", {0, 0, 1});
  Gateway gw(chat, emb);

  PlanningOptions opts;
  opts.embedding_dedup = true;
  auto result = plan(gw, docs({"x"}), opts, nullptr);
  REQUIRE(result.acus.size() == 2);
  CHECK(result.acus[0].text == "The cat sat down");
  CHECK(result.acus[1].text == "Something unrelated entirely");
  CHECK(result.acus[1].id == 1);
}

TEST_CASE("every ACU references an existing aspect") {
  auto gw = make_gateway({
      {ScriptEntry::Kind::Substring, "unique aspects", "- A\n- B"},
      {ScriptEntry::Kind::Substring, "Aspect:\nA", "- one"},
      {ScriptEntry::Kind::Substring, "Aspect:\nB", "- two"},
  });
  auto result = plan(gw, docs({"x"}), {}, nullptr);
  for (const auto& acu : result.acus) CHECK(acu.aspect_index < result.aspects.size());
}
