#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "corpus/pipeline.hpp"
#include "distill/distilled.hpp"
#include "distill/lower.hpp"
#include "doctest.h"
#include "json.hpp"
#include "morph/registry.hpp"
#include "syntax/parser.hpp"

using namespace distilc;
using namespace distilc::corpus;
using distilc::noise::NoiseSpec;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

const morph::MorphemeRegistry& reg() {
  return morph::MorphemeRegistry::builtin();
}

std::vector<syntax::SourceFunction> functions_in(const std::string& src,
                                                 Language lang) {
  auto tree = syntax::parse(src, lang);
  REQUIRE_FALSE(tree.has_error);
  std::vector<syntax::SourceFunction> out;
  for (auto& fn : syntax::extract_functions(tree))
    out.push_back(syntax::strip_noncode(fn));
  return out;
}

const std::vector<syntax::SourceFunction>& add_two_java() {
  static const auto fns = functions_in(
      "public class T {\n"
      "    public static int addTwo(int a, int b) {\n"
      "        return a + b;\n"
      "    }\n"
      "}\n",
      Language::Java);
  return fns;
}

NoiseSpec zero_noise() {
  NoiseSpec spec;
  spec.mask_ratio = 0.0;
  spec.dropout_ratio = 0.0;
  spec.permute_ratio = 0.0;
  spec.bow_mask_ratio = 0.0;
  spec.bow_dropout_ratio = 0.0;
  spec.bow_permute_ratio = 0.0;
  spec.seed = 7;
  return spec;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::vector<std::string> ws_tokens(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

struct TempTree {
  fs::path root;
  TempTree() {
    root = fs::temp_directory_path() /
           ("corpus_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(root);
  }
  ~TempTree() { fs::remove_all(root); }
  static int& counter() {
    static int n = 0;
    return n;
  }
  void put(const std::string& rel, const std::string& content) {
    fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    std::ofstream(p) << content;
  }
};

}  // namespace

TEST_CASE("fnv1a matches the published 64-bit vectors") {
  CHECK(fnv1a("") == 0xCBF29CE484222325ULL);
  CHECK(fnv1a("a") == 0xAF63DC4C8601EC8CULL);
  CHECK(fnv1a("foobar") == 0x85944171F73967E8ULL);
}

TEST_CASE("record ids are stable token-level hashes") {
  const auto& fns = add_two_java();
  REQUIRE(fns.size() == 1);
  // hand-computed: fnv1a of "java" plus each token text prefixed by \x1f
  CHECK(record_id(fns[0]) == "27a44e6d6002e6fd");
  CHECK(split_for_id("27a44e6d6002e6fd") == "train");

  // whitespace layout does not change the id, renaming does
  auto spaced = functions_in(
      "public class T { public static int addTwo(int a,\n"
      "      int b) { return a + b; } }\n",
      Language::Java);
  REQUIRE(spaced.size() == 1);
  CHECK(record_id(spaced[0]) == record_id(fns[0]));
  auto renamed = functions_in(
      "public class T { public static int addBoth(int a, int b) "
      "{ return a + b; } }\n",
      Language::Java);
  CHECK(record_id(renamed[0]) != record_id(fns[0]));
}

TEST_CASE("split assignment lands near 96/2/2 and covers all three") {
  std::map<std::string, int> counts;
  for (int i = 0; i < 5000; ++i)
    ++counts[split_for_id("id" + std::to_string(i))];
  CHECK(counts["train"] + counts["valid"] + counts["test"] == 5000);
  CHECK(counts["train"] > 4600);
  CHECK(counts["valid"] > 0);
  CHECK(counts["test"] > 0);
  CHECK(split_for_id("xyz") == split_for_id("xyz"));
}

TEST_CASE("zero-noise mpg emits the canonical pair") {
  std::ostringstream out;
  EmitStats st = emit_mpg(add_two_java(), reg(), zero_noise(), out);
  CHECK(st.records == 1);
  CHECK(st.skipped() == 0);
  CHECK(out.str() ==
        "{\"distilled\":\"func {add two} ( param int {a} , param int {b} ) "
        "{ return {a} + {b} ; }\",\"id\":\"27a44e6d6002e6fd\","
        "\"lang_token\":\"<java>\",\"split\":\"train\","
        "\"target\":\"public static int addTwo(int a, int b) {\\n"
        "        return a + b;\\n    }\"}\n");
}

TEST_CASE("mpg emission is byte-identical for a fixed seed") {
  auto fns = functions_in(
      "def scale(values, factor):\n"
      "    out = []\n"
      "    for v in values:\n"
      "        out.append(v * factor)\n"
      "    return out\n"
      "\n"
      "def pick(a, b):\n"
      "    return a if a > b else b\n",
      Language::Python);
  REQUIRE(fns.size() == 2);
  NoiseSpec spec;  // defaults, bag order randomized below
  spec.bow_permute_ratio = 1.0;
  spec.seed = 99;
  std::ostringstream first, second;
  emit_mpg(fns, reg(), spec, first);
  emit_mpg(fns, reg(), spec, second);
  CHECK(first.str() == second.str());
  CHECK(lines_of(first.str()).size() == 2);
}

TEST_CASE("bag randomization reorders words but stays deserializable") {
  NoiseSpec spec = zero_noise();
  spec.bow_permute_ratio = 1.0;
  spec.seed = 6;  // first seed whose two-word shuffle actually swaps
  std::ostringstream out;
  emit_mpg(add_two_java(), reg(), spec, out);
  auto rec = json::parse(out.str());
  std::string distilled = rec["distilled"].get<std::string>();
  CHECK(distilled.find("{two add}") != std::string::npos);

  auto code = distill::deserialize(distilled, Language::Java);
  CHECK(distill::well_formed(code));
  // canonical form is restored by sorting the bags back
  CHECK(distill::serialize(distill::canonicalize(code)) ==
        "func {add two} ( param int {a} , param int {b} ) "
        "{ return {a} + {b} ; }");
}

TEST_CASE("unparseable functions are skipped and counted by cause") {
  auto fns = add_two_java();
  syntax::SourceFunction broken;
  broken.language = Language::Java;
  broken.name = "broken";
  broken.body = "public static int broken(int a { return a; }";
  fns.push_back(broken);
  fns.push_back(fns[0]);

  std::ostringstream out;
  EmitStats st = emit_mpg(fns, reg(), zero_noise(), out);
  CHECK(st.records == 2);
  CHECK(st.skipped() == 1);
  REQUIRE(st.skips.size() == 1);
  CHECK(st.skips.begin()->first == "strip_noncode produced unparseable text");
  // no record loss: in = out + skips
  CHECK(fns.size() == st.records + st.skipped());
}

TEST_CASE("every emitted distilled field deserializes and is balanced") {
  auto fns = functions_in(
      "def walk(grid, n):\n"
      "    total = 0\n"
      "    for i in range(n):\n"
      "        if grid[i] > 0:\n"
      "            total += grid[i]\n"
      "    return total\n",
      Language::Python);
  NoiseSpec spec;
  spec.bow_permute_ratio = 1.0;
  for (uint64_t seed : {1ULL, 6ULL, 42ULL, 2024ULL}) {
    spec.seed = seed;
    std::ostringstream out;
    emit_mpg(fns, reg(), spec, out);
    for (const auto& line : lines_of(out.str())) {
      auto rec = json::parse(line);
      auto code = distill::deserialize(rec["distilled"].get<std::string>(),
                                       Language::Python);
      CHECK(distill::well_formed(code));
    }
  }
}

TEST_CASE("mlm with ratio zero masks nothing") {
  std::ostringstream out;
  EmitStats st = emit_mlm(add_two_java(), reg(), 0.0, 7, out);
  CHECK(st.records == 1);
  auto rec = json::parse(out.str());
  CHECK(rec["answers"].empty());
  CHECK(rec["positions"].empty());
  CHECK(rec["input"].get<std::string>() ==
        "func add two ( param int a , param int b ) { return a + b ; } "
        "<sep> public static int addTwo ( int a , int b ) "
        "{ return a + b ; }");
}

TEST_CASE("mlm masks about 15 percent at the default ratio") {
  std::vector<syntax::SourceFunction> fns;
  for (int i = 0; i < 300; ++i) fns.push_back(add_two_java()[0]);
  std::ostringstream out;
  emit_mlm(fns, reg(), 0.15, 2024, out);
  size_t masked = 0, maskable = 0;
  for (const auto& line : lines_of(out.str())) {
    auto rec = json::parse(line);
    masked += rec["answers"].size();
    for (const auto& tok : ws_tokens(rec["input"].get<std::string>()))
      if (tok != "<sep>") ++maskable;
  }
  double rate = static_cast<double>(masked) / static_cast<double>(maskable);
  CHECK(rate > 0.13);
  CHECK(rate < 0.17);
}

TEST_CASE("mlm answers align with mask positions") {
  auto fns = functions_in(
      "def gather(items, k):\n"
      "    out = []\n"
      "    for it in items:\n"
      "        if len(out) < k:\n"
      "            out.append(it)\n"
      "    return out\n",
      Language::Python);
  std::ostringstream out;
  emit_mlm(fns, reg(), 0.35, 11, out);
  for (const auto& line : lines_of(out.str())) {
    auto rec = json::parse(line);
    auto toks = ws_tokens(rec["input"].get<std::string>());
    auto positions = rec["positions"].get<std::vector<size_t>>();
    auto answers = rec["answers"].get<std::vector<std::string>>();
    REQUIRE(positions.size() == answers.size());
    size_t masks = 0;
    for (const auto& t : toks)
      if (t == "<mask>") ++masks;
    CHECK(masks == positions.size());
    for (size_t i = 0; i < positions.size(); ++i) {
      REQUIRE(positions[i] < toks.size());
      CHECK(toks[positions[i]] == "<mask>");
      CHECK(answers[i] != "<mask>");
      CHECK_FALSE(answers[i].empty());
    }
    // the separator is never masked
    CHECK(std::count(toks.begin(), toks.end(), "<sep>") == 1);
  }
}

TEST_CASE("mlm rejects a ratio outside the unit interval") {
  std::ostringstream out;
  CHECK_THROWS_AS(emit_mlm(add_two_java(), reg(), 1.5, 7, out),
                  std::invalid_argument);
  CHECK_THROWS_AS(emit_mlm(add_two_java(), reg(), -0.1, 7, out),
                  std::invalid_argument);
}

TEST_CASE("zero-noise dae reproduces its target") {
  std::ostringstream out;
  EmitStats st = emit_dae(add_two_java(), reg(), zero_noise(), out);
  CHECK(st.records == 1);
  auto rec = json::parse(out.str());
  CHECK(rec["input"].get<std::string>() == rec["target"].get<std::string>());
  std::string target = rec["target"].get<std::string>();
  CHECK(target.find(" <sep> ") != std::string::npos);
  CHECK(target.substr(0, 4) == "func");
}

TEST_CASE("dae corruption is deterministic and keeps every record") {
  auto fns = functions_in(
      "def total(values):\n"
      "    s = 0\n"
      "    for v in values:\n"
      "        s += v\n"
      "    return s\n"
      "\n"
      "def biggest(a, b, c):\n"
      "    m = a\n"
      "    if b > m:\n"
      "        m = b\n"
      "    if c > m:\n"
      "        m = c\n"
      "    return m\n",
      Language::Python);
  NoiseSpec spec;  // paper defaults
  spec.seed = 31;
  std::ostringstream first, second;
  EmitStats st = emit_dae(fns, reg(), spec, first);
  emit_dae(fns, reg(), spec, second);
  CHECK(st.records == fns.size());
  CHECK(first.str() == second.str());
  for (const auto& line : lines_of(first.str())) {
    auto rec = json::parse(line);
    CHECK(rec["input"].get<std::string>() != rec["target"].get<std::string>());
  }
}

TEST_CASE("dae corrupts the two sides independently") {
  NoiseSpec spec = zero_noise();
  spec.mask_ratio = 0.4;
  spec.seed = 13;
  std::ostringstream out;
  emit_dae(add_two_java(), reg(), spec, out);
  auto rec = json::parse(out.str());
  std::string input = rec["input"].get<std::string>();
  size_t sep = input.find(" <sep> ");
  REQUIRE(sep != std::string::npos);
  std::string left = input.substr(0, sep);
  std::string right = input.substr(sep + 7);
  // with distinct per-side seeds the mask patterns differ
  auto mask_profile = [](const std::string& side) {
    std::vector<bool> out;
    for (const auto& t : ws_tokens(side)) out.push_back(t == "<mask>");
    return out;
  };
  CHECK(mask_profile(left) != mask_profile(right));
}

TEST_CASE("stats of an empty file is all zeros") {
  std::istringstream in("");
  CorpusStats st = stats(in);
  CHECK(st.records == 0);
  CHECK(st.functions_per_language.empty());
  CHECK(st.distilled_tokens == 0);
  CHECK(st.target_tokens == 0);
  CHECK(st.registry_hit_rate == 1.0);
}

TEST_CASE("stats over a hand-checked two-record file") {
  auto fns = functions_in(
      "public class T {\n"
      "    public static int addTwo(int a, int b) {\n"
      "        return a + b;\n"
      "    }\n"
      "    public static int callPow(int x) {\n"
      "        return (int) Math.pow(x, 2);\n"
      "    }\n"
      "}\n",
      Language::Java);
  REQUIRE(fns.size() == 2);
  std::ostringstream out;
  emit_mpg(fns, reg(), zero_noise(), out);
  std::istringstream in(out.str());
  CorpusStats st = stats(in);

  CHECK(st.records == 2);
  CHECK(st.functions_per_language.at("java") == 2);
  CHECK(st.split_counts.at("train") == 2);
  // flattened distilled: 19 tokens for addTwo, 18 for callPow
  CHECK(st.distilled_tokens == 37);
  // lexical source tokens: 18 for addTwo, 23 for callPow
  CHECK(st.target_tokens == 41);
  CHECK(st.min_length_ratio == doctest::Approx(18.0 / 23.0));
  CHECK(st.max_length_ratio == doctest::Approx(19.0 / 18.0));
  CHECK(st.mean_length_ratio ==
        doctest::Approx((19.0 / 18.0 + 18.0 / 23.0) / 2.0));
  CHECK(st.unified_call_sites == 1);  // pow
  CHECK(st.fuzzy_call_sites == 0);
  CHECK(st.registry_hit_rate == 1.0);
}

TEST_CASE("stats separates unified and fuzzy call sites") {
  auto fns = functions_in(
      "public class T {\n"
      "    public static int go(int x) {\n"
      "        return helper(x) + (int) Math.pow(x, 2);\n"
      "    }\n"
      "}\n",
      Language::Java);
  std::ostringstream out;
  emit_mpg(fns, reg(), zero_noise(), out);
  std::istringstream in(out.str());
  CorpusStats st = stats(in);
  CHECK(st.unified_call_sites == 1);
  CHECK(st.fuzzy_call_sites == 1);
  CHECK(st.registry_hit_rate == doctest::Approx(0.5));
}

TEST_CASE("stats reports the line number of the first bad record") {
  std::string good =
      "{\"distilled\":\"func {f} ( ) { return 1 ; }\",\"id\":\"x\","
      "\"lang_token\":\"<java>\",\"split\":\"train\",\"target\":\"int f()\"}";

  SUBCASE("broken json") {
    std::istringstream in(good + "\nnot json at all\n");
    CHECK_THROWS_WITH_AS(stats(in), doctest::Contains("line 2"),
                         MalformedRecord);
  }
  SUBCASE("missing field") {
    std::istringstream in("{\"id\":\"x\"}\n");
    try {
      stats(in);
      FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
      CHECK(e.line == 1);
      CHECK(std::string(e.what()).find("distilled") != std::string::npos);
    }
  }
  SUBCASE("unknown language token") {
    std::string bad = good;
    auto at = bad.find("<java>");
    bad.replace(at, 6, "<perl>");
    std::istringstream in(good + "\n" + good + "\n" + bad + "\n");
    try {
      stats(in);
      FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
      CHECK(e.line == 3);
    }
  }
  SUBCASE("distilled field that does not deserialize") {
    std::string bad =
        "{\"distilled\":\"func {f} ( ) { return banana ; }\",\"id\":\"x\","
        "\"lang_token\":\"<java>\",\"split\":\"train\",\"target\":\"x\"}";
    std::istringstream in(bad);
    CHECK_THROWS_AS(stats(in), MalformedRecord);
  }
  SUBCASE("unbalanced distilled field") {
    std::string bad =
        "{\"distilled\":\"func {f} ( ) { { return 1 ; }\",\"id\":\"x\","
        "\"lang_token\":\"<java>\",\"split\":\"train\",\"target\":\"x\"}";
    std::istringstream in(bad);
    CHECK_THROWS_AS(stats(in), MalformedRecord);
  }
  SUBCASE("blank lines are not records") {
    std::istringstream in(good + "\n\n" + good + "\n");
    CHECK(stats(in).records == 2);
  }
}

TEST_CASE("ingest walks trees, dedups, and counts parse failures") {
  TempTree tree;
  tree.put("a/add.java",
           "public class A { public static int addTwo(int a, int b) "
           "{ return a + b; } }\n");
  tree.put("a/scale.py",
           "def scale(v, k):\n    return v * k\n");
  tree.put("b/add_again.java",
           "public class B { public static int addTwo(int a, int b) "
           "{ return a + b; } }\n");
  tree.put("b/broken.py", "def broken(:\n    ???\n");
  tree.put("b/notes.txt", "not source at all\n");

  IngestStats st;
  auto fns = ingest({tree.root.string()}, &st);
  CHECK(st.files_scanned == 4);  // txt file never parsed
  CHECK(st.files_unparseable == 1);
  CHECK(st.duplicates_skipped == 1);
  CHECK(st.functions_extracted == 2);
  CHECK(st.io_errors.empty());
  REQUIRE(fns.size() == 2);
  // sorted path walk makes the order stable: a/ before b/
  CHECK(fns[0].name == "addTwo");
  CHECK(fns[1].name == "scale");
  CHECK(fns[0].origin_path.find("a/add.java") != std::string::npos);
}

TEST_CASE("ingest of an empty root yields nothing") {
  TempTree tree;
  IngestStats st;
  auto fns = ingest({tree.root.string()}, &st);
  CHECK(fns.empty());
  CHECK(st.files_scanned == 0);
  CHECK(st.io_errors.empty());
}

TEST_CASE("ingest reports unreadable roots without dying") {
  TempTree tree;
  tree.put("ok.py", "def fine(x):\n    return x\n");
  IngestStats st;
  auto fns = ingest({tree.root.string() + "/missing", tree.root.string()}, &st);
  CHECK(st.io_errors.size() == 1);
  CHECK(fns.size() == 1);
  CHECK(fns[0].name == "fine");
}

TEST_CASE("ingest accepts a single file as a root") {
  TempTree tree;
  tree.put("one.cpp", "int twice(int a) { return 2 * a; }\n");
  IngestStats st;
  auto fns = ingest({(tree.root / "one.cpp").string()}, &st);
  CHECK(st.files_scanned == 1);
  REQUIRE(fns.size() == 1);
  CHECK(fns[0].language == Language::Cpp);
}

TEST_CASE("flatten splits bags into flagged words") {
  distill::DistilledCode code;
  code.tokens = {distill::keyword("func"),
                 distill::bag({"add", "two"}),
                 distill::keyword("("),
                 distill::keyword(")"),
                 distill::open(),
                 distill::sep(),
                 distill::close()};
  std::vector<std::string> tokens;
  std::vector<bool> bow;
  flatten_distilled(code, tokens, bow);
  CHECK(tokens == std::vector<std::string>{"func", "add", "two", "(", ")", "{",
                                           ";", "}"});
  CHECK(bow == std::vector<bool>{false, true, true, false, false, false, false,
                                 false});
}
