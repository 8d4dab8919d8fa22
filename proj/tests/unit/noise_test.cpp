#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "morph/registry.hpp"
#include "noise/noise.hpp"
#include "syntax/frontend.hpp"
#include "syntax/parser.hpp"

using namespace distilc;
using namespace distilc::noise;

namespace {

const morph::MorphemeRegistry& reg() {
  return morph::MorphemeRegistry::builtin();
}

syntax::SourceFunction sf(Language lang, std::string name, std::string body) {
  syntax::SourceFunction fn;
  fn.language = lang;
  fn.name = std::move(name);
  fn.body = std::move(body);
  return fn;
}

const syntax::SourceFunction& two_sum_py() {
  static const syntax::SourceFunction fn = sf(
      Language::Python, "two_sum",
      "def two_sum(nums, target):\n"
      "    seen = {}\n"
      "    for i in range(len(nums)):\n"
      "        rest = target - nums[i]\n"
      "        if rest in seen:\n"
      "            return [seen[rest], i]\n"
      "        seen[nums[i]] = i\n"
      "    return []\n");
  return fn;
}

std::vector<std::string> sorted_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  std::sort(lines.begin(), lines.end());
  return lines;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference stream") {
  uint64_t s = 0;
  CHECK(splitmix64(s) == 0xE220A8397B1DCDAFULL);
  CHECK(splitmix64(s) == 0x6E789E6AA1B965F4ULL);
  CHECK(splitmix64(s) == 0x06C45D188009454FULL);
  uint64_t s2 = 42;
  CHECK(splitmix64(s2) == 0xBDD732262FEB6E95ULL);
  CHECK(splitmix64(s2) == 0x28EFE333B266F103ULL);
}

TEST_CASE("mix_seed separates records") {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) seen.insert(mix_seed(7, i));
  CHECK(seen.size() == 1000);
  CHECK(mix_seed(7, 3) == mix_seed(7, 3));
  CHECK(mix_seed(7, 3) != mix_seed(8, 3));
}

TEST_CASE("obfuscate_identifiers: two-sum renames densely and consistently") {
  auto [obf, map] = obfuscate_identifiers(two_sum_py(), reg());
  CHECK(obf.body ==
        "def FUNC_0(VAR_0, VAR_1):\n"
        "    VAR_2 = {}\n"
        "    for VAR_3 in range(len(VAR_0)):\n"
        "        VAR_4 = VAR_1 - VAR_0[VAR_3]\n"
        "        if VAR_4 in VAR_2:\n"
        "            return [VAR_2[VAR_4], VAR_3]\n"
        "        VAR_2[VAR_0[VAR_3]] = VAR_3\n"
        "    return []\n");
  REQUIRE(map.entries.size() == 6);
  CHECK(map.entries[0] == std::pair<std::string, std::string>{"two_sum", "FUNC_0"});
  CHECK(map.entries[1].second == "VAR_0");
  CHECK(map.entries[5].second == "VAR_4");
  CHECK(obf.name == "FUNC_0");
  CHECK_FALSE(syntax::parse_function(obf).has_error);
}

TEST_CASE("obfuscate_identifiers: keywords and library words survive") {
  auto fn = sf(Language::Cpp, "f",
               "int f(int a, int b) { if (a) return b; return 0; }");
  auto [obf, map] = obfuscate_identifiers(fn, reg());
  CHECK(obf.body ==
        "int FUNC_0(int VAR_0, int VAR_1) { if (VAR_0) return VAR_1; "
        "return 0; }");

  auto lib = sf(Language::Cpp, "g",
                "int g(int x) { cout << pow(x, 2) << endl; return x; }");
  auto [obf2, map2] = obfuscate_identifiers(lib, reg());
  CHECK(obf2.body.find("cout") != std::string::npos);
  CHECK(obf2.body.find("pow") != std::string::npos);
  CHECK(obf2.body.find("endl") != std::string::npos);
  CHECK(map2.entries.size() == 2);  // g and x
}

TEST_CASE("obfuscate_identifiers: zero extra identifiers renames only the "
          "function") {
  auto fn = sf(Language::Python, "f", "def f():\n    return 1\n");
  auto [obf, map] = obfuscate_identifiers(fn, reg());
  REQUIRE(map.entries.size() == 1);
  CHECK(map.entries[0].second == "FUNC_0");
  CHECK(obf.body == "def FUNC_0():\n    return 1\n");
}

TEST_CASE("obfuscate_identifiers: inverse map restores the original bytes") {
  for (const auto& fn :
       {two_sum_py(),
        sf(Language::Java, "pick",
           "public class T { public static int pick(int lo, int hi) { "
           "int span = hi - lo; return span; } }"),
        sf(Language::CSharp, "tally",
           "public class T { public static int tally(int n) { "
           "int best = n * 2; return best; } }")}) {
    auto [obf, map] = obfuscate_identifiers(fn, reg());
    CHECK_FALSE(syntax::parse_function(obf).has_error);
    CHECK(apply_rename(obf, map.inverted()) == fn.body);
  }
}

TEST_CASE("shuffle_lines and shuffle_tokens preserve multisets") {
  const auto& fn = two_sum_py();
  std::string lines_out = shuffle_lines(fn, 99);
  CHECK(sorted_lines(lines_out) == sorted_lines(fn.body));
  CHECK(lines_out != fn.body);  // 8 lines, seed 99 moves at least one
  CHECK(shuffle_lines(fn, 99) == lines_out);

  std::string toks_out = shuffle_tokens(fn, 99);
  auto texts = [](const syntax::SourceFunction& f) {
    std::vector<std::string> out;
    for (const auto& t : syntax::tokenize(f)) out.push_back(t.text);
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<std::string> shuffled;
  {
    std::string cur;
    for (char c : toks_out + " ") {
      if (c == ' ') {
        if (!cur.empty()) shuffled.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
  }
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == texts(fn));
  CHECK(shuffle_tokens(fn, 99) == toks_out);

  auto one = sf(Language::Python, "f", "def f(): return 1");
  CHECK(shuffle_lines(one, 7) == one.body);
}

TEST_CASE("delete_keywords removes exactly keyword-tagged tokens") {
  auto fn = sf(Language::Cpp, "f",
               "int f(int a, int b) { if (a) return b; return 0; }");
  CHECK(delete_keywords(fn) == "f ( a , b ) { ( a ) b ; 0 ; }");

  size_t keywords = 0;
  size_t total = 0;
  for (const auto& t : syntax::tokenize(fn)) {
    ++total;
    if (t.kind == syntax::TokenKind::Keyword) ++keywords;
  }
  std::string out = delete_keywords(fn);
  size_t survivors = out.empty() ? 0 : 1;
  for (char c : out)
    if (c == ' ') ++survivors;
  CHECK(total - keywords == survivors);

  auto expr = sf(Language::Python, "f", "x = a + b * 2");
  CHECK(delete_keywords(expr) == "x = a + b * 2");
}

TEST_CASE("delete_symbols blanks exactly the nine structural symbols") {
  auto fn = sf(Language::Cpp, "f",
               "int f(int a, int b) { if (a) return b; return 0; }");
  CHECK(delete_symbols(fn) ==
        "int f int a  int b    if  a  return b  return 0   ");
  CHECK(delete_symbols(fn).size() == fn.body.size());

  // symbols inside string literals are data, not structure
  auto lit = sf(Language::Cpp, "f",
                "string f() { string s = \"a.b;\"; return s + \"!\"; }");
  std::string out = delete_symbols(lit);
  CHECK(out.find("\"a.b;\"") != std::string::npos);
  CHECK(out.find("s + \"!\"") != std::string::npos);

  auto ops = sf(Language::Python, "f", "x = a + b - c * d");
  CHECK(delete_symbols(ops) == "x = a + b - c * d");
}

TEST_CASE("corrupt_dae: zero ratios is the identity") {
  std::vector<std::string> toks = {"func", "{f}", "(", ")", "{",
                                   "return", "1", ";", "}"};
  std::vector<bool> bow(toks.size(), false);
  bow[1] = true;
  NoiseSpec spec;
  spec.mask_ratio = spec.dropout_ratio = spec.permute_ratio = 0.0;
  spec.bow_mask_ratio = spec.bow_dropout_ratio = spec.bow_permute_ratio = 0.0;
  spec.seed = 123;
  CHECK(corrupt_dae(toks, bow, spec) == toks);
}

TEST_CASE("corrupt_dae: dropout 1.0 empties the non-bag region") {
  std::vector<std::string> toks = {"a", "b", "c", "d", "e"};
  std::vector<bool> bow = {false, true, true, false, false};
  NoiseSpec spec;
  spec.mask_ratio = spec.permute_ratio = 0.0;
  spec.dropout_ratio = 1.0;
  spec.bow_mask_ratio = spec.bow_dropout_ratio = spec.bow_permute_ratio = 0.0;
  std::vector<std::string> want = {"b", "c"};
  CHECK(corrupt_dae(toks, bow, spec) == want);
}

TEST_CASE("corrupt_dae: default spec masks 30% (+-2) of non-bag tokens") {
  const size_t n = 20000;
  std::vector<std::string> toks(n, "tok");
  std::vector<bool> bow(n, false);
  NoiseSpec spec;  // defaults: 0.3 / 0.3 / 0.2
  spec.seed = 2024;
  std::vector<std::string> out = corrupt_dae(toks, bow, spec);
  size_t masks = 0;
  for (const auto& t : out)
    if (t == kMaskToken) ++masks;
  double rate = static_cast<double>(masks) / n;
  CHECK(rate > 0.28);
  CHECK(rate < 0.32);
}

TEST_CASE("corrupt_dae: permutation swaps whole statements") {
  std::vector<std::string> toks = {"a", ";", "b", ";"};
  std::vector<bool> bow(4, false);
  NoiseSpec spec;
  spec.mask_ratio = spec.dropout_ratio = 0.0;
  spec.permute_ratio = 1.0;
  spec.bow_mask_ratio = spec.bow_dropout_ratio = 0.0;
  std::vector<std::string> want = {"b", ";", "a", ";"};
  CHECK(corrupt_dae(toks, bow, spec) == want);
}

TEST_CASE("corrupt_dae: bag shuffle stays inside the bag") {
  std::vector<std::string> toks = {"decl", "w1", "w2", "w3", "w4", "w5", ";"};
  std::vector<bool> bow = {false, true, true, true, true, true, false};
  NoiseSpec spec;
  spec.mask_ratio = spec.dropout_ratio = spec.permute_ratio = 0.0;
  spec.bow_mask_ratio = spec.bow_dropout_ratio = 0.0;
  spec.bow_permute_ratio = 1.0;
  spec.seed = 5;
  std::vector<std::string> out = corrupt_dae(toks, bow, spec);
  REQUIRE(out.size() == toks.size());
  CHECK(out.front() == "decl");
  CHECK(out.back() == ";");
  std::vector<std::string> bag(out.begin() + 1, out.end() - 1);
  std::vector<std::string> orig(toks.begin() + 1, toks.end() - 1);
  std::sort(bag.begin(), bag.end());
  CHECK(bag == orig);  // orig is already sorted
}

TEST_CASE("corrupt_dae: deterministic in the seed, rejects bad input") {
  std::vector<std::string> toks(50, "t");
  for (size_t i = 0; i < toks.size(); ++i) toks[i] += std::to_string(i);
  std::vector<bool> bow(50, false);
  NoiseSpec spec;
  spec.seed = 11;
  CHECK(corrupt_dae(toks, bow, spec) == corrupt_dae(toks, bow, spec));
  NoiseSpec other = spec;
  other.seed = 12;
  CHECK(corrupt_dae(toks, bow, spec) != corrupt_dae(toks, bow, other));

  NoiseSpec bad;
  bad.mask_ratio = 1.5;
  CHECK_THROWS_AS(corrupt_dae(toks, bow, bad), std::invalid_argument);
  std::vector<std::string> masked = {"a", std::string(kMaskToken)};
  std::vector<bool> flags = {false, false};
  CHECK_THROWS_AS(corrupt_dae(masked, flags, NoiseSpec{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(corrupt_dae(toks, flags, NoiseSpec{}),
                  std::invalid_argument);
}

TEST_CASE("window_shuffle keeps windows closed") {
  std::vector<std::string> toks = {"a", "b", "c", "d", "e", "f"};
  auto out = window_shuffle(toks, 3, 9);
  REQUIRE(out.size() == 6);
  std::vector<std::string> w1(out.begin(), out.begin() + 3);
  std::vector<std::string> w2(out.begin() + 3, out.end());
  std::sort(w1.begin(), w1.end());
  std::sort(w2.begin(), w2.end());
  CHECK(w1 == std::vector<std::string>{"a", "b", "c"});
  CHECK(w2 == std::vector<std::string>{"d", "e", "f"});
  CHECK(window_shuffle(toks, 1, 9) == toks);
}
