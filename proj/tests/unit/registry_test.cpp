#include "doctest.h"

#include <fstream>
#include <sstream>

#include "morph/registry.hpp"

using namespace distilc;
using namespace distilc::morph;

namespace {

SlotBindings binds(std::string a = "", std::string b = "",
                   std::string c = "") {
  SlotBindings m;
  if (!a.empty()) m['a'] = a;
  if (!b.empty()) m['b'] = b;
  if (!c.empty()) m['c'] = c;
  return m;
}

}  // namespace

TEST_CASE("pattern shapes are whitespace-insensitive") {
  CHECK(normalize_shape("Math.pow( a , b )") == normalize_shape("Math.pow(a,b)"));
  CHECK(normalize_shape("a and b") == "a and b");
  CHECK(normalize_shape("HashMap<> a") == normalize_shape("HashMap<>a"));
  CHECK(normalize_shape("a and b") != normalize_shape("aandb"));
}

TEST_CASE("pattern instantiation keeps recorded spacing") {
  CHECK(parse_pattern("Math.pow(a,b)").instantiate(binds("x", "y")) ==
        "Math.pow(x,y)");
  CHECK(parse_pattern("a and b").instantiate(binds("x", "y")) == "x and y");
  CHECK(parse_pattern("HashMap<> a").instantiate(binds("m")) == "HashMap<> m");
  CHECK(parse_pattern("print(a, end='')").instantiate(binds("x")) ==
        "print(x, end='')");
  CHECK_THROWS_AS(parse_pattern("a+b").instantiate(binds("x")),
                  std::invalid_argument);
}

TEST_CASE("builtin registry covers the full unification tables") {
  const auto& reg = MorphemeRegistry::builtin();
  // 30 table rows over 4 languages, minus the two '-' cells.
  CHECK(reg.rules().size() == 118);
  std::set<std::string> unified;
  int operators = 0, types = 0, builtins = 0;
  for (const auto& r : reg.rules()) {
    unified.insert(r.unified_shape());
    if (r.language == Language::Java) {
      if (r.category == Category::Operator) ++operators;
      if (r.category == Category::DataType) ++types;
      if (r.category == Category::Builtin) ++builtins;
    }
  }
  CHECK(unified.size() == 30);
  CHECK(operators == 10);
  CHECK(types == 10);
  CHECK(builtins == 10);
}

TEST_CASE("shipped registry file matches the embedded default") {
  auto from_file = MorphemeRegistry::load_file(DATA_DIR "/morphemes.tsv");
  const auto& builtin = MorphemeRegistry::builtin();
  REQUIRE(from_file.rules().size() == builtin.rules().size());
  for (size_t i = 0; i < builtin.rules().size(); ++i) {
    CHECK(from_file.rules()[i].surface_shape() ==
          builtin.rules()[i].surface_shape());
    CHECK(from_file.rules()[i].unified_shape() ==
          builtin.rules()[i].unified_shape());
  }
  std::ifstream in(DATA_DIR "/morphemes.tsv", std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  CHECK(buf.str() == MorphemeRegistry::builtin_text());
}

TEST_CASE("lookup instantiates the unified form") {
  const auto& reg = MorphemeRegistry::builtin();
  CHECK(reg.lookup(Language::Python, Category::Operator, "a**b",
                   binds("x", "y")) == "pow(x,y)");
  CHECK(reg.lookup(Language::CSharp, Category::Builtin,
                   "Console.WriteLine(a)", binds("msg")) == "println(msg)");
  CHECK(reg.lookup(Language::Java, Category::DataType, "HashMap<> a",
                   binds("m")) == "map<> m");
  CHECK(reg.lookup(Language::CSharp, Category::DataType, "deque",
                   binds("d")) == std::nullopt);
  CHECK(reg.lookup(Language::CSharp, Category::DataType, "Deque<> a",
                   binds("d")) == std::nullopt);
}

TEST_CASE("cpp lookups accept qualifier-free shapes") {
  const auto& reg = MorphemeRegistry::builtin();
  CHECK(reg.lookup(Language::Cpp, Category::DataType, "std::map<> a",
                   binds("m")) == "map<> m");
  CHECK(reg.lookup(Language::Cpp, Category::DataType, "map<> a",
                   binds("m")) == "map<> m");
  CHECK(reg.lookup(Language::Cpp, Category::DataType, "string a",
                   binds("s")) == "string s");
}

TEST_CASE("reverse_lookup instantiates the target surface") {
  const auto& reg = MorphemeRegistry::builtin();
  CHECK(reg.reverse_lookup("length(a)", Language::CSharp, binds("s")) ==
        "s.Length");
  CHECK(reg.reverse_lookup("int(a/b)", Language::Python, binds("x", "y")) ==
        "x//y");
  CHECK(reg.reverse_lookup("char a", Language::Python, binds("c")) ==
        std::nullopt);
  CHECK(reg.reverse_lookup("deque<> a", Language::CSharp, binds("d")) ==
        std::nullopt);
  CHECK(reg.reverse_lookup("replace(c,a,b)", Language::Java,
                           binds("x", "y", "s")) == "s.replace(x,y)");
}

TEST_CASE("identity rows map surfaces to themselves") {
  const auto& reg = MorphemeRegistry::builtin();
  for (const char* shape : {"a+b", "a-b", "a*b", "a/b", "a%b"}) {
    for (Language lang : {Language::Cpp, Language::Java, Language::CSharp,
                          Language::Python}) {
      auto got = reg.lookup(lang, Category::Operator, shape, binds("x", "y"));
      REQUIRE(got.has_value());
      auto surfaced = reg.reverse_lookup(shape, lang, binds("x", "y"));
      CHECK(got == surfaced);
    }
  }
}

TEST_CASE("every rule round-trips through reverse then forward lookup") {
  const auto& reg = MorphemeRegistry::builtin();
  auto all = binds("v1", "v2", "v3");
  for (const auto& rule : reg.rules()) {
    auto surfaced =
        reg.reverse_lookup(rule.unified_shape(), rule.language, all);
    REQUIRE(surfaced.has_value());
    std::string shape = normalize_shape(*surfaced);
    for (auto [word, slot] : {std::pair{"v1", 'a'}, {"v2", 'b'}, {"v3", 'c'}}) {
      size_t pos;
      while ((pos = shape.find(word)) != std::string::npos)
        shape.replace(pos, 2, std::string(1, slot));
    }
    auto unified = reg.lookup(rule.language, rule.category, shape, all);
    REQUIRE(unified.has_value());
    CHECK(*unified == rule.unified.instantiate(all));
  }
}

TEST_CASE("load_text validation") {
  SUBCASE("duplicate rule") {
    CHECK_THROWS_AS(MorphemeRegistry::load_text(
                        "operator\ta**b\t-\t-\t-\ta**b\n"
                        "operator\ta**b\t-\t-\t-\ta**b\n"),
                    DuplicateRule);
  }
  SUBCASE("slot mismatch") {
    CHECK_THROWS_AS(
        MorphemeRegistry::load_text("builtin\treplace(c,a,b)\tc.replace(a,b)\t"
                                    "-\t-\ta.replace(a,b)\n"),
        SlotMismatch);
  }
  SUBCASE("wrong field count") {
    CHECK_THROWS_AS(MorphemeRegistry::load_text("operator\ta+b\ta+b\ta+b\n"),
                    MalformedRow);
  }
  SUBCASE("unknown category") {
    CHECK_THROWS_AS(
        MorphemeRegistry::load_text("magic\ta+b\ta+b\ta+b\ta+b\ta+b\n"),
        MalformedRow);
  }
  SUBCASE("missing unified form") {
    CHECK_THROWS_AS(
        MorphemeRegistry::load_text("operator\t-\ta+b\ta+b\ta+b\ta+b\n"),
        MalformedRow);
  }
  SUBCASE("control rows are accepted as an extension point") {
    auto reg = MorphemeRegistry::load_text(
        "control\tloop(a)\trepeat(a)\trepeat(a)\trepeat(a)\trepeat(a)\n");
    CHECK(reg.rules().size() == 4);
    CHECK(reg.rules()[0].category == Category::Control);
  }
  SUBCASE("comments and blank lines are skipped") {
    auto reg = MorphemeRegistry::load_text(
        "# header\n\noperator\ta+b\ta+b\t-\t-\t-\n");
    CHECK(reg.rules().size() == 1);
  }
}
