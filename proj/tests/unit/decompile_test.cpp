#include <string>
#include <vector>

#include "decomp/render.hpp"
#include "distill/distilled.hpp"
#include "distill/lower.hpp"
#include "doctest.h"
#include "morph/registry.hpp"
#include "syntax/frontend.hpp"
#include "syntax/parser.hpp"

using namespace distilc;
using namespace distilc::decomp;
using distill::deserialize;
using distill::DistilledCode;

namespace {

const morph::MorphemeRegistry& reg() {
  return morph::MorphemeRegistry::builtin();
}

syntax::SourceFunction sf(Language lang, std::string body) {
  syntax::SourceFunction fn;
  fn.language = lang;
  fn.body = std::move(body);
  return fn;
}

DistilledCode dd(const std::string& text) {
  return deserialize(text, Language::Python);
}

constexpr Language kTargets[] = {Language::Cpp, Language::Java,
                                 Language::CSharp, Language::Python};

// battery shared by the inverse and round-trip suites
const std::vector<syntax::SourceFunction>& battery() {
  static const std::vector<syntax::SourceFunction> fns = {
      sf(Language::Cpp, R"(
int lcm_sum(int a, int b, vector<int>& nums) {
  int total = 0;
  for (int v : nums) {
    if (v % 2 == 0 && v > a) {
      total += v;
    } else if (!(v == b)) {
      total -= pow(v, 2);
    } else {
      continue;
    }
  }
  int i = 0;
  while (i < 4) {
    cout << nums[i] * 2 << endl;
    i++;
  }
  return total >= 0 ? total : -total;
}
)"),
      sf(Language::Python, R"(
def word_tally(text: str, limit: int):
    counts: dict = {}
    words: list = []
    total = 0
    for ch in text:
        if ch.islower():
            total += 1
        elif ch == " ":
            words.append(ch)
        else:
            continue
    i = 0
    while i < len(words):
        key = words[i]
        counts[key] = total // (i + 1)
        total = total ** 2
        i += 1
    return counts if total > limit else None
)"),
      sf(Language::Java, R"(
import java.util.*;
public class T {
    static Random rand = new Random();
    public static int pick(int lo, int hi, Vector<Integer> pool) {
        int span = hi - lo;
        int idx = rand.nextInt(span) + lo;
        if (idx >= pool.size()) {
            idx = pool.size() - 1;
        }
        String label = "pick";
        System.out.println(label);
        return pool.get(idx);
    }
}
)"),
      sf(Language::CSharp, R"(
using System;
using System.Collections.Generic;
public class T {
    public static int tally(List<int> nums) {
        Dictionary<int, int> seen = new Dictionary<int, int>();
        int best = 0;
        foreach (var v in nums) {
            int folded = (int)(v / 3);
            if (seen.ContainsKey(folded)) {
                best = best + 1;
            } else {
                seen[folded] = 1;
            }
        }
        Console.WriteLine("done");
        return best;
    }
}
)"),
      sf(Language::Python, R"(
def outer(n: int):
    def shift(k):
        return k * 2
    acc = 0
    for i in range(n):
        acc += shift(i)
    return acc
)"),
      sf(Language::Cpp, R"(
int scan(string s, map<string, int>& seen) {
  int hits = 0;
  for (char c : s) {
    string key = tolower(c) + s;
    if (key.length() > 2 || seen.count(key) != 0) {
      hits = hits * 2 % 1000000007;
    }
  }
  return hits;
}
)"),
  };
  return fns;
}

}  // namespace

TEST_CASE("decompile: shared builtins take per-language surface forms") {
  DistilledCode d = dd(
      "func {show} ( param string {msg} , param int {x} , param int {y} ) "
      "{ call println ( {msg} ) ; return pow ( {x} , {y} ) ; }");
  std::string cs = decompile(d, Language::CSharp, reg());
  CHECK(cs.find("Console.WriteLine(msg);") != std::string::npos);
  std::string java = decompile(d, Language::Java, reg());
  CHECK(java.find("System.out.println(msg);") != std::string::npos);
  CHECK(java.find("Math.pow(x,y)") != std::string::npos);
  std::string py = decompile(d, Language::Python, reg());
  CHECK(py.find("print(msg)") != std::string::npos);
  CHECK(py.find("x**y") != std::string::npos);
  std::string cpp = decompile(d, Language::Cpp, reg());
  CHECK(cpp.find("cout<<msg<<endl") != std::string::npos);
}

TEST_CASE("decompile: morphemes with no target surface throw") {
  DistilledCode dq = dd("func {f} ( ) { decl deque<> {d} ; }");
  CHECK_THROWS_AS(decompile(dq, Language::CSharp, reg()),
                  UnrenderableMorpheme);
  try {
    decompile(dq, Language::CSharp, reg());
  } catch (const UnrenderableMorpheme& e) {
    CHECK(e.morpheme == "deque<>");
  }
  CHECK(decompile(dq, Language::Java, reg()).find("Deque") !=
        std::string::npos);
  CHECK(decompile(dq, Language::Python, reg()).find("d = deque()") !=
        std::string::npos);

  DistilledCode dc = dd("func {f} ( ) { decl char {c} = \"x\" ; }");
  CHECK_THROWS_AS(decompile(dc, Language::Python, reg()),
                  UnrenderableMorpheme);
  CHECK(decompile(dc, Language::Cpp, reg()).find("char c = 'x';") !=
        std::string::npos);
}

TEST_CASE("decompile: containers concretize and get constructed") {
  DistilledCode d = dd("func {f} ( ) { decl map<> {seen} ; decl vector<> {v} ; }");
  std::string java = decompile(d, Language::Java, reg());
  CHECK(java.find("HashMap<Integer, Integer> seen = "
                  "new HashMap<Integer, Integer>();") != std::string::npos);
  CHECK(java.find("Vector<Integer> v = new Vector<Integer>();") !=
        std::string::npos);
  std::string cs = decompile(d, Language::CSharp, reg());
  CHECK(cs.find("Dictionary<int, int> seen = new Dictionary<int, int>();") !=
        std::string::npos);
  std::string cpp = decompile(d, Language::Cpp, reg());
  CHECK(cpp.find("std::map<int, int> seen;") != std::string::npos);
  std::string py = decompile(d, Language::Python, reg());
  CHECK(py.find("seen = {}") != std::string::npos);
  CHECK(py.find("v = []") != std::string::npos);
}

TEST_CASE("decompile: wrappers give each target a parseable unit") {
  DistilledCode d = dd(
      "func {f} ( param int {n} ) "
      "{ decl int {r} = rand ( 0 , {n} ) ; return {r} ; }");
  for (Language t : kTargets) {
    std::string out = decompile(d, t, reg());
    CAPTURE(to_string(t));
    CAPTURE(out);
    auto tree = syntax::parse(out, t);
    CHECK_FALSE(tree.has_error);
    CHECK(syntax::extract_functions(tree).size() == 1);
  }
  CHECK(decompile(d, Language::Java, reg())
            .find("static Random rand = new Random();") != std::string::npos);
}

TEST_CASE("decompile: names restyle per target") {
  // bags are canonically sorted, so words come back in alphabetical order
  DistilledCode d = dd(
      "func {count word} ( param int {len max} ) { return {len max} ; }");
  CHECK(decompile(d, Language::Java, reg()).find("countWord(int lenMax)") !=
        std::string::npos);
  CHECK(decompile(d, Language::Python, reg())
            .find("count_word(len_max: int)") != std::string::npos);
}

TEST_CASE("render_name: styling, digits, and keyword collisions") {
  auto java = RenderContext::for_target(Language::Java);
  auto py = RenderContext::for_target(Language::Python);
  CHECK(render_name({"lcm", "sum"}, java) == "lcmSum");
  CHECK(render_name({"lcm", "sum"}, py) == "lcm_sum");
  CHECK(render_name({"2", "sum"}, py) == "_2_sum");
  CHECK(render_name({"class"}, py) == "class_");
  CHECK(render_name({"new"}, java) == "new_");
  CHECK(render_name({}, py) == "_");
}

TEST_CASE("parse_distilled inverts reassemble") {
  for (const auto& fn : battery()) {
    DistilledCode d = distill::canonicalize(distill::distill(fn, reg()));
    CAPTURE(distill::serialize(d));
    DistilledCode back = distill::reassemble(parse_distilled(d));
    back.source_language = d.source_language;
    CHECK(back.tokens == d.tokens);
  }
}

TEST_CASE("distilled code survives a decompile + re-distill round trip") {
  for (const auto& fn : battery()) {
    for (Language t : kTargets) {
      RoundTripReport rt = round_trip_check(fn, t, reg());
      CAPTURE(to_string(fn.language));
      CAPTURE(to_string(t));
      CAPTURE(rt.cause);
      CAPTURE(rt.scaffold);
      CAPTURE(rt.before);
      CAPTURE(rt.after);
      // the only legal failure is a morpheme this target cannot spell
      if (!rt.pass) {
        CHECK(rt.cause.find("surface form") != std::string::npos);
        continue;
      }
      CHECK(rt.before == rt.after);
    }
  }
}

TEST_CASE("round_trip_check: honest causes and fuzzy flag") {
  auto char_fn = sf(Language::Cpp, "char f() { char c = 'x'; return c; }");
  RoundTripReport rt = round_trip_check(char_fn, Language::Python, reg());
  CHECK_FALSE(rt.pass);
  CHECK(rt.cause.find("char") != std::string::npos);

  auto nested = sf(Language::Python,
                   "def g(n):\n    def h(k):\n        return k\n    return h(n)\n");
  rt = round_trip_check(nested, Language::Java, reg());
  CHECK_FALSE(rt.pass);
  CHECK(rt.cause.find("nested function") != std::string::npos);

  auto pure = sf(Language::Cpp, "int f(int a, int b) { return pow(a, b); }");
  rt = round_trip_check(pure, Language::Java, reg());
  CHECK(rt.pass);
  CHECK_FALSE(rt.fuzzy);

  auto fuzzy = sf(Language::Cpp, "int f(int a) { return helper(a); }");
  rt = round_trip_check(fuzzy, Language::Java, reg());
  CHECK(rt.pass);
  CHECK(rt.fuzzy);
}

TEST_CASE("decompile: precedence makes implicit grouping explicit") {
  DistilledCode d = dd(
      "func {f} ( param int {a} , param int {b} ) "
      "{ return ! ( {a} == {b} ) ; }");
  CHECK(decompile(d, Language::Cpp, reg()).find("!(a == b)") !=
        std::string::npos);
  CHECK(decompile(d, Language::Python, reg()).find("not (a == b)") !=
        std::string::npos);

  DistilledCode t = dd(
      "func {f} ( param int {a} ) { return {a} > 0 ? {a} : - {a} ; }");
  CHECK(decompile(t, Language::Java, reg()).find("a > 0 ? a : -a") !=
        std::string::npos);
  CHECK(decompile(t, Language::Python, reg()).find("a if a > 0 else -a") !=
        std::string::npos);
}

TEST_CASE("decompile: floor division renders per target") {
  DistilledCode d = dd(
      "func {f} ( param int {a} , param int {b} ) "
      "{ return int ( {a} / {b} ) ; }");
  CHECK(decompile(d, Language::Java, reg()).find("(int)(a / b)") !=
        std::string::npos);
  CHECK(decompile(d, Language::CSharp, reg()).find("(int)(a / b)") !=
        std::string::npos);
  // surface patterns keep the upstream table's spacing
  CHECK(decompile(d, Language::Python, reg()).find("a//b") !=
        std::string::npos);
  CHECK(decompile(d, Language::Cpp, reg()).find("int(a/b)") !=
        std::string::npos);
}

TEST_CASE("decompile rejects malformed distilled streams") {
  CHECK_THROWS_AS(decompile(dd("func {f} ( ) { call ; }"), Language::Cpp,
                            reg()),
                  MalformedDistilled);
  CHECK_THROWS_AS(decompile(dd("func {f} ( ) { } return 1 ;"), Language::Cpp,
                            reg()),
                  MalformedDistilled);
  CHECK_THROWS_AS(decompile(dd("func {f} ( param int {a} { return {a} ; }"),
                            Language::Cpp, reg()),
                  MalformedDistilled);
}

TEST_CASE("decompile is deterministic") {
  for (const auto& fn : battery()) {
    DistilledCode d = distill::distill(fn, reg());
    for (Language t : kTargets) {
      std::string a, b;
      try {
        a = decompile(d, t, reg());
        b = decompile(d, t, reg());
      } catch (const UnrenderableMorpheme&) {
        continue;
      }
      CHECK(a == b);
    }
  }
}
