#include "registry.hpp"

#include <fstream>
#include <sstream>

namespace distilc::morph {
namespace {

constexpr std::string_view kDefaultRegistry =
#include "registry_data.inc"
    ;

constexpr const char* kCategoryNames[] = {"operator", "data_type", "builtin",
                                          "control"};

std::string slot_list(const std::set<char>& s) {
  std::string out;
  for (char c : s) {
    if (!out.empty()) out += ",";
    out += c;
  }
  return out;
}

}  // namespace

std::string_view to_string(Category c) {
  return kCategoryNames[static_cast<int>(c)];
}

std::optional<Category> category_from_name(std::string_view name) {
  for (int i = 0; i < 4; ++i)
    if (name == kCategoryNames[i]) return static_cast<Category>(i);
  return std::nullopt;
}

void MorphemeRegistry::add_rule(MorphemeRule rule) {
  size_t idx = rules_.size();
  std::string fshape = rule.surface_shape();
  auto fkey = std::make_tuple(static_cast<int>(rule.language),
                              static_cast<int>(rule.category), fshape);
  if (!forward_.emplace(fkey, idx).second)
    throw DuplicateRule("duplicate rule for (" +
                        std::string(distilc::to_string(rule.language)) + ", " +
                        std::string(to_string(rule.category)) + ", \"" +
                        fshape + "\")");
  auto rkey =
      std::make_pair(rule.unified_shape(), static_cast<int>(rule.language));
  if (!reverse_.emplace(rkey, idx).second)
    throw DuplicateRule("duplicate unified form \"" + rule.unified_shape() +
                        "\" for " +
                        std::string(distilc::to_string(rule.language)));
  // Pruned C++ trees carry bare names, so index the qualifier-free shape too.
  if (rule.language == Language::Cpp && fshape.rfind("std::", 0) == 0) {
    forward_.emplace(std::make_tuple(static_cast<int>(rule.language),
                                     static_cast<int>(rule.category),
                                     fshape.substr(5)),
                     idx);
  }
  rules_.push_back(std::move(rule));
}

MorphemeRegistry MorphemeRegistry::load_text(std::string_view text) {
  MorphemeRegistry reg;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t pos = 0;
    while (true) {
      size_t tab = line.find('\t', pos);
      fields.push_back(line.substr(pos, tab - pos));
      if (tab == std::string::npos) break;
      pos = tab + 1;
    }
    if (fields.size() != 6)
      throw MalformedRow("line " + std::to_string(lineno) + ": expected 6 " +
                         "tab-separated fields, got " +
                         std::to_string(fields.size()));
    auto cat = category_from_name(fields[0]);
    if (!cat)
      throw MalformedRow("line " + std::to_string(lineno) +
                         ": unknown category \"" + fields[0] + "\"");
    if (fields[1].empty() || fields[1] == "-")
      throw MalformedRow("line " + std::to_string(lineno) +
                         ": unified form is required");
    Pattern unified = parse_pattern(fields[1]);
    auto uslots = unified.slots();
    static constexpr Language kOrder[] = {Language::Cpp, Language::Java,
                                          Language::CSharp, Language::Python};
    for (int li = 0; li < 4; ++li) {
      const std::string& cell = fields[2 + li];
      if (cell == "-") continue;
      if (cell.empty())
        throw MalformedRow("line " + std::to_string(lineno) +
                           ": empty cell; use '-' for absent");
      MorphemeRule rule;
      rule.language = kOrder[li];
      rule.category = *cat;
      rule.surface = parse_pattern(cell);
      rule.unified = unified;
      rule.arity = static_cast<int>(uslots.size());
      auto sslots = rule.surface.slots();
      if (sslots != uslots)
        throw SlotMismatch("line " + std::to_string(lineno) + ": surface \"" +
                           cell + "\" binds slots {" + slot_list(sslots) +
                           "} but unified \"" + fields[1] + "\" binds {" +
                           slot_list(uslots) + "}");
      reg.add_rule(std::move(rule));
    }
  }
  return reg;
}

MorphemeRegistry MorphemeRegistry::load_file(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw RegistryError("cannot open registry file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_text(buf.str());
}

const MorphemeRegistry& MorphemeRegistry::builtin() {
  static const MorphemeRegistry reg = load_text(kDefaultRegistry);
  return reg;
}

std::string_view MorphemeRegistry::builtin_text() { return kDefaultRegistry; }

const MorphemeRule* MorphemeRegistry::find_forward(
    Language lang, Category cat, std::string_view surface_shape) const {
  auto key = std::make_tuple(static_cast<int>(lang), static_cast<int>(cat),
                             normalize_shape(surface_shape));
  auto it = forward_.find(key);
  return it == forward_.end() ? nullptr : &rules_[it->second];
}

const MorphemeRule* MorphemeRegistry::find_reverse(
    std::string_view unified_shape, Language lang) const {
  auto key =
      std::make_pair(normalize_shape(unified_shape), static_cast<int>(lang));
  auto it = reverse_.find(key);
  return it == reverse_.end() ? nullptr : &rules_[it->second];
}

std::optional<std::string> MorphemeRegistry::lookup(
    Language lang, Category cat, std::string_view surface_shape,
    const SlotBindings& args) const {
  const MorphemeRule* rule = find_forward(lang, cat, surface_shape);
  if (!rule) return std::nullopt;
  return rule->unified.instantiate(args);
}

std::optional<std::string> MorphemeRegistry::reverse_lookup(
    std::string_view unified_shape, Language target,
    const SlotBindings& args) const {
  const MorphemeRule* rule = find_reverse(unified_shape, target);
  if (!rule) return std::nullopt;
  return rule->surface.instantiate(args);
}

std::vector<const MorphemeRule*> MorphemeRegistry::rules_for(
    Language lang) const {
  std::vector<const MorphemeRule*> out;
  for (const auto& r : rules_)
    if (r.language == lang) out.push_back(&r);
  return out;
}

}  // namespace distilc::morph
