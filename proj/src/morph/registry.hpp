#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lang.hpp"
#include "morph/pattern.hpp"

namespace distilc::morph {

enum class Category { Operator, DataType, Builtin, Control };

std::string_view to_string(Category c);
std::optional<Category> category_from_name(std::string_view name);

struct RegistryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MalformedRow : RegistryError {
  using RegistryError::RegistryError;
};
struct DuplicateRule : RegistryError {
  using RegistryError::RegistryError;
};
struct SlotMismatch : RegistryError {
  using RegistryError::RegistryError;
};

struct MorphemeRule {
  Language language;
  Category category;
  Pattern surface;
  Pattern unified;
  int arity = 0;

  std::string surface_shape() const { return surface.shape(); }
  std::string unified_shape() const { return unified.shape(); }
};

// The unification tables as immutable, indexed data. Loaded once; safe to
// share across threads afterwards.
class MorphemeRegistry {
 public:
  static MorphemeRegistry load_file(const std::filesystem::path& path);
  static MorphemeRegistry load_text(std::string_view text);

  // Registry compiled from the embedded default table (same content as
  // data/morphemes.tsv).
  static const MorphemeRegistry& builtin();
  static std::string_view builtin_text();

  const std::vector<MorphemeRule>& rules() const { return rules_; }

  const MorphemeRule* find_forward(Language lang, Category cat,
                                   std::string_view surface_shape) const;
  const MorphemeRule* find_reverse(std::string_view unified_shape,
                                   Language lang) const;

  std::optional<std::string> lookup(Language lang, Category cat,
                                    std::string_view surface_shape,
                                    const SlotBindings& args) const;
  std::optional<std::string> reverse_lookup(std::string_view unified_shape,
                                            Language target,
                                            const SlotBindings& args) const;

  // All rules for one language, in file order.
  std::vector<const MorphemeRule*> rules_for(Language lang) const;

 private:
  void add_rule(MorphemeRule rule);

  std::vector<MorphemeRule> rules_;
  std::map<std::tuple<int, int, std::string>, size_t> forward_;
  std::map<std::pair<std::string, int>, size_t> reverse_;
};

}  // namespace distilc::morph
