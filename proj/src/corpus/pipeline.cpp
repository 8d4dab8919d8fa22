#include "pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "distill/distilled.hpp"
#include "distill/lower.hpp"
#include "json.hpp"
#include "syntax/parser.hpp"

namespace distilc::corpus {

namespace fs = std::filesystem;
using distill::DistilledCode;
using distill::DToken;
using distill::TokKind;
using nlohmann::json;
using syntax::SourceFunction;

constexpr std::string_view kSeparator = "<sep>";

uint64_t fnv1a(std::string_view bytes) {
  uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string record_id(const SourceFunction& fn) {
  std::string normalized = std::string(to_string(fn.language));
  for (const auto& t : syntax::tokenize(fn)) {
    normalized.push_back('\x1f');
    normalized += t.text;
  }
  uint64_t hash = fnv1a(normalized);
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

std::string split_for_id(std::string_view id) {
  uint64_t bucket = fnv1a(id) % 100;
  if (bucket < 96) return "train";
  if (bucket < 98) return "valid";
  return "test";
}

size_t EmitStats::skipped() const {
  size_t total = 0;
  for (const auto& [cause, count] : skips) total += count;
  return total;
}

std::vector<SourceFunction> ingest(const std::vector<std::string>& roots,
                                   IngestStats* stats) {
  IngestStats local;
  IngestStats& st = stats ? *stats : local;
  std::vector<SourceFunction> out;
  std::set<std::string> seen_ids;

  for (const std::string& root : roots) {
    std::error_code ec;
    std::vector<fs::path> files;
    if (fs::is_regular_file(root, ec)) {
      files.push_back(root);
    } else if (fs::is_directory(root, ec)) {
      for (fs::recursive_directory_iterator it(root, ec), end;
           !ec && it != end; it.increment(ec)) {
        if (it->is_regular_file()) files.push_back(it->path());
      }
    } else {
      st.io_errors.push_back(root + ": not a readable file or directory");
      continue;
    }
    if (ec) {
      st.io_errors.push_back(root + ": " + ec.message());
      continue;
    }
    std::sort(files.begin(), files.end());

    for (const fs::path& path : files) {
      auto lang = language_for_path(path.string());
      if (!lang) continue;
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        st.io_errors.push_back(path.string() + ": unreadable");
        continue;
      }
      std::ostringstream buf;
      buf << in.rdbuf();
      ++st.files_scanned;

      syntax::SyntaxTree tree = syntax::parse(buf.str(), *lang);
      if (tree.has_error) {
        ++st.files_unparseable;
        continue;
      }
      for (SourceFunction& fn : syntax::extract_functions(tree)) {
        fn.origin_path = path.string();
        SourceFunction clean = syntax::strip_noncode(fn);
        std::string id = record_id(clean);
        if (!seen_ids.insert(id).second) {
          ++st.duplicates_skipped;
          continue;
        }
        ++st.functions_extracted;
        out.push_back(std::move(clean));
      }
    }
  }
  return out;
}

void flatten_distilled(const DistilledCode& code,
                       std::vector<std::string>& tokens,
                       std::vector<bool>& is_bow) {
  for (const DToken& t : code.tokens) {
    if (t.kind == TokKind::Bag) {
      for (const std::string& w : t.words) {
        tokens.push_back(w);
        is_bow.push_back(true);
      }
    } else {
      tokens.push_back(t.text);
      is_bow.push_back(false);
    }
  }
}

namespace {

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::vector<std::string> source_token_texts(const SourceFunction& fn) {
  std::vector<std::string> out;
  for (const auto& t : syntax::tokenize(fn)) out.push_back(t.text);
  return out;
}

// approximate lexical token count of raw source text: word runs, quoted
// strings, and single symbol characters
size_t lexical_count(const std::string& text) {
  size_t count = 0;
  size_t i = 0;
  auto word_char = [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    ++count;
    if (word_char(c)) {
      while (i < text.size() && word_char(text[i])) ++i;
    } else if (c == '"' || c == '\'') {
      ++i;
      while (i < text.size() && text[i] != c) {
        if (text[i] == '\\') ++i;
        ++i;
      }
      if (i < text.size()) ++i;
    } else {
      ++i;
    }
  }
  return count;
}

// runs fn over each record, counting skips by cause
template <typename PerRecord>
EmitStats emit_records(const std::vector<SourceFunction>& functions,
                       std::ostream& out, PerRecord&& per_record) {
  EmitStats stats;
  for (size_t i = 0; i < functions.size(); ++i) {
    try {
      json record = per_record(functions[i], i);
      out << record.dump() << '\n';
      ++stats.records;
    } catch (const std::exception& e) {
      ++stats.skips[e.what()];
    }
  }
  return stats;
}

}  // namespace

EmitStats emit_mpg(const std::vector<SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry,
                   const noise::NoiseSpec& spec, std::ostream& out) {
  spec.validate();
  return emit_records(
      functions, out, [&](const SourceFunction& fn, size_t index) {
        DistilledCode code =
            distill::canonicalize(distill::distill(fn, registry));
        // only bag-order randomization keeps the field deserializable, so
        // the token-level ratios do not apply here
        noise::SplitMix64 rng(noise::mix_seed(spec.seed, index));
        for (DToken& t : code.tokens) {
          if (t.kind != TokKind::Bag) continue;
          if (rng.unit() >= spec.bow_permute_ratio) continue;
          for (size_t i = t.words.size(); i > 1; --i)
            std::swap(t.words[i - 1], t.words[rng.below(i)]);
        }
        std::string id = record_id(fn);
        json record;
        record["distilled"] = distill::serialize(code);
        record["id"] = id;
        record["lang_token"] = language_switch_token(fn.language);
        record["split"] = split_for_id(id);
        record["target"] = fn.body;
        return record;
      });
}

EmitStats emit_mlm(const std::vector<SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry, double mask_ratio,
                   uint64_t seed, std::ostream& out) {
  if (!(mask_ratio >= 0.0 && mask_ratio <= 1.0))
    throw std::invalid_argument("mask_ratio must be a fraction in [0, 1]");
  return emit_records(
      functions, out, [&](const SourceFunction& fn, size_t index) {
        DistilledCode code =
            distill::canonicalize(distill::distill(fn, registry));
        std::vector<std::string> tokens;
        std::vector<bool> is_bow;
        flatten_distilled(code, tokens, is_bow);
        tokens.emplace_back(kSeparator);
        for (std::string& t : source_token_texts(fn))
          tokens.push_back(std::move(t));

        noise::SplitMix64 rng(noise::mix_seed(seed, index));
        std::vector<size_t> positions;
        std::vector<std::string> answers;
        for (size_t i = 0; i < tokens.size(); ++i) {
          if (tokens[i] == kSeparator) continue;
          if (rng.unit() >= mask_ratio) continue;
          positions.push_back(i);
          answers.push_back(tokens[i]);
          tokens[i] = std::string(noise::kMaskToken);
        }
        std::string id = record_id(fn);
        json record;
        record["answers"] = answers;
        record["id"] = id;
        record["input"] = join(tokens);
        record["positions"] = positions;
        record["split"] = split_for_id(id);
        return record;
      });
}

EmitStats emit_dae(const std::vector<SourceFunction>& functions,
                   const morph::MorphemeRegistry& registry,
                   const noise::NoiseSpec& spec, std::ostream& out) {
  spec.validate();
  return emit_records(
      functions, out, [&](const SourceFunction& fn, size_t index) {
        DistilledCode code =
            distill::canonicalize(distill::distill(fn, registry));
        std::vector<std::string> dtokens;
        std::vector<bool> dbow;
        flatten_distilled(code, dtokens, dbow);
        std::vector<std::string> stokens = source_token_texts(fn);
        std::vector<bool> sbow(stokens.size(), false);

        noise::NoiseSpec dspec = spec;
        dspec.seed = noise::mix_seed(spec.seed, 2 * index);
        noise::NoiseSpec sspec = spec;
        sspec.seed = noise::mix_seed(spec.seed, 2 * index + 1);
        std::vector<std::string> din = noise::corrupt_dae(dtokens, dbow, dspec);
        std::vector<std::string> sin = noise::corrupt_dae(stokens, sbow, sspec);

        auto combine = [](const std::vector<std::string>& d,
                          const std::vector<std::string>& s) {
          std::vector<std::string> all = d;
          all.emplace_back(kSeparator);
          all.insert(all.end(), s.begin(), s.end());
          return join(all);
        };
        std::string id = record_id(fn);
        json record;
        record["id"] = id;
        record["input"] = combine(din, sin);
        record["split"] = split_for_id(id);
        record["target"] = combine(dtokens, stokens);
        return record;
      });
}

MalformedRecord::MalformedRecord(size_t line_no, const std::string& why)
    : std::runtime_error("record at line " + std::to_string(line_no) + ": " +
                         why),
      line(line_no) {}

CorpusStats stats(std::istream& pair_file) {
  CorpusStats st;
  double ratio_sum = 0.0;
  std::string line;
  size_t line_no = 0;
  while (std::getline(pair_file, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object())
      throw MalformedRecord(line_no, "not a JSON object");
    for (const char* key : {"distilled", "id", "lang_token", "split", "target"})
      if (!record.contains(key) || !record[key].is_string())
        throw MalformedRecord(line_no,
                              std::string("missing string field '") + key +
                                  "'");
    std::string lang_token = record["lang_token"].get<std::string>();
    if (lang_token.size() < 3 || lang_token.front() != '<' ||
        lang_token.back() != '>')
      throw MalformedRecord(line_no, "bad lang_token");
    std::string lang = lang_token.substr(1, lang_token.size() - 2);
    auto language = language_from_name(lang);
    if (!language) throw MalformedRecord(line_no, "unknown language " + lang);

    std::string distilled = record["distilled"].get<std::string>();
    DistilledCode code;
    try {
      code = distill::deserialize(distilled, *language);
    } catch (const std::exception& e) {
      throw MalformedRecord(line_no, e.what());
    }
    std::string why;
    if (!distill::well_formed(code, &why)) throw MalformedRecord(line_no, why);

    ++st.records;
    ++st.functions_per_language[lang];
    ++st.split_counts[record["split"].get<std::string>()];

    std::vector<std::string> dtokens;
    std::vector<bool> dbow;
    flatten_distilled(code, dtokens, dbow);
    size_t dcount = dtokens.size();
    size_t tcount = lexical_count(record["target"].get<std::string>());
    st.distilled_tokens += dcount;
    st.target_tokens += tcount;
    double ratio = tcount ? static_cast<double>(dcount) / tcount : 0.0;
    ratio_sum += ratio;
    if (st.records == 1) {
      st.min_length_ratio = st.max_length_ratio = ratio;
    } else {
      st.min_length_ratio = std::min(st.min_length_ratio, ratio);
      st.max_length_ratio = std::max(st.max_length_ratio, ratio);
    }

    // call sites: builtin keyword before ( is a registry hit, a bag before
    // ( is a fuzzy fallback; the name in a func header is neither
    bool in_header = false;
    const auto& toks = code.tokens;
    for (size_t i = 0; i + 1 < toks.size(); ++i) {
      if (toks[i].kind == TokKind::Keyword) {
        if (toks[i].text == "func") in_header = true;
        if (toks[i].text == "(") in_header = false;
      }
      if (toks[i + 1].kind != TokKind::Keyword || toks[i + 1].text != "(")
        continue;
      if (toks[i].kind == TokKind::Keyword &&
          distill::is_unified_builtin(toks[i].text))
        ++st.unified_call_sites;
      else if (toks[i].kind == TokKind::Bag && !in_header)
        ++st.fuzzy_call_sites;
    }
  }
  size_t sites = st.unified_call_sites + st.fuzzy_call_sites;
  st.registry_hit_rate =
      sites ? static_cast<double>(st.unified_call_sites) / sites : 1.0;
  if (st.records)
    st.mean_length_ratio = ratio_sum / static_cast<double>(st.records);
  return st;
}

}  // namespace distilc::corpus
