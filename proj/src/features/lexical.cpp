#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcsmile/error.hpp"
#include "bcsmile/features/features.hpp"

namespace bcsmile::features {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

const Lexicons& default_lexicons() {
  // Mirrors data/lexicons.json.
  static const Lexicons lex{
      {"negations",
       {"no", "not", "never", "none", "nothing", "nobody", "neither", "nor", "don't", "didn't", "can't", "won't",
        "isn't", "wasn't"}},
      {"comparisons",
       {"greater", "best", "after", "better", "worse", "worst", "more", "less", "than", "bigger", "before", "most"}},
      {"interrogatives", {"how", "when", "what", "why", "where", "who", "which", "whom", "whose"}},
      {"positive_emotion", {"love", "happy", "good", "nice", "great", "glad", "fun", "laugh", "hope", "proud"}},
      {"negative_emotion", {"sad", "hurt", "bad", "angry", "afraid", "worried", "cry", "lonely", "pain", "hate"}},
      {"focus_past", {"was", "were", "had", "did", "used", "remember", "ago", "yesterday"}},
      {"focus_present", {"is", "am", "are", "now", "today", "currently"}},
      {"focus_future", {"will", "gonna", "going", "tomorrow", "soon", "someday", "future"}},
  };
  return lex;
}

Lexicons parse_lexicons(const std::string& json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(std::string("lexicon file: ") + e.what());
  }
  if (!doc.is_object()) throw Error("lexicon file must be a JSON object");
  Lexicons lex;
  for (std::string_view cat : kLexicalCategories) {
    const std::string key(cat);
    if (!doc.contains(key)) throw Error("lexicon file is missing category '" + key + "'");
    auto& words = lex[key];
    for (const auto& w : doc.at(key)) {
      if (!w.is_string()) throw Error("lexicon category '" + key + "' must list strings");
      words.insert(lower(w.get<std::string>()));
    }
  }
  return lex;
}

Lexicons load_lexicons(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open lexicon file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_lexicons(ss.str());
}

void save_lexicons(const Lexicons& lexicons, const std::filesystem::path& path) {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [cat, words] : lexicons) doc[cat] = std::vector<std::string>(words.begin(), words.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

LexicalFeatures count_lexical(std::span<const std::string> tokens, const Lexicons& lexicons) {
  std::array<const std::set<std::string>*, 8> sets{};
  for (std::size_t c = 0; c < kLexicalCategories.size(); ++c) {
    auto it = lexicons.find(std::string(kLexicalCategories[c]));
    if (it == lexicons.end()) throw Error("lexicon is missing category '" + std::string(kLexicalCategories[c]) + "'");
    sets[c] = &it->second;
  }
  LexicalFeatures out;
  out.word_count = static_cast<int>(tokens.size());
  for (const auto& t : tokens) {
    const std::string w = lower(t);
    for (std::size_t c = 0; c < sets.size(); ++c) {
      if (sets[c]->count(w)) ++out.categories[c];
    }
  }
  return out;
}

}  // namespace bcsmile::features
