#include "vsm/textpipe.hpp"

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "vsm/error.hpp"

namespace vsm {
namespace {

constexpr UChar32 kTatweel = 0x0640;
constexpr UChar32 kAlef = 0x0627;
// madda, hamza above, hamza below, wasla
constexpr std::array<UChar32, 4> kAlefVariants{0x0622, 0x0623, 0x0625, 0x0671};

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, c);
  out.append(buf, static_cast<std::size_t>(len));
}

// Decodes `text` and calls fn(codepoint, byte_offset, byte_length); invalid
// sequences come through as a negative codepoint.
template <typename Fn>
void for_each_codepoint(std::string_view text, Fn&& fn) {
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto length = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    fn(c, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
  }
}

constexpr std::string_view kArabicStopWords[] = {
    "من",   "في",   "إلى",  "الى",  "على",  "عن",   "مع",   "هذا",
    "هذه",  "ذلك",  "تلك",  "التي", "الذي", "الذين", "و",   "ثم",
    "أو",   "او",   "أن",   "ان",   "إن",   "كان",  "كانت", "قد",
    "لا",   "ما",   "لم",   "لن",   "هو",   "هي",   "هم",   "كل",
    "بين",  "حتى",  "إذا",  "اذا",  "عند",  "بعد",  "قبل",  "كما",
    "أي",   "منذ",  "أيضا", "غير",  "لقد",  "ذات",  "التى", "يا",
};

constexpr std::string_view kEnglishStopWords[] = {
    "a",     "about", "an",    "and",   "are",   "as",    "at",    "be",
    "been",  "but",   "by",    "for",   "from",  "had",   "has",   "have",
    "he",    "her",   "his",   "i",     "if",    "in",    "into",  "is",
    "it",    "its",   "of",    "on",    "or",    "our",   "she",   "so",
    "than",  "that",  "the",   "their", "them",  "then",  "there", "these",
    "they",  "this",  "those", "to",    "was",   "we",    "were",  "what",
    "when",  "which", "who",   "will",  "with",  "would", "you",   "your",
};

}  // namespace

bool is_valid_utf8(std::string_view text) noexcept {
  bool ok = true;
  for_each_codepoint(text, [&](UChar32 c, std::size_t, std::size_t) { ok = ok && c >= 0; });
  return ok;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t run_start = 0;
  std::size_t run_end = 0;
  bool in_run = false;
  auto flush = [&] {
    if (in_run) {
      tokens.push_back(
          {std::string(text.substr(run_start, run_end - run_start)), tokens.size()});
      in_run = false;
    }
  };
  for_each_codepoint(text, [&](UChar32 c, std::size_t offset, std::size_t len) {
    if (c >= 0 && is_word_char(c)) {
      if (!in_run) {
        in_run = true;
        run_start = offset;
      }
      run_end = offset + len;
    } else {
      flush();
    }
  });
  flush();
  return tokens;
}

std::string normalize(std::string_view surface, const NormalizerConfig& cfg) {
  if (cfg == NormalizerConfig{}) return std::string(surface);
  std::string out;
  out.reserve(surface.size());
  for_each_codepoint(surface, [&](UChar32 c, std::size_t offset, std::size_t len) {
    if (c < 0) {
      out.append(surface.substr(offset, len));
      return;
    }
    if (cfg.strip_diacritics && u_charType(c) == U_NON_SPACING_MARK) return;
    if (cfg.strip_tatweel && c == kTatweel) return;
    if (cfg.unify_alef_forms &&
        std::find(kAlefVariants.begin(), kAlefVariants.end(), c) != kAlefVariants.end()) {
      c = kAlef;
    }
    if (cfg.case_fold) c = u_foldCase(c, U_FOLD_CASE_DEFAULT);
    append_utf8(out, c);
  });
  return out;
}

Token normalize(const Token& token, const NormalizerConfig& cfg) {
  return {normalize(token.surface, cfg), token.position};
}

StopList StopList::from_words(std::span<const std::string> words, std::string source,
                              const NormalizerConfig& cfg) {
  StopList list;
  list.source_ = std::move(source);
  for (const auto& w : words) {
    auto n = normalize(w, cfg);
    if (!n.empty()) list.words_.insert(std::move(n));
  }
  return list;
}

StopList StopList::from_words(std::initializer_list<std::string_view> words,
                              std::string source, const NormalizerConfig& cfg) {
  std::vector<std::string> owned(words.begin(), words.end());
  return from_words(owned, std::move(source), cfg);
}

StopList StopList::from_file(const std::filesystem::path& path,
                             const NormalizerConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read stop list " + path.string());
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    words.push_back(line.substr(first, last - first + 1));
  }
  auto list = from_words(words, path.string(), cfg);
  if (list.empty()) {
    throw Error(ErrorCode::format, "stop list " + path.string() + " contains no words");
  }
  return list;
}

StopList StopList::builtin(std::string_view name, const NormalizerConfig& cfg) {
  std::vector<std::string> words;
  std::string_view rest = name;
  while (true) {
    const auto plus = rest.find('+');
    const auto part = rest.substr(0, plus);
    if (part == "arabic") {
      words.insert(words.end(), std::begin(kArabicStopWords), std::end(kArabicStopWords));
    } else if (part == "english") {
      words.insert(words.end(), std::begin(kEnglishStopWords), std::end(kEnglishStopWords));
    } else if (part != "none") {
      throw Error(ErrorCode::bad_parameter,
                  "unknown built-in stop list '" + std::string(part) + "'");
    }
    if (plus == std::string_view::npos) break;
    rest.remove_prefix(plus + 1);
  }
  return from_words(words, std::string(name), cfg);
}

StopList StopList::resolve(std::string_view name_or_path, const NormalizerConfig& cfg) {
  try {
    return builtin(name_or_path, cfg);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::bad_parameter) throw;
  }
  return from_file(std::filesystem::path(std::string(name_or_path)), cfg);
}

std::vector<Token> remove_stopwords(std::span<const Token> tokens,
                                    const StopList& stoplist) {
  std::vector<Token> kept;
  kept.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!stoplist.contains(t.surface)) kept.push_back(t);
  }
  return kept;
}

Pipeline::Pipeline() : stoplist_(StopList::builtin("arabic+english")) {}

Pipeline::Pipeline(NormalizerConfig normalizer, StopList stoplist)
    : normalizer_(normalizer) {
  // Stop words must be compared under the same normalization as tokens.
  const std::vector<std::string> words(stoplist.words().begin(), stoplist.words().end());
  stoplist_ = StopList::from_words(words, stoplist.source(), normalizer_);
}

std::vector<Token> Pipeline::run(std::string_view text) const {
  std::vector<Token> out;
  for (auto& raw : tokenize(text)) {
    auto t = normalize(raw, normalizer_);
    if (!t.surface.empty() && !stoplist_.contains(t.surface)) out.push_back(std::move(t));
  }
  return out;
}

std::string Pipeline::render(std::string_view text) const {
  std::string out;
  for (const auto& t : run(text)) {
    if (!out.empty()) out += ' ';
    out += t.surface;
  }
  return out;
}

}  // namespace vsm
