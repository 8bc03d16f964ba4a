#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vsm {

/// One index term candidate. `position` is the ordinal of the token in the
/// tokenizer output for its source text and survives normalization and
/// stop-word removal unchanged, so positions stay strictly increasing.
struct Token {
  std::string surface;
  std::size_t position = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

struct NormalizerConfig {
  bool strip_diacritics = false;
  bool unify_alef_forms = false;
  bool strip_tatweel = false;
  bool case_fold = false;

  friend bool operator==(const NormalizerConfig&,
                         const NormalizerConfig&) = default;
};

bool is_valid_utf8(std::string_view text) noexcept;

/// Splits on whitespace and any codepoint that is not a letter, decimal
/// digit or combining mark. Invalid UTF-8 bytes act as separators.
std::vector<Token> tokenize(std::string_view text);

std::string normalize(std::string_view surface, const NormalizerConfig& cfg);

/// May return a token with an empty surface; callers drop those.
Token normalize(const Token& token, const NormalizerConfig& cfg);

/// Immutable set of stop words, stored already normalized.
class StopList {
 public:
  StopList() = default;

  static StopList from_words(std::span<const std::string> words,
                             std::string source,
                             const NormalizerConfig& cfg = {});
  static StopList from_words(std::initializer_list<std::string_view> words,
                             std::string source,
                             const NormalizerConfig& cfg = {});

  /// One word per line; '#' comments and blank lines are ignored.
  /// Throws Error{io} when unreadable and Error{format} when the file holds
  /// no words.
  static StopList from_file(const std::filesystem::path& path,
                            const NormalizerConfig& cfg = {});

  /// "arabic", "english", "none", or a '+'-joined combination such as
  /// "arabic+english". Throws Error{bad_parameter} for unknown names.
  static StopList builtin(std::string_view name,
                          const NormalizerConfig& cfg = {});

  /// Built-in names resolve as above; anything else is read as a file.
  static StopList resolve(std::string_view name_or_path,
                          const NormalizerConfig& cfg = {});

  bool contains(std::string_view word) const {
    return words_.find(word) != words_.end();
  }
  bool empty() const noexcept { return words_.empty(); }
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string, std::less<>>& words() const noexcept {
    return words_;
  }
  const std::string& source() const noexcept { return source_; }

  friend bool operator==(const StopList&, const StopList&) = default;

 private:
  std::set<std::string, std::less<>> words_;
  std::string source_;
};

std::vector<Token> remove_stopwords(std::span<const Token> tokens,
                                    const StopList& stoplist);

/// tokenize, normalize (dropping emptied tokens), remove stop words.
class Pipeline {
 public:
  Pipeline();
  Pipeline(NormalizerConfig normalizer, StopList stoplist);

  std::vector<Token> run(std::string_view text) const;

  /// Pipeline output joined with single spaces.
  std::string render(std::string_view text) const;

  const NormalizerConfig& normalizer() const noexcept { return normalizer_; }
  const StopList& stoplist() const noexcept { return stoplist_; }

  friend bool operator==(const Pipeline&, const Pipeline&) = default;

 private:
  NormalizerConfig normalizer_;
  StopList stoplist_;
};

}  // namespace vsm
