#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fvgraph/common/vec3.hpp"

namespace fvg::foam {

struct Token {
  enum class Kind { Word, Number, String, Punct };
  Kind kind = Kind::Word;
  std::string text;
  double number = 0.0;
  int line = 0;

  bool is_punct(char c) const { return kind == Kind::Punct && text.size() == 1 && text[0] == c; }
  bool is_word(std::string_view w) const { return kind == Kind::Word && text == w; }
};

/// Splits OpenFOAM ASCII text into tokens. Comments are dropped.
std::vector<Token> tokenize(std::string_view text, const std::string& source);

class Dict;

/// A dictionary entry: either a nested dictionary or the token run before ';'.
class Entry {
 public:
  explicit Entry(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  explicit Entry(std::shared_ptr<Dict> dict) : dict_(std::move(dict)) {}

  bool is_dict() const { return dict_ != nullptr; }
  const Dict& dict() const;
  const std::vector<Token>& tokens() const { return tokens_; }

 private:
  std::vector<Token> tokens_;
  std::shared_ptr<Dict> dict_;
};

class Dict {
 public:
  Dict() = default;
  explicit Dict(std::string source) : source_(std::move(source)) {}

  void add(std::string key, Entry entry) { entries_.emplace_back(std::move(key), std::move(entry)); }
  const std::vector<std::pair<std::string, Entry>>& entries() const { return entries_; }
  const std::string& source() const { return source_; }

  /// Last entry with the given key wins, like OpenFOAM.
  const Entry* find(std::string_view key) const;
  bool contains(std::string_view key) const { return find(key) != nullptr; }
  const Entry& at(std::string_view key) const;
  const Dict& sub(std::string_view key) const;
  const Dict* find_sub(std::string_view key) const;

  /// Last numeric token of the entry; handles dimensioned values.
  double scalar(std::string_view key) const;
  double scalar_or(std::string_view key, double fallback) const;
  std::string word(std::string_view key) const;
  std::string word_or(std::string_view key, std::string fallback) const;
  long long label(std::string_view key) const;
  bool boolean_or(std::string_view key, bool fallback) const;

 private:
  std::string source_;
  std::vector<std::pair<std::string, Entry>> entries_;
};

/// Parses `key value;` / `key { ... }` entries until the end of the token run.
Dict parse_dict(const std::vector<Token>& tokens, std::size_t& pos, const std::string& source, bool nested);
Dict parse_dict_text(std::string_view text, const std::string& source);

/// A file split into its FoamFile header and everything after it.
struct FoamFile {
  Dict header;
  std::vector<Token> body;
  std::string source;
};

FoamFile read_foam_file(const std::string& path);
FoamFile parse_foam_text(std::string_view text, const std::string& source);
Dict body_dict(const FoamFile& file);

/// Sequential reader over a token run.
class TokenCursor {
 public:
  TokenCursor(const std::vector<Token>& tokens, std::string source, std::size_t pos = 0)
      : tokens_(&tokens), source_(std::move(source)), pos_(pos) {}

  bool done() const { return pos_ >= tokens_->size(); }
  const Token& peek() const;
  const Token& next();
  void expect(char punct);
  double number();
  long long integer();
  std::string word();
  Vec3 vec3();
  std::size_t pos() const { return pos_; }
  [[noreturn]] void error(const std::string& what) const;

 private:
  const std::vector<Token>* tokens_;
  std::string source_;
  std::size_t pos_;
};

std::string read_text_file(const std::string& path);

}  // namespace fvg::foam
