#include "fvgraph/meshio/foam_dict.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fvgraph/common/error.hpp"

namespace fvg::foam {

namespace {

bool is_punct_char(char c) { return c == '(' || c == ')' || c == '{' || c == '}' || c == ';' || c == '[' || c == ']'; }

bool starts_number(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (std::isdigit(static_cast<unsigned char>(c))) return true;
  auto digit_at = [&](std::size_t k) { return k < s.size() && std::isdigit(static_cast<unsigned char>(s[k])); };
  if (c == '.') return digit_at(i + 1);
  if (c == '-' || c == '+') return digit_at(i + 1) || (i + 1 < s.size() && s[i + 1] == '.' && digit_at(i + 2));
  return false;
}

[[noreturn]] void parse_error(const std::string& source, int line, const std::string& what) {
  fail(ErrorCode::Parse, source + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

std::vector<Token> tokenize(std::string_view s, const std::string& source) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = s.size();
  while (i < n) {
    const char c = s[i];
    if (c == '\n') { ++line; ++i; continue; }
    if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
    if (c == '/' && i + 1 < n && s[i + 1] == '/') {
      while (i < n && s[i] != '\n') ++i;
      continue;
    }
    if (c == '/' && i + 1 < n && s[i + 1] == '*') {
      i += 2;
      while (i + 1 < n && !(s[i] == '*' && s[i + 1] == '/')) {
        if (s[i] == '\n') ++line;
        ++i;
      }
      if (i + 1 >= n) parse_error(source, line, "unterminated comment");
      i += 2;
      continue;
    }
    Token tok;
    tok.line = line;
    if (is_punct_char(c)) {
      tok.kind = Token::Kind::Punct;
      tok.text = std::string(1, c);
      ++i;
    } else if (c == '"') {
      tok.kind = Token::Kind::String;
      ++i;
      while (i < n && s[i] != '"') {
        if (s[i] == '\\' && i + 1 < n) ++i;
        if (s[i] == '\n') ++line;
        tok.text.push_back(s[i++]);
      }
      if (i >= n) parse_error(source, tok.line, "unterminated string");
      ++i;
    } else if (starts_number(s, i)) {
      const std::string rest(s.substr(i, std::min<std::size_t>(64, n - i)));
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(rest.c_str(), &end);
      const auto len = static_cast<std::size_t>(end - rest.c_str());
      if (len == 0) parse_error(source, line, "malformed number");
      tok.kind = Token::Kind::Number;
      tok.text = rest.substr(0, len);
      tok.number = v;
      i += len;
    } else {
      tok.kind = Token::Kind::Word;
      int depth = 0;
      while (i < n) {
        const char d = s[i];
        if (std::isspace(static_cast<unsigned char>(d)) || d == ';' || d == '{' || d == '}' || d == '"' ||
            d == '[' || d == ']') {
          break;
        }
        if (d == '(') {
          ++depth;
        } else if (d == ')') {
          if (depth == 0) break;
          --depth;
        }
        tok.text.push_back(d);
        ++i;
      }
    }
    out.push_back(std::move(tok));
  }
  return out;
}

const Dict& Entry::dict() const {
  if (!dict_) fail(ErrorCode::Parse, "entry is not a dictionary");
  return *dict_;
}

const Entry* Dict::find(std::string_view key) const {
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->first == key) return &it->second;
  }
  return nullptr;
}

const Entry& Dict::at(std::string_view key) const {
  const Entry* e = find(key);
  if (!e) fail(ErrorCode::Parse, source_ + ": missing entry '" + std::string(key) + "'");
  return *e;
}

const Dict& Dict::sub(std::string_view key) const {
  const Entry& e = at(key);
  if (!e.is_dict()) fail(ErrorCode::Parse, source_ + ": entry '" + std::string(key) + "' is not a dictionary");
  return e.dict();
}

const Dict* Dict::find_sub(std::string_view key) const {
  const Entry* e = find(key);
  return (e && e->is_dict()) ? &e->dict() : nullptr;
}

double Dict::scalar(std::string_view key) const {
  const Entry& e = at(key);
  if (e.is_dict()) fail(ErrorCode::Parse, source_ + ": entry '" + std::string(key) + "' is a dictionary");
  const auto& t = e.tokens();
  int depth = 0;
  for (auto it = t.rbegin(); it != t.rend(); ++it) {
    if (it->is_punct(']')) ++depth;
    if (it->is_punct('[')) --depth;
    if (depth == 0 && it->kind == Token::Kind::Number) return it->number;
  }
  fail(ErrorCode::Parse, source_ + ": entry '" + std::string(key) + "' has no numeric value");
}

double Dict::scalar_or(std::string_view key, double fallback) const {
  return contains(key) ? scalar(key) : fallback;
}

std::string Dict::word(std::string_view key) const {
  const Entry& e = at(key);
  if (e.is_dict() || e.tokens().empty()) {
    fail(ErrorCode::Parse, source_ + ": entry '" + std::string(key) + "' is not a word");
  }
  return e.tokens().front().text;
}

std::string Dict::word_or(std::string_view key, std::string fallback) const {
  return contains(key) ? word(key) : std::move(fallback);
}

long long Dict::label(std::string_view key) const {
  const double v = scalar(key);
  return static_cast<long long>(v);
}

bool Dict::boolean_or(std::string_view key, bool fallback) const {
  if (!contains(key)) return fallback;
  const std::string w = word(key);
  if (w == "true" || w == "on" || w == "yes" || w == "1") return true;
  if (w == "false" || w == "off" || w == "no" || w == "0") return false;
  fail(ErrorCode::Parse, source_ + ": entry '" + std::string(key) + "' is not a boolean");
}

Dict parse_dict(const std::vector<Token>& tokens, std::size_t& pos, const std::string& source, bool nested) {
  Dict dict(source);
  while (pos < tokens.size()) {
    const Token& key = tokens[pos];
    if (key.is_punct('}')) {
      if (!nested) parse_error(source, key.line, "unexpected '}'");
      ++pos;
      return dict;
    }
    if (key.kind == Token::Kind::Word && !key.text.empty() && (key.text[0] == '#' || key.text[0] == '$')) {
      parse_error(source, key.line, "directive or substitution '" + key.text + "' is not supported");
    }
    if (key.kind != Token::Kind::Word && key.kind != Token::Kind::String) {
      parse_error(source, key.line, "expected keyword, found '" + key.text + "'");
    }
    ++pos;
    if (pos < tokens.size() && tokens[pos].is_punct('{')) {
      ++pos;
      auto sub = std::make_shared<Dict>(parse_dict(tokens, pos, source, true));
      dict.add(key.text, Entry(std::move(sub)));
      continue;
    }
    std::vector<Token> value;
    int depth = 0;
    bool closed = false;
    while (pos < tokens.size()) {
      const Token& t = tokens[pos++];
      if (t.kind == Token::Kind::Word && !t.text.empty() && t.text[0] == '$') {
        parse_error(source, t.line, "variable substitution '" + t.text + "' is not supported");
      }
      if (t.is_punct('(') || t.is_punct('[')) ++depth;
      if (t.is_punct(')') || t.is_punct(']')) --depth;
      if (depth < 0) parse_error(source, t.line, "unbalanced bracket");
      if (depth == 0 && t.is_punct(';')) { closed = true; break; }
      if (depth == 0 && (t.is_punct('{') || t.is_punct('}'))) parse_error(source, t.line, "missing ';'");
      value.push_back(t);
    }
    if (!closed) parse_error(source, key.line, "entry '" + key.text + "' is not terminated by ';'");
    dict.add(key.text, Entry(std::move(value)));
  }
  if (nested) fail(ErrorCode::Parse, source + ": unterminated dictionary");
  return dict;
}

Dict parse_dict_text(std::string_view text, const std::string& source) {
  const auto tokens = tokenize(text, source);
  std::size_t pos = 0;
  return parse_dict(tokens, pos, source, false);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FoamFile parse_foam_text(std::string_view text, const std::string& source) {
  FoamFile file;
  file.source = source;
  auto tokens = tokenize(text, source);
  std::size_t pos = 0;
  if (!tokens.empty() && tokens[0].is_word("FoamFile")) {
    if (tokens.size() < 2 || !tokens[1].is_punct('{')) parse_error(source, tokens[0].line, "malformed FoamFile header");
    pos = 2;
    file.header = parse_dict(tokens, pos, source, true);
    const std::string format = file.header.word_or("format", "ascii");
    if (format != "ascii") {
      fail(ErrorCode::UnsupportedFormat, source + ": format '" + format + "' is not supported (ascii only)");
    }
  }
  file.body.assign(tokens.begin() + static_cast<std::ptrdiff_t>(pos), tokens.end());
  return file;
}

FoamFile read_foam_file(const std::string& path) { return parse_foam_text(read_text_file(path), path); }

Dict body_dict(const FoamFile& file) {
  std::size_t pos = 0;
  return parse_dict(file.body, pos, file.source, false);
}

const Token& TokenCursor::peek() const {
  if (done()) error("unexpected end of input");
  return (*tokens_)[pos_];
}

const Token& TokenCursor::next() {
  const Token& t = peek();
  ++pos_;
  return t;
}

void TokenCursor::expect(char punct) {
  const Token& t = next();
  if (!t.is_punct(punct)) error(std::string("expected '") + punct + "', found '" + t.text + "'");
}

double TokenCursor::number() {
  const Token& t = next();
  if (t.kind != Token::Kind::Number) error("expected number, found '" + t.text + "'");
  return t.number;
}

long long TokenCursor::integer() {
  const Token& t = next();
  if (t.kind != Token::Kind::Number) error("expected integer, found '" + t.text + "'");
  char* end = nullptr;
  const long long v = std::strtoll(t.text.c_str(), &end, 10);
  if (*end != '\0') error("expected integer, found '" + t.text + "'");
  return v;
}

std::string TokenCursor::word() {
  const Token& t = next();
  if (t.kind != Token::Kind::Word && t.kind != Token::Kind::String) error("expected word, found '" + t.text + "'");
  return t.text;
}

Vec3 TokenCursor::vec3() {
  expect('(');
  Vec3 v;
  v.x = number();
  v.y = number();
  v.z = number();
  expect(')');
  return v;
}

void TokenCursor::error(const std::string& what) const {
  int line = 0;
  if (!tokens_->empty()) line = (*tokens_)[std::min(pos_, tokens_->size() - 1)].line;
  parse_error(source_, line, what);
}

}  // namespace fvg::foam
