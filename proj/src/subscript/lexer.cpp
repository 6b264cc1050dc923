#include <cctype>
#include <set>

#include "ast.hpp"

namespace mockingbird::subscript {

namespace {

const std::set<std::string, std::less<>> kKeywords = {"let",  "if",    "else", "while", "for",   "in",
                                                      "return", "true", "false", "null", "break", "continue"};

// Longest first so that "<=" wins over "<".
constexpr const char* kPunct[] = {"==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]", ",", ";",
                                  ":",  ".",  "?",  "+",  "-",  "*",  "/", "%", "!", "<", ">", "="};

class Lexer {
 public:
  Lexer(std::string_view src, std::vector<Diagnostic>& diags) : src_(src), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space_and_comments();
      Token t;
      t.location = {line_, col_};
      if (pos_ >= src_.size()) {
        t.kind = TokenKind::end;
        out.push_back(std::move(t));
        return out;
      }
      char c = src_[pos_];
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        std::string word;
        while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
          word.push_back(advance());
        }
        t.kind = kKeywords.contains(word) ? TokenKind::keyword : TokenKind::identifier;
        t.text = std::move(word);
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        lex_number(t);
      } else if (c == '"' || c == '\'') {
        lex_string(t);
      } else if (!lex_punct(t)) {
        diags_.push_back({t.location, std::string("unexpected character '") + c + "'"});
        advance();
        continue;
      }
      out.push_back(std::move(t));
    }
  }

 private:
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (src_.substr(pos_, 2) == "//") {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (src_.substr(pos_, 2) == "/*") {
        SourceLocation start{line_, col_};
        advance();
        advance();
        while (pos_ < src_.size() && src_.substr(pos_, 2) != "*/") advance();
        if (pos_ >= src_.size()) {
          diags_.push_back({start, "unterminated block comment"});
          return;
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    std::string text;
    bool is_float = false;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text.push_back(advance());
    if (pos_ + 1 < src_.size() && src_[pos_] == '.' && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1]))) {
      is_float = true;
      text.push_back(advance());
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text.push_back(advance());
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < src_.size() && (src_[look] == '+' || src_[look] == '-')) ++look;
      if (look < src_.size() && std::isdigit(static_cast<unsigned char>(src_[look]))) {
        is_float = true;
        while (pos_ < look) text.push_back(advance());
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) text.push_back(advance());
      }
    }
    t.kind = TokenKind::number;
    t.text = text;
    if (is_float) {
      t.value = std::stod(text);
    } else {
      try {
        t.value = static_cast<std::int64_t>(std::stoll(text));
      } catch (const std::out_of_range&) {
        diags_.push_back({t.location, "integer literal out of range: " + text});
        t.value = 0;
      }
    }
  }

  void lex_string(Token& t) {
    char quote = advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') {
        diags_.push_back({t.location, "unterminated string literal"});
        break;
      }
      char c = advance();
      if (c == quote) break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (pos_ >= src_.size()) continue;
      char e = advance();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '\\': out.push_back('\\'); break;
        case '"': out.push_back('"'); break;
        case '\'': out.push_back('\''); break;
        default: diags_.push_back({{line_, col_ - 2}, std::string("unknown escape sequence \\") + e}); break;
      }
    }
    t.kind = TokenKind::string;
    t.value = out;
    t.text = std::move(out);
  }

  bool lex_punct(Token& t) {
    for (const char* p : kPunct) {
      std::string_view sv(p);
      if (src_.substr(pos_, sv.size()) == sv) {
        for (std::size_t i = 0; i < sv.size(); ++i) advance();
        t.kind = TokenKind::punct;
        t.text = std::string(sv);
        return true;
      }
    }
    return false;
  }

  std::string_view src_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source, std::vector<Diagnostic>& diagnostics) {
  return Lexer(source, diagnostics).run();
}

}  // namespace mockingbird::subscript
