// Reader for the YAML profile used by CITATION.cff files: block mappings and
// sequences, plain/quoted/block scalars, single-line or wrapped flow
// collections and comments. Anchors, aliases, tags and multi-document streams
// are rejected.

#include <cstdint>
#include <limits>

#include "smecs/error.hpp"
#include "smecs/harvest.hpp"
#include "smecs/text.hpp"

namespace smecs {

namespace {

constexpr int kMaxDepth = 64;

struct Line {
  std::size_t number = 0;
  std::string raw;
  std::size_t indent = 0;
  std::string content; // comment stripped, trimmed
  bool tab_indent = false;
};

[[noreturn]] void fail(std::size_t line, const std::string &message) {
  throw Error(ErrorCode::MalformedCff, "CITATION.cff line " + std::to_string(line) + ": " + message);
}

bool is_blank(std::string_view s) { return text::trim(s).empty(); }

std::size_t leading_spaces(std::string_view s) {
  std::size_t n = 0;
  while (n < s.size() && s[n] == ' ')
    ++n;
  return n;
}

// Drops a trailing "# comment" that is outside quotes.
std::string strip_comment(std::string_view s) {
  char quote = 0;
  char prev_significant = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (quote == '"') {
      if (c == '\\')
        ++i;
      else if (c == '"')
        quote = 0;
      continue;
    }
    if (quote == '\'') {
      if (c == '\'' && i + 1 < s.size() && s[i + 1] == '\'')
        ++i;
      else if (c == '\'')
        quote = 0;
      continue;
    }
    if ((c == '"' || c == '\'') &&
        (prev_significant == 0 || prev_significant == ':' || prev_significant == '-' ||
         prev_significant == '[' || prev_significant == '{' || prev_significant == ',' ||
         prev_significant == '?')) {
      quote = c;
      continue;
    }
    if (c == '#' && (i == 0 || s[i - 1] == ' ' || s[i - 1] == '\t'))
      return std::string(text::trim(s.substr(0, i)));
    if (c != ' ' && c != '\t')
      prev_significant = c;
  }
  return std::string(text::trim(s));
}

bool is_seq_item(std::string_view content) {
  return content == "-" || (content.size() >= 2 && content[0] == '-' && content[1] == ' ');
}

void append_utf8(std::string &out, std::uint32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

// Position just past the closing quote of the quoted scalar starting at
// `start`, or npos when it is not closed.
std::size_t quoted_end(std::string_view s, std::size_t start) {
  char quote = s[start];
  for (std::size_t i = start + 1; i < s.size(); ++i) {
    if (quote == '"' && s[i] == '\\') {
      ++i;
      continue;
    }
    if (s[i] == quote) {
      if (quote == '\'' && i + 1 < s.size() && s[i + 1] == '\'') {
        ++i;
        continue;
      }
      return i + 1;
    }
  }
  return std::string_view::npos;
}

// Line breaks inside a quoted scalar fold to a space; runs of blank lines
// keep all but one break.
std::string fold_breaks(std::string_view body) {
  std::string out;
  auto lines = text::split(body, '\n');
  int pending = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view part = lines[i];
    if (i > 0)
      part = text::trim(part);
    if (i + 1 < lines.size() && i > 0 && part.empty()) {
      ++pending;
      continue;
    }
    if (i > 0)
      out += pending > 0 ? std::string(static_cast<std::size_t>(pending), '\n') : " ";
    pending = 0;
    out += part;
  }
  return out;
}

std::string unquote(std::string_view quoted, std::size_t line) {
  char quote = quoted.front();
  std::string_view body = quoted.substr(1, quoted.size() - 2);
  if (quote == '\'') {
    std::string folded = fold_breaks(body);
    std::string out;
    for (std::size_t i = 0; i < folded.size(); ++i) {
      out.push_back(folded[i]);
      if (folded[i] == '\'' && i + 1 < folded.size() && folded[i + 1] == '\'')
        ++i;
    }
    return out;
  }

  // Escaped line breaks join lines without folding.
  std::string joined;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\\' && i + 1 < body.size() && body[i + 1] == '\n') {
      i += 2;
      while (i < body.size() && (body[i] == ' ' || body[i] == '\t'))
        ++i;
      --i;
      continue;
    }
    joined.push_back(body[i]);
    if (body[i] == '\\' && i + 1 < body.size())
      joined.push_back(body[++i]);
  }
  std::string folded = fold_breaks(joined);

  std::string out;
  for (std::size_t i = 0; i < folded.size(); ++i) {
    char c = folded[i];
    if (c != '\\') {
      out.push_back(c);
      continue;
    }
    if (++i >= folded.size())
      fail(line, "dangling escape in double-quoted scalar");
    char e = folded[i];
    auto hex = [&](std::size_t digits) {
      std::uint32_t cp = 0;
      for (std::size_t k = 1; k <= digits; ++k) {
        if (i + k >= folded.size())
          fail(line, "truncated escape sequence");
        char h = folded[i + k];
        cp <<= 4;
        if (h >= '0' && h <= '9')
          cp |= static_cast<std::uint32_t>(h - '0');
        else if (h >= 'a' && h <= 'f')
          cp |= static_cast<std::uint32_t>(h - 'a' + 10);
        else if (h >= 'A' && h <= 'F')
          cp |= static_cast<std::uint32_t>(h - 'A' + 10);
        else
          fail(line, "invalid hex digit in escape sequence");
      }
      i += digits;
      if (cp > 0x10FFFF)
        fail(line, "escape sequence out of Unicode range");
      append_utf8(out, cp);
    };
    switch (e) {
    case 'n': out.push_back('\n'); break;
    case 't': case '\t': out.push_back('\t'); break;
    case 'r': out.push_back('\r'); break;
    case '0': out.push_back('\0'); break;
    case 'a': out.push_back('\a'); break;
    case 'b': out.push_back('\b'); break;
    case 'e': out.push_back('\x1b'); break;
    case 'f': out.push_back('\f'); break;
    case 'v': out.push_back('\v'); break;
    case ' ': out.push_back(' '); break;
    case '"': out.push_back('"'); break;
    case '/': out.push_back('/'); break;
    case '\\': out.push_back('\\'); break;
    case 'N': append_utf8(out, 0x85); break;
    case '_': append_utf8(out, 0xA0); break;
    case 'x': hex(2); break;
    case 'u': hex(4); break;
    case 'U': hex(8); break;
    default: fail(line, std::string("unknown escape sequence \\") + e);
    }
  }
  return out;
}

// Plain scalars: booleans, null and integers are typed; everything else,
// including floats and dates, stays text so values like "1.10" survive.
Json resolve_plain(std::string_view raw) {
  std::string_view s = text::trim(raw);
  if (s.empty() || s == "~" || s == "null" || s == "Null" || s == "NULL")
    return nullptr;
  if (s == "true" || s == "True" || s == "TRUE")
    return true;
  if (s == "false" || s == "False" || s == "FALSE")
    return false;
  std::string_view digits = s;
  if (digits.front() == '-' || digits.front() == '+')
    digits.remove_prefix(1);
  bool numeric = !digits.empty() && digits.size() <= 18 &&
                 std::all_of(digits.begin(), digits.end(),
                             [](unsigned char c) { return std::isdigit(c); }) &&
                 (digits.size() == 1 || digits.front() != '0');
  if (numeric)
    return std::stoll(std::string(s));
  return std::string(s);
}

class FlowReader {
public:
  FlowReader(std::string_view text, std::size_t line) : text_(text), line_(line) {}

  Json read_all() {
    Json value = read_value(0);
    skip_space();
    if (pos_ != text_.size())
      fail(line_, "unexpected text after flow collection");
    return value;
  }

private:
  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n'))
      ++pos_;
  }

  Json read_value(int depth) {
    if (depth > kMaxDepth)
      fail(line_, "flow collection nested too deeply");
    skip_space();
    if (pos_ >= text_.size())
      fail(line_, "unterminated flow collection");
    char c = text_[pos_];
    if (c == '[')
      return read_sequence(depth);
    if (c == '{')
      return read_mapping(depth);
    if (c == '"' || c == '\'') {
      auto end = quoted_end(text_, pos_);
      if (end == std::string_view::npos)
        fail(line_, "unterminated quoted scalar");
      std::string value = unquote(text_.substr(pos_, end - pos_), line_);
      pos_ = end;
      return value;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != ']' && text_[pos_] != '}') {
      if (text_[pos_] == ':' && (pos_ + 1 >= text_.size() || text_[pos_ + 1] == ' '))
        break;
      ++pos_;
    }
    return resolve_plain(text_.substr(start, pos_ - start));
  }

  Json read_sequence(int depth) {
    ++pos_;
    Json out = Json::array();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ']') {
      ++pos_;
      return out;
    }
    while (true) {
      out.push_back(read_value(depth + 1));
      skip_space();
      if (pos_ >= text_.size())
        fail(line_, "unterminated flow sequence");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == ']') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (text_[pos_] == ']') {
        ++pos_;
        return out;
      }
      fail(line_, "expected ',' or ']' in flow sequence");
    }
  }

  Json read_mapping(int depth) {
    ++pos_;
    Json out = Json::object();
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == '}') {
      ++pos_;
      return out;
    }
    while (true) {
      Json key = read_value(depth + 1);
      if (!key.is_string() && !key.is_number() && !key.is_boolean())
        fail(line_, "flow mapping keys must be scalars");
      std::string name = key.is_string() ? key.get<std::string>() : key.dump();
      skip_space();
      Json value = nullptr;
      if (pos_ < text_.size() && text_[pos_] == ':') {
        ++pos_;
        value = read_value(depth + 1);
        skip_space();
      }
      if (out.contains(name))
        fail(line_, "duplicate key '" + name + "'");
      out[name] = std::move(value);
      if (pos_ >= text_.size())
        fail(line_, "unterminated flow mapping");
      if (text_[pos_] == ',') {
        ++pos_;
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '}') {
          ++pos_;
          return out;
        }
        continue;
      }
      if (text_[pos_] == '}') {
        ++pos_;
        return out;
      }
      fail(line_, "expected ',' or '}' in flow mapping");
    }
  }

  std::string_view text_;
  std::size_t line_;
  std::size_t pos_ = 0;
};

class BlockReader {
public:
  explicit BlockReader(std::string_view source) {
    if (source.substr(0, 3) == "\xEF\xBB\xBF")
      source.remove_prefix(3);
    std::size_t number = 0;
    for (auto &raw : text::split(source, '\n')) {
      ++number;
      if (!raw.empty() && raw.back() == '\r')
        raw.pop_back();
      Line line;
      line.number = number;
      line.indent = leading_spaces(raw);
      line.tab_indent = line.indent < raw.size() && raw[line.indent] == '\t';
      line.content = strip_comment(std::string_view(raw).substr(line.indent));
      line.raw = std::move(raw);
      if (line.indent == 0 && (line.content == "---" || line.content.rfind("%", 0) == 0)) {
        if (seen_document_start_)
          fail(line.number, "multiple documents are not supported");
        seen_document_start_ = line.content == "---";
        line.content.clear();
      }
      if (line.indent == 0 && line.content == "...") {
        lines_.push_back(std::move(line));
        lines_.back().content.clear();
        ended_at_ = lines_.size();
        continue;
      }
      if (ended_at_ && !line.content.empty())
        fail(line.number, "content after end of document");
      lines_.push_back(std::move(line));
    }
  }

  Json read_document() {
    Json root = read_block(0, 0);
    skip_blank();
    if (pos_ < lines_.size())
      fail(lines_[pos_].number, "unexpected indentation");
    return root;
  }

private:
  void skip_blank() {
    while (pos_ < lines_.size() && lines_[pos_].content.empty())
      ++pos_;
  }

  bool at_end() {
    skip_blank();
    return pos_ >= lines_.size();
  }

  Line &peek() {
    Line &line = lines_[pos_];
    if (line.tab_indent)
      fail(line.number, "tab characters are not allowed in indentation");
    return line;
  }

  // Node whose first line is indented at least `min_indent`; null if none.
  Json read_block(std::size_t min_indent, int depth) {
    if (depth > kMaxDepth)
      fail(pos_ < lines_.size() ? lines_[pos_].number : 0, "document nested too deeply");
    if (at_end())
      return nullptr;
    Line &line = peek();
    if (line.indent < min_indent)
      return nullptr;
    if (is_seq_item(line.content))
      return read_sequence(line.indent, depth);
    if (split_key(line.content))
      return read_mapping(line.indent, depth);
    ++pos_;
    return read_value(line.content, line.indent, line.number, depth);
  }

  struct KeySplit {
    std::string key;
    std::string rest;
  };

  std::optional<KeySplit> split_key(std::string_view content) const {
    if (content.empty() || content.front() == '[' || content.front() == '{')
      return std::nullopt;
    if (content.front() == '"' || content.front() == '\'') {
      auto end = quoted_end(content, 0);
      if (end == std::string_view::npos)
        return std::nullopt;
      std::string_view after = content.substr(end);
      std::size_t skip = 0;
      while (skip < after.size() && after[skip] == ' ')
        ++skip;
      after.remove_prefix(skip);
      if (after.empty() || after.front() != ':' ||
          (after.size() > 1 && after[1] != ' ' && after[1] != '\t'))
        return std::nullopt;
      return KeySplit{unquote(content.substr(0, end), 0),
                      std::string(text::trim(after.substr(1)))};
    }
    for (std::size_t i = 0; i < content.size(); ++i) {
      if (content[i] == ':' &&
          (i + 1 == content.size() || content[i + 1] == ' ' || content[i + 1] == '\t')) {
        return KeySplit{std::string(text::trim(content.substr(0, i))),
                        std::string(text::trim(content.substr(i + 1)))};
      }
    }
    return std::nullopt;
  }

  Json read_mapping(std::size_t indent, int depth) {
    Json out = Json::object();
    while (!at_end()) {
      Line &line = peek();
      if (line.indent < indent)
        break;
      if (line.indent > indent)
        fail(line.number, "unexpected indentation");
      if (is_seq_item(line.content))
        fail(line.number, "sequence entry where a mapping key was expected");
      auto split = split_key(line.content);
      if (!split)
        fail(line.number, "expected 'key: value'");
      if (split->key.empty())
        fail(line.number, "empty mapping key");
      if (out.contains(split->key))
        fail(line.number, "duplicate key '" + split->key + "'");
      std::size_t number = line.number;
      ++pos_;
      out[split->key] = read_value(split->rest, indent, number, depth + 1);
    }
    return out;
  }

  Json read_sequence(std::size_t indent, int depth) {
    Json out = Json::array();
    while (!at_end()) {
      Line &line = peek();
      if (line.indent < indent || !is_seq_item(line.content))
        break;
      if (line.indent > indent)
        fail(line.number, "unexpected indentation");
      std::size_t offset = 1;
      while (offset < line.content.size() && line.content[offset] == ' ')
        ++offset;
      std::string rest = line.content.substr(offset);
      if (rest.empty()) {
        ++pos_;
        out.push_back(read_block(indent + 1, depth + 1));
      } else if (is_seq_item(rest) || split_key(rest)) {
        // Compact nested node: re-read this line as if "- " were indentation.
        line.indent = indent + offset;
        line.content = rest;
        out.push_back(read_block(line.indent, depth + 1));
      } else {
        std::size_t number = line.number;
        ++pos_;
        out.push_back(read_value(rest, indent, number, depth + 1));
      }
    }
    return out;
  }

  // Value text following "key:" or "- " on a line whose structure sits at
  // `indent`. Continuation lines must be indented further.
  Json read_value(const std::string &rest, std::size_t indent, std::size_t number, int depth) {
    if (rest.empty()) {
      if (at_end())
        return nullptr;
      Line &next = peek();
      if (next.indent > indent)
        return read_block(indent + 1, depth);
      if (next.indent == indent && is_seq_item(next.content))
        return read_sequence(indent, depth);
      return nullptr;
    }
    char c = rest.front();
    if (c == '&' || c == '*' || c == '!')
      fail(number, "anchors, aliases and tags are not supported");
    if (c == '|' || c == '>')
      return read_block_scalar(rest, indent, number);
    if (c == '[' || c == '{')
      return read_flow(rest, indent, number);
    if (c == '"' || c == '\'')
      return read_quoted(rest, indent, number);
    if (c == '@' || c == '`')
      fail(number, std::string("plain scalars cannot start with '") + c + "'");
    return read_plain(rest, indent, number);
  }

  static bool has_mapping_indicator(const std::string &text) {
    return text.find(": ") != std::string::npos || (!text.empty() && text.back() == ':');
  }

  Json read_plain(const std::string &first, std::size_t indent, std::size_t number) {
    if (has_mapping_indicator(first))
      fail(number, "mapping values are not allowed in a plain scalar");
    std::string value = first;
    std::size_t blanks = 0;
    while (pos_ < lines_.size()) {
      Line &line = lines_[pos_];
      if (line.content.empty()) {
        ++blanks;
        ++pos_;
        continue;
      }
      if (line.indent <= indent || line.tab_indent)
        break;
      if (has_mapping_indicator(line.content))
        fail(line.number, "mapping values are not allowed in a plain scalar");
      value += blanks > 0 ? std::string(blanks, '\n') : " ";
      value += line.content;
      blanks = 0;
      ++pos_;
    }
    // Blank lines that did not lead to a continuation belong to the caller.
    if (blanks > 0)
      pos_ -= blanks;
    return resolve_plain(value);
  }

  Json read_quoted(const std::string &first, std::size_t indent, std::size_t number) {
    std::string buffer = first;
    std::size_t end = quoted_end(buffer, 0);
    while (end == std::string::npos) {
      if (pos_ >= lines_.size())
        fail(number, "unterminated quoted scalar");
      const Line &line = lines_[pos_++];
      if (!is_blank(line.raw) && line.indent <= indent)
        fail(line.number, "quoted scalar continuation must be indented");
      buffer += "\n";
      buffer += std::string(text::trim(line.raw));
      end = quoted_end(buffer, 0);
    }
    std::string_view trailing = text::trim(std::string_view(buffer).substr(end));
    if (!trailing.empty() && trailing.front() != '#')
      fail(number, "unexpected text after quoted scalar");
    return unquote(std::string_view(buffer).substr(0, end), number);
  }

  Json read_flow(const std::string &first, std::size_t indent, std::size_t number) {
    std::string buffer = first;
    auto balanced = [](std::string_view s) {
      int depth = 0;
      for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '"' || c == '\'') {
          auto end = quoted_end(s, i);
          if (end == std::string_view::npos)
            return false;
          i = end - 1;
        } else if (c == '[' || c == '{') {
          ++depth;
        } else if (c == ']' || c == '}') {
          --depth;
        }
      }
      return depth <= 0;
    };
    while (!balanced(buffer)) {
      if (pos_ >= lines_.size())
        fail(number, "unterminated flow collection");
      const Line &line = lines_[pos_++];
      if (!line.content.empty() && line.indent <= indent)
        fail(line.number, "flow collection continuation must be indented");
      buffer += "\n";
      buffer += line.content;
    }
    return FlowReader(buffer, number).read_all();
  }

  Json read_block_scalar(const std::string &header, std::size_t indent, std::size_t number) {
    bool literal = header.front() == '|';
    char chomp = 'c';
    std::size_t explicit_indent = 0;
    for (std::size_t i = 1; i < header.size(); ++i) {
      char c = header[i];
      if ((c == '-' || c == '+') && chomp == 'c')
        chomp = c;
      else if (c >= '1' && c <= '9' && explicit_indent == 0)
        explicit_indent = static_cast<std::size_t>(c - '0');
      else
        fail(number, "invalid block scalar header '" + header + "'");
    }

    std::vector<std::string_view> body;
    std::size_t block_indent = explicit_indent ? indent + explicit_indent : 0;
    while (pos_ < lines_.size()) {
      const Line &line = lines_[pos_];
      bool blank = is_blank(line.raw);
      if (!blank && line.indent <= indent)
        break;
      if (!blank && block_indent == 0)
        block_indent = line.indent;
      if (!blank && line.indent < block_indent)
        fail(line.number, "block scalar line is less indented than the first line");
      body.emplace_back(line.raw);
      ++pos_;
    }

    std::vector<std::string> lines;
    for (std::string_view raw : body)
      lines.emplace_back(is_blank(raw) ? std::string_view{} : raw.substr(block_indent));
    std::size_t trailing = 0;
    while (!lines.empty() && lines.back().empty()) {
      lines.pop_back();
      ++trailing;
    }

    std::string value;
    if (literal) {
      for (std::size_t i = 0; i < lines.size(); ++i) {
        if (i)
          value += '\n';
        value += lines[i];
      }
    } else {
      bool first = true;
      bool prev_more = false;
      std::size_t pending = 0;
      for (const auto &line : lines) {
        if (line.empty()) {
          ++pending;
          continue;
        }
        bool more = line.front() == ' ' || line.front() == '\t';
        if (first)
          value += std::string(pending, '\n');
        else if (pending == 0)
          value += (more || prev_more) ? "\n" : " ";
        else
          value += std::string(pending + ((more || prev_more) ? 1 : 0), '\n');
        value += line;
        first = false;
        pending = 0;
        prev_more = more;
      }
    }

    if (chomp == 'c' && !lines.empty())
      value += '\n';
    else if (chomp == '+')
      value += std::string((lines.empty() ? 0 : 1) + trailing, '\n');
    return value;
  }

  std::vector<Line> lines_;
  std::size_t pos_ = 0;
  bool seen_document_start_ = false;
  std::size_t ended_at_ = 0;
};

} // namespace

SourceRecord parse_cff(std::string_view text) {
  Json root;
  try {
    root = BlockReader(text).read_document();
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error(ErrorCode::MalformedCff, std::string("CITATION.cff: ") + e.what());
  }
  if (root.is_null())
    throw Error(ErrorCode::MalformedCff, "CITATION.cff: document is empty");
  if (!root.is_object())
    throw Error(ErrorCode::MalformedCff, "CITATION.cff: top level must be a mapping");

  SourceRecord record{SourceKind::CffFile, std::move(root), {}};
  if (!record.data.contains("cff-version"))
    record.warnings.emplace_back(kWarningMissingCffVersion);
  return record;
}

} // namespace smecs
