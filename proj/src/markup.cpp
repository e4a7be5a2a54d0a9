#include "stylos/markup.hpp"

#include <algorithm>
#include <cctype>

namespace stylos::markup {

namespace {

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-' ||
         c == '.';
}

constexpr size_t kMaxWarningMessages = 20;

struct Stripper {
  const StripOptions& opt;
  StripResult result;
  bool pending_boundary = false;
  long drop_depth = 0;
  long scrubbed_angles = 0;

  explicit Stripper(const StripOptions& o) : opt(o) {}

  void warn(const std::string& msg) {
    ++result.warning_count;
    if (result.warnings.size() < kMaxWarningMessages) result.warnings.push_back(msg);
  }

  bool is_dropped(std::string_view lower_name) const {
    return std::find(opt.drop_elements.begin(), opt.drop_elements.end(), lower_name) !=
           opt.drop_elements.end();
  }

  bool is_paragraph(std::string_view lower_name) const {
    return std::find(opt.paragraph_elements.begin(), opt.paragraph_elements.end(), lower_name) !=
           opt.paragraph_elements.end();
  }

  void put_char(char c) {
    if (c == '<' || c == '>') {
      ++scrubbed_angles;
      c = ' ';
    }
    if (pending_boundary) {
      bool out_ws = result.text.empty() || result.text.back() == ' ' ||
                    std::isspace(static_cast<unsigned char>(result.text.back()));
      bool in_ws = std::isspace(static_cast<unsigned char>(c));
      if (!result.text.empty() && !out_ws && !in_ws) result.text.push_back(' ');
      pending_boundary = false;
    }
    result.text.push_back(c);
  }

  // Decodes the predefined entities and numeric character references.
  void append_text(std::string_view chunk, bool decode_entities) {
    size_t i = 0;
    while (i < chunk.size()) {
      char c = chunk[i];
      if (decode_entities && c == '&') {
        size_t semi = chunk.find(';', i + 1);
        if (semi != std::string_view::npos && semi - i <= 10) {
          std::string_view ent = chunk.substr(i + 1, semi - i - 1);
          std::string decoded;
          if (ent == "amp") decoded = "&";
          else if (ent == "lt" || ent == "gt") decoded = " ";  // keep sentences markup-free
          else if (ent == "quot") decoded = "\"";
          else if (ent == "apos") decoded = "'";
          else if (!ent.empty() && ent[0] == '#') {
            char32_t cp = 0;
            bool ok = ent.size() > 1;
            if (ent.size() > 2 && (ent[1] == 'x' || ent[1] == 'X')) {
              for (size_t k = 2; k < ent.size() && ok; ++k) {
                char h = ent[k];
                int v = (h >= '0' && h <= '9')   ? h - '0'
                        : (h >= 'a' && h <= 'f') ? h - 'a' + 10
                        : (h >= 'A' && h <= 'F') ? h - 'A' + 10
                                                 : -1;
                if (v < 0) ok = false;
                else cp = cp * 16 + static_cast<char32_t>(v);
              }
            } else {
              for (size_t k = 1; k < ent.size() && ok; ++k) {
                if (ent[k] < '0' || ent[k] > '9') ok = false;
                else cp = cp * 10 + static_cast<char32_t>(ent[k] - '0');
              }
            }
            if (ok && cp > 0 && cp <= 0x10FFFF) {
              // UTF-8 encode inline
              if (cp == '<' || cp == '>') {
                decoded = " ";
                ++scrubbed_angles;
              } else if (cp < 0x80) {
                decoded.push_back(static_cast<char>(cp));
              } else if (cp < 0x800) {
                decoded.push_back(static_cast<char>(0xC0 | (cp >> 6)));
                decoded.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
              } else if (cp < 0x10000) {
                decoded.push_back(static_cast<char>(0xE0 | (cp >> 12)));
                decoded.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                decoded.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
              } else {
                decoded.push_back(static_cast<char>(0xF0 | (cp >> 18)));
                decoded.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
                decoded.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
                decoded.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
              }
            }
          }
          if (!decoded.empty()) {
            for (char d : decoded) put_char(d);
            i = semi + 1;
            continue;
          }
        }
      }
      put_char(c);
      ++i;
    }
  }

  void run(std::string_view raw) {
    size_t i = 0;
    const size_t n = raw.size();
    while (i < n) {
      size_t lt = raw.find('<', i);
      if (lt == std::string_view::npos) {
        if (drop_depth == 0) append_text(raw.substr(i), true);
        break;
      }
      if (lt > i && drop_depth == 0) append_text(raw.substr(i, lt - i), true);
      i = lt;
      // Comment
      if (raw.compare(i, 4, "<!--") == 0) {
        size_t end = raw.find("-->", i + 4);
        if (end == std::string_view::npos) {
          warn("unterminated comment; dropping remainder");
          break;
        }
        i = end + 3;
        pending_boundary = true;
        continue;
      }
      // CDATA: content is literal text
      if (raw.compare(i, 9, "<![CDATA[") == 0) {
        size_t end = raw.find("]]>", i + 9);
        std::string_view content;
        if (end == std::string_view::npos) {
          warn("unterminated CDATA section");
          content = raw.substr(i + 9);
          i = n;
        } else {
          content = raw.substr(i + 9, end - (i + 9));
          i = end + 3;
        }
        if (drop_depth == 0) append_text(content, false);
        continue;
      }
      // Doctype / declaration / processing instruction
      if (i + 1 < n && (raw[i + 1] == '!' || raw[i + 1] == '?')) {
        size_t end = raw.find('>', i + 1);
        if (end == std::string_view::npos) {
          warn("unterminated declaration; dropping remainder");
          break;
        }
        i = end + 1;
        pending_boundary = true;
        continue;
      }
      // Element tag
      size_t p = i + 1;
      bool closing = false;
      if (p < n && raw[p] == '/') {
        closing = true;
        ++p;
      }
      if (p >= n || !is_name_start(raw[p])) {
        warn("stray '<' treated as text");
        put_char('<');  // scrubbed to space by put_char
        ++i;
        continue;
      }
      size_t name_start = p;
      while (p < n && is_name_char(raw[p])) ++p;
      std::string name = to_lower_ascii(raw.substr(name_start, p - name_start));
      // Scan to '>' honoring quoted attribute values
      bool self_closing = false;
      char quote = 0;
      bool found_end = false;
      for (; p < n; ++p) {
        char c = raw[p];
        if (quote) {
          if (c == quote) quote = 0;
        } else if (c == '"' || c == '\'') {
          quote = c;
        } else if (c == '>') {
          self_closing = p > name_start && raw[p - 1] == '/';
          found_end = true;
          ++p;
          break;
        }
      }
      if (!found_end) {
        warn("unterminated tag <" + name + ">; dropping remainder");
        break;
      }
      i = p;
      pending_boundary = true;
      if (closing) {
        if (drop_depth > 0) --drop_depth;
      } else {
        if (drop_depth == 0 && is_paragraph(name) ) ++result.paragraph_count;
        if (drop_depth > 0) {
          if (!self_closing) ++drop_depth;
        } else if (is_dropped(name)) {
          ++result.dropped_elements;
          if (!self_closing) drop_depth = 1;
        }
      }
    }
    if (drop_depth > 0) warn("unbalanced dropped element at end of document");
    if (scrubbed_angles > 0) {
      warn("replaced " + std::to_string(scrubbed_angles) + " stray angle bracket(s) with spaces");
    }
  }
};

}  // namespace

StripResult strip_markup(std::string_view raw, const StripOptions& options) {
  Stripper s(options);
  s.run(raw);
  return std::move(s.result);
}

}  // namespace stylos::markup
