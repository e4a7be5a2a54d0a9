#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace stylos::markup {

struct StripOptions {
  // Element subtrees dropped wholesale (names compared case-insensitively).
  // TEI headers are metadata; notes/apparatus are editorial, not author text.
  std::vector<std::string> drop_elements = {"teiheader", "note", "fw", "figdesc", "del"};
  // Elements counted as paragraphs.
  std::vector<std::string> paragraph_elements = {"p"};
};

struct StripResult {
  std::string text;
  long paragraph_count = 0;
  long dropped_elements = 0;   // subtrees removed via drop_elements
  long warning_count = 0;      // malformed markup recovered from
  std::vector<std::string> warnings;  // first few messages, for the ingest log
};

// Removes element tags and metadata, joining element text content in document
// order with single spaces at element boundaries. Text outside tags is left
// byte-identical. Malformed markup degrades to tag-stripping with a warning
// rather than failing the document.
StripResult strip_markup(std::string_view raw, const StripOptions& options = {});

}  // namespace stylos::markup
