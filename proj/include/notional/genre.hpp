#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "notional/errors.hpp"
#include "notional/text.hpp"

namespace notional {

enum class Genre { bc_conv, bc_news, phone, news, bible, translations, web };

inline constexpr std::array<Genre, 7> kAllGenres = {Genre::bc_conv, Genre::bc_news, Genre::phone,
                                                    Genre::news,    Genre::bible,   Genre::translations,
                                                    Genre::web};

inline std::string_view to_string(Genre g) {
  switch (g) {
    case Genre::bc_conv: return "bc.conv";
    case Genre::bc_news: return "bc.news";
    case Genre::phone: return "phone";
    case Genre::news: return "news";
    case Genre::bible: return "bible";
    case Genre::translations: return "translations";
    case Genre::web: return "web";
  }
  return "?";
}

inline std::optional<Genre> parse_genre(std::string_view s) {
  for (Genre g : kAllGenres)
    if (to_string(g) == s) return g;
  return std::nullopt;
}

inline bool is_spoken(Genre g) {
  return g == Genre::bc_conv || g == Genre::bc_news || g == Genre::phone;
}

/// Ordered (path prefix, genre) pairs. The longest matching prefix wins.
class GenreMap {
 public:
  GenreMap() = default;
  explicit GenreMap(std::vector<std::pair<std::string, Genre>> entries) : entries_(std::move(entries)) {}

  /// OntoNotes 5 layout. Translated web and newswire subcorpora (Arabic and
  /// Chinese to English) are split out of their source genre; bn/ is treated
  /// as broadcast news and bc/ as broadcast conversation.
  static GenreMap defaults() {
    return GenreMap({
        {"bc/", Genre::bc_conv},
        {"bn/", Genre::bc_news},
        {"tc/", Genre::phone},
        {"nw/", Genre::news},
        {"mz/", Genre::news},
        {"pt/", Genre::bible},
        {"wb/", Genre::web},
        {"nw/p2.5_a2e/", Genre::translations},
        {"nw/p2.5_c2e/", Genre::translations},
        {"wb/a2e/", Genre::translations},
        {"wb/c2e/", Genre::translations},
    });
  }

  /// One `prefix<TAB>genre` per line; blank lines and '#' comments ignored.
  static GenreMap parse(std::string_view content) {
    std::vector<std::pair<std::string, Genre>> entries;
    std::size_t line_no = 0;
    for (auto line : text::lines(content)) {
      ++line_no;
      auto t = text::trim(line);
      if (t.empty() || t.front() == '#') continue;
      auto cells = text::split(t, '\t');
      if (cells.size() != 2)
        throw FormatError("genre map line " + std::to_string(line_no) + ": expected prefix<TAB>genre");
      auto g = parse_genre(text::trim(cells[1]));
      if (!g)
        throw FormatError("genre map line " + std::to_string(line_no) + ": unknown genre '" +
                          std::string(cells[1]) + "'");
      entries.emplace_back(std::string(text::trim(cells[0])), *g);
    }
    return GenreMap(std::move(entries));
  }

  static GenreMap load(const std::filesystem::path& path) { return parse(text::read_file(path)); }

  const std::vector<std::pair<std::string, Genre>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<std::string, Genre>> entries_;
};

/// Throws UnmappedDocumentError when no prefix matches. Among equally long
/// matches the earliest entry wins.
inline Genre assign_genre(std::string_view doc_id, const GenreMap& map) {
  std::optional<Genre> best;
  std::size_t best_len = 0;
  for (const auto& [prefix, genre] : map.entries()) {
    if (doc_id.starts_with(prefix) && (!best || prefix.size() > best_len)) {
      best = genre;
      best_len = prefix.size();
    }
  }
  if (!best) throw UnmappedDocumentError(std::string(doc_id));
  return *best;
}

}  // namespace notional
