#include "c2v/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace c2v {

namespace {

inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\v' || c == '\f';
}

// Returns the length of the UTF-8 sequence starting at p, or 0 if invalid.
size_t utf8_seq_len(const unsigned char* p, size_t avail, uint32_t* out) {
  unsigned char b0 = p[0];
  if (b0 < 0x80) {
    *out = b0;
    return 1;
  }
  size_t len;
  uint32_t cp;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return 0;
  }
  if (avail < len) return 0;
  for (size_t i = 1; i < len; ++i) {
    if ((p[i] & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (p[i] & 0x3F);
  }
  // Reject overlong encodings, surrogates and out-of-range points.
  if (len == 2 && cp < 0x80) return 0;
  if (len == 3 && cp < 0x800) return 0;
  if (len == 4 && cp < 0x10000) return 0;
  if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  *out = cp;
  return len;
}

[[noreturn]] void bad_byte(size_t offset) {
  throw DataError("undecodable byte at offset " + std::to_string(offset));
}

}  // namespace

void for_each_token(std::string_view text,
                    const std::function<void(std::string_view)>& fn) {
  const unsigned char* data = reinterpret_cast<const unsigned char*>(text.data());
  size_t n = text.size();
  size_t i = 0;
  size_t start = 0;
  bool in_token = false;
  while (i < n) {
    unsigned char b = data[i];
    if (b < 0x80) {
      if (is_space(b)) {
        if (in_token) {
          fn(text.substr(start, i - start));
          in_token = false;
        }
        ++i;
        continue;
      }
      if (!in_token) {
        start = i;
        in_token = true;
      }
      ++i;
      continue;
    }
    uint32_t cp;
    size_t len = utf8_seq_len(data + i, n - i, &cp);
    if (len == 0) bad_byte(i);
    if (!in_token) {
      start = i;
      in_token = true;
    }
    i += len;
  }
  if (in_token) fn(text.substr(start, n - start));
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for_each_token(text, [&](std::string_view t) { out.emplace_back(t); });
  return out;
}

std::vector<uint32_t> utf8_codepoints(std::string_view word) {
  std::vector<uint32_t> out;
  const unsigned char* data = reinterpret_cast<const unsigned char*>(word.data());
  size_t n = word.size();
  size_t i = 0;
  while (i < n) {
    uint32_t cp;
    size_t len = utf8_seq_len(data + i, n - i, &cp);
    if (len == 0) bad_byte(i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

Vocab Vocab::build(const std::unordered_map<std::string, uint64_t>& counts,
                   uint64_t min_count, uint64_t corpus_tokens) {
  require(min_count >= 1, "min_count must be >= 1");
  std::vector<std::pair<std::string, uint64_t>> rows;
  rows.reserve(counts.size());
  for (const auto& [word, count] : counts) {
    if (count >= min_count) rows.emplace_back(word, count);
  }
  if (rows.empty()) {
    throw DataError("vocabulary is empty after frequency cutoff (min_count=" +
                    std::to_string(min_count) + ")");
  }
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  Vocab v;
  v.corpus_tokens_ = corpus_tokens;
  v.words_.reserve(rows.size());
  v.counts_.reserve(rows.size());
  for (auto& [word, count] : rows) {
    v.ids_.emplace(word, static_cast<uint32_t>(v.words_.size()));
    v.words_.push_back(std::move(word));
    v.counts_.push_back(count);
  }
  return v;
}

Vocab Vocab::from_rows(std::vector<std::string> words, std::vector<uint64_t> counts,
                       uint64_t corpus_tokens) {
  require(words.size() == counts.size(), "vocab rows: words/counts length");
  Vocab v;
  v.words_ = std::move(words);
  v.counts_ = std::move(counts);
  v.corpus_tokens_ = corpus_tokens;
  for (uint32_t i = 0; i < v.words_.size(); ++i) v.ids_.emplace(v.words_[i], i);
  if (v.ids_.size() != v.words_.size()) throw DataError("vocab rows: duplicate word");
  return v;
}

std::optional<uint32_t> Vocab::id_of(std::string_view word) const {
  auto it = ids_.find(std::string(word));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void Vocab::dump(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write vocabulary file: " + path);
  for (uint32_t i = 0; i < size(); ++i) {
    out << words_[i] << '\t' << counts_[i] << '\n';
  }
}

CharVocab CharVocab::build(const Vocab& vocab) {
  std::vector<uint32_t> cps;
  for (const std::string& w : vocab.words()) {
    for (uint32_t cp : utf8_codepoints(w)) cps.push_back(cp);
  }
  std::sort(cps.begin(), cps.end());
  cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
  return from_codepoints(std::move(cps));
}

CharVocab CharVocab::from_codepoints(std::vector<uint32_t> codepoints) {
  CharVocab cv;
  cv.codepoints_ = std::move(codepoints);
  for (uint32_t i = 0; i < cv.codepoints_.size(); ++i) {
    cv.ids_.emplace(cv.codepoints_[i], i + kReserved);
  }
  if (cv.ids_.size() != cv.codepoints_.size()) {
    throw DataError("character vocabulary has duplicate code points");
  }
  return cv;
}

std::optional<uint32_t> CharVocab::id_of(uint32_t codepoint) const {
  auto it = ids_.find(codepoint);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::vector<uint32_t> CharVocab::char_sequence(std::string_view word,
                                               OnUnknownChar mode) const {
  if (word.empty()) throw DataError("char_sequence: empty word");
  std::vector<uint32_t> cps = utf8_codepoints(word);
  std::vector<uint32_t> out;
  out.reserve(cps.size() + 2);
  out.push_back(kBow);
  for (uint32_t cp : cps) {
    std::optional<uint32_t> id = id_of(cp);
    if (id) {
      out.push_back(*id);
    } else if (mode == OnUnknownChar::kMapToUnk) {
      out.push_back(kUnk);
    } else {
      throw DataError("char_sequence: unknown character (code point " +
                      std::to_string(cp) + ") in word '" + std::string(word) + "'");
    }
  }
  out.push_back(kEow);
  return out;
}

std::unordered_map<std::string, uint64_t> count_tokens(std::string_view text,
                                                       uint64_t* total_tokens) {
  std::unordered_map<std::string, uint64_t> counts;
  uint64_t total = 0;
  for_each_token(text, [&](std::string_view t) {
    ++counts[std::string(t)];
    ++total;
  });
  if (total_tokens != nullptr) *total_tokens = total;
  return counts;
}

std::vector<uint32_t> ids_in_vocab(std::string_view text, const Vocab& vocab) {
  std::vector<uint32_t> ids;
  for_each_token(text, [&](std::string_view t) {
    if (auto id = vocab.id_of(t)) ids.push_back(*id);
  });
  return ids;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace c2v
