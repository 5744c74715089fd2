// Corpus ingestion: whitespace tokenizer with UTF-8 validation, the word
// vocabulary with frequency cutoff, and the character vocabulary with its
// reserved begin/end/unknown symbols.
#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "c2v/common.hpp"

namespace c2v {

// Calls fn(token) for every whitespace-separated token. Bytes must form
// valid UTF-8; the first offending byte is reported by offset.
void for_each_token(std::string_view text,
                    const std::function<void(std::string_view)>& fn);

std::vector<std::string> tokenize(std::string_view text);

// Decodes a UTF-8 word into code points. Throws DataError on bad bytes.
std::vector<uint32_t> utf8_codepoints(std::string_view word);

class Vocab {
 public:
  Vocab() = default;

  // Retains words with count >= min_count; ids are dense, ordered by
  // descending count with lexicographic tie-break. Throws DataError if
  // nothing survives the cutoff.
  static Vocab build(const std::unordered_map<std::string, uint64_t>& counts,
                     uint64_t min_count, uint64_t corpus_tokens);

  std::optional<uint32_t> id_of(std::string_view word) const;
  const std::string& word(uint32_t id) const { return words_[id]; }
  uint64_t count(uint32_t id) const { return counts_[id]; }
  uint32_t size() const { return static_cast<uint32_t>(words_.size()); }
  uint64_t corpus_tokens() const { return corpus_tokens_; }
  const std::vector<uint64_t>& counts() const { return counts_; }
  const std::vector<std::string>& words() const { return words_; }

  // Text dump: `word<TAB>count`, descending count.
  void dump(const std::string& path) const;

  // Rebuild from (word, count) rows already in id order.
  static Vocab from_rows(std::vector<std::string> words, std::vector<uint64_t> counts,
                         uint64_t corpus_tokens);

 private:
  std::vector<std::string> words_;
  std::vector<uint64_t> counts_;
  std::unordered_map<std::string, uint32_t> ids_;
  uint64_t corpus_tokens_ = 0;
};

enum class OnUnknownChar { kError, kMapToUnk };

class CharVocab {
 public:
  // Reserved ids. These are symbols, not characters, so they can never
  // collide with corpus code points.
  static constexpr uint32_t kBow = 0;
  static constexpr uint32_t kEow = 1;
  static constexpr uint32_t kUnk = 2;
  static constexpr uint32_t kReserved = 3;

  CharVocab() = default;

  static CharVocab build(const Vocab& vocab);
  static CharVocab from_codepoints(std::vector<uint32_t> codepoints);

  uint32_t size() const { return static_cast<uint32_t>(codepoints_.size()) + kReserved; }
  const std::vector<uint32_t>& codepoints() const { return codepoints_; }

  std::optional<uint32_t> id_of(uint32_t codepoint) const;

  // [BOW, chars..., EOW]. Unknown characters are an error while building
  // training data and map to the UNK symbol at inference.
  std::vector<uint32_t> char_sequence(std::string_view word, OnUnknownChar mode) const;

 private:
  std::vector<uint32_t> codepoints_;  // id = index + kReserved
  std::unordered_map<uint32_t, uint32_t> ids_;
};

// Counts tokens and maps a corpus to in-vocabulary ids in one pass each.
std::unordered_map<std::string, uint64_t> count_tokens(std::string_view text,
                                                       uint64_t* total_tokens);

// Drops out-of-vocabulary tokens, so window positions skip over them.
std::vector<uint32_t> ids_in_vocab(std::string_view text, const Vocab& vocab);

std::string read_file(const std::string& path);

}  // namespace c2v
