#include "star/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "star/error.hpp"
#include "star/parallel.hpp"

namespace star {

namespace {

struct CodePoint {
  char32_t value = 0;
  std::size_t length = 1;
};

// Assumes valid UTF-8; malformed bytes decode as single-byte U+FFFD.
CodePoint decode(std::string_view s, std::size_t i) {
  const auto b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) return {b0, 1};
  auto cont = [&](std::size_t k) -> int {
    if (i + k >= s.size()) return -1;
    auto b = static_cast<unsigned char>(s[i + k]);
    return (b & 0xC0) == 0x80 ? (b & 0x3F) : -1;
  };
  if ((b0 & 0xE0) == 0xC0) {
    int c1 = cont(1);
    if (c1 >= 0) return {static_cast<char32_t>(((b0 & 0x1F) << 6) | c1), 2};
  } else if ((b0 & 0xF0) == 0xE0) {
    int c1 = cont(1), c2 = cont(2);
    if (c1 >= 0 && c2 >= 0) return {static_cast<char32_t>(((b0 & 0x0F) << 12) | (c1 << 6) | c2), 3};
  } else if ((b0 & 0xF8) == 0xF0) {
    int c1 = cont(1), c2 = cont(2), c3 = cont(3);
    if (c1 >= 0 && c2 >= 0 && c3 >= 0)
      return {static_cast<char32_t>(((b0 & 0x07) << 18) | (c1 << 12) | (c2 << 6) | c3), 4};
  }
  return {0xFFFD, 1};
}

bool is_space(char32_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v' || c == 0xA0 ||
         (c >= 0x2000 && c <= 0x200B) || c == 0x202F || c == 0x205F || c == 0x3000;
}

bool is_word(char32_t c) {
  if (c < 0x80) return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
  // Latin-1 punctuation, general punctuation, CJK punctuation.
  if (c <= 0xBF || c == 0xD7 || c == 0xF7) return false;
  if (c >= 0x2000 && c <= 0x206F) return false;
  if (c >= 0x2E00 && c <= 0x2E7F) return false;
  if (c >= 0x3000 && c <= 0x303F) return false;
  if (c == 0xFFFD) return false;
  return true;
}

void append_lower(std::string& out, std::string_view s, std::size_t i, CodePoint cp) {
  if (cp.value < 0x80) {
    char ch = s[i];
    out.push_back(ch >= 'A' && ch <= 'Z' ? static_cast<char>(ch - 'A' + 'a') : ch);
  } else if (cp.length == 2 && cp.value >= 0xC0 && cp.value <= 0xDE && cp.value != 0xD7) {
    char32_t lower = cp.value + 0x20;  // Latin-1 uppercase block
    out.push_back(static_cast<char>(0xC0 | (lower >> 6)));
    out.push_back(static_cast<char>(0x80 | (lower & 0x3F)));
  } else {
    out.append(s.substr(i, cp.length));
  }
}

bool is_blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(), [](char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
  });
}

std::vector<std::string_view> split_raw_paragraphs(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  std::size_t para_begin = std::string_view::npos;
  std::size_t para_end = 0;
  while (pos <= text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::size_t line_end = nl == std::string_view::npos ? text.size() : nl;
    std::string_view line = text.substr(pos, line_end - pos);
    if (is_blank(line)) {
      if (para_begin != std::string_view::npos) {
        out.push_back(text.substr(para_begin, para_end - para_begin));
        para_begin = std::string_view::npos;
      }
    } else {
      if (para_begin == std::string_view::npos) para_begin = pos;
      para_end = line_end;
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (para_begin != std::string_view::npos) out.push_back(text.substr(para_begin, para_end - para_begin));
  return out;
}

std::vector<Sentence> tokenize_paragraph(std::string_view s) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::string token;
  auto flush_token = [&] {
    if (!token.empty()) current.push_back(std::move(token));
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  };

  std::size_t i = 0;
  while (i < s.size()) {
    CodePoint cp = decode(s, i);
    std::size_t next = i + cp.length;
    if (is_word(cp.value)) {
      append_lower(token, s, i, cp);
    } else if (cp.value == '-' && !token.empty() && next < s.size() && is_word(decode(s, next).value)) {
      token.push_back('-');
    } else if (cp.value == '.' || cp.value == '!' || cp.value == '?') {
      flush_token();
      if (next >= s.size() || is_space(decode(s, next).value)) flush_sentence();
    } else {
      flush_token();
    }
    i = next;
  }
  flush_sentence();
  return sentences;
}

}  // namespace

std::size_t TokenizedDocument::token_count() const {
  std::size_t n = 0;
  for (const auto& s : sentences) n += s.size();
  return n;
}

TokenizedBody tokenize(std::string_view text) {
  TokenizedBody body;
  for (std::string_view raw : split_raw_paragraphs(text)) {
    auto sentences = tokenize_paragraph(raw);
    if (sentences.empty()) continue;
    ParagraphRange range{body.sentences.size(), body.sentences.size() + sentences.size()};
    for (auto& sentence : sentences) body.sentences.push_back(std::move(sentence));
    body.paragraphs.push_back(range);
  }
  return body;
}

std::vector<std::string> paragraph_texts(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view raw : split_raw_paragraphs(text))
    if (!tokenize_paragraph(raw).empty()) out.emplace_back(raw);
  return out;
}

TokenizedDocument tokenize_document(const RawDocument& doc, bool fold_title) {
  TokenizedDocument out;
  out.id = doc.id;
  if (fold_title && doc.title && !doc.title->empty()) {
    // A title is one paragraph even if it spans lines.
    std::string flat = *doc.title;
    std::replace(flat.begin(), flat.end(), '\n', ' ');
    auto title = tokenize(flat);
    for (auto& sentence : title.sentences) out.sentences.push_back(std::move(sentence));
    if (!out.sentences.empty()) out.paragraphs.push_back({0, out.sentences.size()});
  }
  auto body = tokenize(doc.text);
  const std::size_t offset = out.sentences.size();
  for (auto& sentence : body.sentences) out.sentences.push_back(std::move(sentence));
  for (const auto& p : body.paragraphs) out.paragraphs.push_back({p.begin + offset, p.end + offset});
  return out;
}

std::vector<TokenizedDocument> tokenize_all(std::span<const RawDocument> docs, bool fold_title,
                                            int workers) {
  std::vector<TokenizedDocument> out(docs.size());
  parallel_shards(docs.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = tokenize_document(docs[i], fold_title);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Vocabulary

void SignificanceConfig::validate() const {
  if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0))
    throw Error(ErrorCode::ConfigInvalid, "max_df_ratio must lie in (0, 1]");
}

void TermCounts::add_document(const TokenizedDocument& doc) {
  std::set<std::string_view> seen;
  for (const auto& sentence : doc.sentences) {
    for (const auto& token : sentence) {
      auto it = terms.find(token);
      if (it == terms.end()) it = terms.emplace(token, Tally{}).first;
      ++it->second.collection_count;
      if (seen.insert(it->first).second) ++it->second.document_frequency;
      ++total_tokens;
    }
  }
  ++documents;
}

void TermCounts::merge(const TermCounts& other) {
  for (const auto& [term, tally] : other.terms) {
    auto& mine = terms[term];
    mine.collection_count += tally.collection_count;
    mine.document_frequency += tally.document_frequency;
  }
  documents += other.documents;
  total_tokens += other.total_tokens;
}

bool is_significant(std::uint64_t collection_count, std::uint64_t document_frequency,
                    std::uint64_t documents, const SignificanceConfig& config) {
  // Relative slack so that e.g. 0.29 * 100 still admits df = 29.
  const double limit = config.max_df_ratio * static_cast<double>(documents) * (1.0 + 1e-12);
  return collection_count >= config.min_count && static_cast<double>(document_frequency) <= limit;
}

const VocabularyEntry* Vocabulary::find(std::string_view term) const {
  auto it = entries_.find(term);
  return it == entries_.end() ? nullptr : &it->second;
}

bool Vocabulary::is_significant(std::string_view term) const {
  const auto* e = find(term);
  return e != nullptr && e->significant;
}

void Vocabulary::add_counts(const TermCounts& counts) {
  for (const auto& [term, tally] : counts.terms) {
    auto it = entries_.find(term);
    if (it == entries_.end()) it = entries_.emplace(term, VocabularyEntry{term, 0, 0, false}).first;
    it->second.collection_count += tally.collection_count;
    it->second.document_frequency += tally.document_frequency;
  }
}

void Vocabulary::apply_significance(const SignificanceConfig& config, std::uint64_t documents) {
  for (auto& [term, entry] : entries_)
    entry.significant =
        star::is_significant(entry.collection_count, entry.document_frequency, documents, config);
}

void Vocabulary::put(VocabularyEntry entry) {
  std::string key = entry.term;
  entries_.insert_or_assign(std::move(key), std::move(entry));
}

CorpusStats compute_stats(const Vocabulary& vocab, std::uint64_t documents) {
  CorpusStats stats;
  stats.documents = documents;
  stats.distinct_terms = vocab.size();
  for (const auto& [term, entry] : vocab.entries()) {
    stats.total_tokens += entry.collection_count;
    if (entry.significant) ++stats.significant_terms;
  }
  return stats;
}

std::pair<Vocabulary, CorpusStats> build_vocabulary(std::span<const TokenizedDocument> docs,
                                                    const SignificanceConfig& config, int workers) {
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "no documents");
  config.validate();

  auto bounds = shard_bounds(docs.size(), static_cast<std::size_t>(resolve_workers(workers)));
  std::vector<TermCounts> partial(bounds.size() - 1);
  parallel_shards(docs.size(), workers, [&](std::size_t shard, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) partial[shard].add_document(docs[i]);
  });

  Vocabulary vocab;
  for (const auto& counts : partial) vocab.add_counts(counts);
  vocab.apply_significance(config, docs.size());
  CorpusStats stats = compute_stats(vocab, docs.size());
  return {std::move(vocab), stats};
}

std::vector<std::string> significant_terms(const Vocabulary& vocab) {
  std::vector<std::string> out;
  for (const auto& [term, entry] : vocab.entries())
    if (entry.significant) out.push_back(term);
  return out;
}

// ---------------------------------------------------------------------------
// Loading

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len;
    char32_t min;
    if (b0 < 0x80) {
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      min = 0x10000;
    } else {
      return false;
    }
    if (i + len > s.size()) return false;
    char32_t cp = b0 & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k) {
      auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (b & 0x3F);
    }
    if (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
    i += len;
  }
  return true;
}

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return std::move(buf).str();
}

void check_unique(const std::vector<RawDocument>& docs) {
  std::set<std::string_view> ids;
  for (const auto& d : docs)
    if (!ids.insert(d.id).second) throw Error(ErrorCode::DuplicateDocumentId, d.id);
}

}  // namespace

std::vector<RawDocument> load_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    auto where = path.string() + ":" + std::to_string(line_no);
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::InvalidInput, where + ": " + e.what());
    }
    if (!obj.is_object()) throw Error(ErrorCode::InvalidInput, where + ": expected an object");
    auto id = obj.find("id");
    auto text = obj.find("text");
    if (id == obj.end() || !id->is_string() || id->get_ref<const std::string&>().empty())
      throw Error(ErrorCode::InvalidInput, where + ": missing or empty string field 'id'");
    if (text == obj.end() || !text->is_string())
      throw Error(ErrorCode::InvalidInput, where + ": missing string field 'text'");
    RawDocument doc{id->get<std::string>(), std::nullopt, text->get<std::string>()};
    if (auto title = obj.find("title"); title != obj.end() && !title->is_null()) {
      if (!title->is_string()) throw Error(ErrorCode::InvalidInput, where + ": 'title' must be a string");
      doc.title = title->get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  check_unique(docs);
  return docs;
}

std::vector<RawDocument> load_text_directory(const std::filesystem::path& path) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(path, ec))
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  if (ec) throw Error(ErrorCode::IoFailure, "cannot list " + path.string() + ": " + ec.message());
  std::sort(files.begin(), files.end());

  std::vector<RawDocument> docs;
  for (const auto& file : files) {
    std::string text = read_file(file);
    if (!is_valid_utf8(text)) throw Error(ErrorCode::InvalidInput, file.string() + ": not valid UTF-8");
    docs.push_back({file.stem().string(), std::nullopt, std::move(text)});
  }
  check_unique(docs);
  return docs;
}

std::vector<RawDocument> load_corpus(const std::filesystem::path& path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) return load_text_directory(path);
  if (!std::filesystem::exists(path, ec)) throw Error(ErrorCode::IoFailure, "no such corpus: " + path.string());
  return load_jsonl(path);
}

}  // namespace star
