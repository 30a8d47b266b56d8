#include "star/store.hpp"

#include <bit>
#include <charconv>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <zlib.h>

#include "star/error.hpp"

namespace star {

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kVocab = "vocab.tsv";
constexpr const char* kTerms = "terms.vec";
constexpr const char* kDocs = "docs.vec";
constexpr const char* kDocIds = "docids.tsv";

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

std::uint64_t get_u64(std::string_view in, std::size_t pos) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(in[pos + i]);
  return v;
}

std::string encode_vectors(std::span<const float> values, std::uint64_t rows, std::uint64_t d) {
  std::string out;
  out.reserve(24 + values.size() * 4);
  out.append(kVectorMagic, sizeof kVectorMagic);
  put_u64(out, rows);
  put_u64(out, d);
  for (float f : values) {
    auto bits = std::bit_cast<std::uint32_t>(f);
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
  return out;
}

struct DecodedVectors {
  std::uint64_t rows = 0;
  std::uint64_t d = 0;
  std::vector<float> values;
};

DecodedVectors decode_vectors(std::string_view bytes, const char* name) {
  if (bytes.size() < 24 || std::memcmp(bytes.data(), kVectorMagic, sizeof kVectorMagic) != 0)
    throw Error(ErrorCode::InconsistentBundle, std::string(name) + ": bad header");
  DecodedVectors out;
  out.rows = get_u64(bytes, 8);
  out.d = get_u64(bytes, 16);
  const std::uint64_t payload = bytes.size() - 24;
  if (out.d == 0 ? out.rows != 0 && payload != 0 : (payload % (4 * out.d) != 0 || payload / (4 * out.d) != out.rows))
    throw Error(ErrorCode::InconsistentBundle, std::string(name) + ": payload length does not match rows x d");
  out.values.resize(payload / 4);
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 3; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[24 + 4 * i + b]);
    out.values[i] = std::bit_cast<float>(bits);
  }
  return out;
}

std::string escape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string unescape_field(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out.push_back(s[i]);
      continue;
    }
    char c = s[++i];
    out.push_back(c == 't' ? '\t' : c == 'n' ? '\n' : c == 'r' ? '\r' : c);
  }
  return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    auto tab = line.find('\t', pos);
    out.push_back(line.substr(pos, tab == std::string_view::npos ? std::string_view::npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return out;
}

std::uint64_t parse_u64(std::string_view s, const char* what) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw Error(ErrorCode::InconsistentBundle, std::string(what) + ": bad integer '" + std::string(s) + "'");
  return v;
}

bool parse_flag(std::string_view s, const char* what) {
  if (s == "1") return true;
  if (s == "0") return false;
  throw Error(ErrorCode::InconsistentBundle, std::string(what) + ": bad flag '" + std::string(s) + "'");
}

template <typename Fn>
void for_each_row(std::string_view text, Fn&& fn) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    if (line.empty() || line.front() == '#') continue;
    fn(line);
  }
}

std::string encode_vocab(const IndexBundle& bundle) {
  std::map<std::string_view, const TermRow*> rows;
  for (const auto& row : bundle.terms) rows.emplace(row.term, &row);
  std::ostringstream out;
  out << "#term\tcollection_count\tdocument_frequency\tsignificant\tcontext_count\tpartial\n";
  for (const auto& [term, e] : bundle.vocab.entries()) {
    auto it = rows.find(term);
    out << escape_field(term) << '\t' << e.collection_count << '\t' << e.document_frequency << '\t'
        << (e.significant ? 1 : 0) << '\t' << (it == rows.end() ? 0 : it->second->context_count) << '\t'
        << (it != rows.end() && it->second->partial ? 1 : 0) << '\n';
  }
  return std::move(out).str();
}

std::string encode_docids(const IndexBundle& bundle) {
  std::ostringstream out;
  out << "#id\ttitle\tvector\n";
  for (const auto& d : bundle.documents)
    out << escape_field(d.id) << '\t' << escape_field(d.title) << '\t' << (d.has_vector ? 1 : 0) << '\n';
  return std::move(out).str();
}

std::string now_utc() {
  auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json manifest_to_json(const IndexManifest& m) {
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, sum] : m.files) {
    char hex[9];
    std::snprintf(hex, sizeof hex, "%08x", sum.crc32);
    files[name] = {{"crc32", hex}, {"bytes", sum.bytes}};
  }
  const auto& c = m.config;
  return {
      {"format_version", m.format_version},
      {"hash_function", m.hash_function},
      {"created", m.created},
      {"seed_config", {{"d", c.seed.d}, {"k", c.seed.k}, {"global_seed", c.seed.global_seed}}},
      {"significance_config",
       {{"max_df_ratio", c.significance.max_df_ratio}, {"min_count", c.significance.min_count}}},
      {"context_mode", c.context.to_string()},
      {"context_idf", c.context_idf},
      {"fold_title", c.fold_title},
      {"stats",
       {{"documents", m.stats.documents},
        {"significant_terms", m.stats.significant_terms},
        {"distinct_terms", m.stats.distinct_terms},
        {"total_tokens", m.stats.total_tokens}}},
      {"files", files},
  };
}

IndexManifest manifest_from_json(const nlohmann::json& j) {
  IndexManifest m;
  try {
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion)
      throw Error(ErrorCode::VersionMismatch, "index format " + std::to_string(m.format_version) +
                                                  ", reader supports " + std::to_string(kFormatVersion));
    m.hash_function = j.at("hash_function").get<std::string>();
    if (m.hash_function != kSeedHashId)
      throw Error(ErrorCode::HashFunctionMismatch,
                  "index seeds use '" + m.hash_function + "', reader uses '" + std::string(kSeedHashId) + "'");
    m.created = j.value("created", "");
    const auto& seed = j.at("seed_config");
    m.config.seed.d = seed.at("d").get<std::uint32_t>();
    m.config.seed.k = seed.at("k").get<std::uint32_t>();
    m.config.seed.global_seed = seed.at("global_seed").get<std::uint64_t>();
    const auto& sig = j.at("significance_config");
    m.config.significance.max_df_ratio = sig.at("max_df_ratio").get<double>();
    m.config.significance.min_count = sig.at("min_count").get<std::uint64_t>();
    m.config.context = ContextMode::parse(j.at("context_mode").get<std::string>());
    m.config.context_idf = j.at("context_idf").get<bool>();
    m.config.fold_title = j.at("fold_title").get<bool>();
    const auto& stats = j.at("stats");
    m.stats.documents = stats.at("documents").get<std::uint64_t>();
    m.stats.significant_terms = stats.at("significant_terms").get<std::uint64_t>();
    m.stats.distinct_terms = stats.at("distinct_terms").get<std::uint64_t>();
    m.stats.total_tokens = stats.at("total_tokens").get<std::uint64_t>();
    for (const auto& [name, sum] : j.at("files").items()) {
      FileChecksum fc;
      fc.crc32 = static_cast<std::uint32_t>(std::stoul(sum.at("crc32").get<std::string>(), nullptr, 16));
      fc.bytes = sum.at("bytes").get<std::uint64_t>();
      m.files.emplace(name, fc);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InconsistentBundle, std::string("manifest: ") + e.what());
  } catch (const std::logic_error& e) {
    throw Error(ErrorCode::InconsistentBundle, std::string("manifest: ") + e.what());
  }
  try {
    m.config.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::InconsistentBundle, std::string("manifest: ") + e.what());
  }
  return m;
}

std::string hex32(std::uint32_t v) {
  char hex[9];
  std::snprintf(hex, sizeof hex, "%08x", v);
  return hex;
}

// The manifest carries a CRC-32 of its own canonical body, and the file must
// be exactly the canonical serialization, so any edited byte is caught.
std::string seal_manifest(nlohmann::json j) {
  j.erase("checksum");
  const std::string body = j.dump(2);
  j["checksum"] = hex32(crc32_of(body));
  return j.dump(2) + "\n";
}

void verify_manifest(const nlohmann::json& j, std::string_view raw) {
  if (!j.contains("checksum") || !j["checksum"].is_string())
    throw Error(ErrorCode::ChecksumMismatch, "manifest has no checksum");
  nlohmann::json body = j;
  body.erase("checksum");
  if (hex32(crc32_of(body.dump(2))) != j["checksum"].get<std::string>() || seal_manifest(j) != raw)
    throw Error(ErrorCode::ChecksumMismatch, "manifest.json");
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return std::move(buf).str();
}

void write_all(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

}  // namespace

std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  const auto* p = reinterpret_cast<const Bytef*>(bytes.data());
  std::size_t left = bytes.size();
  while (left > 0) {
    auto chunk = static_cast<uInt>(std::min<std::size_t>(left, 1u << 30));
    crc = crc32(crc, p, chunk);
    p += chunk;
    left -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

bool equivalent(const IndexBundle& a, const IndexBundle& b) {
  return a.manifest.format_version == b.manifest.format_version &&
         a.manifest.hash_function == b.manifest.hash_function && a.manifest.config == b.manifest.config &&
         a.manifest.stats == b.manifest.stats && a.vocab == b.vocab && a.terms == b.terms &&
         a.documents == b.documents && a.doc_vectors == b.doc_vectors &&
         std::memcmp(a.accumulators.data(), b.accumulators.data(), a.accumulators.size() * sizeof(float)) == 0 &&
         a.accumulators.size() == b.accumulators.size();
}

void validate_bundle(const IndexBundle& bundle) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::InconsistentBundle, why); };
  const std::size_t d = bundle.dim();
  if (bundle.accumulators.size() != bundle.terms.size() * d) fail("accumulator matrix is not terms x d");
  if (bundle.doc_vectors.dim() != d) fail("document vectors have the wrong dimension");
  if (bundle.manifest.stats.documents != bundle.documents.size()) fail("document count disagrees with stats");
  if (compute_stats(bundle.vocab, bundle.documents.size()) != bundle.manifest.stats)
    fail("vocabulary disagrees with stats");

  std::size_t significant = 0;
  for (const auto& [term, e] : bundle.vocab.entries()) significant += e.significant ? 1 : 0;
  if (significant != bundle.terms.size()) fail("term rows do not match the significant vocabulary");
  for (std::size_t i = 0; i < bundle.terms.size(); ++i) {
    if (i > 0 && !(bundle.terms[i - 1].term < bundle.terms[i].term)) fail("term rows are not sorted");
    if (!bundle.vocab.is_significant(bundle.terms[i].term)) fail("term row '" + bundle.terms[i].term + "' not significant");
  }

  std::size_t row = 0;
  for (const auto& doc : bundle.documents) {
    if (!doc.has_vector) continue;
    if (row >= bundle.doc_vectors.size() || bundle.doc_vectors.id(row) != doc.id)
      fail("document vectors do not follow the id table");
    ++row;
  }
  if (row != bundle.doc_vectors.size()) fail("more document vectors than flagged ids");
}

IndexBundle make_bundle(const SemanticSpace& space, std::vector<DocRecord> documents, VectorTable doc_vectors) {
  IndexBundle bundle;
  bundle.manifest.hash_function = std::string(kSeedHashId);
  bundle.manifest.config = space.config();
  bundle.manifest.stats = space.stats();
  bundle.vocab = space.vocab();
  bundle.terms.reserve(space.accumulators().size());
  bundle.accumulators.reserve(space.accumulators().size() * space.dim());
  for (const auto& [term, acc] : space.accumulators()) {
    bundle.terms.push_back({term, acc.context_count, acc.partial});
    for (double x : acc.sum) bundle.accumulators.push_back(static_cast<float>(x));
  }
  bundle.documents = std::move(documents);
  bundle.doc_vectors = std::move(doc_vectors);
  validate_bundle(bundle);
  return bundle;
}

SemanticSpace restore_space(const IndexBundle& bundle) {
  const std::size_t d = bundle.dim();
  SemanticSpace::AccumulatorMap accs;
  for (std::size_t i = 0; i < bundle.terms.size(); ++i) {
    const float* row = bundle.accumulators.data() + i * d;
    SemanticAccumulator acc{std::vector<double>(row, row + d), bundle.terms[i].context_count, bundle.terms[i].partial};
    accs.emplace(bundle.terms[i].term, std::move(acc));
  }
  std::set<std::string, std::less<>> ids;
  for (const auto& doc : bundle.documents) ids.insert(doc.id);
  return SemanticSpace::restore(bundle.manifest.config, bundle.vocab, bundle.manifest.stats, std::move(accs),
                                std::move(ids));
}

IndexManifest save_index(const IndexBundle& bundle, const std::filesystem::path& dir) {
  validate_bundle(bundle);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoFailure, "cannot create " + dir.string() + ": " + ec.message());

  const std::pair<const char*, std::string> files[] = {
      {kVocab, encode_vocab(bundle)},
      {kTerms, encode_vectors(bundle.accumulators, bundle.terms.size(), bundle.dim())},
      {kDocs, encode_vectors(bundle.doc_vectors.values(), bundle.doc_vectors.size(), bundle.dim())},
      {kDocIds, encode_docids(bundle)},
  };
  IndexManifest manifest = bundle.manifest;
  manifest.format_version = kFormatVersion;
  manifest.hash_function = std::string(kSeedHashId);
  manifest.created = now_utc();
  manifest.files.clear();
  for (const auto& [name, bytes] : files) {
    write_all(dir / name, bytes);
    manifest.files[name] = {crc32_of(bytes), bytes.size()};
  }
  write_all(dir / kManifest, seal_manifest(manifest_to_json(manifest)));
  return manifest;
}

IndexBundle load_index(const std::filesystem::path& dir) {
  const std::string manifest_text = read_all(dir / kManifest);
  nlohmann::json json;
  try {
    json = nlohmann::json::parse(manifest_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InconsistentBundle, std::string("manifest: ") + e.what());
  }
  IndexBundle bundle;
  // Version and seed identity first: an index from another release is not
  // reported as corrupt.
  if (json.is_object()) {
    if (auto v = json.find("format_version"); v != json.end() && v->is_number_integer() && *v != kFormatVersion)
      throw Error(ErrorCode::VersionMismatch, "index format " + v->dump() + ", reader supports " +
                                                  std::to_string(kFormatVersion));
    if (auto h = json.find("hash_function"); h != json.end() && h->is_string() && *h != kSeedHashId)
      throw Error(ErrorCode::HashFunctionMismatch, "index seeds use " + h->dump());
  }
  verify_manifest(json, manifest_text);
  bundle.manifest = manifest_from_json(json);

  std::map<std::string, std::string> raw;
  for (const char* name : {kVocab, kTerms, kDocs, kDocIds}) {
    auto it = bundle.manifest.files.find(name);
    if (it == bundle.manifest.files.end())
      throw Error(ErrorCode::InconsistentBundle, std::string("manifest lists no checksum for ") + name);
    std::string bytes = read_all(dir / name);
    if (bytes.size() != it->second.bytes || crc32_of(bytes) != it->second.crc32)
      throw Error(ErrorCode::ChecksumMismatch, (dir / name).string());
    raw.emplace(name, std::move(bytes));
  }

  const std::uint32_t d = bundle.dim();
  std::vector<TermRow> rows_from_vocab;
  for_each_row(raw[kVocab], [&](std::string_view line) {
    auto f = split_tabs(line);
    if (f.size() != 6) throw Error(ErrorCode::InconsistentBundle, "vocab.tsv: expected 6 columns");
    VocabularyEntry e{unescape_field(f[0]), parse_u64(f[1], kVocab), parse_u64(f[2], kVocab), parse_flag(f[3], kVocab)};
    if (e.significant) rows_from_vocab.push_back({e.term, parse_u64(f[4], kVocab), parse_flag(f[5], kVocab)});
    bundle.vocab.put(std::move(e));
  });
  bundle.terms = std::move(rows_from_vocab);

  auto terms = decode_vectors(raw[kTerms], kTerms);
  if (terms.d != d || terms.rows != bundle.terms.size())
    throw Error(ErrorCode::InconsistentBundle, "terms.vec shape disagrees with manifest and vocabulary");
  bundle.accumulators = std::move(terms.values);

  for_each_row(raw[kDocIds], [&](std::string_view line) {
    auto f = split_tabs(line);
    if (f.size() != 3) throw Error(ErrorCode::InconsistentBundle, "docids.tsv: expected 3 columns");
    bundle.documents.push_back({unescape_field(f[0]), unescape_field(f[1]), parse_flag(f[2], kDocIds)});
  });

  auto docs = decode_vectors(raw[kDocs], kDocs);
  if (docs.d != d) throw Error(ErrorCode::InconsistentBundle, "docs.vec dimension disagrees with manifest");
  bundle.doc_vectors = VectorTable(d);
  bundle.doc_vectors.reserve(docs.rows);
  std::size_t row = 0;
  for (const auto& doc : bundle.documents) {
    if (!doc.has_vector) continue;
    if (row >= docs.rows) throw Error(ErrorCode::InconsistentBundle, "docs.vec has fewer rows than flagged ids");
    bundle.doc_vectors.append(doc.id, std::span<const float>(docs.values.data() + row * d, d));
    ++row;
  }
  if (row != docs.rows) throw Error(ErrorCode::InconsistentBundle, "docs.vec has more rows than flagged ids");

  validate_bundle(bundle);
  return bundle;
}

}  // namespace star
