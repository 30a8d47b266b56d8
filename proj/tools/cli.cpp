#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "star/analytics.hpp"
#include "star/error.hpp"
#include "star/parallel.hpp"
#include "star/pipeline.hpp"
#include "star/seedspace.hpp"
#include "star/simeng.hpp"
#include "star/store.hpp"

namespace star {

namespace {

using nlohmann::json;

struct Global {
  std::string index;
  bool json = false;
  int workers = 0;
};

struct BuildOpts {
  std::string corpus;
  SpaceConfig config;
  std::string context = "sentence";
  bool no_fold_title = false;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tsv_field(std::string_view s) {
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

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCorpus:
    case ErrorCode::ConfigInvalid:
    case ErrorCode::InvalidInput:
    case ErrorCode::DuplicateDocumentId:
      return kExitInput;
    case ErrorCode::IoFailure:
    case ErrorCode::InconsistentBundle:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::VersionMismatch:
    case ErrorCode::HashFunctionMismatch:
      return kExitIo;
    default:
      return kExitDomain;
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::vector<std::string> read_id_list(const std::string& path) {
  std::istringstream in(read_text(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    ids.push_back(line.substr(start));
  }
  if (ids.empty()) throw Error(ErrorCode::InvalidInput, path + ": no document ids");
  return ids;
}

const RawDocument& find_doc(const std::vector<RawDocument>& docs, std::string_view id) {
  for (const auto& d : docs)
    if (d.id == id) return d;
  throw Error(ErrorCode::InvalidInput, "document '" + std::string(id) + "' not in corpus");
}

void require_index(const Global& g) {
  if (g.index.empty()) throw Error(ErrorCode::InvalidInput, "no index directory (use --index or STAR_INDEX)");
}

std::string title_of(const IndexBundle& bundle, std::string_view id) {
  for (const auto& d : bundle.documents)
    if (d.id == id) return d.title;
  return {};
}

VectorTable select_docs(const IndexBundle& bundle, const std::vector<std::string>& ids) {
  VectorTable out(bundle.dim());
  for (const auto& id : ids) {
    auto row = bundle.doc_vectors.find(id);
    if (!row) throw Error(ErrorCode::InvalidInput, "document '" + id + "' has no vector in the index");
    out.append(id, bundle.doc_vectors.row(*row));
  }
  return out;
}

json stats_json(const CorpusStats& s) {
  return {{"documents", s.documents},
          {"significant_terms", s.significant_terms},
          {"distinct_terms", s.distinct_terms},
          {"total_tokens", s.total_tokens}};
}

// ---------------------------------------------------------------------------

int cmd_build(const Global& g, BuildOpts opts, std::ostream& out, std::ostream& err) {
  require_index(g);
  opts.config.context = ContextMode::parse(opts.context);
  opts.config.fold_title = !opts.no_fold_title;
  opts.config.validate();
  const auto start = std::chrono::steady_clock::now();
  auto docs = load_corpus(opts.corpus);
  auto built = build_index(docs, opts.config, g.workers);
  save_index(built.bundle, g.index);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto& s = built.bundle.manifest.stats;
  if (g.json) {
    json j = stats_json(s);
    j["skipped"] = built.skipped;
    out << j.dump() << '\n';
  } else {
    out << "#documents\tsignificant_terms\tdistinct_terms\ttotal_tokens\tskipped\n"
        << s.documents << '\t' << s.significant_terms << '\t' << s.distinct_terms << '\t' << s.total_tokens << '\t'
        << built.skipped.size() << '\n';
  }
  // Timing depends on the machine, so it stays off stdout.
  err << "built " << g.index << " in " << fixed(secs, 3) << " s with " << resolve_workers(g.workers)
      << " workers\n";
  return kExitOk;
}

int cmd_query(const Global& g, const std::string& text, const std::string& file, std::size_t k,
              std::ostream& out) {
  require_index(g);
  if (text.empty() == file.empty()) throw Error(ErrorCode::InvalidInput, "give exactly one of --text or --file");
  auto bundle = load_index(g.index);
  auto space = restore_space(bundle);
  RawDocument q{"query", std::nullopt, file.empty() ? text : read_text(file)};
  auto vec = compose_vector(space, bag_of(tokenize_document(q, false))).vec;
  auto hits = top_k(bundle.doc_vectors, vec, k, {}, g.workers);

  if (g.json) {
    json rows = json::array();
    for (std::size_t i = 0; i < hits.size(); ++i)
      rows.push_back({{"rank", i + 1}, {"sigma", hits[i].sigma}, {"id", hits[i].id},
                      {"title", title_of(bundle, hits[i].id)}});
    out << rows.dump() << '\n';
  } else {
    out << "#rank\tsigma\tid\ttitle\n";
    for (std::size_t i = 0; i < hits.size(); ++i)
      out << i + 1 << '\t' << fixed(hits[i].sigma, 3) << '\t' << tsv_field(hits[i].id) << '\t'
          << tsv_field(title_of(bundle, hits[i].id)) << '\n';
  }
  return kExitOk;
}

int cmd_neighbors(const Global& g, const std::string& term, const std::vector<std::string>& orthogonal_to,
                  std::size_t k, std::ostream& out) {
  require_index(g);
  auto bundle = load_index(g.index);
  auto space = restore_space(bundle);
  Vector v = term_vector(space, term);
  for (const auto& anchor : orthogonal_to) v = orthogonalize(v, term_vector(space, anchor));
  auto hits = top_k(term_table(space, g.workers), v, k, {}, g.workers);

  if (g.json) {
    json rows = json::array();
    for (const auto& h : hits) rows.push_back({{"term", h.id}, {"sigma", h.sigma}});
    out << rows.dump() << '\n';
  } else {
    out << "#term\tsigma\n";
    for (const auto& h : hits) out << tsv_field(h.id) << '\t' << fixed(h.sigma, 3) << '\n';
  }
  return kExitOk;
}

int cmd_add(const Global& g, const std::string& corpus, std::ostream& out) {
  require_index(g);
  auto bundle = load_index(g.index);
  auto docs = load_corpus(corpus);
  auto result = add_to_index(bundle, docs, g.workers);
  save_index(bundle, g.index);

  const auto& s = bundle.manifest.stats;
  if (g.json) {
    json j = stats_json(s);
    j["added"] = result.update.documents_added;
    j["promoted"] = result.update.promoted;
    j["demoted"] = result.update.demoted;
    j["skipped"] = result.skipped;
    out << j.dump() << '\n';
  } else {
    out << "#added\tdocuments\tsignificant_terms\tpromoted\tdemoted\tskipped\n"
        << result.update.documents_added << '\t' << s.documents << '\t' << s.significant_terms << '\t'
        << result.update.promoted.size() << '\t' << result.update.demoted.size() << '\t' << result.skipped.size()
        << '\n';
  }
  return kExitOk;
}

int cmd_cluster(const Global& g, const std::string& ids_file, const std::string& linkage, double threshold,
                std::size_t top, std::ostream& out) {
  require_index(g);
  auto bundle = load_index(g.index);
  const VectorTable docs = ids_file.empty() ? bundle.doc_vectors : select_docs(bundle, read_id_list(ids_file));
  auto dendrogram = hcluster(docs, parse_linkage(linkage), g.workers);
  auto cut = top > 0 ? cut_top(dendrogram, top) : cut_clusters(dendrogram, threshold);

  if (g.json) {
    json clusters = json::array();
    for (std::size_t c = 0; c < cut.clusters.size(); ++c) {
      json members = json::array();
      for (auto leaf : cut.clusters[c].members)
        members.push_back({{"id", dendrogram.leaves[leaf]}, {"title", title_of(bundle, dendrogram.leaves[leaf])}});
      clusters.push_back({{"cluster", c + 1}, {"split_at", cut.clusters[c].split_at}, {"members", members}});
    }
    out << json{{"clusters", clusters}, {"singletons", cut.singletons}}.dump() << '\n';
  } else {
    out << "#cluster\tsplit_at\tid\ttitle\n";
    for (std::size_t c = 0; c < cut.clusters.size(); ++c)
      for (auto leaf : cut.clusters[c].members)
        out << c + 1 << '\t' << fixed(cut.clusters[c].split_at, 4) << '\t' << tsv_field(dendrogram.leaves[leaf])
            << '\t' << tsv_field(title_of(bundle, dendrogram.leaves[leaf])) << '\n';
    out << "#singletons\t" << cut.singletons << '\n';
  }
  return kExitOk;
}

int cmd_summarize(const Global& g, const std::string& file, const std::string& corpus, const std::string& doc_id,
                  std::size_t n_keep, const std::string& unit_name, std::ostream& out) {
  require_index(g);
  if (file.empty() == corpus.empty()) throw Error(ErrorCode::InvalidInput, "give exactly one of --file or --corpus");
  SummaryUnit unit;
  if (unit_name == "paragraph")
    unit = SummaryUnit::Paragraph;
  else if (unit_name == "sentence")
    unit = SummaryUnit::Sentence;
  else
    throw Error(ErrorCode::ConfigInvalid, "unknown unit '" + unit_name + "'");

  RawDocument raw;
  if (!file.empty()) {
    raw = {std::filesystem::path(file).stem().string(), std::nullopt, read_text(file)};
  } else {
    if (doc_id.empty()) throw Error(ErrorCode::InvalidInput, "--corpus needs --doc");
    auto docs = load_corpus(corpus);
    raw = find_doc(docs, doc_id);
  }
  auto bundle = load_index(g.index);
  auto space = restore_space(bundle);
  // Only the body is summarized; the title is not a paragraph of the text.
  auto doc = tokenize_document(raw, false);
  auto summary = summarize(doc, space, n_keep, unit);

  std::vector<std::string> texts;
  if (unit == SummaryUnit::Paragraph) {
    texts = paragraph_texts(raw.text);
  } else {
    for (const auto& s : doc.sentences) {
      std::string joined;
      for (const auto& t : s) joined += (joined.empty() ? "" : " ") + t;
      texts.push_back(std::move(joined));
    }
  }
  const std::size_t units = summary.unit_scores.size();

  if (g.json) {
    json kept = json::array();
    for (std::size_t i = 0; i < summary.kept.size(); ++i)
      kept.push_back({{"index", summary.kept[i]}, {"sigma", summary.scores[i]}, {"text", texts[summary.kept[i]]}});
    out << json{{"id", summary.doc_id}, {"units", units}, {"kept", kept}}.dump() << '\n';
  } else {
    out << "#index\tsigma\ttext\n";
    std::size_t next = 0;
    for (std::size_t i = 0; i < summary.kept.size(); ++i) {
      if (summary.kept[i] > next) out << "...\n";
      out << summary.kept[i] << '\t' << fixed(summary.scores[i], 3) << '\t' << tsv_field(texts[summary.kept[i]])
          << '\n';
      next = summary.kept[i] + 1;
    }
    if (next < units) out << "...\n";
  }
  return kExitOk;
}

int cmd_compare(const Global& g, const std::string& a_file, const std::string& b_file, double threshold,
                bool baseline, const std::string& corpus, std::ostream& out) {
  require_index(g);
  if (baseline && corpus.empty()) throw Error(ErrorCode::InvalidInput, "--baseline needs --corpus");
  auto bundle = load_index(g.index);
  auto report = compare_portfolios(select_docs(bundle, read_id_list(a_file)),
                                   select_docs(bundle, read_id_list(b_file)), threshold, g.workers);

  std::optional<SemanticSpace> space;
  std::map<std::string, TokenizedDocument, std::less<>> tokenized;
  if (baseline) {
    space.emplace(restore_space(bundle));
    for (auto& raw : load_corpus(corpus)) {
      auto doc = tokenize_document(raw, space->config().fold_title);
      tokenized.emplace(doc.id, std::move(doc));
    }
  }
  auto bow = [&](const std::string& a, const std::string& b) -> std::optional<double> {
    auto ia = tokenized.find(a);
    auto ib = tokenized.find(b);
    if (ia == tokenized.end() || ib == tokenized.end())
      throw Error(ErrorCode::InvalidInput, "baseline corpus lacks '" + (ia == tokenized.end() ? a : b) + "'");
    try {
      return word_overlap_similarity(ia->second, ib->second, space->vocab(), space->stats());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSignificantTerms) throw;
      return std::nullopt;
    }
  };

  if (g.json) {
    json rows = json::array();
    for (const auto& e : report.entries) {
      json matches = json::array();
      for (const auto& m : e.matches) {
        json row{{"id", m.id}, {"sigma", m.sigma}};
        if (baseline) {
          auto b = bow(e.id, m.id);
          row["sigma_bow"] = b ? json(*b) : json(nullptr);
        }
        matches.push_back(std::move(row));
      }
      rows.push_back({{"id", e.id}, {"matches", matches}});
    }
    out << json{{"threshold", report.threshold}, {"entries", rows}}.dump() << '\n';
  } else {
    out << "#a_id\tb_id\tsigma" << (baseline ? "\tsigma_bow" : "") << '\n';
    for (const auto& e : report.entries)
      for (const auto& m : e.matches) {
        out << tsv_field(e.id) << '\t' << tsv_field(m.id) << '\t' << fixed(m.sigma, 3);
        if (baseline) {
          auto b = bow(e.id, m.id);
          out << '\t' << (b ? fixed(*b, 3) : std::string("NA"));
        }
        out << '\n';
      }
  }
  return kExitOk;
}

int cmd_usage(const Global& g, const std::string& corpus, const std::string& a_id, const std::string& b_id,
              std::size_t top, std::ostream& out) {
  require_index(g);
  auto bundle = load_index(g.index);
  auto space = restore_space(bundle);
  auto docs = load_corpus(corpus);
  auto a = tokenize_document(find_doc(docs, a_id), space.config().fold_title);
  auto b = tokenize_document(find_doc(docs, b_id), space.config().fold_title);
  auto table = word_usage_table(a, b, space, top);

  if (g.json) {
    auto column = [](const std::vector<WordUsageRow>& rows) {
      json out = json::array();
      for (const auto& r : rows)
        out.push_back({{"term", r.term}, {"count", r.count}, {"sigma", r.sigma}, {"shared", r.shared}});
      return out;
    };
    json j{{"a", a_id}, {"b", b_id}, {"sigma", table.semantic_sigma}, {"a_terms", column(table.left)},
           {"b_terms", column(table.right)}};
    j["sigma_bow"] = table.overlap_sigma ? json(*table.overlap_sigma) : json(nullptr);
    out << j.dump() << '\n';
  } else {
    out << "#sigma\t" << fixed(table.semantic_sigma, 3) << '\n';
    out << "#sigma_bow\t" << (table.overlap_sigma ? fixed(*table.overlap_sigma, 3) : std::string("NA")) << '\n';
    out << "#doc\tterm\tcount\tsigma\tshared\n";
    for (const auto& r : table.left)
      out << tsv_field(a_id) << '\t' << tsv_field(r.term) << '\t' << r.count << '\t' << fixed(r.sigma, 3) << '\t'
          << (r.shared ? 1 : 0) << '\n';
    for (const auto& r : table.right)
      out << tsv_field(b_id) << '\t' << tsv_field(r.term) << '\t' << r.count << '\t' << fixed(r.sigma, 3) << '\t'
          << (r.shared ? 1 : 0) << '\n';
  }
  return kExitOk;
}

int cmd_noise(const Global& g, std::vector<std::uint32_t> dims, std::uint32_t k, std::uint64_t samples,
              std::uint64_t seed, std::ostream& out) {
  if (dims.empty()) dims = {500, 1000, 2000};
  std::vector<NoiseEstimate> rows;
  for (auto d : dims) {
    SeedConfig cfg;
    cfg.d = d;
    cfg.k = k;
    cfg.validate();
    rows.push_back(estimate_noise(cfg, samples, seed));
  }
  if (g.json) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"d", r.d}, {"k", r.k}, {"samples", r.sample_count}, {"mean", r.mean}, {"std", r.std_dev},
                     {"inv_sqrt_d", 1.0 / std::sqrt(static_cast<double>(r.d))}});
    out << arr.dump() << '\n';
  } else {
    out << "#d\tk\tsamples\tmean\tstd\tinv_sqrt_d\n";
    for (const auto& r : rows)
      out << r.d << '\t' << r.k << '\t' << r.sample_count << '\t' << fixed(r.mean, 6) << '\t' << fixed(r.std_dev, 6)
          << '\t' << fixed(1.0 / std::sqrt(static_cast<double>(r.d)), 6) << '\n';
  }
  return kExitOk;
}

int cmd_stats(const Global& g, std::ostream& out) {
  require_index(g);
  auto bundle = load_index(g.index);
  const auto& m = bundle.manifest;
  std::size_t partial = 0;
  for (const auto& t : bundle.terms) partial += t.partial ? 1 : 0;
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"format_version", std::to_string(m.format_version)},
      {"hash_function", m.hash_function},
      {"created", m.created},
      {"d", std::to_string(m.config.seed.d)},
      {"k", std::to_string(m.config.seed.k)},
      {"global_seed", std::to_string(m.config.seed.global_seed)},
      {"max_df_ratio", fixed(m.config.significance.max_df_ratio, 6)},
      {"min_count", std::to_string(m.config.significance.min_count)},
      {"context_mode", m.config.context.to_string()},
      {"context_idf", m.config.context_idf ? "1" : "0"},
      {"fold_title", m.config.fold_title ? "1" : "0"},
      {"documents", std::to_string(m.stats.documents)},
      {"document_vectors", std::to_string(bundle.doc_vectors.size())},
      {"significant_terms", std::to_string(m.stats.significant_terms)},
      {"partial_terms", std::to_string(partial)},
      {"distinct_terms", std::to_string(m.stats.distinct_terms)},
      {"total_tokens", std::to_string(m.stats.total_tokens)},
  };
  if (g.json) {
    json j = json::object();
    for (const auto& [key, value] : rows) j[key] = value;
    out << j.dump() << '\n';
  } else {
    out << "#key\tvalue\n";
    for (const auto& [key, value] : rows) out << key << '\t' << tsv_field(value) << '\n';
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semantic space over a text corpus built from sparse random seed vectors", "star"};
  app.require_subcommand(1);
  app.fallthrough();

  Global g;
  app.add_option("--index", g.index, "Index directory")->envname("STAR_INDEX");
  app.add_flag("--json", g.json, "JSON output instead of TSV");
  app.add_option("--workers", g.workers, "Worker threads (0 = all cores)")->capture_default_str();

  BuildOpts build;
  auto* build_cmd = app.add_subcommand("build", "Build an index from a corpus");
  build_cmd->add_option("--corpus", build.corpus, "JSONL file or directory of .txt files")->required();
  build_cmd->add_option("--d", build.config.seed.d, "Dimension")->capture_default_str();
  build_cmd->add_option("--k", build.config.seed.k, "Nonzeros per sign in each seed")->capture_default_str();
  build_cmd->add_option("--seed", build.config.seed.global_seed, "Global seed")->capture_default_str();
  build_cmd->add_option("--max-df-ratio", build.config.significance.max_df_ratio)->capture_default_str();
  build_cmd->add_option("--min-count", build.config.significance.min_count)->capture_default_str();
  build_cmd->add_option("--context", build.context, "sentence | window:N")->capture_default_str();
  build_cmd->add_flag("--context-idf", build.config.context_idf, "Weight context seeds by idf");
  build_cmd->add_flag("--no-fold-title", build.no_fold_title, "Ignore document titles");

  std::string text, file, corpus, doc, term, linkage = "average", unit = "paragraph", a_file, b_file;
  std::size_t k = 10, top = 0, n_keep = 6;
  double threshold = 0.7;
  bool baseline = false;
  std::vector<std::string> orthogonal_to;

  auto* query_cmd = app.add_subcommand("query", "Rank documents against a text");
  query_cmd->add_option("--text", text);
  query_cmd->add_option("--file", file);
  query_cmd->add_option("--k", k)->capture_default_str();

  auto* neighbors_cmd = app.add_subcommand("neighbors", "Nearest terms of a term");
  neighbors_cmd->add_option("--term", term)->required();
  neighbors_cmd->add_option("--orthogonal-to", orthogonal_to, "Remove these senses, in order")->take_all();
  neighbors_cmd->add_option("--k", k)->capture_default_str();

  auto* add_cmd = app.add_subcommand("add", "Add documents to an index");
  add_cmd->add_option("--corpus", corpus)->required();

  double cluster_threshold = 0.7;
  std::string ids_file;
  auto* cluster_cmd = app.add_subcommand("cluster", "Hierarchical clustering of indexed documents");
  cluster_cmd->add_option("--ids", ids_file, "Restrict to the ids listed in this file");
  cluster_cmd->add_option("--linkage", linkage, "average | complete | single")->capture_default_str();
  cluster_cmd->add_option("--threshold", cluster_threshold, "Minimum merge similarity")->capture_default_str();
  cluster_cmd->add_option("--top", top, "Cut into this many groups instead");

  auto* summarize_cmd = app.add_subcommand("summarize", "Keep the most representative paragraphs");
  summarize_cmd->add_option("--file", file);
  summarize_cmd->add_option("--corpus", corpus);
  summarize_cmd->add_option("--doc", doc);
  summarize_cmd->add_option("--n-keep", n_keep)->capture_default_str();
  summarize_cmd->add_option("--unit", unit, "paragraph | sentence")->capture_default_str();

  auto* compare_cmd = app.add_subcommand("compare", "Match two portfolios of indexed documents");
  compare_cmd->add_option("a", a_file, "File with one id per line")->required();
  compare_cmd->add_option("b", b_file, "File with one id per line")->required();
  compare_cmd->add_option("--threshold", threshold)->capture_default_str();
  compare_cmd->add_flag("--baseline", baseline, "Also print the word-overlap similarity");
  compare_cmd->add_option("--corpus", corpus, "Corpus the index was built from (for --baseline)");

  std::string a_id, b_id;
  std::size_t usage_top = 20;
  auto* usage_cmd = app.add_subcommand("usage", "Word usage comparison of two documents");
  usage_cmd->add_option("--corpus", corpus)->required();
  usage_cmd->add_option("--a", a_id)->required();
  usage_cmd->add_option("--b", b_id)->required();
  usage_cmd->add_option("--top", usage_top, "Rows per document (0 = all)")->capture_default_str();

  std::vector<std::uint32_t> dims;
  std::uint32_t noise_k = 20;
  std::uint64_t samples = 100000, noise_seed = 1;
  auto* noise_cmd = app.add_subcommand("noise", "Monte-Carlo noise of seed dot products");
  noise_cmd->add_option("--d", dims, "Dimensions (default 500 1000 2000)");
  noise_cmd->add_option("--k", noise_k)->capture_default_str();
  noise_cmd->add_option("--samples", samples)->capture_default_str();
  noise_cmd->add_option("--seed", noise_seed)->capture_default_str();

  auto* stats_cmd = app.add_subcommand("stats", "Index manifest and counts");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*build_cmd) return cmd_build(g, build, out, err);
    if (*query_cmd) return cmd_query(g, text, file, k, out);
    if (*neighbors_cmd) return cmd_neighbors(g, term, orthogonal_to, k, out);
    if (*add_cmd) return cmd_add(g, corpus, out);
    if (*cluster_cmd) return cmd_cluster(g, ids_file, linkage, cluster_threshold, top, out);
    if (*summarize_cmd) return cmd_summarize(g, file, corpus, doc, n_keep, unit, out);
    if (*compare_cmd) return cmd_compare(g, a_file, b_file, threshold, baseline, corpus, out);
    if (*usage_cmd) return cmd_usage(g, corpus, a_id, b_id, usage_top, out);
    if (*noise_cmd) return cmd_noise(g, dims, noise_k, samples, noise_seed, out);
    if (*stats_cmd) return cmd_stats(g, out);
  } catch (const Error& e) {
    err << "star: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "star: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitInput;
}

}  // namespace star
