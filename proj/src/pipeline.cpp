#include "star/pipeline.hpp"

#include "star/error.hpp"

namespace star {

namespace {

std::pair<std::vector<DocRecord>, VectorTable> records_for(std::span<const RawDocument> raw,
                                                            const DocumentVectorBatch& batch, std::uint32_t dim) {
  std::vector<DocRecord> records;
  records.reserve(raw.size());
  VectorTable table(dim);
  table.reserve(batch.vectors.size());
  std::size_t next = 0;
  for (const auto& doc : raw) {
    bool has = next < batch.vectors.size() && batch.vectors[next].doc_id == doc.id;
    records.push_back({doc.id, doc.title.value_or(""), has});
    if (has) table.append(doc.id, batch.vectors[next++].vec);
  }
  return {std::move(records), std::move(table)};
}

}  // namespace

BuiltIndex build_index(std::span<const RawDocument> docs, const SpaceConfig& config, int workers) {
  config.validate();
  if (docs.empty()) throw Error(ErrorCode::EmptyCorpus, "empty corpus");
  auto tokenized = tokenize_all(docs, config.fold_title, workers);
  SemanticSpace space = build_space(tokenized, config, workers);
  auto batch = document_vectors(space, tokenized, workers);
  auto [records, table] = records_for(docs, batch, space.dim());
  IndexBundle bundle = make_bundle(space, std::move(records), std::move(table));
  return {std::move(space), std::move(bundle), std::move(batch.skipped)};
}

AddResult add_to_index(IndexBundle& bundle, std::span<const RawDocument> docs, int workers) {
  SemanticSpace space = restore_space(bundle);
  auto tokenized = tokenize_all(docs, space.config().fold_title, workers);
  AddResult result;
  result.update = space.add_documents(tokenized, workers);
  auto batch = document_vectors(space, tokenized, workers);
  auto [records, table] = records_for(docs, batch, space.dim());

  std::vector<DocRecord> all = bundle.documents;
  all.insert(all.end(), records.begin(), records.end());
  VectorTable vectors = bundle.doc_vectors;
  vectors.reserve(vectors.size() + table.size());
  for (std::size_t i = 0; i < table.size(); ++i) vectors.append(table.id(i), table.row(i));

  bundle = make_bundle(space, std::move(all), std::move(vectors));
  result.skipped = std::move(batch.skipped);
  return result;
}

}  // namespace star
