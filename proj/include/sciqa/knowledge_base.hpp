#pragma once

#include "sciqa/backend.hpp"

#include <filesystem>
#include <functional>
#include <set>
#include <string>
#include <vector>

namespace sciqa {

// Chaptered science corpus: embedding-based retrieval plus IDF statistics.
// Small enough (tens of chapters) that retrieval is an exact scan.

struct Chapter {
    std::string id;     // source filename
    std::string title;  // first line of the file
    std::string body;
    std::set<std::string> tokens;
};

struct Corpus {
    std::vector<Chapter> chapters;
    int size() const { return static_cast<int>(chapters.size()); }
    const Chapter* find(const std::string& id) const;
};

// Lowercased alphanumeric terms, stopwords removed. One definition shared
// by IDF, plan keyword extraction, and the corpus token sets.
std::vector<std::string> tokenize(const std::string& text);

// Reads one chapter per file from `dir`, ordered lexicographically by
// filename. Unreadable files are skipped with a warning on stderr.
Corpus ingest_corpus(const std::filesystem::path& dir);

// ln(N / (f(k)+1)) where f(k) counts chapters whose token set contains k.
// The raw value is returned even when negative.
double idf(const std::string& keyword, const Corpus& corpus);

struct EmbeddingRecord {
    std::string chapter_id;
    std::vector<double> vector;  // unit L2 norm
};

class EmbeddingStore {
public:
    void add(EmbeddingRecord record);
    const std::vector<EmbeddingRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    size_t size() const { return records_.size(); }

    const std::string& embedder_id() const { return embedder_id_; }
    int dim() const { return dim_; }
    void set_meta(std::string embedder_id, int dim);

    // Layout on disk: <dir>/manifest.json + <dir>/vectors.bin. The binary
    // file holds (id_len, id, dim, dim doubles) records.
    void save(const std::filesystem::path& dir) const;
    static EmbeddingStore load(const std::filesystem::path& dir);
    static bool exists(const std::filesystem::path& dir);

private:
    std::vector<EmbeddingRecord> records_;
    std::string embedder_id_;
    int dim_ = 0;
};

using Embedder = std::function<std::vector<double>(const std::string&)>;

Embedder gateway_embedder(std::shared_ptr<Gateway> gateway);

// One record per chapter, L2-normalized on write. When `store_dir` already
// holds a store for the same embedder/dim/chapter set it is loaded back
// without any embedder calls. A chapter whose embedding fails is excluded
// from the store but stays in the corpus (IDF still sees it).
EmbeddingStore embed_and_store(const Corpus& corpus, const Embedder& embedder,
                               const std::string& embedder_id, int dim,
                               const std::filesystem::path& store_dir);

struct RetrievalHit {
    std::string chapter_id;
    double similarity = 0.0;  // cosine, in [-1, 1]
};

// Top-k by cosine similarity, descending; ties broken by chapter id.
std::vector<RetrievalHit> retrieve_top_k(const std::string& query_text, int k,
                                         const EmbeddingStore& store, const Embedder& embedder);

// Sentinel returned when retrieval finds nothing to summarize.
inline constexpr const char* kNoRelevantKnowledge = "no relevant knowledge";

// Planner-backend summary over the hit chapters; empty hits (or a backend
// failure) degrade to the sentinel. `raw_response` receives the backend
// usage when a call was actually made (for run accounting).
std::string rag_summarize(const std::string& query_text, const std::vector<RetrievalHit>& hits,
                          const Corpus& corpus, Gateway& gateway,
                          ChatResponse* raw_response = nullptr);

}  // namespace sciqa
