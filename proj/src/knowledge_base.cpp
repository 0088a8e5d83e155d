#include "sciqa/knowledge_base.hpp"

#include "sciqa/json_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>

namespace sciqa {

namespace fs = std::filesystem;

const Chapter* Corpus::find(const std::string& id) const {
    for (const auto& c : chapters) {
        if (c.id == id) return &c;
    }
    return nullptr;
}

static const std::set<std::string>& stopwords() {
    // Fixed 50-word list; token definition must stay stable across runs.
    static const std::set<std::string> words = {
        "a",    "an",   "and",  "are",   "as",    "at",    "be",   "but",  "by",   "can",
        "do",   "for",  "from", "had",   "has",   "have",  "if",   "in",   "into", "is",
        "it",   "its",  "may",  "more",  "not",   "of",    "on",   "or",   "so",   "some",
        "such", "than", "that", "the",   "their", "then",  "there", "these", "they", "this",
        "to",   "was",  "we",   "were",  "what",  "when",  "which", "will",  "with", "you",
    };
    return words;
}

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string token;
    auto flush = [&] {
        if (!token.empty() && stopwords().count(token) == 0) out.push_back(token);
        token.clear();
    };
    for (char raw : text) {
        unsigned char c = static_cast<unsigned char>(raw);
        if (std::isalnum(c)) {
            token.push_back(static_cast<char>(std::tolower(c)));
        } else {
            flush();
        }
    }
    flush();
    return out;
}

Corpus ingest_corpus(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        throw std::runtime_error("corpus directory not found: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    if (files.empty()) throw std::runtime_error("corpus directory is empty: " + dir.string());
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

    Corpus corpus;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        if (!in) {
            std::cerr << "warning: skipping unreadable chapter " << file << "\n";
            continue;
        }
        std::ostringstream body;
        body << in.rdbuf();
        if (in.bad()) {
            std::cerr << "warning: skipping unreadable chapter " << file << "\n";
            continue;
        }
        Chapter chapter;
        chapter.id = file.filename().string();
        chapter.body = body.str();
        if (chapter.body.empty()) {
            std::cerr << "warning: skipping empty chapter " << file << "\n";
            continue;
        }
        auto newline = chapter.body.find('\n');
        chapter.title = trim(chapter.body.substr(0, newline));
        for (const auto& t : tokenize(chapter.body)) chapter.tokens.insert(t);
        corpus.chapters.push_back(std::move(chapter));
    }
    if (corpus.chapters.empty()) {
        throw std::runtime_error("no readable chapters in: " + dir.string());
    }
    return corpus;
}

double idf(const std::string& keyword, const Corpus& corpus) {
    if (keyword.empty()) throw std::invalid_argument("idf keyword must be non-empty");
    int f = 0;
    for (const auto& chapter : corpus.chapters) {
        if (chapter.tokens.count(keyword)) ++f;
    }
    return std::log(static_cast<double>(corpus.size()) / (static_cast<double>(f) + 1.0));
}

// ---------------------------------------------------------------------------
// Embedding store
// ---------------------------------------------------------------------------

void EmbeddingStore::add(EmbeddingRecord record) {
    records_.push_back(std::move(record));
}

void EmbeddingStore::set_meta(std::string embedder_id, int dim) {
    embedder_id_ = std::move(embedder_id);
    dim_ = dim;
}

void EmbeddingStore::save(const fs::path& dir) const {
    fs::create_directories(dir);
    nlohmann::json manifest = {
        {"embedder", embedder_id_},
        {"dim", dim_},
        {"count", records_.size()},
    };
    std::ofstream mout(dir / "manifest.json");
    mout << manifest.dump(2) << "\n";

    std::ofstream bout(dir / "vectors.bin", std::ios::binary);
    for (const auto& record : records_) {
        uint32_t id_len = static_cast<uint32_t>(record.chapter_id.size());
        uint32_t vec_dim = static_cast<uint32_t>(record.vector.size());
        bout.write(reinterpret_cast<const char*>(&id_len), sizeof(id_len));
        bout.write(record.chapter_id.data(), id_len);
        bout.write(reinterpret_cast<const char*>(&vec_dim), sizeof(vec_dim));
        bout.write(reinterpret_cast<const char*>(record.vector.data()),
                   vec_dim * sizeof(double));
    }
}

bool EmbeddingStore::exists(const fs::path& dir) {
    return fs::exists(dir / "manifest.json") && fs::exists(dir / "vectors.bin");
}

EmbeddingStore EmbeddingStore::load(const fs::path& dir) {
    std::ifstream min(dir / "manifest.json");
    if (!min) throw std::runtime_error("missing embedding store manifest in " + dir.string());
    nlohmann::json manifest;
    min >> manifest;

    EmbeddingStore store;
    store.set_meta(manifest.value("embedder", ""), manifest.value("dim", 0));

    std::ifstream bin(dir / "vectors.bin", std::ios::binary);
    if (!bin) throw std::runtime_error("missing embedding store vectors in " + dir.string());
    while (true) {
        uint32_t id_len = 0;
        bin.read(reinterpret_cast<char*>(&id_len), sizeof(id_len));
        if (!bin) break;
        EmbeddingRecord record;
        record.chapter_id.resize(id_len);
        bin.read(record.chapter_id.data(), id_len);
        uint32_t vec_dim = 0;
        bin.read(reinterpret_cast<char*>(&vec_dim), sizeof(vec_dim));
        record.vector.resize(vec_dim);
        bin.read(reinterpret_cast<char*>(record.vector.data()), vec_dim * sizeof(double));
        if (!bin) throw std::runtime_error("truncated embedding store in " + dir.string());
        store.records_.push_back(std::move(record));
    }
    return store;
}

Embedder gateway_embedder(std::shared_ptr<Gateway> gateway) {
    return [gateway](const std::string& text) { return gateway->embed({text}).front(); };
}

static void l2_normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0) {
        for (double& x : v) x /= norm;
    }
}

EmbeddingStore embed_and_store(const Corpus& corpus, const Embedder& embedder,
                               const std::string& embedder_id, int dim,
                               const fs::path& store_dir) {
    if (!store_dir.empty() && EmbeddingStore::exists(store_dir)) {
        EmbeddingStore cached = EmbeddingStore::load(store_dir);
        bool compatible = cached.embedder_id() == embedder_id && cached.dim() == dim &&
                          cached.size() <= corpus.chapters.size();
        if (compatible) {
            for (const auto& record : cached.records()) {
                if (!corpus.find(record.chapter_id)) {
                    compatible = false;
                    break;
                }
            }
        }
        if (compatible && !cached.empty()) return cached;
    }

    EmbeddingStore store;
    store.set_meta(embedder_id, dim);
    for (const auto& chapter : corpus.chapters) {
        try {
            EmbeddingRecord record;
            record.chapter_id = chapter.id;
            record.vector = embedder(chapter.body);
            l2_normalize(record.vector);
            store.add(std::move(record));
        } catch (const std::exception& e) {
            std::cerr << "warning: embedding failed for chapter " << chapter.id << ": "
                      << e.what() << " (excluded from vector retrieval)\n";
        }
    }
    if (!store_dir.empty()) store.save(store_dir);
    return store;
}

std::vector<RetrievalHit> retrieve_top_k(const std::string& query_text, int k,
                                         const EmbeddingStore& store,
                                         const Embedder& embedder) {
    if (k < 1) throw std::invalid_argument("retrieve_top_k requires k >= 1");
    if (store.empty()) return {};
    std::vector<double> q = embedder(query_text);
    l2_normalize(q);

    std::vector<RetrievalHit> hits;
    hits.reserve(store.size());
    for (const auto& record : store.records()) {
        double dot = 0.0;
        size_t n = std::min(q.size(), record.vector.size());
        for (size_t i = 0; i < n; ++i) dot += q[i] * record.vector[i];
        hits.push_back(RetrievalHit{record.chapter_id, dot});
    }
    std::sort(hits.begin(), hits.end(), [](const RetrievalHit& a, const RetrievalHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.chapter_id < b.chapter_id;
    });
    if (static_cast<size_t>(k) < hits.size()) hits.resize(static_cast<size_t>(k));
    return hits;
}

std::string rag_summarize(const std::string& query_text, const std::vector<RetrievalHit>& hits,
                          const Corpus& corpus, Gateway& gateway, ChatResponse* raw_response) {
    if (hits.empty()) return kNoRelevantKnowledge;

    std::ostringstream prompt;
    prompt << "Summarize the knowledge below into a short paragraph that helps answer the "
              "question. Keep only facts relevant to the question.\n\nQuestion: "
           << query_text << "\n\n";
    for (const auto& hit : hits) {
        const Chapter* chapter = corpus.find(hit.chapter_id);
        if (!chapter) continue;
        prompt << "--- " << chapter->title << " ---\n" << chapter->body << "\n";
    }

    try {
        ChatRequest request;
        request.role = Role::planner;
        request.prompt = prompt.str();
        ChatResponse response = gateway.complete(request);
        if (raw_response) *raw_response = response;
        return response.text;
    } catch (const std::exception& e) {
        std::cerr << "warning: knowledge summary failed (" << e.what()
                  << "); continuing without it\n";
        return kNoRelevantKnowledge;
    }
}

}  // namespace sciqa
