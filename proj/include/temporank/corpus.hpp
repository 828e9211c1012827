#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace temporank {

struct Document {
    std::string doc_id;
    std::int64_t timestamp = 0;  // seconds since epoch
    std::string text;
    std::vector<std::string> tokens;  // derived deterministically from text
    bool is_retweet = false;
};

// Immutable after ingestion; safe for concurrent reads.
class DocumentStore {
  public:
    // Adds or replaces (same doc_id replaces in place). Returns true if the
    // document was new.
    bool upsert(Document doc);

    const Document* find(std::string_view doc_id) const;
    const Document& at(std::size_t i) const { return docs_[i]; }
    std::size_t size() const { return docs_.size(); }
    bool empty() const { return docs_.empty(); }
    const std::vector<Document>& docs() const { return docs_; }

    // Minimum timestamp over all documents; 0 on an empty store.
    std::int64_t min_timestamp() const;

    // Fractional days of `ts` relative to the store minimum.
    double days_from_min(std::int64_t ts) const;

  private:
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct Topic {
    std::string topic_id;
    std::vector<std::string> query_tokens;  // nonempty
    std::optional<std::int64_t> query_time;
};

// TREC relevance judgments on a {0,1,2} scale.
class Qrels {
  public:
    void set(const std::string& topic_id, const std::string& doc_id, int grade);
    std::optional<int> grade(const std::string& topic_id, const std::string& doc_id) const;

    // Binarization rule: grade >= 1 counts as relevant.
    bool relevant(const std::string& topic_id, const std::string& doc_id) const;
    std::size_t count_relevant(const std::string& topic_id) const;

    const std::map<std::string, std::map<std::string, int>>& by_topic() const { return judgments_; }
    bool operator==(const Qrels&) const = default;

  private:
    std::map<std::string, std::map<std::string, int>> judgments_;
};

enum class CorpusFormat { jsonl, tsv };

struct IngestStats {
    std::size_t parsed = 0;
    std::size_t malformed = 0;
    std::size_t duplicates = 0;
};

// Lowercases, splits on Unicode whitespace, strips leading/trailing ASCII
// punctuation (keeping # and @ prefixes) and drops URL tokens. Idempotent
// on its own space-joined output.
std::vector<std::string> tokenize(std::string_view text);

// Reads a corpus file. Malformed records are counted and skipped; if more
// than half of the records are malformed the whole ingest fails.
DocumentStore ingest_corpus(const std::string& path, CorpusFormat format,
                            IngestStats* stats = nullptr);

// Drops documents flagged as retweets or whose first token is "rt".
DocumentStore filter_retweets(const DocumentStore& store);

std::vector<Topic> parse_topics(const std::string& path);
Qrels parse_qrels(const std::string& path);
void write_qrels(const Qrels& qrels, const std::string& path);
void write_topics_tsv(const std::vector<Topic>& topics, const std::string& path);

// Binary store round-trip used by the `index` CLI artifact.
void save_store(const DocumentStore& store, const std::string& path);
DocumentStore load_store(const std::string& path);

// Orders TREC topic ids numerically when both sides parse as integers,
// lexicographically otherwise.
bool topic_id_less(const std::string& a, const std::string& b);

}  // namespace temporank
