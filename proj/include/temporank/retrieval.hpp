#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "temporank/corpus.hpp"

namespace temporank {

struct Posting {
    std::uint32_t doc = 0;  // internal id, position in the source store
    std::uint32_t tf = 0;
};

// Built once from a DocumentStore, immutable afterwards; concurrent
// searches over distinct topics are safe.
struct InvertedIndex {
    std::map<std::string, std::vector<Posting>> postings;
    std::map<std::string, std::int64_t> collection_frequency;  // total occurrences
    std::vector<std::int64_t> doc_lengths;
    std::vector<std::string> doc_ids;
    std::vector<std::int64_t> doc_timestamps;
    std::int64_t total_tokens = 0;

    std::size_t num_docs() const { return doc_ids.size(); }
};

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;
    std::uint32_t rank = 0;  // 1-based
    std::int64_t timestamp = 0;
};

struct RankedList {
    std::string topic_id;
    std::vector<RankedEntry> entries;  // ranks contiguous, scores non-increasing
};

InvertedIndex build_index(const DocumentStore& store);

// Dirichlet-smoothed query likelihood:
//   sum_q log((tf(q,d) + mu * cf(q)/|C|) / (|d| + mu))
// Query terms absent from the collection contribute nothing.
double ql_score(const InvertedIndex& index, const std::vector<std::string>& query_tokens,
                std::size_t doc, double mu);

// Top-k documents containing at least one query term, by score descending,
// doc_id ascending on ties.
RankedList search(const InvertedIndex& index, const Topic& topic, std::size_t k = 1000,
                  double mu = 2500.0);

// Writes "topic Q0 docid rank score tag" lines.
void append_trec_run(const RankedList& list, const std::string& tag, std::ostream& out);

}  // namespace temporank
