#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "temporank/corpus.hpp"
#include "temporank/retrieval.hpp"

namespace temporank {

struct RunEntry {
    std::string doc_id;
    std::uint32_t rank = 0;
    double score = 0.0;
    std::string tag;
};

// Per-topic ranked output in TREC format.
struct Run {
    std::map<std::string, std::vector<RunEntry>> topics;  // entries rank-ordered
};

struct SignificanceResult {
    double p_value = 1.0;
    double mean_difference = 0.0;  // mean(a - b)
    std::uint64_t permutations = 0;
    bool exact = false;
};

// AP over the full ranking; unretrieved relevant documents count against
// the denominator, unjudged documents count as non-relevant. Topics with
// no relevant document in the qrels are undefined (nullopt).
std::optional<double> average_precision(const std::vector<RunEntry>& ranking, const Qrels& qrels,
                                        const std::string& topic_id);

// (# relevant in top k) / k; short lists are padded as non-relevant.
double precision_at_k(const std::vector<RunEntry>& ranking, const Qrels& qrels,
                      const std::string& topic_id, std::size_t k);

// Fisher's two-sided paired randomization test on per-topic metric pairs.
// Exact enumeration for n <= 20 topics, otherwise n_perm sampled sign
// flips with add-one smoothing.
SignificanceResult randomization_test(const std::vector<double>& a, const std::vector<double>& b,
                                      std::uint64_t n_perm = 100000, std::uint64_t seed = 1);

Run read_run(const std::string& path);
void write_run(const Run& run, const std::string& path);

Run run_from_lists(const std::vector<RankedList>& lists, const std::string& tag);
std::vector<RankedList> lists_from_run(const Run& run, const DocumentStore& store);

}  // namespace temporank
