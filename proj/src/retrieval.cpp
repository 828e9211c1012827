#include "temporank/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

namespace temporank {

InvertedIndex build_index(const DocumentStore& store) {
    if (store.empty()) throw std::invalid_argument("build_index: empty store");
    InvertedIndex index;
    index.doc_lengths.reserve(store.size());
    index.doc_ids.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        const Document& d = store.at(i);
        index.doc_ids.push_back(d.doc_id);
        index.doc_timestamps.push_back(d.timestamp);
        index.doc_lengths.push_back(static_cast<std::int64_t>(d.tokens.size()));
        index.total_tokens += static_cast<std::int64_t>(d.tokens.size());

        std::map<std::string, std::uint32_t> tf;
        for (const auto& t : d.tokens) ++tf[t];
        for (const auto& [term, count] : tf) {
            index.postings[term].push_back({static_cast<std::uint32_t>(i), count});
            index.collection_frequency[term] += count;
        }
    }
    return index;
}

double ql_score(const InvertedIndex& index, const std::vector<std::string>& query_tokens,
                std::size_t doc, double mu) {
    if (mu <= 0.0) throw std::invalid_argument("ql_score: mu must be positive");
    double score = 0.0;
    double doc_len = static_cast<double>(index.doc_lengths[doc]);
    double coll = static_cast<double>(index.total_tokens);
    for (const auto& q : query_tokens) {
        auto cf_it = index.collection_frequency.find(q);
        if (cf_it == index.collection_frequency.end()) continue;  // cf = 0: skip
        double tf = 0.0;
        const auto& plist = index.postings.at(q);
        auto it = std::lower_bound(plist.begin(), plist.end(), doc,
                                   [](const Posting& p, std::size_t d) { return p.doc < d; });
        if (it != plist.end() && it->doc == doc) tf = static_cast<double>(it->tf);
        double cf = static_cast<double>(cf_it->second);
        score += std::log((tf + mu * cf / coll) / (doc_len + mu));
    }
    return score;
}

RankedList search(const InvertedIndex& index, const Topic& topic, std::size_t k, double mu) {
    if (k < 1) throw std::invalid_argument("search: k must be >= 1");
    std::set<std::uint32_t> candidates;
    for (const auto& q : topic.query_tokens) {
        auto it = index.postings.find(q);
        if (it == index.postings.end()) continue;
        for (const auto& p : it->second) candidates.insert(p.doc);
    }

    std::vector<RankedEntry> scored;
    scored.reserve(candidates.size());
    for (std::uint32_t doc : candidates) {
        RankedEntry e;
        e.doc_id = index.doc_ids[doc];
        e.score = ql_score(index, topic.query_tokens, doc, mu);
        e.timestamp = index.doc_timestamps[doc];
        scored.push_back(std::move(e));
    }
    std::sort(scored.begin(), scored.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.doc_id < b.doc_id;
    });
    if (scored.size() > k) scored.resize(k);
    for (std::size_t i = 0; i < scored.size(); ++i) scored[i].rank = static_cast<std::uint32_t>(i + 1);

    RankedList list;
    list.topic_id = topic.topic_id;
    list.entries = std::move(scored);
    return list;
}

void append_trec_run(const RankedList& list, const std::string& tag, std::ostream& out) {
    char buf[64];
    for (const auto& e : list.entries) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), e.score);
        (void)ec;
        out << list.topic_id << " Q0 " << e.doc_id << " " << e.rank << " "
            << std::string_view(buf, static_cast<std::size_t>(p - buf)) << " " << tag << "\n";
    }
}

}  // namespace temporank
