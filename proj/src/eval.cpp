#include "temporank/eval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "temporank/rng.hpp"

namespace temporank {

std::optional<double> average_precision(const std::vector<RunEntry>& ranking, const Qrels& qrels,
                                        const std::string& topic_id) {
    std::size_t total_relevant = qrels.count_relevant(topic_id);
    if (total_relevant == 0) return std::nullopt;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (qrels.relevant(topic_id, ranking[i].doc_id)) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double precision_at_k(const std::vector<RunEntry>& ranking, const Qrels& qrels,
                      const std::string& topic_id, std::size_t k) {
    if (k < 1) throw std::invalid_argument("precision_at_k: k must be >= 1");
    std::size_t hits = 0;
    std::size_t depth = std::min(k, ranking.size());
    for (std::size_t i = 0; i < depth; ++i)
        if (qrels.relevant(topic_id, ranking[i].doc_id)) ++hits;
    return static_cast<double>(hits) / static_cast<double>(k);
}

SignificanceResult randomization_test(const std::vector<double>& a, const std::vector<double>& b,
                                      std::uint64_t n_perm, std::uint64_t seed) {
    if (a.size() != b.size()) throw std::invalid_argument("randomization_test: length mismatch");
    if (a.size() < 2) throw std::invalid_argument("randomization_test: need >= 2 topics");
    const std::size_t n = a.size();
    std::vector<double> diff(n);
    for (std::size_t i = 0; i < n; ++i) diff[i] = a[i] - b[i];

    double mean_diff = 0.0;
    for (double d : diff) mean_diff += d;
    mean_diff /= static_cast<double>(n);
    const double observed = std::fabs(mean_diff);
    // equality up to rounding noise counts as "as extreme"
    const double cutoff = observed - 1e-12;

    SignificanceResult result;
    result.mean_difference = mean_diff;

    if (n <= 20) {
        const std::uint64_t total = 1ull << n;
        std::uint64_t count = 0;
        for (std::uint64_t mask = 0; mask < total; ++mask) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += (mask >> i) & 1 ? -diff[i] : diff[i];
            if (std::fabs(s / static_cast<double>(n)) >= cutoff) ++count;
        }
        result.p_value = static_cast<double>(count) / static_cast<double>(total);
        result.permutations = total;
        result.exact = true;
        return result;
    }

    Rng rng(seed);
    std::uint64_t count = 0;
    for (std::uint64_t p = 0; p < n_perm; ++p) {
        double s = 0.0;
        std::size_t i = 0;
        while (i < n) {
            std::uint64_t bits = rng.next_u64();
            for (int bit = 0; bit < 64 && i < n; ++bit, ++i) s += (bits >> bit) & 1 ? -diff[i] : diff[i];
        }
        if (std::fabs(s / static_cast<double>(n)) >= cutoff) ++count;
    }
    result.p_value = static_cast<double>(count + 1) / static_cast<double>(n_perm + 1);
    result.permutations = n_perm;
    result.exact = false;
    return result;
}

Run read_run(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open run file: " + path);
    Run run;
    std::map<std::string, std::set<std::string>> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::istringstream fields(line);
        std::string topic, q0, doc, rank_s, score_s, tag;
        if (!(fields >> topic >> q0 >> doc >> rank_s >> score_s >> tag))
            throw std::runtime_error("run line " + std::to_string(lineno) + ": expected 6 fields");
        RunEntry e;
        e.doc_id = doc;
        e.tag = tag;
        try {
            e.rank = static_cast<std::uint32_t>(std::stoul(rank_s));
            e.score = std::stod(score_s);
        } catch (const std::exception&) {
            throw std::runtime_error("run line " + std::to_string(lineno) + ": bad rank or score");
        }
        auto& entries = run.topics[topic];
        if (e.rank != entries.size() + 1)
            throw std::runtime_error("run line " + std::to_string(lineno) + ": rank " + rank_s +
                                     " breaks contiguity for topic " + topic);
        if (!seen[topic].insert(doc).second)
            throw std::runtime_error("run line " + std::to_string(lineno) + ": duplicate doc " + doc +
                                     " in topic " + topic);
        entries.push_back(std::move(e));
    }
    return run;
}

void write_run(const Run& run, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write run file: " + path);
    std::vector<std::string> topic_ids;
    topic_ids.reserve(run.topics.size());
    for (const auto& [topic, entries] : run.topics) topic_ids.push_back(topic);
    std::sort(topic_ids.begin(), topic_ids.end(), topic_id_less);
    char buf[64];
    for (const auto& topic : topic_ids) {
        for (const auto& e : run.topics.at(topic)) {
            auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), e.score);
            (void)ec;
            out << topic << " Q0 " << e.doc_id << " " << e.rank << " "
                << std::string_view(buf, static_cast<std::size_t>(p - buf)) << " " << e.tag << "\n";
        }
    }
}

Run run_from_lists(const std::vector<RankedList>& lists, const std::string& tag) {
    Run run;
    for (const auto& list : lists) {
        auto& entries = run.topics[list.topic_id];
        for (const auto& e : list.entries) entries.push_back({e.doc_id, e.rank, e.score, tag});
    }
    return run;
}

std::vector<RankedList> lists_from_run(const Run& run, const DocumentStore& store) {
    std::vector<RankedList> lists;
    for (const auto& [topic, entries] : run.topics) {
        RankedList list;
        list.topic_id = topic;
        for (const auto& e : entries) {
            const Document* doc = store.find(e.doc_id);
            if (doc == nullptr)
                throw std::runtime_error("run references unknown doc " + e.doc_id + " (topic " + topic + ")");
            list.entries.push_back({e.doc_id, e.score, e.rank, doc->timestamp});
        }
        lists.push_back(std::move(list));
    }
    return lists;
}

}  // namespace temporank
