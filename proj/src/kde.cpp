#include "temporank/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "temporank/kernels.hpp"

namespace temporank {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818684;
}

WeightScheme weight_scheme_from_string(const std::string& name) {
    if (name == "uniform") return WeightScheme::uniform;
    if (name == "score") return WeightScheme::score;
    if (name == "rank") return WeightScheme::rank;
    if (name == "oracle") return WeightScheme::oracle;
    throw std::invalid_argument("unknown weighting scheme: " + name);
}

const char* to_string(WeightScheme scheme) {
    switch (scheme) {
        case WeightScheme::uniform: return "uniform";
        case WeightScheme::score: return "score";
        case WeightScheme::rank: return "rank";
        case WeightScheme::oracle: return "oracle";
    }
    return "?";
}

std::vector<double> estimate_weights(const RankedList& list, WeightScheme scheme,
                                     const Qrels* qrels, double gamma) {
    const std::size_t n = list.entries.size();
    if (n == 0) throw std::invalid_argument("estimate_weights: empty list");
    std::vector<double> w(n, 0.0);
    switch (scheme) {
        case WeightScheme::uniform: {
            std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(n));
            break;
        }
        case WeightScheme::score: {
            double max_s = list.entries[0].score;
            for (const auto& e : list.entries) max_s = std::max(max_s, e.score);
            double z = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = std::exp(list.entries[i].score - max_s);
                z += w[i];
            }
            kernels::scale(1.0 / z, w.data(), n);
            break;
        }
        case WeightScheme::rank: {
            if (gamma <= 0.0 || gamma >= 1.0)
                throw std::invalid_argument("estimate_weights: gamma must be in (0,1)");
            double z = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                w[i] = std::pow(1.0 - gamma, static_cast<double>(list.entries[i].rank - 1));
                z += w[i];
            }
            kernels::scale(1.0 / z, w.data(), n);
            break;
        }
        case WeightScheme::oracle: {
            if (qrels == nullptr)
                throw std::invalid_argument("estimate_weights: oracle scheme requires qrels");
            std::size_t relevant = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (qrels->relevant(list.topic_id, list.entries[i].doc_id)) {
                    w[i] = 1.0;
                    ++relevant;
                }
            if (relevant == 0)
                throw std::runtime_error("oracle degenerate: no judged-relevant docs in list for topic " +
                                         list.topic_id);
            kernels::scale(1.0 / static_cast<double>(relevant), w.data(), n);
            break;
        }
    }
    return w;
}

KdeModel fit_kde(const std::vector<double>& times_days, const std::vector<double>& weights,
                 std::optional<double> h) {
    if (times_days.empty()) throw std::invalid_argument("fit_kde: no samples");
    if (times_days.size() != weights.size()) throw std::invalid_argument("fit_kde: length mismatch");
    double wsum = kernels::sum(weights.data(), weights.size());
    if (std::fabs(wsum - 1.0) > 1e-9) throw std::invalid_argument("fit_kde: weights must sum to 1");
    for (double w : weights)
        if (w < 0.0) throw std::invalid_argument("fit_kde: negative weight");

    KdeModel model;
    model.times = times_days;
    model.weights = weights;
    if (h.has_value()) {
        if (*h <= 0.0) throw std::invalid_argument("fit_kde: bandwidth must be positive");
        model.bandwidth = *h;
        return model;
    }

    double mean = kernels::dot(weights.data(), times_days.data(), weights.size());
    double var = 0.0;
    for (std::size_t i = 0; i < times_days.size(); ++i) {
        double d = times_days[i] - mean;
        var += weights[i] * d * d;
    }
    double sigma = std::sqrt(std::max(var, 0.0));
    double n = static_cast<double>(times_days.size());
    model.bandwidth = std::max(1.06 * sigma * std::pow(n, -0.2), kBandwidthFloor);
    return model;
}

double density(const KdeModel& model, double t_days) {
    const double h = model.bandwidth;
    double acc = 0.0;
    for (std::size_t i = 0; i < model.times.size(); ++i) {
        double z = (t_days - model.times[i]) / h;
        acc += model.weights[i] * std::exp(-0.5 * z * z);
    }
    return acc * kInvSqrt2Pi / h;
}

RankedList rerank_kde(const RankedList& list, const KdeModel& model, double alpha,
                      std::int64_t t0_seconds) {
    if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("rerank_kde: alpha outside [0,1]");
    struct Item {
        RankedEntry entry;
        std::uint32_t original_rank;
    };
    std::vector<Item> items;
    items.reserve(list.entries.size());
    for (const auto& e : list.entries) {
        double days = static_cast<double>(e.timestamp - t0_seconds) / 86400.0;
        double temporal = std::log(density(model, days) + kKdeEpsilon);
        Item item{e, e.rank};
        item.entry.score = (1.0 - alpha) * e.score + alpha * temporal;
        items.push_back(std::move(item));
    }
    std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
        if (a.entry.score != b.entry.score) return a.entry.score > b.entry.score;
        return a.original_rank < b.original_rank;
    });
    RankedList out;
    out.topic_id = list.topic_id;
    out.entries.reserve(items.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
        items[i].entry.rank = static_cast<std::uint32_t>(i + 1);
        out.entries.push_back(std::move(items[i].entry));
    }
    return out;
}

}  // namespace temporank
