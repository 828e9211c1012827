#pragma once

#include <optional>
#include <string>
#include <vector>

#include "temporank/corpus.hpp"
#include "temporank/retrieval.hpp"

namespace temporank {

enum class WeightScheme { uniform, score, rank, oracle };

WeightScheme weight_scheme_from_string(const std::string& name);
const char* to_string(WeightScheme scheme);

// Weighted Gaussian KDE over timestamps in fractional days. Immutable
// after fit; density() is pure and thread-safe.
struct KdeModel {
    std::vector<double> times;    // days
    std::vector<double> weights;  // nonnegative, sum to 1
    double bandwidth = 0.0;       // days, > 0
};

// Pseudo-relevance feedback weights over a ranked list.
//   uniform: 1/n
//   score:   softmax over the lexical log scores
//   rank:    geometric (1-gamma)^(rank-1), normalized
//   oracle:  1/R over judged-relevant docs, 0 elsewhere (requires qrels)
std::vector<double> estimate_weights(const RankedList& list, WeightScheme scheme,
                                     const Qrels* qrels = nullptr, double gamma = 0.01);

// If h is absent, Silverman's rule on the weighted standard deviation with
// a floor of 1e-3 days.
KdeModel fit_kde(const std::vector<double>& times_days, const std::vector<double>& weights,
                 std::optional<double> h = std::nullopt);

// f(t) = sum_i w_i * phi((t - t_i)/h) / h
double density(const KdeModel& model, double t_days);

// new score = (1-alpha) * lexical + alpha * log(f(t) + 1e-10), re-sorted
// descending; ties keep the incoming order. Timestamps are converted to
// days relative to t0_seconds.
RankedList rerank_kde(const RankedList& list, const KdeModel& model, double alpha,
                      std::int64_t t0_seconds);

constexpr double kKdeEpsilon = 1e-10;
constexpr double kBandwidthFloor = 1e-3;

}  // namespace temporank
