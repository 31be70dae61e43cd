// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include <algorithm>
#include <numeric>

#include "mlaudit/model.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

double RegressionTree::predict(std::span<const double> z) const {
    std::size_t i = 0;
    while (nodes[i].feature >= 0) {
        const auto& n = nodes[i];
        i = static_cast<std::size_t>(z[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right);
    }
    return nodes[i].value;
}

std::size_t RegressionTree::leaf_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const TreeNode& n) { return n.feature < 0; }));
}

namespace {

struct Candidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& Z, std::span<const double> y, const TreeParams& params, SplitMix64* rng)
        : Z_(Z), y_(y), params_(params), rng_(rng) {}

    RegressionTree build(std::vector<std::size_t> rows) {
        tree_.nodes.clear();
        grow(rows, 0);
        return std::move(tree_);
    }

private:
    int grow(std::vector<std::size_t>& rows, std::size_t depth) {
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        // Order-independent node statistics: sum the sorted targets.
        std::vector<double> ys(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            ys[i] = y_[rows[i]];
        }
        std::sort(ys.begin(), ys.end());
        const double sum = std::accumulate(ys.begin(), ys.end(), 0.0);
        const double m = static_cast<double>(rows.size());
        tree_.nodes[id].value = sum / m;
        tree_.nodes[id].samples = rows.size();

        const bool pure = ys.front() == ys.back();
        const bool too_small = rows.size() < 2 * params_.min_leaf;
        const bool too_deep = params_.max_depth > 0 && depth >= params_.max_depth;
        if (pure || too_small || too_deep) {
            return id;
        }

        const Candidate best = find_split(rows);
        if (best.feature < 0) {
            return id;
        }

        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : rows) {
            (Z_(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left : right).push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        tree_.nodes[id].feature = best.feature;
        tree_.nodes[id].threshold = best.threshold;
        tree_.nodes[id].gain = best.gain;
        const int l = grow(left, depth + 1);
        const int r = grow(right, depth + 1);
        tree_.nodes[id].left = l;
        tree_.nodes[id].right = r;
        return id;
    }

    std::vector<std::size_t> candidate_features() {
        const std::size_t p = Z_.cols();
        std::vector<std::size_t> all(p);
        std::iota(all.begin(), all.end(), std::size_t{0});
        const std::size_t m = params_.features_per_split;
        if (m == 0 || m >= p || rng_ == nullptr) {
            return all;
        }
        for (std::size_t i = 0; i < m; ++i) {
            const auto j = i + static_cast<std::size_t>(rng_->below(p - i));
            std::swap(all[i], all[j]);
        }
        all.resize(m);
        std::sort(all.begin(), all.end());
        return all;
    }

    Candidate find_split(const std::vector<std::size_t>& rows) {
        const std::size_t n = rows.size();
        const std::size_t min_leaf = std::max<std::size_t>(1, params_.min_leaf);
        Candidate best;
        std::vector<std::pair<double, double>> pairs(n);
        std::vector<double> csum(n + 1);
        std::vector<double> csq(n + 1);

        for (std::size_t f : candidate_features()) {
            for (std::size_t i = 0; i < n; ++i) {
                pairs[i] = {Z_(rows[i], f), y_[rows[i]]};
            }
            std::sort(pairs.begin(), pairs.end());
            if (pairs.front().first == pairs.back().first) {
                continue;
            }
            csum[0] = 0.0;
            csq[0] = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                csum[i + 1] = csum[i] + pairs[i].second;
                csq[i + 1] = csq[i] + pairs[i].second * pairs[i].second;
            }
            const double total_sse = csq[n] - csum[n] * csum[n] / static_cast<double>(n);
            const double tol = 1e-12 * std::max(total_sse, 1e-300);
            for (std::size_t s = min_leaf; s + min_leaf <= n; ++s) {
                if (!(pairs[s - 1].first < pairs[s].first)) {
                    continue;
                }
                const double nl = static_cast<double>(s);
                const double nr = static_cast<double>(n - s);
                const double sl = csum[s];
                const double sr = csum[n] - csum[s];
                const double sse_l = csq[s] - sl * sl / nl;
                const double sse_r = (csq[n] - csq[s]) - sr * sr / nr;
                const double gain = total_sse - sse_l - sse_r;
                if (gain > best.gain + tol) {
                    double thr = 0.5 * (pairs[s - 1].first + pairs[s].first);
                    if (!(thr < pairs[s].first)) {
                        thr = pairs[s - 1].first;
                    }
                    best = {static_cast<int>(f), thr, gain};
                }
            }
        }
        return best;
    }

    const Matrix& Z_;
    std::span<const double> y_;
    TreeParams params_;
    SplitMix64* rng_;
    RegressionTree tree_;
};

} // namespace

RegressionTree grow_tree(const Matrix& Z, std::span<const double> y, std::vector<std::size_t> rows,
                         const TreeParams& params, SplitMix64* rng) {
    TreeBuilder builder(Z, y, params, rng);
    return builder.build(std::move(rows));
}

} // namespace mlaudit
