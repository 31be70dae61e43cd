// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mlaudit Authors

#include "mlaudit/symreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mlaudit/dataset.hpp"
#include "mlaudit/error.hpp"
#include "mlaudit/rng.hpp"

namespace mlaudit {

void GpConfig::validate() const {
    require(population >= 10, "population must be at least 10");
    require(max_nodes >= 3, "max_nodes must be at least 3");
    require(crossover_rate >= 0.0 && crossover_rate <= 1.0, "crossover_rate must lie in [0, 1]");
    require(mutation_rate >= 0.0 && mutation_rate <= 1.0, "mutation_rate must lie in [0, 1]");
    require(parsimony >= 0.0 && std::isfinite(parsimony), "parsimony must be non-negative");
    require(init_max_depth >= 1, "init_max_depth must be at least 1");
    require(!operators.empty(), "operator set is empty");
    for (Op op : operators) {
        require(arity(op) > 0, "operator set may only hold unary and binary operators");
    }
}

// ---------------------------------------------------------------------------

bool ParetoArchive::offer(const ExpressionTree& tree, double mse) {
    if (!std::isfinite(mse)) {
        return false;
    }
    const std::size_t c = complexity(tree);
    for (const auto& e : entries_) {
        if (e.complexity <= c && e.mse <= mse) {
            return false;
        }
    }
    std::erase_if(entries_, [&](const ArchiveEntry& e) { return e.complexity >= c && e.mse >= mse; });
    const auto pos = std::lower_bound(entries_.begin(), entries_.end(), c,
                                      [](const ArchiveEntry& e, std::size_t v) { return e.complexity < v; });
    entries_.insert(pos, ArchiveEntry{tree, c, mse});
    return true;
}

const ArchiveEntry& ParetoArchive::best() const {
    if (entries_.empty()) {
        fail(ErrorKind::InvalidArgument, "archive is empty");
    }
    return entries_.back();
}

bool ParetoArchive::consistent() const {
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (entries_[i].complexity != complexity(entries_[i].tree)) {
            return false;
        }
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            if (i == j) {
                continue;
            }
            const auto& a = entries_[j];
            const auto& b = entries_[i];
            if (a.complexity <= b.complexity && a.mse <= b.mse) {
                return false;
            }
        }
        if (i > 0 && entries_[i - 1].complexity >= entries_[i].complexity) {
            return false;
        }
    }
    return true;
}

double expression_mse(const ExpressionTree& t, const Matrix& X, std::span<const double> y) {
    double ss = 0.0;
    for (std::size_t i = 0; i < X.rows(); ++i) {
        const double e = eval_expression(t, X.row(i)) - y[i];
        ss += e * e;
    }
    return ss / static_cast<double>(X.rows());
}

// ---------------------------------------------------------------------------

namespace {

struct Individual {
    ExpressionTree tree;
    double mse = 0.0;
    std::size_t rank = 0;
    double penalized = 0.0;
};

class Engine {
public:
    Engine(const Matrix& X, std::span<const double> y, const GpConfig& cfg)
        : X_(X), y_(y), cfg_(cfg), rng_(derive_seed(cfg.seed, "gp")) {
        for (Op op : cfg_.operators) {
            (arity(op) == 2 ? binary_ : unary_).push_back(op);
        }
    }

    ParetoArchive run(const GpCallback& on_generation) {
        std::vector<Individual> pop;
        pop.reserve(cfg_.population);
        for (std::size_t i = 0; i < cfg_.population; ++i) {
            const std::size_t depth = 1 + i % cfg_.init_max_depth;
            pop.push_back({random_tree(depth, i % 2 == 0), 0.0, 0, 0.0});
        }
        for (std::size_t gen = 0;; ++gen) {
            score(pop);
            update_archive(pop);
            if (on_generation) {
                on_generation(gen, archive_);
            }
            if (gen >= cfg_.generations) {
                break;
            }
            pop = breed(pop);
        }
        return archive_;
    }

private:
    double mse(const ExpressionTree& t) const { return expression_mse(t, X_, y_); }

    ExprNode random_terminal() {
        if (X_.cols() > 0 && rng_.uniform() < 0.5) {
            return {Op::Var, 0.0, static_cast<int>(rng_.below(X_.cols()))};
        }
        return {Op::Const, std::round(rng_.uniform(-10.0, 10.0) * 100.0) / 100.0, -1};
    }

    void grow(std::vector<ExprNode>& out, std::size_t depth, bool full, std::size_t budget) {
        const bool leaf = depth == 0 || budget < 3 || (!full && rng_.uniform() < 0.3);
        if (leaf) {
            out.push_back(random_terminal());
            return;
        }
        const bool use_unary = !unary_.empty() && (binary_.empty() || rng_.uniform() < 0.25);
        if (use_unary) {
            out.push_back({unary_[rng_.below(unary_.size())], 0.0, -1});
            grow(out, depth - 1, full, budget - 1);
            return;
        }
        out.push_back({binary_[rng_.below(binary_.size())], 0.0, -1});
        const std::size_t half = (budget - 1) / 2;
        grow(out, depth - 1, full, half);
        grow(out, depth - 1, full, budget - 1 - half);
    }

    ExpressionTree random_tree(std::size_t depth, bool full) {
        std::vector<ExprNode> nodes;
        grow(nodes, depth, full, cfg_.max_nodes);
        return ExpressionTree(std::move(nodes));
    }

    void score(std::vector<Individual>& pop) const {
        for (auto& ind : pop) {
            ind.mse = mse(ind.tree);
            ind.penalized = ind.mse + cfg_.parsimony * static_cast<double>(complexity(ind.tree));
        }
        // Rank = number of individuals that dominate this one.
        for (auto& a : pop) {
            a.rank = 0;
            const std::size_t ca = complexity(a.tree);
            for (const auto& b : pop) {
                const std::size_t cb = complexity(b.tree);
                if (cb <= ca && b.mse <= a.mse && (cb < ca || b.mse < a.mse)) {
                    ++a.rank;
                }
            }
        }
    }

    void update_archive(const std::vector<Individual>& pop) {
        std::vector<ExpressionTree> added;
        for (const auto& ind : pop) {
            if (archive_.offer(ind.tree, ind.mse)) {
                added.push_back(ind.tree);
            }
        }
        for (const auto& t : added) {
            // Skip entries already displaced by a later individual.
            const auto& es = archive_.entries();
            if (std::none_of(es.begin(), es.end(), [&](const ArchiveEntry& e) { return e.tree == t; })) {
                continue;
            }
            ExpressionTree refined = t;
            const double m = refine_constants(refined);
            archive_.offer(refined, m);
        }
    }

    // Coordinate-wise golden-section search over every constant.
    double refine_constants(ExpressionTree& t) const {
        auto& nodes = t.mutable_nodes();
        double best = mse(t);
        if (cfg_.refine_iterations == 0) {
            return best;
        }
        constexpr double kInvPhi = 0.6180339887498949;
        for (auto& node : nodes) {
            if (node.op != Op::Const) {
                continue;
            }
            const double c0 = node.value;
            auto f = [&](double v) {
                node.value = v;
                return mse(t);
            };
            double span = std::max(1.0, std::abs(c0));
            for (int k = 0; k < 8; ++k) {
                if (f(c0 - span) >= best && f(c0 + span) >= best) {
                    break;
                }
                span *= 4.0;
            }
            double lo = c0 - span;
            double hi = c0 + span;
            double x1 = hi - kInvPhi * (hi - lo);
            double x2 = lo + kInvPhi * (hi - lo);
            double f1 = f(x1);
            double f2 = f(x2);
            for (std::size_t it = 0; it < cfg_.refine_iterations; ++it) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - kInvPhi * (hi - lo);
                    f1 = f(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + kInvPhi * (hi - lo);
                    f2 = f(x2);
                }
            }
            const double cand = f1 <= f2 ? x1 : x2;
            const double fc = std::min(f1, f2);
            if (fc < best && std::isfinite(cand) && std::abs(cand) <= kExprClamp) {
                node.value = cand;
                best = fc;
            } else {
                node.value = c0;
            }
        }
        return best;
    }

    const Individual& tournament(const std::vector<Individual>& pop) {
        const Individual* best = nullptr;
        for (int k = 0; k < 3; ++k) {
            const Individual& c = pop[rng_.below(pop.size())];
            if (best == nullptr || c.rank < best->rank || (c.rank == best->rank && c.penalized < best->penalized)) {
                best = &c;
            }
        }
        return *best;
    }

    ExpressionTree crossover(const ExpressionTree& a, const ExpressionTree& b) {
        for (int attempt = 0; attempt < 5; ++attempt) {
            const std::size_t i = rng_.below(a.size());
            const std::size_t j = rng_.below(b.size());
            ExpressionTree child = a.replace_subtree(i, b.subtree(j));
            if (child.size() <= cfg_.max_nodes) {
                return child;
            }
        }
        return a;
    }

    ExpressionTree mutate(const ExpressionTree& t) {
        const double u = rng_.uniform();
        if (u < 0.4) {
            for (int attempt = 0; attempt < 5; ++attempt) {
                const std::size_t i = rng_.below(t.size());
                ExpressionTree child = t.replace_subtree(i, random_tree(1 + rng_.below(3), false));
                if (child.size() <= cfg_.max_nodes) {
                    return child;
                }
            }
            return t;
        }
        ExpressionTree child = t;
        auto& nodes = child.mutable_nodes();
        const std::size_t i = rng_.below(nodes.size());
        ExprNode& n = nodes[i];
        if (u < 0.85) {
            switch (arity(n.op)) {
            case 0: n = random_terminal(); break;
            case 1: n.op = unary_[rng_.below(unary_.size())]; break;
            default: n.op = binary_[rng_.below(binary_.size())]; break;
            }
            return child;
        }
        // Hoist: keep a random subtree.
        return t.subtree(i);
    }

    std::vector<Individual> breed(const std::vector<Individual>& pop) {
        std::vector<Individual> next;
        next.reserve(cfg_.population);
        for (const auto& e : archive_.entries()) {
            if (next.size() >= cfg_.population / 10) {
                break;
            }
            next.push_back({e.tree, 0.0, 0, 0.0});
        }
        while (next.size() < cfg_.population) {
            ExpressionTree child = tournament(pop).tree;
            if (rng_.uniform() < cfg_.crossover_rate) {
                child = crossover(child, tournament(pop).tree);
            }
            if (rng_.uniform() < cfg_.mutation_rate) {
                child = mutate(child);
            }
            next.push_back({std::move(child), 0.0, 0, 0.0});
        }
        return next;
    }

    const Matrix& X_;
    std::span<const double> y_;
    const GpConfig& cfg_;
    SplitMix64 rng_;
    std::vector<Op> unary_;
    std::vector<Op> binary_;
    ParetoArchive archive_;
};

} // namespace

ParetoArchive gp_search(const Matrix& X, std::span<const double> y, const GpConfig& cfg,
                        const GpCallback& on_generation) {
    cfg.validate();
    require(X.rows() > 0, "gp_search needs a non-empty dataset");
    require(X.rows() == y.size(), "gp_search: target length differs from row count");
    return Engine(X, y, cfg).run(on_generation);
}

ParetoArchive gp_search(const Dataset& d, const GpConfig& cfg, const GpCallback& on_generation) {
    const auto y = d.targets();
    return gp_search(d.feature_matrix(), y, cfg, on_generation);
}

} // namespace mlaudit
