#include <algorithm>
#include <numeric>

#include "quill/baselines.hpp"
#include "quill/error.hpp"

namespace quill {

double gini(const ClassCounts& counts) {
    const double n = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (n == 0.0) return 0.0;
    double sum_sq = 0.0;
    for (auto c : counts) sum_sq += static_cast<double>(c) * static_cast<double>(c);
    return 1.0 - sum_sq / (n * n);
}

namespace {

bool has_feature(const SparseBinaryVector& x, std::uint32_t feature) {
    return std::binary_search(x.indices.begin(), x.indices.end(), feature);
}

QualityLabel majority(const ClassCounts& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < kNumClasses; ++c)
        if (counts[c] > counts[best]) best = c;
    return label_at(best);
}

using u128 = unsigned __int128;

std::uint64_t sum_squares(const ClassCounts& counts) {
    std::uint64_t s = 0;
    for (auto c : counts) s += std::uint64_t{c} * c;
    return s;
}

// Weighted Gini of a split, times n, equals n - (P/n_p + A/n_a) with P, A the
// sums of squared class counts on each side. Minimizing it is maximizing
// (P n_a + A n_p) / (n_p n_a), compared exactly as a fraction.
struct SplitScore {
    u128 numerator = 0;
    u128 denominator = 1;

    bool better_than(const SplitScore& other) const {
        return numerator * other.denominator > other.numerator * denominator;
    }
};

class TreeBuilder {
public:
    TreeBuilder(std::span<const LabeledVector> data, const TreeOptions& options, std::size_t dim)
        : data_(data), options_(options), present_(dim), marked_(dim, 0) {}

    std::vector<TreeNode> build() {
        std::vector<std::uint32_t> all(data_.size());
        std::iota(all.begin(), all.end(), 0u);
        grow(all, 0);
        return std::move(nodes_);
    }

private:
    std::int32_t grow(const std::vector<std::uint32_t>& samples, std::uint32_t depth) {
        ClassCounts counts{};
        for (auto s : samples) ++counts[index_of(data_[s].y)];

        const auto id = static_cast<std::int32_t>(nodes_.size());
        TreeNode node;
        node.depth = depth;
        node.counts = counts;
        node.label = majority(counts);
        nodes_.push_back(node);

        const std::size_t n = samples.size();
        const bool pure = std::count_if(counts.begin(), counts.end(),
                                        [](std::uint32_t c) { return c > 0; }) <= 1;
        if (pure || depth >= options_.max_depth || n < options_.min_samples_split) return id;

        const auto feature = best_split(samples, counts);
        if (feature < 0) return id;

        std::vector<std::uint32_t> absent, present;
        for (auto s : samples)
            (has_feature(data_[s].x, static_cast<std::uint32_t>(feature)) ? present : absent)
                .push_back(s);

        const auto absent_id = grow(absent, depth + 1);
        const auto present_id = grow(present, depth + 1);
        nodes_[static_cast<std::size_t>(id)].feature = feature;
        nodes_[static_cast<std::size_t>(id)].absent_child = absent_id;
        nodes_[static_cast<std::size_t>(id)].present_child = present_id;
        return id;
    }

    std::int32_t best_split(const std::vector<std::uint32_t>& samples, const ClassCounts& counts) {
        touched_.clear();
        for (auto s : samples) {
            const auto cls = index_of(data_[s].y);
            for (auto f : data_[s].x.indices) {
                if (!marked_[f]) {
                    marked_[f] = 1;
                    touched_.push_back(f);
                }
                ++present_[f][cls];
            }
        }
        std::sort(touched_.begin(), touched_.end());

        const std::uint64_t n = samples.size();
        std::int32_t best = -1;
        SplitScore best_score;
        for (auto f : touched_) {
            const ClassCounts& p = present_[f];
            const std::uint64_t n_p = std::uint64_t{p[0]} + p[1] + p[2];
            if (n_p == n) continue; // every sample has it: the split separates nothing
            ClassCounts a{};
            for (std::size_t c = 0; c < kNumClasses; ++c) a[c] = counts[c] - p[c];
            const std::uint64_t n_a = n - n_p;
            SplitScore score{u128{sum_squares(p)} * n_a + u128{sum_squares(a)} * n_p,
                             u128{n_p} * n_a};
            if (best < 0 || score.better_than(best_score)) {
                best = static_cast<std::int32_t>(f);
                best_score = score;
            }
        }
        for (auto f : touched_) {
            present_[f] = {};
            marked_[f] = 0;
        }
        return best;
    }

    std::span<const LabeledVector> data_;
    TreeOptions options_;
    std::vector<ClassCounts> present_;
    std::vector<char> marked_;
    std::vector<std::uint32_t> touched_;
    std::vector<TreeNode> nodes_;
};

} // namespace

DecisionTreeModel train_decision_tree(std::span<const LabeledVector> data,
                                      const TreeOptions& options) {
    const std::size_t dim = common_dimension(data);
    DecisionTreeModel model;
    model.max_depth = options.max_depth;
    model.min_samples_split = options.min_samples_split;
    model.dimension = dim;
    model.nodes = TreeBuilder(data, options, dim).build();
    return model;
}

const TreeNode& DecisionTreeModel::leaf_for(const SparseBinaryVector& x) const {
    require(!nodes.empty(), ErrorKind::InvalidArgument, "decision tree has no nodes");
    const TreeNode* node = &nodes.front();
    while (!node->is_leaf()) {
        const bool present = has_feature(x, static_cast<std::uint32_t>(node->feature));
        node = &nodes[static_cast<std::size_t>(present ? node->present_child : node->absent_child)];
    }
    return *node;
}

ClassScores DecisionTreeModel::scores(const SparseBinaryVector& x) const {
    const auto& leaf = leaf_for(x);
    ClassScores s;
    const double n = static_cast<double>(leaf.counts[0]) + leaf.counts[1] + leaf.counts[2];
    for (std::size_t c = 0; c < kNumClasses; ++c)
        s(static_cast<Eigen::Index>(c)) = n > 0.0 ? leaf.counts[c] / n : 0.0;
    return s;
}

std::size_t DecisionTreeModel::depth() const {
    std::size_t d = 0;
    for (const auto& node : nodes) d = std::max<std::size_t>(d, node.depth);
    return d;
}

} // namespace quill
