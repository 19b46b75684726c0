#include "vibdiag/forest.hpp"

#include "vibdiag/detail/format.hpp"
#include "vibdiag/detail/rng.hpp"
#include "vibdiag/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace vibdiag {

const TreeNode& DecisionTree::leaf_for(std::span<const double> features) const {
    const TreeNode* node = &nodes.at(0);
    while (node->feature >= 0) {
        const double v = features[static_cast<std::size_t>(node->feature)];
        node = &nodes[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return *node;
}

void ForestModel::require_compatible(const DatasetMeta& other) const {
    if (!(meta == other))
        throw DataError("feature metadata mismatch: model was trained with (" + meta.describe() +
                        ") but features carry (" + other.describe() + ")");
}

namespace {

struct TreeBuilder {
    const LabeledDataset& data;
    const std::vector<std::size_t>& y; // class index per row
    std::size_t n_classes;
    std::size_t max_depth;
    std::size_t min_leaf;
    std::size_t features_per_split;
    detail::SplitMix64& rng;
    std::vector<TreeNode> nodes;
    std::vector<std::size_t> feature_pool; // scratch for subset draws

    // Σ count_c² / n — maximizing this over both children minimizes the
    // weighted Gini impurity (gini = 1 − score/n per child).
    static double purity_score(const std::vector<std::uint32_t>& counts, double n) {
        double s = 0.0;
        for (std::uint32_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
        return s / n;
    }

    std::size_t build(std::vector<std::size_t>& rows, std::size_t depth) {
        std::vector<std::uint32_t> counts(n_classes, 0);
        for (std::size_t r : rows) ++counts[y[r]];
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](std::uint32_t c) { return c > 0; }) <= 1;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = -1.0;
        std::vector<std::pair<double, std::size_t>> order; // (value, row)

        if (!pure && depth < max_depth && rows.size() >= 2 * min_leaf) {
            // Fresh random feature subset for this node, drawn by partial
            // Fisher–Yates so the subset is unbiased and order-stable.
            for (std::size_t j = 0; j < features_per_split; ++j) {
                const std::size_t pick =
                    j + detail::next_below(rng, static_cast<std::uint64_t>(feature_pool.size() - j));
                std::swap(feature_pool[j], feature_pool[pick]);
            }
            std::vector<std::uint32_t> left_counts(n_classes);
            for (std::size_t j = 0; j < features_per_split; ++j) {
                const std::size_t f = feature_pool[j];
                order.clear();
                for (std::size_t r : rows) order.emplace_back(data.rows[r][f], r);
                std::sort(order.begin(), order.end());

                std::fill(left_counts.begin(), left_counts.end(), 0);
                for (std::size_t p = 0; p + 1 < order.size(); ++p) {
                    ++left_counts[y[order[p].second]];
                    if (order[p].first == order[p + 1].first) continue; // no boundary here
                    const std::size_t nl = p + 1, nr = order.size() - nl;
                    if (nl < min_leaf || nr < min_leaf) continue;
                    std::vector<std::uint32_t> right_counts(counts);
                    for (std::size_t c = 0; c < n_classes; ++c) right_counts[c] -= left_counts[c];
                    const double score = purity_score(left_counts, static_cast<double>(nl)) +
                                         purity_score(right_counts, static_cast<double>(nr));
                    if (score > best_score) {
                        best_score = score;
                        best_feature = static_cast<int>(f);
                        best_threshold = order[p].first;
                    }
                }
            }
        }

        const std::size_t id = nodes.size();
        nodes.emplace_back();
        if (best_feature < 0) {
            nodes[id].counts = std::move(counts);
            return id;
        }

        std::vector<std::size_t> left_rows, right_rows;
        for (std::size_t r : rows) {
            (data.rows[r][static_cast<std::size_t>(best_feature)] <= best_threshold ? left_rows
                                                                                    : right_rows)
                .push_back(r);
        }
        rows.clear();
        rows.shrink_to_fit();

        nodes[id].feature = best_feature;
        nodes[id].threshold = best_threshold;
        const std::size_t left_id = build(left_rows, depth + 1);
        nodes[id].left = static_cast<int>(left_id);
        const std::size_t right_id = build(right_rows, depth + 1);
        nodes[id].right = static_cast<int>(right_id);
        return id;
    }
};

} // namespace

ForestModel train_forest(const LabeledDataset& train, const ForestHyperparams& hp,
                         std::uint64_t seed) {
    train.validate();
    if (hp.n_trees == 0) throw DataError("forest needs at least one tree");
    if (hp.max_depth == 0) throw DataError("max depth must be at least 1");
    if (hp.min_samples_leaf == 0) throw DataError("min samples per leaf must be at least 1");

    ForestModel model;
    model.classes = train.class_names();
    if (model.classes.size() < 2) throw DataError("training needs at least 2 distinct classes");
    model.hyperparams = hp;
    model.meta = train.meta;
    model.feature_count = train.feature_count();
    model.train_seed = seed;

    const std::size_t s = model.feature_count;
    std::size_t fps = hp.features_per_split;
    if (fps == 0) fps = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(s))));
    if (fps > s)
        throw DataError("features_per_split " + std::to_string(fps) + " exceeds feature count " +
                        std::to_string(s));

    std::vector<std::size_t> y(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
        const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), train.labels[i]);
        y[i] = static_cast<std::size_t>(it - model.classes.begin());
    }

    const std::size_t n = train.size();
    model.trees.resize(hp.n_trees);
    for (std::size_t t = 0; t < hp.n_trees; ++t) {
        detail::SplitMix64 rng(detail::mix_seed(seed, detail::kStreamTree, t));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) bootstrap[i] = detail::next_below(rng, n);

        TreeBuilder builder{train, y,  model.classes.size(), hp.max_depth, hp.min_samples_leaf,
                            fps,   rng, {},                  {}};
        builder.feature_pool.resize(s);
        std::iota(builder.feature_pool.begin(), builder.feature_pool.end(), std::size_t{0});
        builder.build(bootstrap, 0);
        model.trees[t].nodes = std::move(builder.nodes);
    }
    return model;
}

Prediction predict(const ForestModel& model, std::span<const double> features) {
    if (model.trees.empty()) throw InvariantError("model has no trees");
    if (features.size() != model.feature_count)
        throw DataError("feature vector has " + std::to_string(features.size()) +
                        " values but the model expects " + std::to_string(model.feature_count));

    Prediction pred;
    pred.probabilities.assign(model.classes.size(), 0.0);
    for (const DecisionTree& tree : model.trees) {
        const TreeNode& leaf = tree.leaf_for(features);
        const double total = static_cast<double>(
            std::accumulate(leaf.counts.begin(), leaf.counts.end(), std::uint64_t{0}));
        for (std::size_t c = 0; c < leaf.counts.size(); ++c)
            pred.probabilities[c] += static_cast<double>(leaf.counts[c]) / total;
    }
    const double n_trees = static_cast<double>(model.trees.size());
    for (double& p : pred.probabilities) p /= n_trees;

    pred.class_index = 0;
    for (std::size_t c = 1; c < pred.probabilities.size(); ++c)
        if (pred.probabilities[c] > pred.probabilities[pred.class_index]) pred.class_index = c;
    pred.class_name = model.classes[pred.class_index];
    return pred;
}

namespace {

constexpr const char* kFormatTag = "vibdiag-forest v1";

std::string meta_token(const std::string& s) { return s.empty() ? "-" : s; }
std::string meta_untoken(const std::string& s) { return s == "-" ? "" : s; }

[[noreturn]] void bad_model(const std::string& what) {
    throw DataError("malformed model file: " + what);
}

} // namespace

void save_forest(const ForestModel& model, std::ostream& out) {
    for (const std::string& c : model.classes)
        if (c.empty() || c.find_first_of(", \t\n") != std::string::npos)
            throw DataError("class label '" + c + "' cannot be serialized (blank or contains "
                            "whitespace/comma)");

    out << kFormatTag << "\n";
    out << "classes " << model.classes.size();
    for (const std::string& c : model.classes) out << ' ' << c;
    out << "\n";
    out << "features " << model.feature_count << "\n";
    out << "n_trees " << model.hyperparams.n_trees << "\n";
    out << "max_depth " << model.hyperparams.max_depth << "\n";
    out << "min_samples_leaf " << model.hyperparams.min_samples_leaf << "\n";
    out << "features_per_split " << model.hyperparams.features_per_split << "\n";
    out << "train_seed " << model.train_seed << "\n";
    out << "meta k " << model.meta.k << " m " << model.meta.m << " wavelet "
        << meta_token(model.meta.wavelet) << " fs " << detail::format_real(model.meta.sample_rate)
        << " window " << model.meta.window << "\n";
    out << "trees " << model.trees.size() << "\n";

    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& nodes = model.trees[t].nodes;
        out << "tree " << t << " nodes " << nodes.size() << "\n";
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const TreeNode& node = nodes[i];
            if (node.feature < 0) {
                out << i << ",LEAF";
                for (std::uint32_t c : node.counts) out << ',' << c;
                out << "\n";
            } else {
                out << i << ',' << node.feature << ',' << detail::format_real(node.threshold)
                    << ',' << node.left << ',' << node.right << "\n";
            }
        }
    }
    out << "end\n";
    if (!out) throw DataError("write failure while saving model");
}

void save_forest(const ForestModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    save_forest(model, out);
}

ForestModel load_forest(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kFormatTag)
        bad_model("expected header '" + std::string(kFormatTag) + "'");

    ForestModel model;
    auto expect_line = [&](const std::string& key) -> std::istringstream {
        if (!std::getline(in, line)) bad_model("unexpected end of file before '" + key + "'");
        std::istringstream ss(line);
        std::string word;
        ss >> word;
        if (word != key) bad_model("expected '" + key + "' line, got '" + line + "'");
        return ss;
    };
    auto read_count = [&](const std::string& key) -> std::size_t {
        auto ss = expect_line(key);
        std::size_t v = 0;
        if (!(ss >> v)) bad_model("missing value for '" + key + "'");
        return v;
    };

    {
        auto ss = expect_line("classes");
        std::size_t count = 0;
        ss >> count;
        std::string name;
        while (ss >> name) model.classes.push_back(name);
        if (model.classes.size() != count || count < 2) bad_model("class list");
    }
    model.feature_count = read_count("features");
    model.hyperparams.n_trees = read_count("n_trees");
    model.hyperparams.max_depth = read_count("max_depth");
    model.hyperparams.min_samples_leaf = read_count("min_samples_leaf");
    model.hyperparams.features_per_split = read_count("features_per_split");
    model.train_seed = read_count("train_seed");
    {
        auto ss = expect_line("meta");
        std::string kw, wavelet, fs;
        std::size_t k = 0, m = 0, window = 0;
        ss >> kw >> k >> kw >> m >> kw >> wavelet >> kw >> fs >> kw >> window;
        if (!ss) bad_model("meta line");
        model.meta.k = k;
        model.meta.m = m;
        model.meta.wavelet = meta_untoken(wavelet);
        model.meta.sample_rate = std::strtod(fs.c_str(), nullptr);
        model.meta.window = window;
    }
    const std::size_t tree_count = read_count("trees");

    auto parse_long = [](const std::string& s) -> long {
        char* end = nullptr;
        const long v = std::strtol(s.c_str(), &end, 10);
        if (end == s.c_str() || *end != '\0') bad_model("bad integer '" + s + "'");
        return v;
    };
    auto parse_real = [](const std::string& s) -> double {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (end == s.c_str() || *end != '\0') bad_model("bad real '" + s + "'");
        return v;
    };

    model.trees.resize(tree_count);
    for (std::size_t t = 0; t < tree_count; ++t) {
        auto ss = expect_line("tree");
        std::size_t idx = 0, n_nodes = 0;
        std::string kw;
        ss >> idx >> kw >> n_nodes;
        if (!ss || idx != t || kw != "nodes" || n_nodes == 0) bad_model("tree header");

        auto& nodes = model.trees[t].nodes;
        nodes.resize(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) {
            if (!std::getline(in, line)) bad_model("truncated tree block");
            std::vector<std::string> cells;
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                cells.push_back(line.substr(start, comma - start));
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (cells.size() < 2 || parse_long(cells[0]) != static_cast<long>(i))
                bad_model("node id sequence");
            TreeNode& node = nodes[i];
            if (cells[1] == "LEAF") {
                if (cells.size() != 2 + model.classes.size()) bad_model("leaf histogram width");
                std::uint64_t total = 0;
                for (std::size_t c = 0; c < model.classes.size(); ++c) {
                    const long v = parse_long(cells[2 + c]);
                    if (v < 0) bad_model("negative leaf count");
                    node.counts.push_back(static_cast<std::uint32_t>(v));
                    total += static_cast<std::uint64_t>(v);
                }
                if (total == 0) bad_model("leaf with empty histogram");
            } else {
                if (cells.size() != 5) bad_model("internal node field count");
                node.feature = static_cast<int>(parse_long(cells[1]));
                node.threshold = parse_real(cells[2]);
                node.left = static_cast<int>(parse_long(cells[3]));
                node.right = static_cast<int>(parse_long(cells[4]));
                if (node.feature < 0 ||
                    static_cast<std::size_t>(node.feature) >= model.feature_count)
                    bad_model("feature index out of range");
                for (int child : {node.left, node.right})
                    if (child <= static_cast<int>(i) || static_cast<std::size_t>(child) >= n_nodes)
                        bad_model("child index out of range");
            }
        }
    }
    if (!std::getline(in, line) || line != "end") bad_model("missing end marker");
    return model;
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    return load_forest(in);
}

} // namespace vibdiag
