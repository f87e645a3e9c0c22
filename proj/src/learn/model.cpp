#include "sbd/learn/model.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sbd/error.hpp"

namespace sbd::learn {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;

json vec_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Eigen::VectorXd vec_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j)
        v(i++) = x.get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd mat_from_json(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError("model file: ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

// --- per-family config/params codecs -------------------------------------

json tree_config_json(const TreeConfig& c) {
    return {{"max_depth", c.max_depth},
            {"min_gain", c.min_gain},
            {"confidence", c.confidence},
            {"prune", c.prune}};
}

TreeConfig tree_config_from(const json& j) {
    TreeConfig c;
    c.max_depth = j.at("max_depth").get<std::size_t>();
    c.min_gain = j.at("min_gain").get<double>();
    c.confidence = j.at("confidence").get<double>();
    c.prune = j.at("prune").get<bool>();
    return c;
}

json tree_params_json(const TreeModel& t) {
    json nodes = json::array();
    for (const auto& n : t.nodes)
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"left", n.left},
                         {"right", n.right},
                         {"count0", n.count0},
                         {"count1", n.count1}});
    return {{"n_features", t.n_features}, {"depth", t.depth}, {"nodes", std::move(nodes)}};
}

void tree_params_from(const json& j, TreeModel& t) {
    t.n_features = j.at("n_features").get<std::size_t>();
    t.depth = j.at("depth").get<std::size_t>();
    t.nodes.clear();
    for (const auto& n : j.at("nodes")) {
        TreeNode node;
        node.feature = n.at("feature").get<int>();
        node.threshold = n.at("threshold").get<double>();
        node.left = n.at("left").get<int>();
        node.right = n.at("right").get<int>();
        node.count0 = n.at("count0").get<std::size_t>();
        node.count1 = n.at("count1").get<std::size_t>();
        t.nodes.push_back(node);
    }
    if (t.nodes.empty())
        throw DataError("model file: decision tree has no nodes");
}

json embedded_tree_json(const TreeModel& t) {
    json out = tree_params_json(t);
    out["config"] = tree_config_json(t.config);
    return out;
}

TreeModel embedded_tree_from(const json& j) {
    TreeModel t;
    t.config = tree_config_from(j.at("config"));
    tree_params_from(j, t);
    return t;
}

json config_json(const Model& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            const auto& c = m.config;
            if constexpr (std::is_same_v<T, NBModel>) {
                return {{"bins", c.bins}, {"laplace", c.laplace}};
            } else if constexpr (std::is_same_v<T, GLMModel>) {
                return {{"lambda", c.lambda},
                        {"alpha", c.alpha},
                        {"standardize", c.standardize},
                        {"max_iter", c.max_iter},
                        {"tol", c.tol}};
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                return {{"max_iter", c.max_iter}, {"tol", c.tol}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_config_json(c);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                return {{"n_trees", c.n_trees},
                        {"max_depth", c.max_depth},
                        {"min_gain", c.min_gain},
                        {"confidence", c.confidence},
                        {"prune", c.prune},
                        {"bootstrap", c.bootstrap},
                        {"feature_subsample", c.feature_subsample},
                        {"seed", c.seed}};
            } else if constexpr (std::is_same_v<T, GBTModel>) {
                return {{"n_trees", c.n_trees},
                        {"max_depth", c.max_depth},
                        {"min_gain", c.min_gain},
                        {"confidence", c.confidence},
                        {"prune", c.prune},
                        {"seed", c.seed}};
            } else {
                static_assert(std::is_same_v<T, MLPModel>);
                json hidden = json::array();
                for (std::size_t h : c.hidden)
                    hidden.push_back(h);
                return {{"hidden", std::move(hidden)},
                        {"activation", std::string(activation_name(c.activation))},
                        {"maxout_pieces", c.maxout_pieces},
                        {"max_iter", c.max_iter},
                        {"tol", c.tol},
                        {"learning_rate", c.learning_rate},
                        {"l2", c.l2},
                        {"dropout", c.dropout},
                        {"seed", c.seed}};
            }
        },
        model);
}

json params_json(const Model& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, NBModel>) {
                json priors = json::array({m.class_log_priors[0], m.class_log_priors[1]});
                json edges = json::array();
                for (const auto& e : m.bin_edges)
                    edges.push_back(e);
                json cond = json::array();
                for (const auto& feature : m.cond_log_prob) {
                    json bins = json::array();
                    for (const auto& bin : feature)
                        bins.push_back(json::array({bin[0], bin[1]}));
                    cond.push_back(std::move(bins));
                }
                return {{"class_log_priors", std::move(priors)},
                        {"bin_edges", std::move(edges)},
                        {"cond_log_prob", std::move(cond)}};
            } else if constexpr (std::is_same_v<T, GLMModel>) {
                return {{"intercept", m.intercept},
                        {"coefficients", vec_to_json(m.beta)},
                        {"column_means", vec_to_json(m.column_means)},
                        {"column_scales", vec_to_json(m.column_scales)},
                        {"iterations", m.iterations}};
            } else if constexpr (std::is_same_v<T, LogisticModel>) {
                return {{"intercept", m.b0},
                        {"coefficients", vec_to_json(m.b)},
                        {"converged", m.converged},
                        {"iterations", m.iterations}};
            } else if constexpr (std::is_same_v<T, TreeModel>) {
                return tree_params_json(m);
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                json trees = json::array();
                for (const auto& t : m.trees)
                    trees.push_back(embedded_tree_json(t));
                return {{"trees", std::move(trees)}};
            } else if constexpr (std::is_same_v<T, GBTModel>) {
                json trees = json::array();
                for (const auto& t : m.trees)
                    trees.push_back(embedded_tree_json(t));
                return {{"trees", std::move(trees)}, {"weights", vec_to_json(m.weights)}};
            } else {
                static_assert(std::is_same_v<T, MLPModel>);
                json sizes = json::array();
                for (std::size_t s : m.layer_sizes)
                    sizes.push_back(s);
                json weights = json::array();
                for (const auto& w : m.weights)
                    weights.push_back(mat_to_json(w));
                json biases = json::array();
                for (const auto& b : m.biases)
                    biases.push_back(vec_to_json(b));
                return {{"layer_sizes", std::move(sizes)},
                        {"weights", std::move(weights)},
                        {"biases", std::move(biases)},
                        {"iterations", m.iterations},
                        {"converged", m.converged}};
            }
        },
        model);
}

Model decode(Family family, const json& config, const json& params) {
    switch (family) {
    case Family::nb: {
        NBModel m;
        m.config.bins = config.at("bins").get<std::size_t>();
        m.config.laplace = config.at("laplace").get<double>();
        const auto& priors = params.at("class_log_priors");
        m.class_log_priors = {priors.at(0).get<double>(), priors.at(1).get<double>()};
        for (const auto& e : params.at("bin_edges")) {
            std::vector<double> edges;
            for (const auto& v : e)
                edges.push_back(v.get<double>());
            m.bin_edges.push_back(std::move(edges));
        }
        for (const auto& feature : params.at("cond_log_prob")) {
            std::vector<std::array<double, 2>> bins;
            for (const auto& bin : feature)
                bins.push_back({bin.at(0).get<double>(), bin.at(1).get<double>()});
            m.cond_log_prob.push_back(std::move(bins));
        }
        return m;
    }
    case Family::glm: {
        GLMModel m;
        m.config.lambda = config.at("lambda").get<double>();
        m.config.alpha = config.at("alpha").get<double>();
        m.config.standardize = config.at("standardize").get<bool>();
        m.config.max_iter = config.at("max_iter").get<std::size_t>();
        m.config.tol = config.at("tol").get<double>();
        m.intercept = params.at("intercept").get<double>();
        m.beta = vec_from_json(params.at("coefficients"));
        m.column_means = vec_from_json(params.at("column_means"));
        m.column_scales = vec_from_json(params.at("column_scales"));
        m.iterations = params.at("iterations").get<std::size_t>();
        return m;
    }
    case Family::lr: {
        LogisticModel m;
        m.config.max_iter = config.at("max_iter").get<std::size_t>();
        m.config.tol = config.at("tol").get<double>();
        m.b0 = params.at("intercept").get<double>();
        m.b = vec_from_json(params.at("coefficients"));
        m.converged = params.at("converged").get<bool>();
        m.iterations = params.at("iterations").get<std::size_t>();
        return m;
    }
    case Family::dt: {
        TreeModel m;
        m.config = tree_config_from(config);
        tree_params_from(params, m);
        return m;
    }
    case Family::rf: {
        ForestModel m;
        m.config.n_trees = config.at("n_trees").get<std::size_t>();
        m.config.max_depth = config.at("max_depth").get<std::size_t>();
        m.config.min_gain = config.at("min_gain").get<double>();
        m.config.confidence = config.at("confidence").get<double>();
        m.config.prune = config.at("prune").get<bool>();
        m.config.bootstrap = config.at("bootstrap").get<bool>();
        m.config.feature_subsample = config.at("feature_subsample").get<bool>();
        m.config.seed = config.at("seed").get<std::uint64_t>();
        for (const auto& t : params.at("trees"))
            m.trees.push_back(embedded_tree_from(t));
        if (m.trees.empty())
            throw DataError("model file: random forest has no trees");
        return m;
    }
    case Family::gbt: {
        GBTModel m;
        m.config.n_trees = config.at("n_trees").get<std::size_t>();
        m.config.max_depth = config.at("max_depth").get<std::size_t>();
        m.config.min_gain = config.at("min_gain").get<double>();
        m.config.confidence = config.at("confidence").get<double>();
        m.config.prune = config.at("prune").get<bool>();
        m.config.seed = config.at("seed").get<std::uint64_t>();
        for (const auto& t : params.at("trees"))
            m.trees.push_back(embedded_tree_from(t));
        m.weights = vec_from_json(params.at("weights"));
        if (m.trees.empty())
            throw DataError("model file: boosted ensemble has no trees");
        if (m.weights.size() != static_cast<Eigen::Index>(m.trees.size()))
            throw DataError("model file: ensemble weight count does not match tree count");
        return m;
    }
    case Family::mlp: {
        MLPModel m;
        for (const auto& h : config.at("hidden"))
            m.config.hidden.push_back(h.get<std::size_t>());
        m.config.activation = activation_from_name(config.at("activation").get<std::string>());
        m.config.maxout_pieces = config.at("maxout_pieces").get<std::size_t>();
        m.config.max_iter = config.at("max_iter").get<std::size_t>();
        m.config.tol = config.at("tol").get<double>();
        m.config.learning_rate = config.at("learning_rate").get<double>();
        m.config.l2 = config.at("l2").get<double>();
        m.config.dropout = config.at("dropout").get<double>();
        m.config.seed = config.at("seed").get<std::uint64_t>();
        for (const auto& s : params.at("layer_sizes"))
            m.layer_sizes.push_back(s.get<std::size_t>());
        for (const auto& w : params.at("weights"))
            m.weights.push_back(mat_from_json(w));
        for (const auto& b : params.at("biases"))
            m.biases.push_back(vec_from_json(b));
        m.iterations = params.at("iterations").get<std::size_t>();
        m.converged = params.at("converged").get<bool>();
        if (m.layer_sizes.size() < 2 || m.weights.size() != m.layer_sizes.size() - 1 ||
            m.biases.size() != m.weights.size())
            throw DataError("model file: inconsistent network shape");
        return m;
    }
    }
    throw DataError("unknown model family value");
}

} // namespace

std::string_view family_name(Family family) {
    switch (family) {
    case Family::nb:
        return "nb";
    case Family::glm:
        return "glm";
    case Family::lr:
        return "lr";
    case Family::dt:
        return "dt";
    case Family::rf:
        return "rf";
    case Family::gbt:
        return "gbt";
    case Family::mlp:
        return "mlp";
    }
    throw DataError("unknown model family value");
}

Family family_from_name(std::string_view name) {
    for (Family f : kAllFamilies)
        if (family_name(f) == name)
            return f;
    throw DataError("unknown model family \"" + std::string(name) + "\"");
}

Family family_of(const Model& model) {
    struct Visitor {
        Family operator()(const NBModel&) const { return Family::nb; }
        Family operator()(const GLMModel&) const { return Family::glm; }
        Family operator()(const LogisticModel&) const { return Family::lr; }
        Family operator()(const TreeModel&) const { return Family::dt; }
        Family operator()(const ForestModel&) const { return Family::rf; }
        Family operator()(const GBTModel&) const { return Family::gbt; }
        Family operator()(const MLPModel&) const { return Family::mlp; }
    };
    return std::visit(Visitor{}, model);
}

double predict(const Model& model, const Eigen::VectorXd& x) {
    struct Visitor {
        const Eigen::VectorXd& x;
        double operator()(const NBModel& m) const { return predict_naive_bayes(m, x); }
        double operator()(const GLMModel& m) const { return predict_glm(m, x); }
        double operator()(const LogisticModel& m) const { return predict_logistic(m, x); }
        double operator()(const TreeModel& m) const { return predict_tree(m, x); }
        double operator()(const ForestModel& m) const { return predict_forest(m, x); }
        double operator()(const GBTModel& m) const { return predict_gbt(m, x); }
        double operator()(const MLPModel& m) const { return predict_mlp(m, x); }
    };
    return std::visit(Visitor{x}, model);
}

Eigen::VectorXd predict_all(const Model& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd scores(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        scores(i) = predict(model, X.row(i).transpose());
    return scores;
}

std::string model_to_json(const Model& model) {
    json doc;
    doc["family"] = std::string(family_name(family_of(model)));
    doc["version"] = kFormatVersion;
    doc["config"] = config_json(model);
    doc["params"] = params_json(model);
    return doc.dump(2) + "\n";
}

Model model_from_json(const std::string& text) {
    try {
        json doc = json::parse(text);
        if (doc.at("version").get<int>() != kFormatVersion)
            throw DataError("model file: unsupported version " +
                            doc.at("version").dump());
        Family family = family_from_name(doc.at("family").get<std::string>());
        return decode(family, doc.at("config"), doc.at("params"));
    } catch (const json::exception& e) {
        throw DataError(std::string("model file: ") + e.what());
    }
}

void write_model_json(const Model& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open \"" + path + "\" for writing");
    out << model_to_json(model);
    if (!out)
        throw DataError("failed writing \"" + path + "\"");
}

Model read_model_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

} // namespace sbd::learn
