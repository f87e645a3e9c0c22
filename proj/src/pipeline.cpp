#include "sbd/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sbd/corpus.hpp"
#include "sbd/error.hpp"
#include "sbd/eval/report.hpp"
#include "sbd/features.hpp"
#include "sbd/format.hpp"
#include "sbd/knowledge.hpp"
#include "sbd/rng.hpp"
#include "sbd/synth.hpp"
#include "sbd/timeutil.hpp"

namespace sbd::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json config_to_json(const PipelineConfig& c) {
    json doc;
    doc["posts"] = c.posts;
    doc["users"] = c.users;
    doc["handles"] = c.handles;
    doc["stopwords"] = c.stopwords;
    doc["kb"] = c.kb;
    doc["synonyms"] = c.synonyms;
    doc["labels"] = c.labels;
    doc["out_dir"] = c.out_dir;
    doc["batch"] = c.batch;
    doc["models_batch"] = c.models_batch;
    doc["user_id"] = c.user_id;
    doc["seed"] = c.seed;
    doc["split_fraction"] = c.split_fraction;
    doc["families"] = c.families;
    doc["params"] = c.params;
    doc["normalize"] = c.normalize;
    doc["reference_time"] = c.reference_time;
    doc["post_cap"] = c.post_cap;
    doc["lowercase"] = c.lowercase;
    doc["skip_bad_lines"] = c.skip_bad_lines;
    doc["top_k"] = c.top_k;
    doc["n_on"] = c.n_on;
    doc["n_off"] = c.n_off;
    doc["on_topic_fraction"] = c.on_topic_fraction;
    return doc;
}

bool is_batch_id(const std::string& name) {
    // YYYYMMDDTHHMMSSZ-NN
    if (name.size() != 19 || name[8] != 'T' || name[15] != 'Z' || name[16] != '-')
        return false;
    for (std::size_t i = 0; i < name.size(); ++i) {
        if (i == 8 || i == 15 || i == 16)
            continue;
        if (name[i] < '0' || name[i] > '9')
            return false;
    }
    return true;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open \"" + path.string() + "\" for writing");
    out << content;
    if (!out)
        throw DataError("failed writing \"" + path.string() + "\"");
}

std::ifstream open_input(const std::string& path, const std::string& what) {
    if (path.empty())
        throw UsageError("missing required path for " + what);
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open " + what + " file \"" + path + "\"");
    return in;
}

// Builds the batch in a hidden temp directory, then renames it into place so
// readers only ever see complete batches.
class BatchWriter {
public:
    BatchWriter(const PipelineConfig& config, const std::string& command)
        : out_dir_(config.out_dir), command_(command), config_json_(config_to_json(config)) {
        fs::create_directories(out_dir_);
        id_ = make_batch_id(config.out_dir, timeutil::now_utc());
        tmp_ = out_dir_ / (".tmp-" + id_);
        fs::create_directory(tmp_);
    }

    ~BatchWriter() {
        if (!finished_) {
            std::error_code ec;
            fs::remove_all(tmp_, ec);
        }
    }

    const fs::path& dir() const { return tmp_; }

    std::string finish(json summary) {
        json meta;
        meta["command"] = command_;
        meta["created"] = timeutil::format_iso8601_utc(timeutil::now_utc());
        meta["summary"] = std::move(summary);
        write_file(tmp_ / "meta.json", meta.dump(2) + "\n");
        write_file(tmp_ / "config.json", config_json_.dump(2) + "\n");
        fs::rename(tmp_, out_dir_ / id_);
        finished_ = true;
        return id_;
    }

private:
    fs::path out_dir_;
    std::string command_;
    json config_json_;
    std::string id_;
    fs::path tmp_;
    bool finished_ = false;
};

// Existing batch lookup: explicit id if given, else the newest batch that
// contains the required entry.
fs::path resolve_batch(const PipelineConfig& config, const std::string& explicit_id,
                       const std::string& required, const std::string& hint) {
    if (!explicit_id.empty()) {
        fs::path dir = fs::path(config.out_dir) / explicit_id;
        if (!fs::exists(dir))
            throw DataError("batch \"" + explicit_id + "\" not found under " +
                            config.out_dir);
        if (!fs::exists(dir / required))
            throw DataError("batch \"" + explicit_id + "\" has no " + required + "; " + hint);
        return dir;
    }
    std::vector<std::string> candidates;
    if (fs::exists(config.out_dir))
        for (const auto& entry : fs::directory_iterator(config.out_dir))
            if (entry.is_directory() && is_batch_id(entry.path().filename().string()) &&
                fs::exists(entry.path() / required))
                candidates.push_back(entry.path().filename().string());
    if (candidates.empty())
        throw DataError("no batch under " + config.out_dir + " contains " + required +
                        "; " + hint);
    std::sort(candidates.begin(), candidates.end());
    return fs::path(config.out_dir) / candidates.back();
}

std::unordered_map<std::string, features::Label> parse_labels_csv(std::istream& in) {
    std::unordered_map<std::string, features::Label> labels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line_no == 1 && line == "user_id,label")
            continue;
        auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
            throw DataError("labels line " + std::to_string(line_no) +
                            ": expected user_id,label");
        std::string user = line.substr(0, comma);
        std::string value = line.substr(comma + 1);
        if (user.empty())
            throw DataError("labels line " + std::to_string(line_no) + ": empty user_id");
        if (!labels.emplace(user, features::label_from_name(value)).second)
            throw DataError("labels line " + std::to_string(line_no) +
                            ": duplicate label for user \"" + user + "\"");
    }
    return labels;
}

struct NormStep {
    features::ScalingStep::Op op;
    std::string feature;
    double lo = 0.0;
    double hi = 0.0;
};

double parse_real(std::string_view text, const std::string& context) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw UsageError("cannot parse number \"" + std::string(text) + "\" in " + context);
    return value;
}

// "x10=log,x13=minmax,x12=clip:0:100" applied in the listed order.
std::vector<NormStep> parse_normalize(const std::string& plan) {
    std::vector<NormStep> steps;
    std::stringstream ss(plan);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        auto eq = item.find('=');
        if (eq == std::string::npos)
            throw UsageError("normalize entry \"" + item + "\" is not feature=op");
        NormStep step;
        step.feature = item.substr(0, eq);
        try {
            features::feature_index(step.feature);
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
        std::string op = item.substr(eq + 1);
        if (op == "minmax") {
            step.op = features::ScalingStep::Op::minmax;
        } else if (op == "log") {
            step.op = features::ScalingStep::Op::log1p;
        } else if (op.rfind("clip:", 0) == 0) {
            step.op = features::ScalingStep::Op::clip;
            std::string rest = op.substr(5);
            auto colon = rest.find(':');
            if (colon == std::string::npos)
                throw UsageError("clip needs two bounds, as in x12=clip:0:100");
            step.lo = parse_real(rest.substr(0, colon), "normalize plan");
            step.hi = parse_real(rest.substr(colon + 1), "normalize plan");
        } else {
            throw UsageError("unknown normalization \"" + op +
                             "\" (expected minmax, log or clip:lo:hi)");
        }
        steps.push_back(std::move(step));
    }
    return steps;
}

// Labeled rows of a feature matrix as a training dataset.
learn::Dataset labeled_dataset(const features::FeatureMatrix& matrix) {
    std::vector<const features::UserFeatureVector*> labeled;
    for (const auto& row : matrix.rows)
        if (row.label.has_value())
            labeled.push_back(&row);
    if (labeled.empty())
        throw DataError("no labeled rows in features.csv; supply a labels file "
                        "when running featurize");

    Eigen::MatrixXd X(static_cast<Eigen::Index>(labeled.size()),
                      static_cast<Eigen::Index>(features::kNumFeatures));
    Eigen::VectorXd y(static_cast<Eigen::Index>(labeled.size()));
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        for (std::size_t j = 0; j < features::kNumFeatures; ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = labeled[i]->x[j];
        y(static_cast<Eigen::Index>(i)) =
            labeled[i]->label == features::Label::on_topic ? 1.0 : 0.0;
    }
    std::vector<std::string> names(features::feature_names().begin(),
                                   features::feature_names().end());
    return learn::Dataset::make(std::move(X), std::move(y), std::move(names));
}

void require_two_per_class(const learn::Dataset& dataset) {
    if (dataset.count(0) < 2 || dataset.count(1) < 2)
        throw DataError("training needs at least 2 labeled rows per class (have " +
                        std::to_string(dataset.count(1)) + " on-topic, " +
                        std::to_string(dataset.count(0)) + " off-topic)");
}

features::FeatureMatrix read_features_batch(const fs::path& dir) {
    std::ifstream in(dir / "features.csv", std::ios::binary);
    if (!in)
        throw DataError("cannot open \"" + (dir / "features.csv").string() + "\"");
    return features::read_features_csv(in);
}

std::vector<corpus::UserCorpus> read_corpus_batch(const fs::path& dir) {
    std::ifstream in(dir / "corpus.jsonl", std::ios::binary);
    if (!in)
        throw DataError("cannot open \"" + (dir / "corpus.jsonl").string() + "\"");
    return corpus::read_corpus_jsonl(in);
}

knowledge::KnowledgeBase load_kb_with_synonyms(const PipelineConfig& config) {
    auto kb_in = open_input(config.kb, "knowledge base");
    knowledge::KnowledgeBase kb = knowledge::load_kb(kb_in);
    if (!config.synonyms.empty()) {
        auto syn_in = open_input(config.synonyms, "synonyms");
        kb = knowledge::merge_synonyms(kb, knowledge::parse_synonyms_json(syn_in));
    }
    return kb;
}

} // namespace

std::string make_batch_id(const std::string& out_dir, std::int64_t now_unix) {
    std::string iso = timeutil::format_iso8601_utc(now_unix); // YYYY-MM-DDTHH:MM:SSZ
    std::string compact;
    for (char c : iso)
        if (c != '-' && c != ':')
            compact += c;

    int max_suffix = 0;
    if (fs::exists(out_dir))
        for (const auto& entry : fs::directory_iterator(out_dir)) {
            const std::string name = entry.path().filename().string();
            if (is_batch_id(name) && name.compare(0, compact.size(), compact) == 0)
                max_suffix = std::max(max_suffix, (name[17] - '0') * 10 + (name[18] - '0'));
        }
    if (max_suffix >= 99)
        throw DataError("too many batches created within one second");
    const int suffix = max_suffix + 1;
    return compact + "-" + (suffix < 10 ? "0" : "") + std::to_string(suffix);
}

std::vector<learn::Family> parse_families(const std::string& families) {
    std::vector<learn::Family> parsed;
    std::stringstream ss(families);
    std::string token;
    while (std::getline(ss, token, ',')) {
        // Allow spaces around the commas.
        const auto first = token.find_first_not_of(" \t");
        const auto last = token.find_last_not_of(" \t");
        if (first == std::string::npos)
            continue;
        try {
            parsed.push_back(learn::family_from_name(token.substr(first, last - first + 1)));
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
    }
    if (parsed.empty())
        throw UsageError("no model families requested");
    return parsed;
}

std::map<learn::Family, learn::ParamMap> parse_param_overrides(const std::string& params) {
    std::map<learn::Family, learn::ParamMap> overrides;
    std::stringstream ss(params);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        const auto dot = item.find('.');
        const auto eq = item.find('=');
        if (dot == std::string::npos || eq == std::string::npos || dot > eq)
            throw UsageError("parameter override \"" + item +
                             "\" is not family.name=value");
        learn::Family family;
        try {
            family = learn::family_from_name(item.substr(0, dot));
        } catch (const DataError& e) {
            throw UsageError(e.what());
        }
        const std::string name = item.substr(dot + 1, eq - dot - 1);
        overrides[family][name] = parse_real(item.substr(eq + 1), "parameter overrides");
    }
    return overrides;
}

std::string cmd_ingest(const PipelineConfig& config) {
    const auto mode = config.skip_bad_lines ? corpus::ParseMode::skip
                                            : corpus::ParseMode::fail_fast;
    auto posts_in = open_input(config.posts, "posts");
    auto posts = corpus::parse_posts_archive(posts_in, mode);
    auto users_in = open_input(config.users, "users");
    auto users = corpus::parse_users_archive(users_in, mode);
    if (users.users.empty())
        throw DataError("no users parsed from \"" + config.users + "\"");

    corpus::HandleMap handles;
    if (!config.handles.empty()) {
        auto in = open_input(config.handles, "handles");
        handles = corpus::parse_handles_tsv(in);
    }
    corpus::CleansingConfig cleansing;
    cleansing.lowercase = config.lowercase;
    cleansing.post_cap = config.post_cap;
    if (!config.stopwords.empty()) {
        auto in = open_input(config.stopwords, "stopwords");
        cleansing.stopwords = corpus::parse_stopwords(in);
    }

    const auto built = corpus::build_corpus(users.users, posts.posts, handles, cleansing);

    BatchWriter batch(config, "ingest");
    std::ostringstream corpus_out;
    corpus::write_corpus_jsonl(corpus_out, built.corpora);
    write_file(batch.dir() / "corpus.jsonl", corpus_out.str());

    json summary;
    summary["users"] = built.corpora.size();
    summary["posts_parsed"] = posts.posts.size();
    summary["posts_skipped"] = posts.skipped;
    summary["users_skipped"] = users.skipped;
    summary["duplicates_removed"] = built.duplicates_removed;
    summary["orphaned"] = built.orphaned;
    summary["capped"] = built.capped;
    return batch.finish(std::move(summary));
}

std::string cmd_featurize(const PipelineConfig& config) {
    const fs::path corpus_dir =
        resolve_batch(config, config.batch, "corpus.jsonl", "run ingest first");
    const auto corpora = read_corpus_batch(corpus_dir);
    const auto kb = load_kb_with_synonyms(config);

    std::vector<knowledge::CorpusAnnotations> annotations;
    annotations.reserve(corpora.size());
    for (const auto& user : corpora)
        annotations.push_back(knowledge::annotate_corpus(user, kb));

    std::int64_t reference = 0;
    if (!config.reference_time.empty()) {
        reference = timeutil::parse_iso8601_utc(config.reference_time);
    } else {
        bool any = false;
        for (const auto& user : corpora)
            for (const auto& post : user.posts) {
                if (!any || post.created_at > reference)
                    reference = post.created_at;
                any = true;
            }
        if (!any)
            throw DataError("corpus has no posts to infer a reference time from; "
                            "pass --reference-time");
    }
    const auto windows = features::QuarterWindows::from_reference(reference);

    features::FeatureMatrix matrix;
    std::size_t posts_after_reference = 0;
    for (std::size_t i = 0; i < corpora.size(); ++i) {
        auto extracted = features::extract_user_features(corpora[i], annotations[i], windows);
        posts_after_reference += extracted.posts_after_reference;
        matrix.rows.push_back(std::move(extracted.vec));
    }

    std::size_t labeled = 0;
    std::size_t unknown_labels = 0;
    if (!config.labels.empty()) {
        auto labels_in = open_input(config.labels, "labels");
        auto labels = parse_labels_csv(labels_in);
        for (auto& row : matrix.rows) {
            auto it = labels.find(row.user_id);
            if (it != labels.end()) {
                row.label = it->second;
                ++labeled;
            }
        }
        unknown_labels = labels.size() - labeled;
    }

    for (const auto& step : parse_normalize(config.normalize)) {
        switch (step.op) {
        case features::ScalingStep::Op::minmax:
            matrix = features::scale_minmax(std::move(matrix), {step.feature});
            break;
        case features::ScalingStep::Op::log1p:
            matrix = features::log_scale(std::move(matrix), step.feature);
            break;
        case features::ScalingStep::Op::clip:
            matrix = features::clip_outliers(std::move(matrix), step.feature, step.lo,
                                             step.hi);
            break;
        }
    }

    BatchWriter batch(config, "featurize");
    std::ostringstream features_out;
    features::write_features_csv(features_out, matrix);
    write_file(batch.dir() / "features.csv", features_out.str());
    std::ostringstream scaling_out;
    features::write_scaling_json(scaling_out, matrix.scaling);
    write_file(batch.dir() / "scaling.json", scaling_out.str());

    json summary;
    summary["rows"] = matrix.rows.size();
    summary["labeled"] = labeled;
    summary["unknown_label_users"] = unknown_labels;
    summary["posts_after_reference"] = posts_after_reference;
    summary["reference_time"] = timeutil::format_iso8601_utc(reference);
    summary["corpus_batch"] = corpus_dir.filename().string();
    if (unknown_labels > 0)
        std::cerr << "warning: " << unknown_labels
                  << " labeled user(s) not present in the corpus\n";
    return batch.finish(std::move(summary));
}

std::string cmd_train(const PipelineConfig& config) {
    const fs::path features_dir =
        resolve_batch(config, config.batch, "features.csv", "run featurize first");
    const auto matrix = read_features_batch(features_dir);
    const auto dataset = labeled_dataset(matrix);
    require_two_per_class(dataset);

    const auto families = parse_families(config.families);
    const auto overrides = parse_param_overrides(config.params);

    BatchWriter batch(config, "train");
    fs::create_directory(batch.dir() / "models");
    json trained = json::array();
    for (learn::Family family : families) {
        learn::ParamMap params;
        if (auto it = overrides.find(family); it != overrides.end())
            params = it->second;
        const learn::Model model =
            learn::train_family(family, dataset, params,
                                Rng::mix(config.seed, 1 + static_cast<std::uint64_t>(family)));
        const std::string token(learn::family_name(family));
        learn::write_model_json(model, (batch.dir() / "models" / (token + ".json")).string());
        trained.push_back(token);
    }

    json summary;
    summary["families"] = std::move(trained);
    summary["rows"] = dataset.n();
    summary["features_batch"] = features_dir.filename().string();
    return batch.finish(std::move(summary));
}

std::string cmd_evaluate(const PipelineConfig& config) {
    const fs::path features_dir =
        resolve_batch(config, config.batch, "features.csv", "run featurize first");
    const fs::path models_dir =
        resolve_batch(config, config.models_batch, "models", "run train first");

    const auto matrix = read_features_batch(features_dir);
    const auto dataset = labeled_dataset(matrix);

    std::vector<std::string> model_files;
    for (const auto& entry : fs::directory_iterator(models_dir / "models"))
        if (entry.path().extension() == ".json")
            model_files.push_back(entry.path().string());
    if (model_files.empty())
        throw DataError("batch \"" + models_dir.filename().string() +
                        "\" contains no model files");
    std::sort(model_files.begin(), model_files.end());

    std::vector<int> labels(static_cast<std::size_t>(dataset.n()));
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
        labels[static_cast<std::size_t>(i)] = dataset.y(i) == 1.0 ? 1 : 0;

    eval::EvaluationReport report;
    report.seed = config.seed;
    report.timestamp = timeutil::format_iso8601_utc(timeutil::now_utc());
    report.split.train_fraction = 0.0; // evaluation over the full labeled set
    report.split.test_size = static_cast<std::size_t>(dataset.n());
    report.split.test_positives = static_cast<std::size_t>(dataset.count(1));
    for (const auto& file : model_files) {
        const learn::Model model = learn::read_model_json(file);
        report.models.push_back(eval::evaluate_scores(
            learn::family_of(model), learn::predict_all(model, dataset.X), labels));
    }

    BatchWriter batch(config, "evaluate");
    eval::write_report_json(report, (batch.dir() / "report.json").string());
    eval::write_report_csv(report, (batch.dir() / "report.csv").string());
    eval::write_roc_csv(report, (batch.dir() / "roc.csv").string());

    json summary;
    summary["models"] = model_files.size();
    summary["rows"] = dataset.n();
    summary["features_batch"] = features_dir.filename().string();
    summary["models_batch"] = models_dir.filename().string();
    return batch.finish(std::move(summary));
}

std::string cmd_compare(const PipelineConfig& config) {
    const fs::path features_dir =
        resolve_batch(config, config.batch, "features.csv", "run featurize first");
    const auto matrix = read_features_batch(features_dir);
    const auto dataset = labeled_dataset(matrix);
    require_two_per_class(dataset);

    const auto families = parse_families(config.families);
    const auto overrides = parse_param_overrides(config.params);
    const auto report = eval::compare_models(dataset, families, overrides,
                                             config.split_fraction, config.seed);

    BatchWriter batch(config, "compare");
    eval::write_report_json(report, (batch.dir() / "report.json").string());
    eval::write_report_csv(report, (batch.dir() / "report.csv").string());
    eval::write_roc_csv(report, (batch.dir() / "roc.csv").string());

    json summary;
    summary["families"] = families.size();
    summary["completed"] = report.models.size();
    summary["failed"] = report.failures.size();
    summary["features_batch"] = features_dir.filename().string();
    for (const auto& failure : report.failures)
        std::cerr << "warning: " << failure.message << '\n';
    return batch.finish(std::move(summary));
}

std::string cmd_top_entities(const PipelineConfig& config) {
    if (config.user_id.empty())
        throw UsageError("top-entities needs --user <user_id>");
    const fs::path corpus_dir =
        resolve_batch(config, config.batch, "corpus.jsonl", "run ingest first");
    const auto corpora = read_corpus_batch(corpus_dir);
    const auto kb = load_kb_with_synonyms(config);

    const corpus::UserCorpus* target = nullptr;
    for (const auto& user : corpora)
        if (user.profile.user_id == config.user_id)
            target = &user;
    if (target == nullptr)
        throw DataError("user \"" + config.user_id + "\" not found in batch " +
                        corpus_dir.filename().string());
    if (config.top_k < 1)
        throw UsageError("top-entities needs k >= 1");

    const auto mentions = knowledge::flatten(knowledge::annotate_corpus(*target, kb));
    const auto counts = knowledge::top_entities(mentions, kb, config.top_k);

    BatchWriter batch(config, "top-entities");
    std::string table = "entity,subtype,frequency\n";
    for (const auto& row : counts) {
        table += row.canonical_name;
        table += ',';
        table += knowledge::subtype_name(row.subtype);
        table += ',';
        table += std::to_string(row.frequency);
        table += '\n';
    }
    write_file(batch.dir() / "entities.csv", table);

    json summary;
    summary["user_id"] = config.user_id;
    summary["distinct_entities"] = counts.size();
    summary["mentions"] = mentions.size();
    return batch.finish(std::move(summary));
}

std::string cmd_synth(const PipelineConfig& config) {
    synth::SynthConfig synth_config;
    synth_config.seed = config.seed;
    synth_config.n_on = config.n_on;
    synth_config.n_off = config.n_off;
    synth_config.on_topic_fraction = config.on_topic_fraction;
    const auto output = synth::generate(synth_config);

    BatchWriter batch(config, "synth");
    write_file(batch.dir() / "posts.jsonl", output.posts_jsonl);
    write_file(batch.dir() / "users.jsonl", output.users_jsonl);
    write_file(batch.dir() / "labels.csv", output.labels_csv);
    write_file(batch.dir() / "handles.tsv", output.handles_tsv);
    write_file(batch.dir() / "kb.json", output.kb_json);
    write_file(batch.dir() / "synonyms.json", output.synonyms_json);
    write_file(batch.dir() / "stopwords.txt", output.stopwords_txt);

    json summary;
    summary["users"] = config.n_on + config.n_off;
    summary["on_topic"] = config.n_on;
    summary["off_topic"] = config.n_off;
    return batch.finish(std::move(summary));
}

} // namespace sbd::pipeline
