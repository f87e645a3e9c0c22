#include "sbd/eval/report.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "sbd/error.hpp"
#include "sbd/format.hpp"
#include "sbd/rng.hpp"
#include "sbd/timeutil.hpp"

namespace sbd::eval {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot open \"" + path + "\" for writing");
    return out;
}

} // namespace

ModelEvaluation evaluate_scores(learn::Family family, const Eigen::VectorXd& scores,
                                const std::vector<int>& labels) {
    ModelEvaluation ev;
    ev.family = family;
    ev.metrics = classification_metrics(confusion(scores, labels));
    ev.log_loss = log_loss(scores, labels);
    ev.roc = roc_curve(scores, labels);
    ev.auc = auc(ev.roc);
    return ev;
}

EvaluationReport compare_models(const learn::Dataset& dataset,
                                const std::vector<learn::Family>& families,
                                const std::map<learn::Family, learn::ParamMap>& overrides,
                                double train_fraction, std::uint64_t seed) {
    if (families.empty())
        throw DataError("model comparison needs at least one family");

    std::vector<int> labels(static_cast<std::size_t>(dataset.n()));
    for (Eigen::Index i = 0; i < dataset.n(); ++i)
        labels[static_cast<std::size_t>(i)] = dataset.y(i) == 1.0 ? 1 : 0;

    const SplitIndices split = stratified_split_indices(labels, train_fraction, seed);
    const learn::Dataset train = dataset.subset(split.train);
    const learn::Dataset test = dataset.subset(split.test);

    std::vector<int> test_labels(static_cast<std::size_t>(test.n()));
    for (Eigen::Index i = 0; i < test.n(); ++i)
        test_labels[static_cast<std::size_t>(i)] = test.y(i) == 1.0 ? 1 : 0;

    EvaluationReport report;
    report.seed = seed;
    report.timestamp = timeutil::format_iso8601_utc(timeutil::now_utc());
    report.split.train_fraction = train_fraction;
    report.split.train_size = split.train.size();
    report.split.test_size = split.test.size();
    report.split.train_positives = static_cast<std::size_t>(train.count(1));
    report.split.test_positives = static_cast<std::size_t>(test.count(1));

    for (learn::Family family : families) {
        const learn::ParamMap* params = nullptr;
        if (auto it = overrides.find(family); it != overrides.end())
            params = &it->second;
        try {
            const learn::Model model =
                learn::train_family(family, train, params ? *params : learn::ParamMap{},
                                    Rng::mix(seed, 1 + static_cast<std::uint64_t>(family)));
            report.models.push_back(
                evaluate_scores(family, predict_all(model, test.X), test_labels));
        } catch (const DataError& e) {
            report.failures.push_back(
                {family, std::string(learn::family_name(family)) + ": " + e.what()});
        }
    }
    return report;
}

std::string report_to_json(const EvaluationReport& report) {
    json doc;
    doc["seed"] = report.seed;
    doc["timestamp"] = report.timestamp;
    doc["split"] = {{"train_fraction", report.split.train_fraction},
                    {"train_size", report.split.train_size},
                    {"test_size", report.split.test_size},
                    {"train_positives", report.split.train_positives},
                    {"test_positives", report.split.test_positives}};

    json models = json::array();
    for (const auto& ev : report.models) {
        json roc = json::array();
        for (const auto& p : ev.roc)
            roc.push_back(json::array({p.fpr, p.tpr}));
        models.push_back(
            {{"family", std::string(learn::family_name(ev.family))},
             {"metrics",
              {{"accuracy", ev.metrics.accuracy},
               {"classification_error", ev.metrics.classification_error},
               {"precision", ev.metrics.precision},
               {"recall", ev.metrics.recall},
               {"f1", ev.metrics.f1},
               {"log_loss", ev.log_loss},
               {"auc", ev.auc}}},
             {"roc", std::move(roc)}});
    }
    doc["models"] = std::move(models);

    json failures = json::array();
    for (const auto& failure : report.failures)
        failures.push_back({{"family", std::string(learn::family_name(failure.family))},
                            {"error", failure.message}});
    doc["failures"] = std::move(failures);

    return doc.dump(2) + "\n";
}

void write_report_json(const EvaluationReport& report, const std::string& path) {
    auto out = open_out(path);
    out << report_to_json(report);
    if (!out)
        throw DataError("failed writing \"" + path + "\"");
}

void write_report_csv(const EvaluationReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "family,accuracy,classification_error,precision,recall,f1,log_loss,auc\n";
    for (const auto& ev : report.models) {
        out << learn::family_name(ev.family) << ',' << format_double(ev.metrics.accuracy)
            << ',' << format_double(ev.metrics.classification_error) << ','
            << format_double(ev.metrics.precision) << ',' << format_double(ev.metrics.recall)
            << ',' << format_double(ev.metrics.f1) << ',' << format_double(ev.log_loss)
            << ',' << format_double(ev.auc) << '\n';
    }
    if (!out)
        throw DataError("failed writing \"" + path + "\"");
}

void write_roc_csv(const EvaluationReport& report, const std::string& path) {
    auto out = open_out(path);
    out << "family,fpr,tpr\n";
    for (const auto& ev : report.models)
        for (const auto& p : ev.roc)
            out << learn::family_name(ev.family) << ',' << format_double(p.fpr) << ','
                << format_double(p.tpr) << '\n';
    if (!out)
        throw DataError("failed writing \"" + path + "\"");
}

} // namespace sbd::eval
