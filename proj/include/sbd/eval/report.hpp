#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sbd/eval/metrics.hpp"
#include "sbd/learn/model.hpp"
#include "sbd/learn/selection.hpp"

namespace sbd::eval {

struct ModelEvaluation {
    learn::Family family = learn::Family::nb;
    ClassificationMetrics metrics;
    double log_loss = 0.0;
    double auc = 0.0;
    std::vector<RocPoint> roc;
};

// Scores at the 0.5 threshold plus the ranking metrics; labels must contain
// both classes (the ROC needs them).
ModelEvaluation evaluate_scores(learn::Family family, const Eigen::VectorXd& scores,
                                const std::vector<int>& labels);

struct SplitDescriptor {
    double train_fraction = 0.0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    std::size_t train_positives = 0;
    std::size_t test_positives = 0;
};

struct FamilyFailure {
    learn::Family family = learn::Family::nb;
    std::string message;
};

struct EvaluationReport {
    std::uint64_t seed = 0;
    SplitDescriptor split;
    std::string timestamp; // ISO-8601 UTC; excluded from determinism guarantees
    std::vector<ModelEvaluation> models;
    std::vector<FamilyFailure> failures; // families whose training failed
};

// One shared stratified split; families run in request order. A family whose
// training raises a data error is recorded under failures and the rest still
// complete.
EvaluationReport compare_models(const learn::Dataset& dataset,
                                const std::vector<learn::Family>& families,
                                const std::map<learn::Family, learn::ParamMap>& overrides,
                                double train_fraction, std::uint64_t seed);

std::string report_to_json(const EvaluationReport& report);
void write_report_json(const EvaluationReport& report, const std::string& path);

// One row per family: family,accuracy,classification_error,precision,recall,
// f1,log_loss,auc.
void write_report_csv(const EvaluationReport& report, const std::string& path);

// family,fpr,tpr rows for every curve vertex.
void write_roc_csv(const EvaluationReport& report, const std::string& path);

} // namespace sbd::eval
