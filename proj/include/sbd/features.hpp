#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "sbd/corpus.hpp"
#include "sbd/knowledge.hpp"

namespace sbd::features {

inline constexpr std::size_t kNumFeatures = 14;

// Column names as used in the CSV header and scaling records: "x1".."x14".
const std::array<std::string, kNumFeatures>& feature_names();

// Index of a feature name ("x7" -> 6); throws DataError on unknown names.
std::size_t feature_index(std::string_view name);

// Four calendar quarters ending at the quarter that contains reference_time:
// W (oldest) .. Z (contains the reference), each half-open [start, end).
// Anything before W's start falls in the open-ended pre-W interval.
struct QuarterWindows {
    std::int64_t reference_time = 0;
    // bounds[0] = W start, bounds[1] = X start, bounds[2] = Y start,
    // bounds[3] = Z start, bounds[4] = Z end. Strictly increasing.
    std::array<std::int64_t, 5> bounds{};

    static QuarterWindows from_reference(std::int64_t reference_time);

    // 0 = pre-W, 1 = W, 2 = X, 3 = Y, 4 = Z. Requires t < bounds[4].
    int bucket(std::int64_t t) const;
};

enum class Label { off_topic = 0, on_topic = 1 };

std::string_view label_name(Label label);              // "on_topic" / "off_topic"
Label label_from_name(std::string_view name);          // throws DataError on unknown names

// One user's feature vector:
//   x1  posts ingested for the user
//   x2  distinct entities mentioned across all posts
//   x3..x7  entity mentions per time bucket (pre-W, W, X, Y, Z)
//   x8  entity mentions in the profile description
//   x9  verified flag (0/1)
//   x10 sum of favorite_count over posts
//   x11 number of reply posts
//   x12 sum of retweet_count over posts
//   x13 followers_count, x14 friends_count
struct UserFeatureVector {
    std::string user_id;
    std::array<double, kNumFeatures> x{};
    std::optional<Label> label;
};

struct ExtractResult {
    UserFeatureVector vec;
    // Posts with created_at after the reference time are excluded from every
    // feature and counted here.
    std::size_t posts_after_reference = 0;
};

ExtractResult extract_user_features(const corpus::UserCorpus& corpus,
                                    const knowledge::CorpusAnnotations& annotations,
                                    const QuarterWindows& windows);

// One per-column transform, stored so the exact same arithmetic can be
// replayed on new data.
struct ScalingStep {
    enum class Op { minmax, log1p, clip };
    Op op = Op::minmax;
    std::string feature;  // column name, "x1".."x14"
    double a = 0.0;       // minmax: column min;  clip: lower bound
    double b = 0.0;       // minmax: column max;  clip: upper bound
};

struct ScalingRecord {
    std::vector<ScalingStep> steps;
};

struct FeatureMatrix {
    std::vector<UserFeatureVector> rows;
    ScalingRecord scaling; // transforms already applied to rows, in order

    std::size_t n() const { return rows.size(); }
    bool all_labeled() const;

    // Dense copy of the feature columns, one row per user.
    Eigen::MatrixXd to_matrix() const;
};

// Maps each selected column to [0,1] via (v - min) / (max - min); a constant
// column maps to 0. Appends one step per column to the scaling record.
FeatureMatrix scale_minmax(FeatureMatrix matrix, const std::vector<std::string>& columns);

// Clamps the column into [lo, hi]; lo > hi is an error.
FeatureMatrix clip_outliers(FeatureMatrix matrix, const std::string& column, double lo, double hi);

// Maps v to ln(1 + v); a negative value is an error.
FeatureMatrix log_scale(FeatureMatrix matrix, const std::string& column);

// Replays a stored record against new rows using the identical code path as
// the fitting transforms, so replay on the original matrix is bit-for-bit.
void apply_scaling(std::vector<UserFeatureVector>& rows, const ScalingRecord& record);

struct FeatureScore {
    std::string feature;
    double score = 0.0;
};

// Absolute Pearson correlation of each column with the 0/1 label; a
// zero-variance column scores 0. Descending, ties by feature name ascending.
// Requires every row labeled and n >= 2.
std::vector<FeatureScore> rank_features_pearson(const FeatureMatrix& matrix);

// Chi-squared statistic of each column against the label after equal-width
// binning over the observed range; cells with zero expected count contribute
// 0. Requires every row labeled and bins >= 2.
std::vector<FeatureScore> rank_features_chi2(const FeatureMatrix& matrix, std::size_t bins);

// features.csv: header `user_id,x1,...,x14,label`; RFC-4180 quoting; floats
// as shortest round-trip decimals; label on_topic/off_topic/empty.
void write_features_csv(std::ostream& out, const FeatureMatrix& matrix);
FeatureMatrix read_features_csv(std::istream& in);

// Scaling record persisted as JSON alongside the matrix.
void write_scaling_json(std::ostream& out, const ScalingRecord& record);
ScalingRecord read_scaling_json(std::istream& in);

} // namespace sbd::features
