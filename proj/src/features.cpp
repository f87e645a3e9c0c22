#include "sbd/features.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "sbd/error.hpp"
#include "sbd/format.hpp"
#include "sbd/timeutil.hpp"

namespace sbd::features {

using nlohmann::json;

const std::array<std::string, kNumFeatures>& feature_names() {
    static const std::array<std::string, kNumFeatures> names = {
        "x1", "x2", "x3", "x4", "x5", "x6", "x7",
        "x8", "x9", "x10", "x11", "x12", "x13", "x14"};
    return names;
}

std::size_t feature_index(std::string_view name) {
    const auto& names = feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name)
            return i;
    throw DataError("unknown feature name \"" + std::string(name) + "\"");
}

namespace {

timeutil::CivilDate quarter_start(timeutil::CivilDate date) {
    date.month = static_cast<unsigned>(1 + 3 * ((date.month - 1) / 3));
    date.day = 1;
    return date;
}

timeutil::CivilDate previous_quarter(timeutil::CivilDate start) {
    if (start.month == 1) {
        start.month = 10;
        --start.year;
    } else {
        start.month -= 3;
    }
    return start;
}

timeutil::CivilDate next_quarter(timeutil::CivilDate start) {
    if (start.month == 10) {
        start.month = 1;
        ++start.year;
    } else {
        start.month += 3;
    }
    return start;
}

} // namespace

QuarterWindows QuarterWindows::from_reference(std::int64_t reference_time) {
    QuarterWindows windows;
    windows.reference_time = reference_time;

    timeutil::CivilDate z_start = quarter_start(timeutil::civil_from_days(
        static_cast<std::int64_t>(std::floor(static_cast<double>(reference_time) / 86400.0))));
    timeutil::CivilDate y_start = previous_quarter(z_start);
    timeutil::CivilDate x_start = previous_quarter(y_start);
    timeutil::CivilDate w_start = previous_quarter(x_start);
    timeutil::CivilDate z_end = next_quarter(z_start);

    const auto start_of = [](const timeutil::CivilDate& d) {
        return timeutil::to_unix_seconds(d.year, d.month, d.day);
    };
    windows.bounds = {start_of(w_start), start_of(x_start), start_of(y_start),
                      start_of(z_start), start_of(z_end)};
    return windows;
}

int QuarterWindows::bucket(std::int64_t t) const {
    if (t < bounds[0])
        return 0;
    for (int i = 0; i < 4; ++i)
        if (t < bounds[i + 1])
            return i + 1;
    throw DataError("timestamp beyond the reference quarter");
}

std::string_view label_name(Label label) {
    return label == Label::on_topic ? "on_topic" : "off_topic";
}

Label label_from_name(std::string_view name) {
    if (name == "on_topic")
        return Label::on_topic;
    if (name == "off_topic")
        return Label::off_topic;
    throw DataError("unknown label \"" + std::string(name) +
                    "\" (expected on_topic or off_topic)");
}

ExtractResult extract_user_features(const corpus::UserCorpus& corpus,
                                    const knowledge::CorpusAnnotations& annotations,
                                    const QuarterWindows& windows) {
    if (annotations.post_mentions.size() != corpus.posts.size())
        throw DataError("annotations do not match the corpus (" +
                        std::to_string(annotations.post_mentions.size()) + " vs " +
                        std::to_string(corpus.posts.size()) + " posts)");

    ExtractResult result;
    UserFeatureVector& v = result.vec;
    v.user_id = corpus.profile.user_id;

    std::unordered_set<std::string> distinct;
    for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
        const corpus::RawPost& post = corpus.posts[i];
        if (post.created_at > windows.reference_time) {
            ++result.posts_after_reference;
            continue;
        }
        v.x[0] += 1.0; // x1: posts
        int bucket = windows.bucket(post.created_at);
        for (const auto& mention : annotations.post_mentions[i]) {
            distinct.insert(mention.entity_id);
            v.x[2 + bucket] += 1.0; // x3..x7: mentions per bucket
        }
        v.x[9] += static_cast<double>(post.favorite_count);  // x10
        if (post.is_reply)
            v.x[10] += 1.0;                                  // x11
        v.x[11] += static_cast<double>(post.retweet_count);  // x12
    }
    v.x[1] = static_cast<double>(distinct.size());                       // x2
    v.x[7] = static_cast<double>(annotations.profile_mentions.size());   // x8
    v.x[8] = corpus.profile.verified ? 1.0 : 0.0;                        // x9
    v.x[12] = static_cast<double>(corpus.profile.followers_count);       // x13
    v.x[13] = static_cast<double>(corpus.profile.friends_count);         // x14
    return result;
}

bool FeatureMatrix::all_labeled() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const UserFeatureVector& row) { return row.label.has_value(); });
}

Eigen::MatrixXd FeatureMatrix::to_matrix() const {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(kNumFeatures));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < kNumFeatures; ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i].x[j];
    return X;
}

namespace {

void apply_step(std::vector<UserFeatureVector>& rows, const ScalingStep& step) {
    std::size_t column = feature_index(step.feature);
    switch (step.op) {
    case ScalingStep::Op::minmax:
        for (auto& row : rows) {
            double& v = row.x[column];
            v = step.a == step.b ? 0.0 : (v - step.a) / (step.b - step.a);
        }
        break;
    case ScalingStep::Op::log1p:
        for (auto& row : rows) {
            double& v = row.x[column];
            if (v < 0.0)
                throw DataError("log scaling of feature " + step.feature +
                                " hit a negative value");
            v = std::log1p(v);
        }
        break;
    case ScalingStep::Op::clip:
        for (auto& row : rows) {
            double& v = row.x[column];
            v = std::clamp(v, step.a, step.b);
        }
        break;
    }
}

} // namespace

FeatureMatrix scale_minmax(FeatureMatrix matrix, const std::vector<std::string>& columns) {
    for (const auto& name : columns) {
        std::size_t column = feature_index(name);
        double lo = 0.0, hi = 0.0;
        if (!matrix.rows.empty()) {
            lo = hi = matrix.rows.front().x[column];
            for (const auto& row : matrix.rows) {
                lo = std::min(lo, row.x[column]);
                hi = std::max(hi, row.x[column]);
            }
        }
        ScalingStep step{ScalingStep::Op::minmax, name, lo, hi};
        apply_step(matrix.rows, step);
        matrix.scaling.steps.push_back(std::move(step));
    }
    return matrix;
}

FeatureMatrix clip_outliers(FeatureMatrix matrix, const std::string& column, double lo,
                            double hi) {
    if (lo > hi)
        throw DataError("clip bounds inverted for feature " + column);
    ScalingStep step{ScalingStep::Op::clip, column, lo, hi};
    apply_step(matrix.rows, step);
    matrix.scaling.steps.push_back(std::move(step));
    return matrix;
}

FeatureMatrix log_scale(FeatureMatrix matrix, const std::string& column) {
    ScalingStep step{ScalingStep::Op::log1p, column, 0.0, 0.0};
    apply_step(matrix.rows, step);
    matrix.scaling.steps.push_back(std::move(step));
    return matrix;
}

void apply_scaling(std::vector<UserFeatureVector>& rows, const ScalingRecord& record) {
    for (const auto& step : record.steps)
        apply_step(rows, step);
}

namespace {

void require_rankable(const FeatureMatrix& matrix) {
    if (matrix.n() < 2)
        throw DataError("feature ranking requires at least 2 rows");
    if (!matrix.all_labeled())
        throw DataError("feature ranking requires a label on every row");
}

std::vector<FeatureScore> sort_scores(std::vector<FeatureScore> scores) {
    std::sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.score != b.score)
            return a.score > b.score;
        return a.feature < b.feature;
    });
    return scores;
}

} // namespace

std::vector<FeatureScore> rank_features_pearson(const FeatureMatrix& matrix) {
    require_rankable(matrix);
    const auto n = static_cast<double>(matrix.n());

    Eigen::VectorXd y(matrix.n());
    for (std::size_t i = 0; i < matrix.n(); ++i)
        y(static_cast<Eigen::Index>(i)) = matrix.rows[i].label == Label::on_topic ? 1.0 : 0.0;
    Eigen::MatrixXd X = matrix.to_matrix();

    Eigen::VectorXd yc = y.array() - y.mean();
    double y_var = yc.squaredNorm() / n;

    std::vector<FeatureScore> scores;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        auto col = X.col(static_cast<Eigen::Index>(j));
        Eigen::VectorXd xc = col.array() - col.mean();
        double x_var = xc.squaredNorm() / n;
        double score = 0.0;
        if (x_var > 0.0 && y_var > 0.0) {
            double cov = xc.dot(yc) / n;
            score = std::abs(cov / std::sqrt(x_var * y_var));
        }
        scores.push_back({feature_names()[j], score});
    }
    return sort_scores(std::move(scores));
}

std::vector<FeatureScore> rank_features_chi2(const FeatureMatrix& matrix, std::size_t bins) {
    require_rankable(matrix);
    if (bins < 2)
        throw DataError("chi-squared ranking requires at least 2 bins");
    const std::size_t n = matrix.n();

    std::vector<FeatureScore> scores;
    for (std::size_t j = 0; j < kNumFeatures; ++j) {
        double lo = matrix.rows.front().x[j], hi = lo;
        for (const auto& row : matrix.rows) {
            lo = std::min(lo, row.x[j]);
            hi = std::max(hi, row.x[j]);
        }
        double width = (hi - lo) / static_cast<double>(bins);

        // observed[bin][class]
        std::vector<std::array<double, 2>> observed(bins, {0.0, 0.0});
        for (const auto& row : matrix.rows) {
            std::size_t bin = 0;
            if (width > 0.0)
                bin = std::min(bins - 1,
                               static_cast<std::size_t>((row.x[j] - lo) / width));
            ++observed[bin][row.label == Label::on_topic ? 1 : 0];
        }

        std::array<double, 2> class_totals{0.0, 0.0};
        std::vector<double> bin_totals(bins, 0.0);
        for (std::size_t b = 0; b < bins; ++b)
            for (std::size_t c = 0; c < 2; ++c) {
                bin_totals[b] += observed[b][c];
                class_totals[c] += observed[b][c];
            }

        double chi2 = 0.0;
        for (std::size_t b = 0; b < bins; ++b)
            for (std::size_t c = 0; c < 2; ++c) {
                double expected = bin_totals[b] * class_totals[c] / static_cast<double>(n);
                if (expected > 0.0) {
                    double diff = observed[b][c] - expected;
                    chi2 += diff * diff / expected;
                }
            }
        scores.push_back({feature_names()[j], chi2});
    }
    return sort_scores(std::move(scores));
}

namespace {

bool needs_quoting(std::string_view field) {
    return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

std::string csv_quote(std::string_view field) {
    if (!needs_quoting(field))
        return std::string(field);
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"')
            quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

// RFC-4180 record reader: handles quoted fields, embedded separators and
// newlines. Returns false at end of stream.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields) {
    fields.clear();
    std::string field;
    bool in_quotes = false;
    bool any = false;
    int c;
    while ((c = in.get()) != std::istream::traits_type::eof()) {
        any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            break;
        } else if (ch == '\r') {
            if (in.peek() == '\n')
                in.get();
            break;
        } else {
            field += ch;
        }
    }
    if (!any)
        return false;
    fields.push_back(std::move(field));
    return true;
}

double parse_double_field(const std::string& field, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw DataError("features.csv line " + std::to_string(line) + ": bad number \"" + field +
                        "\"");
    return value;
}

std::string expected_header() {
    std::string header = "user_id";
    for (const auto& name : feature_names()) {
        header += ',';
        header += name;
    }
    header += ",label";
    return header;
}

} // namespace

void write_features_csv(std::ostream& out, const FeatureMatrix& matrix) {
    out << expected_header() << '\n';
    for (const auto& row : matrix.rows) {
        out << csv_quote(row.user_id);
        for (double v : row.x)
            out << ',' << format_double(v);
        out << ',';
        if (row.label)
            out << label_name(*row.label);
        out << '\n';
    }
}

FeatureMatrix read_features_csv(std::istream& in) {
    std::vector<std::string> fields;
    if (!read_csv_record(in, fields))
        throw DataError("features.csv: empty file");

    std::string header;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0)
            header += ',';
        header += fields[i];
    }
    if (header != expected_header())
        throw DataError("features.csv: unexpected header \"" + header + "\"");

    FeatureMatrix matrix;
    std::size_t line = 1;
    while (read_csv_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty())
            continue; // trailing blank line
        if (fields.size() != kNumFeatures + 2)
            throw DataError("features.csv line " + std::to_string(line) + ": expected " +
                            std::to_string(kNumFeatures + 2) + " fields, got " +
                            std::to_string(fields.size()));
        UserFeatureVector row;
        row.user_id = fields[0];
        for (std::size_t j = 0; j < kNumFeatures; ++j)
            row.x[j] = parse_double_field(fields[j + 1], line);
        const std::string& label = fields[kNumFeatures + 1];
        if (!label.empty())
            row.label = label_from_name(label);
        matrix.rows.push_back(std::move(row));
    }
    return matrix;
}

void write_scaling_json(std::ostream& out, const ScalingRecord& record) {
    json steps = json::array();
    for (const auto& step : record.steps) {
        json entry{{"feature", step.feature}};
        switch (step.op) {
        case ScalingStep::Op::minmax:
            entry["op"] = "minmax";
            entry["min"] = step.a;
            entry["max"] = step.b;
            break;
        case ScalingStep::Op::log1p:
            entry["op"] = "log1p";
            break;
        case ScalingStep::Op::clip:
            entry["op"] = "clip";
            entry["lo"] = step.a;
            entry["hi"] = step.b;
            break;
        }
        steps.push_back(std::move(entry));
    }
    out << json{{"steps", std::move(steps)}}.dump(2) << '\n';
}

ScalingRecord read_scaling_json(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& err) {
        throw DataError(std::string("scaling record: malformed JSON: ") + err.what());
    }
    if (!doc.is_object() || !doc.contains("steps") || !doc["steps"].is_array())
        throw DataError("scaling record: expected an object with a \"steps\" array");

    ScalingRecord record;
    for (const auto& entry : doc["steps"]) {
        if (!entry.is_object() || !entry.contains("op") || !entry.contains("feature"))
            throw DataError("scaling record: step missing \"op\" or \"feature\"");
        ScalingStep step;
        step.feature = entry["feature"].get<std::string>();
        feature_index(step.feature); // validates the name
        std::string op = entry["op"].get<std::string>();
        if (op == "minmax") {
            step.op = ScalingStep::Op::minmax;
            step.a = entry.at("min").get<double>();
            step.b = entry.at("max").get<double>();
        } else if (op == "log1p") {
            step.op = ScalingStep::Op::log1p;
        } else if (op == "clip") {
            step.op = ScalingStep::Op::clip;
            step.a = entry.at("lo").get<double>();
            step.b = entry.at("hi").get<double>();
        } else {
            throw DataError("scaling record: unknown op \"" + op + "\"");
        }
        record.steps.push_back(std::move(step));
    }
    return record;
}

} // namespace sbd::features
