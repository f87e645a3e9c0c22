#include "sbd/learn/dataset.hpp"

#include "sbd/error.hpp"

namespace sbd::learn {

Dataset Dataset::make(Eigen::MatrixXd X, Eigen::VectorXd y,
                      std::vector<std::string> feature_names) {
    if (X.rows() < 1 || X.cols() < 1)
        throw DataError("dataset must have at least one row and one column");
    if (y.size() != X.rows())
        throw DataError("dataset has " + std::to_string(X.rows()) + " rows but " +
                        std::to_string(y.size()) + " labels");
    if (!X.allFinite() || !y.allFinite())
        throw DataError("dataset contains NaN or infinite values");
    for (Eigen::Index i = 0; i < y.size(); ++i)
        if (y(i) != 0.0 && y(i) != 1.0)
            throw DataError("label at row " + std::to_string(i) + " is not 0 or 1");

    if (feature_names.empty())
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            feature_names.push_back("f" + std::to_string(j + 1));
    if (static_cast<Eigen::Index>(feature_names.size()) != X.cols())
        throw DataError("dataset has " + std::to_string(X.cols()) + " columns but " +
                        std::to_string(feature_names.size()) + " feature names");

    Dataset dataset;
    dataset.X = std::move(X);
    dataset.y = std::move(y);
    dataset.feature_names = std::move(feature_names);
    return dataset;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
    Eigen::MatrixXd sX(static_cast<Eigen::Index>(indices.size()), X.cols());
    Eigen::VectorXd sy(static_cast<Eigen::Index>(indices.size()));
    for (std::size_t i = 0; i < indices.size(); ++i) {
        sX.row(static_cast<Eigen::Index>(i)) = X.row(static_cast<Eigen::Index>(indices[i]));
        sy(static_cast<Eigen::Index>(i)) = y(static_cast<Eigen::Index>(indices[i]));
    }
    return Dataset::make(std::move(sX), std::move(sy), feature_names);
}

} // namespace sbd::learn
