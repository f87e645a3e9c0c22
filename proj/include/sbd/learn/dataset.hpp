#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sbd::learn {

// Supervised training input: n rows of d features with 0/1 labels.
struct Dataset {
    Eigen::MatrixXd X;                      // n x d
    Eigen::VectorXd y;                      // n entries, each 0.0 or 1.0
    std::vector<std::string> feature_names; // d names

    // Validates shapes, finiteness, and 0/1 labels; empty feature_names are
    // filled in as f1..fd. Throws DataError on violation.
    static Dataset make(Eigen::MatrixXd X, Eigen::VectorXd y,
                        std::vector<std::string> feature_names = {});

    Eigen::Index n() const { return X.rows(); }
    Eigen::Index d() const { return X.cols(); }

    Eigen::Index count(double label) const {
        return (y.array() == label).count();
    }
    bool both_classes_present() const { return count(0.0) > 0 && count(1.0) > 0; }

    // Row subset in the given index order.
    Dataset subset(const std::vector<std::size_t>& indices) const;
};

} // namespace sbd::learn
