#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "sbd/learn/forest.hpp"
#include "sbd/learn/gbt.hpp"
#include "sbd/learn/glm.hpp"
#include "sbd/learn/logistic.hpp"
#include "sbd/learn/mlp.hpp"
#include "sbd/learn/naive_bayes.hpp"
#include "sbd/learn/tree.hpp"

namespace sbd::learn {

enum class Family { nb, glm, lr, dt, rf, gbt, mlp };

inline constexpr Family kAllFamilies[] = {Family::nb,  Family::glm, Family::lr, Family::dt,
                                          Family::rf,  Family::gbt, Family::mlp};

std::string_view family_name(Family family);
Family family_from_name(std::string_view name);

using Model = std::variant<NBModel, GLMModel, LogisticModel, TreeModel, ForestModel,
                           GBTModel, MLPModel>;

Family family_of(const Model& model);

// Score in [0, 1]; dimension mismatches raise a data error.
double predict(const Model& model, const Eigen::VectorXd& x);
Eigen::VectorXd predict_all(const Model& model, const Eigen::MatrixXd& X);

// Lossless round-trip: family tag, format version, config, fitted parameters.
std::string model_to_json(const Model& model);
Model model_from_json(const std::string& text);

void write_model_json(const Model& model, const std::string& path);
Model read_model_json(const std::string& path);

} // namespace sbd::learn
