#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "ahpipe/error.hpp"
#include "ahpipe/metrics.hpp"

namespace ahpipe {

nlohmann::json to_json(const Eigen::VectorXd& v);
nlohmann::json to_json(const Eigen::MatrixXd& m);
nlohmann::json to_json(const MetricReport& report);
Eigen::VectorXd vector_from_json(const nlohmann::json& j);
Eigen::MatrixXd matrix_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace ahpipe
