#include "ahpipe/json_util.hpp"

#include <fstream>

namespace ahpipe {

using nlohmann::json;

json to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const MetricReport& r) {
    return json{{"bce", r.bce},
                {"f1_macro", r.f1_macro},
                {"f1_weighted", r.f1_weighted},
                {"confusion",
                 {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"tn", r.confusion.tn}, {"fn", r.confusion.fn}}},
                {"confusion_normalized",
                 {{r.confusion_normalized[0][0], r.confusion_normalized[0][1]},
                  {r.confusion_normalized[1][0], r.confusion_normalized[1][1]}}}};
}

Eigen::VectorXd vector_from_json(const json& j) {
    if (!j.is_array()) throw_data("expected a JSON array of numbers");
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw_data("expected a JSON array of arrays");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    if (rows == 0) return Eigen::MatrixXd(0, 0);
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        if (static_cast<Eigen::Index>(j[static_cast<size_t>(r)].size()) != cols)
            throw_data("ragged JSON matrix");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = j[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    }
    return m;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw_data("invalid JSON in " + path + ": " + e.what());
    }
}

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write file: " + path);
    out << j.dump(2) << '\n';
}

}  // namespace ahpipe
