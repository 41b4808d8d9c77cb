#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace ahpipe::csv {

// Headerless numeric matrix; every row must have the same column count.
// Throws a data error naming the offending line otherwise.
Eigen::MatrixXd read_matrix(const std::string& path);
void write_matrix(const std::string& path, const Eigen::MatrixXd& m);

// Generic table with a header row; cells stay as strings.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};
Table read_table(const std::string& path);

// Feature table keyed by id: header "id,<name>,...", one row per id.
struct IdTable {
    std::vector<std::string> ids;
    std::vector<std::string> feature_names;
    Eigen::MatrixXd values;  // rows aligned with ids
};
IdTable read_id_table(const std::string& path);
void write_id_table(const std::string& path, const IdTable& table);

std::vector<std::string> split_line(const std::string& line, char sep = ',');
double parse_double(const std::string& text, const std::string& context);

// Decimal text with 9 significant digits; fixture round trips rely on this.
std::string format_double(double v);

}  // namespace ahpipe::csv
