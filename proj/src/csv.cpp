#include "ahpipe/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ahpipe/error.hpp"

namespace ahpipe::csv {

namespace {

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw_data("cannot open file: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

}  // namespace

std::vector<std::string> split_line(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double parse_double(const std::string& text, const std::string& context) {
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || (end && *end != '\0') || errno == ERANGE)
        throw_data("invalid number '" + text + "' (" + context + ")");
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

Eigen::MatrixXd read_matrix(const std::string& path) {
    auto lines = read_lines(path);
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto cells = split_line(lines[i]);
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto& c : cells)
            row.push_back(parse_double(c, path + " line " + std::to_string(i + 1)));
        if (!rows.empty() && row.size() != rows.front().size())
            throw_data("parse error at line " + std::to_string(i + 1) + " of " + path + ": expected " +
                       std::to_string(rows.front().size()) + " columns, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw_data("empty input: " + path + " has no data rows");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    return m;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path);
    if (!out) throw_data("cannot write file: " + path);
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) out << ',';
            out << format_double(m(r, c));
        }
        out << '\n';
    }
}

Table read_table(const std::string& path) {
    auto lines = read_lines(path);
    if (lines.empty()) throw_data("empty input: " + path);
    Table t;
    t.header = split_line(lines[0]);
    for (size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto cells = split_line(lines[i]);
        if (cells.size() != t.header.size())
            throw_data("parse error at line " + std::to_string(i + 1) + " of " + path + ": expected " +
                       std::to_string(t.header.size()) + " columns, got " + std::to_string(cells.size()));
        t.rows.push_back(std::move(cells));
    }
    return t;
}

IdTable read_id_table(const std::string& path) {
    Table t = read_table(path);
    if (t.header.empty() || t.header[0] != "id")
        throw_data("feature table " + path + " must start with an 'id' column");
    if (t.rows.empty()) throw_data("empty input: " + path + " has no data rows");
    IdTable out;
    out.feature_names.assign(t.header.begin() + 1, t.header.end());
    out.ids.reserve(t.rows.size());
    out.values.resize(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(out.feature_names.size()));
    for (size_t r = 0; r < t.rows.size(); ++r) {
        out.ids.push_back(t.rows[r][0]);
        for (size_t c = 1; c < t.rows[r].size(); ++c)
            out.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c - 1)) =
                parse_double(t.rows[r][c], path + " line " + std::to_string(r + 2));
    }
    return out;
}

void write_id_table(const std::string& path, const IdTable& table) {
    if (static_cast<Eigen::Index>(table.ids.size()) != table.values.rows())
        throw_data("id table rows do not match ids");
    std::ofstream out(path);
    if (!out) throw_data("cannot write file: " + path);
    out << "id";
    for (const auto& name : table.feature_names) out << ',' << name;
    out << '\n';
    for (Eigen::Index r = 0; r < table.values.rows(); ++r) {
        out << table.ids[static_cast<size_t>(r)];
        for (Eigen::Index c = 0; c < table.values.cols(); ++c) out << ',' << format_double(table.values(r, c));
        out << '\n';
    }
}

}  // namespace ahpipe::csv
