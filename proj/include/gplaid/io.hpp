#pragma once

// Delimited-text readers and writers for matrices and edge lists.

#include "gplaid/plaid.hpp"

#include <filesystem>
#include <string>
#include <tuple>
#include <vector>

namespace gplaid::io {

/// Labelled numeric table: header row of column ids, first column of row ids.
/// Comma, tab and semicolon delimiters are detected from the header line.
/// Missing or non-numeric cells raise DataError naming the file and line.
ExpressionMatrix read_labelled_matrix(const std::filesystem::path& path);

/// Writes a labelled matrix in the same layout read_labelled_matrix accepts.
void write_labelled_matrix(const std::filesystem::path& path, const Matrix& values,
                           const std::vector<std::string>& row_ids,
                           const std::vector<std::string>& col_ids, const std::string& corner = "id");

struct EdgeRecord {
    std::string a;
    std::string b;
    double distance;
};

/// Three-column (node, node, distance) file. Lines starting with '#' and a
/// non-numeric header line are skipped.
std::vector<EdgeRecord> read_edge_list(const std::filesystem::path& path);

/// Reads a two-column (id, group) file, header optional.
std::vector<std::pair<std::string, std::string>> read_pairs(const std::filesystem::path& path);

/// Writes `content` to `path` through a temporary file and rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_file(const std::filesystem::path& path);

/// Shortest round-trippable text form of a double.
std::string format_double(double v);

}  // namespace gplaid::io
