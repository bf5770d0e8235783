#include "gplaid/io.hpp"

#include "gplaid/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace gplaid::io {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\r' || s[b] == '\n' || s[b] == '"')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\r' || s[e - 1] == '\n' || s[e - 1] == '"')) --e;
    return std::string(s.substr(b, e - b));
}

char detect_delimiter(const std::string& line) {
    for (char c : {'\t', ',', ';'}) {
        if (line.find(c) != std::string::npos) return c;
    }
    return ',';
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(trim(std::string_view(line).substr(start)));
            break;
        }
        out.push_back(trim(std::string_view(line).substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

bool skippable(const std::string& line) {
    const auto t = trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

ExpressionMatrix read_labelled_matrix(const fs::path& path) {
    auto in = open_input(path);
    std::string line;
    while (std::getline(in, line) && skippable(line)) {}
    if (skippable(line)) throw DataError("'" + path.string() + "' is empty");
    const char delim = detect_delimiter(line);
    auto header = split(line, delim);
    if (header.size() < 2) throw DataError("'" + path.string() + "': header needs at least one column id");

    ExpressionMatrix y;
    y.col_ids.assign(header.begin() + 1, header.end());
    const std::size_t q = y.col_ids.size();
    std::vector<double> cells;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        auto fields = split(line, delim);
        if (fields.size() != q + 1) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected "
                            + std::to_string(q + 1) + " fields, found " + std::to_string(fields.size()));
        }
        y.row_ids.push_back(fields[0]);
        for (std::size_t j = 1; j <= q; ++j) {
            double v = 0.0;
            if (!parse_double(fields[j], v)) {
                throw DataError("'" + path.string() + "' line " + std::to_string(line_no)
                                + ": missing or non-numeric value '" + fields[j] + "'");
            }
            cells.push_back(v);
        }
    }
    const auto p = static_cast<Eigen::Index>(y.row_ids.size());
    y.values.resize(p, static_cast<Eigen::Index>(q));
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(q); ++j) {
            y.values(i, j) = cells[static_cast<std::size_t>(i) * q + static_cast<std::size_t>(j)];
        }
    }
    y.validate();
    return y;
}

std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

void write_labelled_matrix(const fs::path& path, const Matrix& values,
                           const std::vector<std::string>& row_ids,
                           const std::vector<std::string>& col_ids, const std::string& corner) {
    std::ostringstream out;
    out << corner;
    for (const auto& c : col_ids) out << ',' << c;
    out << '\n';
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        out << row_ids[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < values.cols(); ++j) out << ',' << format_double(values(i, j));
        out << '\n';
    }
    write_file_atomic(path, out.str());
}

std::vector<EdgeRecord> read_edge_list(const fs::path& path) {
    auto in = open_input(path);
    std::vector<EdgeRecord> edges;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        auto fields = split(line, detect_delimiter(line));
        if (fields.size() != 3) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected 3 fields");
        }
        double d = 0.0;
        if (!parse_double(fields[2], d)) {
            if (first) {
                first = false;
                continue;  // header
            }
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": bad distance '"
                            + fields[2] + "'");
        }
        first = false;
        edges.push_back({fields[0], fields[1], d});
    }
    return edges;
}

std::vector<std::pair<std::string, std::string>> read_pairs(const fs::path& path) {
    auto in = open_input(path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (skippable(line)) continue;
        auto fields = split(line, detect_delimiter(line));
        if (fields.size() != 2) {
            throw DataError("'" + path.string() + "' line " + std::to_string(line_no) + ": expected 2 fields");
        }
        out.emplace_back(fields[0], fields[1]);
    }
    return out;
}

void write_file_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw RuntimeError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw RuntimeError("write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw RuntimeError("cannot rename '" + tmp.string() + "': " + ec.message());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace gplaid::io
