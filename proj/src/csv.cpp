#include "csv.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace drivesim::csv {

void append_field(std::string& out, std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) {
        out.append(text);
        return;
    }
    out.push_back('"');
    for (char c : text) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
}

Table parse(std::string_view text, std::string file) {
    Table t;
    t.file = std::move(file);
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool row_has_content = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_row = [&] {
        fields.push_back(std::move(cur));
        cur.clear();
        if (t.header.empty()) {
            t.header = std::move(fields);
        } else {
            t.rows.push_back(std::move(fields));
            t.lines.push_back(row_line);
        }
        fields.clear();
        row_has_content = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                cur.push_back(c);
            }
            continue;
        }
        if (!row_has_content) row_line = line;
        switch (c) {
            case '"':
                quoted = true;
                row_has_content = true;
                break;
            case ',':
                fields.push_back(std::move(cur));
                cur.clear();
                row_has_content = true;
                break;
            case '\r':
                break;
            case '\n':
                if (row_has_content || !cur.empty()) end_row();
                ++line;
                break;
            default:
                cur.push_back(c);
                row_has_content = true;
        }
    }
    if (row_has_content || !cur.empty()) end_row();
    return t;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Reader::Reader(const Table& t, std::vector<std::string_view> expected)
    : t_(t), cols_(std::move(expected)) {
    for (auto col : cols_) {
        if (std::find(t.header.begin(), t.header.end(), col) == t.header.end())
            throw ColumnError(std::string(col),
                              t.file + ": missing column '" + std::string(col) + "'");
    }
    for (const auto& h : t.header) {
        if (std::find(cols_.begin(), cols_.end(), h) == cols_.end())
            throw ColumnError(h, t.file + ": unexpected column '" + h + "'");
    }
    for (std::size_t i = 0; i < cols_.size(); ++i) {
        if (t.header[i] != cols_[i])
            throw ColumnError(std::string(cols_[i]), t.file + ": column '" + std::string(cols_[i]) +
                                                         "' out of order");
    }
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() != cols_.size())
            throw ColumnError(t.rows[r].size() < cols_.size()
                                  ? std::string(cols_[t.rows[r].size()])
                                  : std::string(cols_.back()),
                              t.file + ":" + std::to_string(t.lines[r]) + ": expected " +
                                  std::to_string(cols_.size()) + " fields, found " +
                                  std::to_string(t.rows[r].size()));
    }
}

const std::string& Reader::field(std::size_t row, std::size_t col) const { return t_.rows[row][col]; }

void Reader::bad(std::size_t row, std::size_t col, const std::string& value) const {
    throw ColumnError(std::string(cols_[col]), t_.file + ":" + std::to_string(t_.lines[row]) +
                                                   ": bad value '" + value + "' in column '" +
                                                   std::string(cols_[col]) + "'");
}

}  // namespace drivesim::csv
