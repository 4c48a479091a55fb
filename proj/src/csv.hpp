#pragma once

// Minimal CSV helpers shared by the log writer/reader and the analysis
// outputs. Numbers use the shortest round-trip representation so that a
// written table reads back bit-identical.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace drivesim::csv {

template <typename T>
void append_number(std::string& out, T v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, end);
}

void append_field(std::string& out, std::string_view text);

class Row {
public:
    explicit Row(std::string& out) : out_(out) {}
    ~Row() { out_.push_back('\n'); }

    template <typename T>
    Row& num(T v) {
        sep();
        append_number(out_, v);
        return *this;
    }
    Row& text(std::string_view s) {
        sep();
        append_field(out_, s);
        return *this;
    }

private:
    void sep() {
        if (!first_) out_.push_back(',');
        first_ = false;
    }
    std::string& out_;
    bool first_ = true;
};

struct Table {
    std::string file;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;  ///< source line of each row
};

/// Splits RFC 4180 style text (quoted fields, doubled quotes).
Table parse(std::string_view text, std::string file);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

/// Raised by Reader; carries the column name for schema errors.
struct ColumnError : std::runtime_error {
    ColumnError(std::string col, const std::string& what)
        : std::runtime_error(what), column(std::move(col)) {}
    std::string column;
};

/// Verifies the header and gives typed access to fields.
class Reader {
public:
    Reader(const Table& t, std::vector<std::string_view> expected);

    std::size_t size() const { return t_.rows.size(); }

    template <typename T>
    T get(std::size_t row, std::size_t col) const {
        const std::string& s = field(row, col);
        T v{};
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc{} || ptr != s.data() + s.size()) bad(row, col, s);
        return v;
    }
    const std::string& field(std::size_t row, std::size_t col) const;

private:
    [[noreturn]] void bad(std::size_t row, std::size_t col, const std::string& value) const;

    const Table& t_;
    std::vector<std::string_view> cols_;
};

}  // namespace drivesim::csv
