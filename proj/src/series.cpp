#include "sboa/series.hpp"

#include "sboa/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace sboa {

std::optional<std::size_t> HourlySeries::index_of(Timestamp t) const {
    if (t < start_) {
        return std::nullopt;
    }
    const auto offset = static_cast<std::size_t>((t - start_).count());
    if (offset >= length_) {
        return std::nullopt;
    }
    return offset;
}

bool HourlySeries::has(std::string_view name) const {
    return std::any_of(channels_.begin(), channels_.end(), [&](const auto& c) { return c.first == name; });
}

std::span<const double> HourlySeries::channel(std::string_view name) const {
    for (const auto& [n, values] : channels_) {
        if (n == name) {
            return values;
        }
    }
    throw DataError(fmt::format("series has no channel '{}'", name));
}

std::vector<std::string> HourlySeries::channel_names() const {
    std::vector<std::string> out;
    out.reserve(channels_.size());
    for (const auto& c : channels_) {
        out.push_back(c.first);
    }
    return out;
}

void HourlySeries::set_channel(std::string name, std::vector<double> values) {
    if (values.size() != length_) {
        throw DataError(fmt::format("channel '{}' has {} values, series has {}", name, values.size(), length_));
    }
    for (auto& [n, v] : channels_) {
        if (n == name) {
            v = std::move(values);
            return;
        }
    }
    channels_.emplace_back(std::move(name), std::move(values));
}

HourlySeries HourlySeries::with_channel(std::string name, std::vector<double> values) const {
    HourlySeries out = *this;
    out.set_channel(std::move(name), std::move(values));
    return out;
}

HourlySeries HourlySeries::slice(std::size_t begin, std::size_t end) const {
    end = std::min(end, length_);
    begin = std::min(begin, end);
    HourlySeries out(time_at(begin), end - begin);
    for (const auto& [n, v] : channels_) {
        out.channels_.emplace_back(n, std::vector<double>(v.begin() + static_cast<long>(begin),
                                                          v.begin() + static_cast<long>(end)));
    }
    return out;
}

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
        s.remove_suffix(1);
    }
    return s;
}

double parse_value(std::string_view field, std::size_t line_no) {
    field = trim(field);
    if (field.empty() || field == "NA" || field == "NaN" || field == "nan") {
        return kMissing;
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size()) {
        throw DataError(fmt::format("line {}: cannot parse '{}' as a number", line_no, field));
    }
    return v;
}

} // namespace

HourlySeries parse_series_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        auto line = trim(text.substr(pos, nl - pos));
        if (!line.empty()) {
            lines.push_back(text.substr(pos, nl - pos));
        }
        pos = nl + 1;
    }
    if (lines.empty()) {
        throw DataError("empty CSV input");
    }
    const auto header = split_fields(lines[0]);
    if (header.empty() || trim(header[0]) != "timestamp") {
        throw DataError("CSV header must start with a 'timestamp' column");
    }
    const std::size_t n_cols = header.size() - 1;
    const std::size_t n_rows = lines.size() - 1;
    if (n_rows == 0) {
        throw DataError("CSV input has no data rows");
    }
    std::vector<std::vector<double>> columns(n_cols, std::vector<double>(n_rows, kMissing));
    Timestamp start{};
    for (std::size_t r = 0; r < n_rows; ++r) {
        const auto fields = split_fields(lines[r + 1]);
        if (fields.size() != header.size()) {
            throw DataError(fmt::format("line {}: expected {} fields, got {}", r + 2, header.size(), fields.size()));
        }
        const Timestamp t = parse_timestamp(trim(fields[0]));
        if (r == 0) {
            start = t;
        } else {
            const auto expected = start + std::chrono::hours{static_cast<long>(r)};
            if (t != expected) {
                throw DataError(fmt::format("line {}: timestamp {} breaks the hourly sequence (expected {})", r + 2,
                                            format_timestamp(t), format_timestamp(expected)));
            }
        }
        for (std::size_t c = 0; c < n_cols; ++c) {
            columns[c][r] = parse_value(fields[c + 1], r + 2);
        }
    }
    HourlySeries out(start, n_rows);
    for (std::size_t c = 0; c < n_cols; ++c) {
        out.set_channel(std::string(trim(header[c + 1])), std::move(columns[c]));
    }
    return out;
}

HourlySeries read_series_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError(fmt::format("cannot open '{}'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_series_csv(buffer.str());
}

std::string format_series_csv(const HourlySeries& series) {
    fmt::memory_buffer out;
    const auto names = series.channel_names();
    fmt::format_to(std::back_inserter(out), "timestamp");
    std::vector<std::span<const double>> cols;
    for (const auto& n : names) {
        fmt::format_to(std::back_inserter(out), ",{}", n);
        cols.push_back(series.channel(n));
    }
    out.push_back('\n');
    for (std::size_t i = 0; i < series.size(); ++i) {
        fmt::format_to(std::back_inserter(out), "{}", format_timestamp(series.time_at(i)));
        for (const auto& c : cols) {
            if (is_missing(c[i])) {
                out.push_back(',');
            } else {
                fmt::format_to(std::back_inserter(out), ",{}", c[i]);
            }
        }
        out.push_back('\n');
    }
    return fmt::to_string(out);
}

void write_series_csv(const HourlySeries& series, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path));
    }
    out << format_series_csv(series);
}

} // namespace sboa
