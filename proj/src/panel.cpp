#include "sboa/panel.hpp"

#include "sboa/error.hpp"
#include "sboa/series.hpp"

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace sboa {

std::string_view family_name(Family f) {
    switch (f) {
    case Family::stl_es: return "stl_es";
    case Family::ar_p: return "ar_p";
    case Family::additive: return "additive";
    case Family::lasso_hd: return "lasso_hd";
    }
    return "?";
}

Family parse_family(std::string_view s) {
    for (auto f : {Family::stl_es, Family::ar_p, Family::additive, Family::lasso_hd}) {
        if (family_name(f) == s) {
            return f;
        }
    }
    throw ConfigError(fmt::format("unknown model family '{}'", s));
}

std::string_view scale_name(Scale s) { return s == Scale::log ? "log" : "level"; }

Scale parse_scale(std::string_view s) {
    if (s == "log") {
        return Scale::log;
    }
    if (s == "level") {
        return Scale::level;
    }
    throw ConfigError(fmt::format("unknown target scale '{}'", s));
}

std::string ExpertSpec::name() const {
    return fmt::format("{}/w{}/{}", family_name(family), window_days, scale_name(scale));
}

ExpertPanel::ExpertPanel(std::vector<Date> issue_days, std::vector<ExpertSpec> experts, int first_horizon)
    : days_(std::move(issue_days)), experts_(std::move(experts)), first_horizon_(first_horizon) {
    for (std::size_t i = 0; i < experts_.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (experts_[i] == experts_[j]) {
                throw ConfigError(fmt::format("duplicate expert {}", experts_[i].name()));
            }
        }
    }
    const std::size_t n = days_.size() * kHorizonCount * experts_.size();
    values_.assign(n, kMissing);
    written_.assign(n, 0);
}

void ExpertPanel::set(std::size_t d, std::size_t h, std::size_t k, double value) {
    if (d >= n_days() || h >= static_cast<std::size_t>(kHorizonCount) || k >= n_experts()) {
        throw DataError(fmt::format("panel index ({},{},{}) out of range", d, h, k));
    }
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw DataError(fmt::format("panel value for ({},{},{}) must be positive and finite, got {}", d, h, k, value));
    }
    const auto o = offset(d, h, k);
    if (written_[o]) {
        throw DataError(fmt::format("panel entry ({},{},{}) written twice", d, h, k));
    }
    values_[o] = value;
    written_[o] = 1;
}

void ExpertPanel::set_day(std::size_t d, std::size_t k, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(kHorizonCount)) {
        throw DataError("set_day expects 24 values");
    }
    for (std::size_t h = 0; h < values.size(); ++h) {
        set(d, h, k, values[h]);
    }
}

bool ExpertPanel::complete(std::size_t d, std::size_t k) const {
    for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
        if (!has(d, h, k)) {
            return false;
        }
    }
    return true;
}

Eigen::MatrixXd ExpertPanel::slice(std::size_t d) const {
    Eigen::MatrixXd out(kHorizonCount, static_cast<Eigen::Index>(n_experts()));
    for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
        for (std::size_t k = 0; k < n_experts(); ++k) {
            out(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(k)) = values_[offset(d, h, k)];
        }
    }
    return out;
}

ExpertPanel ExpertPanel::subset(std::span<const std::size_t> experts, std::size_t day_begin, std::size_t day_end) const {
    std::vector<ExpertSpec> specs;
    for (auto k : experts) {
        specs.push_back(experts_.at(k));
    }
    ExpertPanel out(std::vector<Date>(days_.begin() + static_cast<long>(day_begin), days_.begin() + static_cast<long>(day_end)),
                    std::move(specs), first_horizon_);
    for (std::size_t d = day_begin; d < day_end; ++d) {
        for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
            for (std::size_t j = 0; j < experts.size(); ++j) {
                const auto src = offset(d, h, experts[j]);
                const auto dst = out.offset(d - day_begin, h, j);
                out.values_[dst] = values_[src];
                out.written_[dst] = written_[src];
            }
        }
    }
    return out;
}

bool operator==(const ExpertPanel& a, const ExpertPanel& b) {
    if (a.days_ != b.days_ || a.experts_ != b.experts_ || a.first_horizon_ != b.first_horizon_ ||
        a.written_ != b.written_) {
        return false;
    }
    for (std::size_t i = 0; i < a.values_.size(); ++i) {
        if (a.written_[i] && std::memcmp(&a.values_[i], &b.values_[i], sizeof(double)) != 0) {
            return false;
        }
    }
    return true;
}

void write_panel_csv(const ExpertPanel& panel, const std::string& panel_path, const std::string& experts_path) {
    {
        std::ofstream out(experts_path, std::ios::binary);
        if (!out) {
            throw DataError(fmt::format("cannot write '{}'", experts_path));
        }
        out << "k,name,family,window_days,scale\n";
        for (std::size_t k = 0; k < panel.n_experts(); ++k) {
            const auto& e = panel.experts()[k];
            out << fmt::format("{},{},{},{},{}\n", k, e.name(), family_name(e.family), e.window_days, scale_name(e.scale));
        }
    }
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "d,h,k,value\n");
    for (std::size_t d = 0; d < panel.n_days(); ++d) {
        const auto date = format_date(panel.issue_days()[d]);
        for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
            for (std::size_t k = 0; k < panel.n_experts(); ++k) {
                if (panel.has(d, h, k)) {
                    fmt::format_to(std::back_inserter(buf), "{},{},{},{}\n", date,
                                   panel.first_horizon() + static_cast<int>(h), k, panel.at(d, h, k));
                }
            }
        }
    }
    std::ofstream out(panel_path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", panel_path));
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') {
            field.pop_back();
        }
        out.push_back(field);
    }
    return out;
}

template <class T>
T to_number(const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw DataError(fmt::format("cannot parse '{}' as a number", s));
    }
    return v;
}

} // namespace

ExpertPanel read_panel_csv(const std::string& panel_path, const std::string& experts_path) {
    std::ifstream ein(experts_path);
    if (!ein) {
        throw DataError(fmt::format("cannot open '{}'", experts_path));
    }
    std::string line;
    std::getline(ein, line);
    std::vector<ExpertSpec> experts;
    while (std::getline(ein, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 5) {
            throw DataError(fmt::format("malformed expert row '{}'", line));
        }
        experts.push_back({parse_family(f[2]), to_number<int>(f[3]), parse_scale(f[4])});
    }

    std::ifstream pin(panel_path);
    if (!pin) {
        throw DataError(fmt::format("cannot open '{}'", panel_path));
    }
    std::getline(pin, line);
    struct Row {
        Date d;
        int h;
        std::size_t k;
        double v;
    };
    std::vector<Row> rows;
    std::map<Date, std::size_t> day_index;
    int min_h = 1000;
    while (std::getline(pin, line)) {
        if (line.empty()) {
            continue;
        }
        const auto f = split(line);
        if (f.size() != 4) {
            throw DataError(fmt::format("malformed panel row '{}'", line));
        }
        Row r{parse_date(f[0]), to_number<int>(f[1]), to_number<std::size_t>(f[2]), to_number<double>(f[3])};
        day_index.emplace(r.d, 0);
        min_h = std::min(min_h, r.h);
        rows.push_back(r);
    }
    std::vector<Date> days;
    for (auto& [d, i] : day_index) {
        i = days.size();
        days.push_back(d);
    }
    ExpertPanel panel(std::move(days), std::move(experts), rows.empty() ? 17 : min_h);
    for (const auto& r : rows) {
        panel.set(day_index.at(r.d), static_cast<std::size_t>(r.h - panel.first_horizon()), r.k, r.v);
    }
    return panel;
}

namespace {

constexpr char kMagic[8] = {'S', 'B', 'O', 'A', 'P', 'N', 'L', '1'};

template <class T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::istream& in, T& v) {
    return static_cast<bool>(in.read(reinterpret_cast<char*>(&v), sizeof(T)));
}

} // namespace

void write_panel_cache(const ExpertPanel& panel, std::uint64_t key, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError(fmt::format("cannot write '{}'", path));
    }
    out.write(kMagic, sizeof(kMagic));
    put(out, key);
    put(out, static_cast<std::int32_t>(panel.first_horizon()));
    put(out, static_cast<std::uint32_t>(panel.n_days()));
    put(out, static_cast<std::uint32_t>(panel.n_experts()));
    for (auto d : panel.issue_days()) {
        put(out, static_cast<std::int32_t>(d.time_since_epoch().count()));
    }
    for (const auto& e : panel.experts()) {
        put(out, static_cast<std::uint8_t>(e.family));
        put(out, static_cast<std::int32_t>(e.window_days));
        put(out, static_cast<std::uint8_t>(e.scale));
    }
    for (std::size_t d = 0; d < panel.n_days(); ++d) {
        for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
            for (std::size_t k = 0; k < panel.n_experts(); ++k) {
                put(out, panel.has(d, h, k) ? panel.at(d, h, k) : kMissing);
            }
        }
    }
}

bool read_panel_cache(const std::string& path, std::uint64_t key, ExpertPanel& out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return false;
    }
    char magic[8];
    if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        return false;
    }
    std::uint64_t stored = 0;
    std::int32_t first_h = 0;
    std::uint32_t n_days = 0, n_experts = 0;
    if (!get(in, stored) || stored != key || !get(in, first_h) || !get(in, n_days) || !get(in, n_experts)) {
        return false;
    }
    std::vector<Date> days(n_days);
    for (auto& d : days) {
        std::int32_t v = 0;
        if (!get(in, v)) {
            return false;
        }
        d = Date{std::chrono::days{v}};
    }
    std::vector<ExpertSpec> experts(n_experts);
    for (auto& e : experts) {
        std::uint8_t fam = 0, sc = 0;
        std::int32_t w = 0;
        if (!get(in, fam) || !get(in, w) || !get(in, sc)) {
            return false;
        }
        e = {static_cast<Family>(fam), w, static_cast<Scale>(sc)};
    }
    ExpertPanel panel(std::move(days), std::move(experts), first_h);
    for (std::size_t d = 0; d < n_days; ++d) {
        for (std::size_t h = 0; h < static_cast<std::size_t>(kHorizonCount); ++h) {
            for (std::size_t k = 0; k < n_experts; ++k) {
                double v = 0;
                if (!get(in, v)) {
                    return false;
                }
                if (!is_missing(v)) {
                    panel.set(d, h, k, v);
                }
            }
        }
    }
    out = std::move(panel);
    return true;
}

} // namespace sboa
