#include "sboa/metrics.hpp"

#include "sboa/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace sboa {

MaeReport evaluate_mae(const std::map<Timestamp, double>& forecasts, const HourlySeries& actuals,
                       const std::string& channel) {
    const auto values = actuals.channel(channel);
    std::vector<std::string> missing;
    std::map<Date, std::pair<double, int>> by_day;
    for (const auto& [t, f] : forecasts) {
        const auto idx = actuals.index_of(t);
        if (!idx || std::isnan(values[*idx])) {
            missing.push_back(format_timestamp(t));
            continue;
        }
        auto& acc = by_day[date_of(t)];
        acc.first += std::abs(f - values[*idx]);
        acc.second += 1;
    }
    if (!missing.empty()) {
        std::string list;
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) {
            list += (i ? ", " : "") + missing[i];
        }
        throw DataError(fmt::format("{} forecast timestamps have no actual: {}{}", missing.size(), list,
                                    missing.size() > 20 ? ", ..." : ""));
    }
    MaeReport r;
    double total = 0.0;
    for (const auto& [d, acc] : by_day) {
        r.days.push_back(d);
        r.daily.push_back(acc.first / acc.second);
        total += r.daily.back();
    }
    r.overall = r.daily.empty() ? 0.0 : total / static_cast<double>(r.daily.size());
    return r;
}

} // namespace sboa
