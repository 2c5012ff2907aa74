#include "sboa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace sboa {

namespace {

struct Ar1 {
    double phi;
    double sd;
    double state = 0.0;
    double next(std::mt19937_64& rng, std::normal_distribution<double>& z) {
        state = phi * state + sd * z(rng);
        return state;
    }
};

} // namespace

SyntheticData simulate(const SyntheticOptions& o) {
    const std::size_t n = o.days * kHoursPerDay;
    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> z(0.0, 1.0);
    constexpr double two_pi = 2.0 * std::numbers::pi;

    std::vector<double> temp(n), cloud(n), pressure(n), humidity(n), wind(n), wdir(n);
    Ar1 t_noise{0.97, 0.35}, c_noise{0.95, 0.25}, p_noise{0.99, 0.6}, h_noise{0.96, 1.5}, w_noise{0.9, 0.35},
        d_noise{0.98, 6.0};
    for (std::size_t t = 0; t < n; ++t) {
        const Timestamp ts = o.start + std::chrono::hours{static_cast<long>(t)};
        const double year_phase = static_cast<double>(ts.time_since_epoch().count()) / (24.0 * 365.24);
        const double hod = static_cast<double>(hour_of_day(ts) - 1);
        temp[t] = 10.0 - 9.0 * std::cos(two_pi * (year_phase - 0.04)) - 3.5 * std::cos(two_pi * (hod - 3.0) / 24.0) +
                  3.0 * t_noise.next(rng, z);
        cloud[t] = 1.0 / (1.0 + std::exp(-(0.3 * std::cos(two_pi * year_phase) + 2.0 * c_noise.next(rng, z))));
        pressure[t] = 1013.0 + 8.0 * p_noise.next(rng, z);
        humidity[t] = std::clamp(72.0 + 8.0 * std::cos(two_pi * year_phase) + 4.0 * h_noise.next(rng, z), 5.0, 100.0);
        wind[t] = std::abs(3.5 + 2.0 * w_noise.next(rng, z));
        wdir[t] = std::fmod(200.0 + 30.0 * d_noise.next(rng, z) + 3600.0, 360.0);
    }

    SyntheticData out;
    out.clean_log_load.resize(n);
    out.holiday.assign(n, 0);
    std::vector<double> load(n);
    Ar1 noise{o.noise_phi, o.noise_sd};
    const double base = std::log(o.level);
    for (std::size_t t = 0; t < n; ++t) {
        const Timestamp ts = o.start + std::chrono::hours{static_cast<long>(t)};
        const double year_phase = static_cast<double>(ts.time_since_epoch().count()) / (24.0 * 365.24);
        const double hod = static_cast<double>(hour_of_day(ts) - 1);
        const int dow = day_of_week(ts);
        const double daily = -o.daily_amplitude * std::cos(two_pi * (hod - 1.0) / 24.0) -
                             0.4 * o.daily_amplitude * std::cos(2.0 * two_pi * (hod - 7.0) / 24.0);
        const double weekend = dow == 6 ? -0.6 * o.weekend_dip : (dow == 7 ? -o.weekend_dip : 0.0);
        const double annual = o.annual_amplitude * std::cos(two_pi * (year_phase - 0.02));
        const double weather_term = o.weather ? o.temperature_effect * std::abs(temp[t] - 16.0) + 0.02 * cloud[t] : 0.0;
        const double l = base + daily + weekend * (0.6 + 0.4 * std::sin(two_pi * hod / 24.0) * std::sin(two_pi * hod / 24.0)) +
                         annual + weather_term + noise.next(rng, z);
        out.clean_log_load[t] = l;
        const auto md = month_day_of(ts);
        bool hol = false;
        for (const auto& h : o.holidays) {
            hol = hol || h == md;
        }
        out.holiday[t] = hol ? 1 : 0;
        load[t] = std::exp(l + (hol ? std::log1p(o.holiday_effect) : 0.0));
    }

    out.series = HourlySeries(o.start, n);
    out.series.set_channel("load", std::move(load));
    if (o.weather) {
        // day-ahead forecasts: actual plus an error that is constant within each day and slowly drifts in it
        auto forecast = [&](const std::vector<double>& x, double scale, double lo, double hi) {
            std::vector<double> f(n);
            double day_err = 0.0, drift = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                if (t % kHoursPerDay == 0) {
                    day_err = o.forecast_error_sd * scale * z(rng);
                }
                drift = 0.8 * drift + 0.3 * o.forecast_error_sd * scale * z(rng);
                f[t] = std::clamp(x[t] + day_err + drift, lo, hi);
            }
            return f;
        };
        const double inf = std::numeric_limits<double>::infinity();
        auto temp_fc = forecast(temp, 3.0, -inf, inf);
        auto cloud_fc = forecast(cloud, 0.2, 0.0, 1.0);
        auto pressure_fc = forecast(pressure, 4.0, -inf, inf);
        auto wind_fc = forecast(wind, 1.0, 0.0, inf);
        auto wdir_fc = forecast(wdir, 20.0, -inf, inf);
        for (auto& v : wdir_fc) {
            v = std::fmod(std::fmod(v, 360.0) + 360.0, 360.0);
        }
        out.series.set_channel("humidity", std::move(humidity));
        out.series.set_channel("pressure", std::move(pressure));
        out.series.set_channel("cloud_cover", std::move(cloud));
        out.series.set_channel("temperature", std::move(temp));
        out.series.set_channel("wind_speed", std::move(wind));
        out.series.set_channel("wind_dir_deg", std::move(wdir));
        out.series.set_channel("pressure_fc", std::move(pressure_fc));
        out.series.set_channel("cloud_cover_fc", std::move(cloud_fc));
        out.series.set_channel("temperature_fc", std::move(temp_fc));
        out.series.set_channel("wind_speed_fc", std::move(wind_fc));
        out.series.set_channel("wind_dir_deg_fc", std::move(wdir_fc));
    }
    return out;
}

} // namespace sboa
